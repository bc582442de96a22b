// qprim: command-line driver for the quasi-Banach primitive experiments.
//
// Links only the C interface. Exit codes: 0 success, 1 failed check or
// runtime error, 2 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qprim/qprim.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Usage {
  std::string what;
};

struct Failure {
  int code;
  std::string what;
};

struct Config {
  double p = 0.5;
  double q = 2.0;
  std::size_t m = 1024;
  std::size_t mt = 1024;
  double tol = 1e-3;
  std::vector<std::size_t> ns = {4, 16, 64, 256, 1024};
  std::string out = ".";
  std::uint64_t seed = 1;
  std::string tag;
  std::string input;
  std::string generator;
  std::size_t pairs = 10000;
  std::size_t iteration_cap = 0;
};

void check(qp_status s, const char* what) {
  if (s == QP_OK) return;
  const int code = (s == QP_ERR_INVALID_ARGUMENT || s == QP_ERR_INVALID_EXPONENT || s == QP_ERR_PARSE) ? kExitUsage
                                                                                                         : kExitFail;
  throw Failure{code, std::string(what) + ": " + qp_status_name(s) + ": " + qp_last_error()};
}

std::string take(char* s) {
  std::string r(s);
  qp_string_free(s);
  return r;
}

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{kExitFail, "cannot read " + path};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Output {
 public:
  Output(const Config& cfg, const std::string& command) : dir_(cfg.out), stem_(command + "-" + cfg.tag) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Failure{kExitFail, "cannot create " + dir_.string() + ": " + ec.message()};
  }

  void write(const std::string& suffix, const std::string& text) const {
    const fs::path path = dir_ / (stem_ + suffix);
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw Failure{kExitFail, "cannot write " + path.string()};
    std::cout << "wrote " << path.string() << "\n";
  }

  void csv(const std::string& text) const { write(".csv", text); }
  void json_file(const json& j) const { write(".json", j.dump(2) + "\n"); }

 private:
  fs::path dir_;
  std::string stem_;
};

struct Grid {
  qp_grid* g = nullptr;
  ~Grid() { qp_grid_destroy(g); }
};

struct Curve {
  qp_curve* c = nullptr;
  ~Curve() { qp_curve_destroy(c); }
};

struct Table {
  qp_table* t = nullptr;
  ~Table() { qp_table_destroy(t); }
};

// ---- commands ------------------------------------------------------------

int cmd_axioms(const Config& cfg) {
  qp_axioms_report r{};
  check(qp_axioms_sweep(cfg.p, cfg.m, cfg.pairs, cfg.seed, &r), "axioms");
  const std::size_t bad = r.triangle_violations + r.homogeneity_violations + r.disjoint_violations;

  std::string csv = "p,m,pairs,seed,triangle_violations,homogeneity_violations,disjoint_violations,worst_triangle_ratio\n";
  csv += num(cfg.p) + "," + std::to_string(cfg.m) + "," + std::to_string(r.pairs) + "," + std::to_string(cfg.seed) +
         "," + std::to_string(r.triangle_violations) + "," + std::to_string(r.homogeneity_violations) + "," +
         std::to_string(r.disjoint_violations) + "," + num(r.worst_triangle_ratio) + "\n";
  const Output out(cfg, "axioms");
  out.csv(csv);
  out.json_file({{"p", cfg.p},
                 {"m", cfg.m},
                 {"pairs", r.pairs},
                 {"seed", cfg.seed},
                 {"triangle_violations", r.triangle_violations},
                 {"homogeneity_violations", r.homogeneity_violations},
                 {"disjoint_violations", r.disjoint_violations},
                 {"worst_triangle_ratio", r.worst_triangle_ratio},
                 {"passed", bad == 0}});
  std::cout << "axioms p=" << num(cfg.p) << " pairs=" << r.pairs << " violations=" << bad
            << " worst_ratio=" << num(r.worst_triangle_ratio) << "\n";
  return bad == 0 ? kExitOk : kExitFail;
}

Grid lift_input(const Config& cfg) {
  Grid x;
  if (!cfg.input.empty()) {
    std::string text = read_file(cfg.input);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
      check(qp_grid_from_json(text.c_str(), &x.g), "input");
      return x;
    }
    // First line that is neither blank nor a comment.
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty() && line[0] != '#') break;
    }
    check(qp_grid_from_csv(line.c_str(), &x.g), "input");
    return x;
  }
  const std::string gen = cfg.generator.empty() ? "constant" : cfg.generator;
  std::vector<double> cells(cfg.m, 0.0);
  if (gen == "constant") {
    cells.assign(cfg.m, 1.0);
  } else if (gen == "random") {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (auto& c : cells) c = u(rng);
  } else if (gen != "zero") {
    throw Usage{"lift generator must be zero, constant or random"};
  }
  check(qp_grid_create(cells.data(), cells.size(), &x.g), "generator");
  if (gen == "random") {
    double norm = 0.0;
    check(qp_lp_norm(x.g, cfg.p, &norm), "norm");
    if (norm > 0.0) {
      for (auto& c : cells) c /= norm;
      qp_grid_destroy(x.g);
      x.g = nullptr;
      check(qp_grid_create(cells.data(), cells.size(), &x.g), "generator");
    }
  }
  return x;
}

int cmd_lift(const Config& cfg) {
  const Grid x = lift_input(cfg);
  qp_lift* f = nullptr;
  check(qp_lift_create(x.g, cfg.p, &f), "lift");
  std::unique_ptr<qp_lift, void (*)(qp_lift*)> guard(f, qp_lift_destroy);

  std::vector<double> deltas;
  for (int k = 2; k <= 14; ++k) deltas.push_back(std::ldexp(1.0, -k));
  std::vector<double> quotients(deltas.size(), 0.0);
  qp_rate_fit fit{};
  check(qp_lift_rate_check(f, deltas.data(), deltas.size(), 1, quotients.data(), &fit), "rate check");
  double c1 = 0.0;
  check(qp_lift_c1_norm(f, &c1), "C1 norm");
  double xnorm = 0.0;
  check(qp_lp_norm(x.g, cfg.p, &xnorm), "norm");

  const double expected = 1.0 / cfg.p - 1.0;
  const bool passed = fit.degenerate != 0 || std::fabs(fit.slope - expected) < 1e-2;

  std::string csv = "delta,quotient\n";
  json rows = json::array();
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    csv += num(deltas[i]) + "," + num(quotients[i]) + "\n";
    rows.push_back({{"delta", deltas[i]}, {"quotient", quotients[i]}});
  }
  const Output out(cfg, "lift");
  out.csv(csv);
  out.json_file({{"p", cfg.p},
                 {"m", qp_grid_size(x.g)},
                 {"x_norm", xnorm},
                 {"c1_norm", c1},
                 {"expected_exponent", expected},
                 {"slope", fit.degenerate ? json(nullptr) : jnum(fit.slope)},
                 {"intercept", fit.degenerate ? json(nullptr) : jnum(fit.intercept)},
                 {"degenerate", fit.degenerate != 0},
                 {"passed", passed},
                 {"rows", rows}});
  if (fit.degenerate) {
    std::cout << "lift degenerate: x = 0, every quotient vanishes\n";
  } else {
    std::cout << "lift p=" << num(cfg.p) << " exponent=" << num(fit.slope) << " expected=" << num(expected)
              << " c1=" << num(c1) << "\n";
  }
  return passed ? kExitOk : kExitFail;
}

int cmd_primitive(const Config& cfg) {
  Curve f;
  std::string source;
  if (!cfg.input.empty()) {
    check(qp_curve_from_csv(read_file(cfg.input).c_str(), &f.c), "input");
    source = cfg.input;
  } else {
    source = cfg.generator.empty() ? "indicator-path" : cfg.generator;
    check(qp_curve_generator(source.c_str(), cfg.m, cfg.mt, cfg.p, &f.c), "generator");
  }

  qp_primitive_options opts;
  qp_primitive_options_default(&opts);
  opts.tol = cfg.tol;
  opts.time_cells = cfg.mt;
  if (cfg.iteration_cap > 0) opts.iteration_cap = cfg.iteration_cap;

  qp_primitive* r = nullptr;
  const qp_status s = qp_primitive_construct(f.c, cfg.p, &opts, &r);
  if (s == QP_ERR_ITERATION_CAP) {
    std::cerr << "qprim primitive: " << qp_last_error() << "\n";
    return kExitFail;
  }
  check(s, "primitive");
  std::unique_ptr<qp_primitive, void (*)(qp_primitive*)> guard(r, qp_primitive_destroy);

  qp_primitive_summary sum{};
  check(qp_primitive_summary_get(r, &sum), "summary");
  char* trace = nullptr;
  check(qp_primitive_trace_csv(r, &trace), "trace");
  char* text = nullptr;
  check(qp_primitive_to_json(r, 0, &text), "json");
  json j = json::parse(take(text));
  j["source"] = source;
  j["m"] = cfg.m;
  j["mt"] = cfg.mt;

  const bool passed = sum.residual <= cfg.tol + sum.discretization_slack;
  j["passed"] = passed;
  const Output out(cfg, "primitive");
  out.csv(take(trace));
  out.json_file(j);
  std::cout << "primitive " << source << " iterations=" << sum.iterations << " residual=" << num(sum.residual)
            << " slack=" << num(sum.discretization_slack) << " tol=" << num(cfg.tol) << "\n";
  return passed ? kExitOk : kExitFail;
}

json table_json(const Table& t) {
  char* text = nullptr;
  check(qp_table_to_json(t.t, &text), "table");
  return json::parse(take(text));
}

std::string table_csv(const Table& t) {
  char* text = nullptr;
  check(qp_table_to_csv(t.t, &text), "table");
  return take(text);
}

int cmd_counterexample(const Config& cfg) {
  Table t;
  check(qp_counterexample(cfg.ns.data(), cfg.ns.size(), cfg.q, &t.t), "counterexample");
  const Output out(cfg, "counterexample");
  out.csv(table_csv(t));
  out.json_file(table_json(t));
  for (std::size_t i = 0; i < qp_table_rows(t.t); ++i) {
    qp_counterexample_row row{};
    check(qp_table_counterexample_row(t.t, i, &row), "row");
    std::cout << "N=" << row.n << " aN_Z=" << num(row.an_z) << " aN_Y=" << num(row.an_y) << " aN_X=" << num(row.an_x)
              << "\n";
  }
  return kExitOk;
}

int cmd_growth(const Config& cfg) {
  Table ce;
  check(qp_counterexample(cfg.ns.data(), cfg.ns.size(), cfg.q, &ce.t), "counterexample");
  const Output out(cfg, "growth");
  out.csv(table_csv(ce));
  json j;
  j["counterexample"] = table_json(ce);
  j["averaging"] = json::object();
  for (const char* space : {"scalar", "lp", "lorentz", "ribe"}) {
    Table avg;
    check(qp_averaging(space, cfg.ns.data(), cfg.ns.size(), cfg.p, cfg.q, &avg.t), "averaging");
    out.write(std::string("-") + space + ".csv", table_csv(avg));
    j["averaging"][space] = table_json(avg);
  }
  out.json_file(j);
  return kExitOk;
}

// Time cells per bump below which a measurement only sees discretization.
constexpr std::size_t kCellsPerBump = 64;

int cmd_dichotomy(const Config& cfg) {
  std::string csv =
      "N,scalar,lp,bump_time_cells,bump_numeric_sup,bump_bound,increment_bound,max_increment,slack,endpoint_norm,"
      "an_core,iterations,holds\n";
  json rows = json::array();
  bool all = true;
  Table scalar, lp;
  check(qp_averaging("scalar", cfg.ns.data(), cfg.ns.size(), cfg.p, cfg.q, &scalar.t), "averaging");
  check(qp_averaging("lp", cfg.ns.data(), cfg.ns.size(), cfg.p, cfg.q, &lp.t), "averaging");
  for (std::size_t i = 0; i < cfg.ns.size(); ++i) {
    const std::size_t n = cfg.ns[i];
    double sv = 0.0, lv = 0.0;
    check(qp_table_value(scalar.t, i, &sv), "averaging");
    check(qp_table_value(lp.t, i, &lv), "averaging");
    const std::size_t bump_cells = std::max(cfg.mt, kCellsPerBump * n);
    qp_bump_report b{};
    check(qp_bump_check(n, cfg.p, bump_cells, &b), "bump");

    json row = {{"N", n},
                {"scalar", sv},
                {"lp", lv},
                {"bump",
                 {{"time_cells", bump_cells},
                  {"numeric_sup", b.numeric_sup},
                  {"analytic_sup", b.analytic_sup},
                  {"bound", b.bound}}}};
    std::string line = std::to_string(n) + "," + num(sv) + "," + num(lv) + "," + std::to_string(bump_cells) + "," +
                       num(b.numeric_sup) + "," + num(b.bound) + ",";
    bool holds = b.holds != 0;
    std::cout << "N=" << n << " bump " << num(b.numeric_sup) << " <= " << num(b.bound);
    if (cfg.mt >= kCellsPerBump * n) {
      qp_theorem5_report t{};
      check(qp_theorem5_check(n, cfg.p, 1e-2, cfg.mt, &t), "constant chain");
      holds = holds && t.holds;
      line += num(t.increment_bound) + "," + num(t.max_increment) + "," + num(t.slack) + "," + num(t.endpoint_norm) +
              "," + num(t.an_core) + "," + std::to_string(t.iterations);
      row["chain"] = {{"increment_bound", t.increment_bound},
                      {"max_increment", t.max_increment},
                      {"slack", t.slack},
                      {"endpoint_norm", t.endpoint_norm},
                      {"an_core", t.an_core},
                      {"iterations", t.iterations}};
      std::cout << ", increments " << num(t.max_increment) << " <= " << num(t.increment_bound) << " + "
                << num(t.slack);
    } else {
      // Too few time cells per bump for the primitive to resolve DF.
      line += ",,,,,";
      row["chain"] = nullptr;
      std::cout << ", chain skipped (mt < " << kCellsPerBump << " N)";
    }
    all = all && holds;
    row["holds"] = holds;
    rows.push_back(row);
    csv += line + "," + (holds ? "1" : "0") + "\n";
    std::cout << (holds ? "" : "  FAILED") << "\n";
  }
  const Output out(cfg, "dichotomy");
  out.csv(csv);
  out.json_file({{"p", cfg.p}, {"K", qp_bump_derivative_max()}, {"mt", cfg.mt}, {"rows", rows}, {"passed", all}});
  return all ? kExitOk : kExitFail;
}

// ---- configuration -------------------------------------------------------

std::vector<std::size_t> parse_n_list(const std::string& s) {
  std::vector<std::size_t> ns;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t v = 0;
    const auto r = std::from_chars(item.data(), item.data() + item.size(), v);
    if (r.ec != std::errc() || r.ptr != item.data() + item.size() || v == 0) {
      throw Usage{"--n-list expects positive integers separated by commas, got '" + s + "'"};
    }
    ns.push_back(v);
  }
  if (ns.empty()) throw Usage{"--n-list is empty"};
  return ns;
}

void apply_file(Config& cfg, const std::string& path) {
  if (!fs::is_regular_file(path)) throw Usage{"config " + path + " not found"};
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Usage{"config " + path + ": " + e.what()};
  }
  if (!j.is_object()) throw Usage{"config " + path + ": expected an object"};
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "p") cfg.p = v.get<double>();
      else if (key == "q") cfg.q = v.get<double>();
      else if (key == "m") cfg.m = v.get<std::size_t>();
      else if (key == "mt") cfg.mt = v.get<std::size_t>();
      else if (key == "tol") cfg.tol = v.get<double>();
      else if (key == "n_list" || key == "n-list") cfg.ns = v.get<std::vector<std::size_t>>();
      else if (key == "out") cfg.out = v.get<std::string>();
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "fixed_tag" || key == "fixed-tag") cfg.tag = v.get<std::string>();
      else if (key == "input") cfg.input = v.get<std::string>();
      else if (key == "generator") cfg.generator = v.get<std::string>();
      else if (key == "pairs") cfg.pairs = v.get<std::size_t>();
      else if (key == "iteration_cap") cfg.iteration_cap = v.get<std::size_t>();
      else throw Usage{"config " + path + ": unknown key '" + key + "'"};
    }
  } catch (const json::exception& e) {
    throw Usage{"config " + path + ": " + e.what()};
  }
}

void validate(const Config& cfg) {
  if (!(cfg.p > 0.0 && cfg.p < 1.0)) throw Usage{"--p must lie in (0, 1), got " + num(cfg.p)};
  if (!(cfg.q > 1.0) || !std::isfinite(cfg.q)) throw Usage{"--q must be finite and > 1, got " + num(cfg.q)};
  if (cfg.m == 0) throw Usage{"--m must be positive"};
  if (cfg.mt == 0) throw Usage{"--mt must be positive"};
  if (!(cfg.tol > 0.0) || !std::isfinite(cfg.tol)) throw Usage{"--tol must be positive"};
  if (cfg.ns.empty()) throw Usage{"--n-list is empty"};
  for (std::size_t n : cfg.ns) {
    if (n == 0) throw Usage{"--n-list entries must be positive"};
  }
  if (cfg.pairs == 0) throw Usage{"--pairs must be positive"};
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Primitives of curves in p-normed function spaces"};
  app.require_subcommand(1);

  Config flags;
  std::string n_list, config_path;
  app.add_option("--p", flags.p, "quasi-norm exponent, 0 < p < 1 (default 0.5)");
  app.add_option("--q", flags.q, "Lorentz index, q > 1 (default 2)");
  app.add_option("--m", flags.m, "spatial cells (default 1024)");
  app.add_option("--mt", flags.mt, "time cells (default 1024)");
  app.add_option("--tol", flags.tol, "primitive tolerance (default 1e-3)");
  app.add_option("--n-list", n_list, "comma separated N values (default 4,16,64,256,1024)");
  app.add_option("--out", flags.out, "output directory (default .)");
  app.add_option("--seed", flags.seed, "seed for randomized sweeps (default 1)");
  app.add_option("--fixed-tag", flags.tag, "file name tag instead of a timestamp");
  app.add_option("--input", flags.input, "input file: grid row for lift, curve CSV for primitive");
  app.add_option("--generator", flags.generator, "built-in input: lift {zero,constant,random}, "
                                                 "primitive {zero,constant,indicator-path,lift}");
  app.add_option("--pairs", flags.pairs, "random pairs for axioms (default 10000)");
  app.add_option("--iteration-cap", flags.iteration_cap, "primitive iteration cap");
  app.add_option("--config", config_path, "JSON config file; flags override it");

  struct Command {
    const char* name;
    const char* help;
    int (*run)(const Config&);
  };
  const Command commands[] = {
      {"axioms", "randomized p-triangle, homogeneity and disjoint additivity sweep", cmd_axioms},
      {"lift", "zero-derivative lift and its difference-quotient exponent", cmd_lift},
      {"primitive", "construct a primitive of a curve", cmd_primitive},
      {"growth", "counterexample and averaging tables", cmd_growth},
      {"dichotomy", "averaging tables, bump superposition and constant chain", cmd_dichotomy},
      {"counterexample", "a_N table for the Ribe, Lorentz and quotient spaces", cmd_counterexample},
  };
  for (const auto& c : commands) app.add_subcommand(c.name, c.help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    Config cfg;
    if (!config_path.empty()) apply_file(cfg, config_path);
    auto given = [&](const char* name) { return app.get_option(name)->count() > 0; };
    if (given("--p")) cfg.p = flags.p;
    if (given("--q")) cfg.q = flags.q;
    if (given("--m")) cfg.m = flags.m;
    if (given("--mt")) cfg.mt = flags.mt;
    if (given("--tol")) cfg.tol = flags.tol;
    if (given("--n-list")) cfg.ns = parse_n_list(n_list);
    if (given("--out")) cfg.out = flags.out;
    if (given("--seed")) cfg.seed = flags.seed;
    if (given("--fixed-tag")) cfg.tag = flags.tag;
    if (given("--input")) cfg.input = flags.input;
    if (given("--generator")) cfg.generator = flags.generator;
    if (given("--pairs")) cfg.pairs = flags.pairs;
    if (given("--iteration-cap")) cfg.iteration_cap = flags.iteration_cap;
    validate(cfg);
    if (cfg.tag.empty()) cfg.tag = timestamp();

    for (const auto& c : commands) {
      if (app.got_subcommand(c.name)) return c.run(cfg);
    }
  } catch (const Usage& e) {
    std::cerr << "qprim: " << e.what << "\n";
    return kExitUsage;
  } catch (const Failure& e) {
    std::cerr << "qprim: " << e.what << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "qprim: " << e.what() << "\n";
    return kExitFail;
  }
  return kExitUsage;
}
