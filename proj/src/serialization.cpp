#include "qprim/serialization.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "qprim/error.hpp"

namespace qprim {

using nlohmann::json;

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view s) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorKind::Parse, "not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::size_t parse_count(std::string_view s) {
  const double v = parse_double(s);
  if (!(v >= 1.0) || v != std::floor(v)) fail(ErrorKind::Parse, "cell count must be a positive integer");
  return static_cast<std::size_t>(v);
}

// Smallest d <= cap with b == k/d exactly for some integer k.
std::optional<std::size_t> exact_denominator(double b, std::size_t cap) {
  if (b == 0.0 || b == 1.0) return 1;
  // Continued-fraction convergents of b.
  double x = b;
  long double h_prev = 1, h = std::floor(x);
  long double k_prev = 0, k = 1;
  for (int iter = 0; iter < 64; ++iter) {
    if (k > static_cast<long double>(cap)) return std::nullopt;
    const auto d = static_cast<std::size_t>(k);
    if (static_cast<double>(static_cast<std::size_t>(h)) / static_cast<double>(d) == b) return d;
    const double frac = x - std::floor(x);
    if (frac == 0.0) return std::nullopt;
    x = 1.0 / frac;
    const long double a = std::floor(x);
    const long double h_next = a * h + h_prev;
    const long double k_next = a * k + k_prev;
    h_prev = h;
    h = h_next;
    k_prev = k;
    k = k_next;
  }
  return std::nullopt;
}

json step_to_json_record(double t, const StepFunction& v) {
  json rec;
  rec["t"] = t;
  if (auto g = as_uniform(v)) {
    rec["m"] = g->size();
    rec["cells"] = std::vector<double>(g->cells().begin(), g->cells().end());
  } else {
    rec["breaks"] = std::vector<double>(v.breaks().begin(), v.breaks().end());
    rec["values"] = std::vector<double>(v.values().begin(), v.values().end());
  }
  return rec;
}

json nullable(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string grid_function_to_csv(const GridFunction& x) {
  std::string out = std::to_string(x.size());
  for (double v : x.cells()) {
    out += ',';
    out += format_number(v);
  }
  return out;
}

GridFunction grid_function_from_csv(std::string_view row) {
  const auto fields = split(trim(row), ',');
  const std::size_t m = parse_count(fields.front());
  if (fields.size() != m + 1) {
    fail(ErrorKind::Parse, "CSV row declares " + std::to_string(m) + " cells but has " +
                               std::to_string(fields.size() - 1));
  }
  std::vector<double> cells;
  cells.reserve(m);
  for (std::size_t i = 1; i < fields.size(); ++i) cells.push_back(parse_double(fields[i]));
  return GridFunction(std::move(cells));
}

std::string grid_function_to_json(const GridFunction& x) {
  json j;
  j["m"] = x.size();
  j["cells"] = std::vector<double>(x.cells().begin(), x.cells().end());
  return j.dump();
}

GridFunction grid_function_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
    const auto m = j.at("m").get<std::size_t>();
    auto cells = j.at("cells").get<std::vector<double>>();
    if (cells.size() != m) fail(ErrorKind::Parse, "JSON grid function: m does not match cell count");
    return GridFunction(std::move(cells));
  } catch (const json::exception& e) {
    fail(ErrorKind::Parse, std::string("JSON grid function: ") + e.what());
  }
}

std::optional<GridFunction> as_uniform(const StepFunction& f, std::size_t cap) {
  std::size_t m = 1;
  for (double b : f.breaks()) {
    const auto d = exact_denominator(b, cap);
    if (!d) return std::nullopt;
    m = std::lcm(m, *d);
    if (m > cap) return std::nullopt;
  }
  // Every breakpoint is a multiple of 1/m, so each cell lies inside one piece.
  GridFunction g = f.to_grid(m);
  return g;
}

std::string curve_to_csv(const SampledCurve& f) {
  std::string out;
  const auto& grid = f.grid();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto g = as_uniform(f[i]);
    if (!g) fail(ErrorKind::InvalidArgument, "curve value has no uniform-grid representation");
    out += format_number(grid[i]);
    out += ',';
    out += grid_function_to_csv(*g);
    out += '\n';
  }
  return out;
}

SampledCurve curve_from_csv(std::string_view text) {
  std::vector<double> nodes;
  std::vector<StepFunction> values;
  for (auto line : split(text, '\n')) {
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string_view::npos) fail(ErrorKind::Parse, "curve CSV row needs t,m,cells");
    nodes.push_back(parse_double(line.substr(0, comma)));
    values.emplace_back(grid_function_from_csv(line.substr(comma + 1)));
  }
  return SampledCurve(TimeGrid(std::move(nodes)), std::move(values));
}

std::string curve_to_json(const SampledCurve& f) {
  json arr = json::array();
  for (std::size_t i = 0; i < f.grid().size(); ++i) arr.push_back(step_to_json_record(f.grid()[i], f[i]));
  return arr.dump();
}

std::string trace_to_csv(const PrimitiveResult& r) {
  std::ostringstream out;
  out << "iter,eps_i,n_i,eta_i,c1_bound,residual\n";
  for (const auto& rec : r.trace) {
    out << rec.iter << ',' << format_number(rec.eps) << ',' << rec.n << ',' << format_number(rec.eta) << ','
        << format_number(rec.c1_bound) << ',' << format_number(rec.residual) << '\n';
  }
  return out.str();
}

std::string primitive_to_json(const PrimitiveResult& r, double p, double tol, bool include_curve) {
  json j;
  j["p"] = p;
  j["tol"] = tol;
  j["iterations"] = r.trace.size();
  j["residual"] = r.residual;
  j["residual_fine"] = r.residual_fine;
  j["discretization_slack"] = r.discretization_slack;
  j["remainder"] = r.remainder;
  j["c1_estimate"] = r.c1_estimate;
  j["c1_bound"] = r.c1_bound;
  json trace = json::array();
  for (const auto& rec : r.trace) {
    trace.push_back({{"iter", rec.iter},
                     {"eps", rec.eps},
                     {"segments", rec.segments},
                     {"n", rec.n},
                     {"eta", rec.eta},
                     {"h_sup", rec.h_sup},
                     {"c1_bound", rec.c1_bound},
                     {"residual", rec.residual}});
  }
  j["trace"] = std::move(trace);
  if (include_curve) j["F"] = json::parse(curve_to_json(r.F));
  return j.dump(2);
}

std::string counterexample_to_csv(const std::vector<CounterexampleRow>& rows) {
  std::ostringstream out;
  out << "N,aN_Z,aN_Y,aN_X,ratio_Y,ratio_X\n";
  for (const auto& r : rows) {
    out << r.n << ',' << format_number(r.an_z) << ',' << format_number(r.an_y) << ',' << format_number(r.an_x) << ','
        << format_number(r.ratio_y) << ',' << format_number(r.ratio_x) << '\n';
  }
  return out.str();
}

std::string counterexample_to_json(const std::vector<CounterexampleRow>& rows, double q) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"N", r.n},
                   {"aN_Z", r.an_z},
                   {"aN_Y", r.an_y},
                   {"aN_X", r.an_x},
                   {"ratio_Y", nullable(r.ratio_y)},
                   {"ratio_X", nullable(r.ratio_x)},
                   {"degenerate", r.degenerate}});
  }
  json j;
  j["q"] = q;
  j["rows"] = std::move(arr);
  return j.dump(2);
}

std::string averaging_to_csv(const std::vector<AveragingRow>& rows, SpaceTag space, const std::string& family) {
  std::ostringstream out;
  out << "# space=" << to_string(space) << " family=" << family << '\n' << "N,value\n";
  for (const auto& r : rows) out << r.n << ',' << format_number(r.value) << '\n';
  return out.str();
}

std::string averaging_to_json(const std::vector<AveragingRow>& rows, SpaceTag space, const std::string& family) {
  json arr = json::array();
  for (const auto& r : rows) arr.push_back({{"N", r.n}, {"value", r.value}});
  json j;
  j["space"] = to_string(space);
  j["family"] = family;
  j["rows"] = std::move(arr);
  return j.dump(2);
}

}  // namespace qprim
