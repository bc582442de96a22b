#include "qprim/qprim.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <new>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "qprim/curves.hpp"
#include "qprim/dichotomy.hpp"
#include "qprim/error.hpp"
#include "qprim/pathological_spaces.hpp"
#include "qprim/primitive.hpp"
#include "qprim/serialization.hpp"
#include "qprim/space_kernel.hpp"

struct qp_grid {
  qprim::GridFunction value;
};

struct qp_lift {
  qprim::LiftCurve value;
};

struct qp_curve {
  qprim::SampledCurve value;
};

struct qp_primitive {
  qprim::PrimitiveResult value;
  double p;
  double tol;
};

struct qp_table {
  struct Averaging {
    std::vector<qprim::AveragingRow> rows;
    qprim::SpaceTag space;
    std::string family;
  };
  struct Counterexample {
    std::vector<qprim::CounterexampleRow> rows;
    double q;
  };
  std::variant<Averaging, Counterexample> value;
};

namespace {

thread_local std::string last_error;

qp_status to_status(qprim::ErrorKind kind) {
  switch (kind) {
    case qprim::ErrorKind::InvalidArgument: return QP_ERR_INVALID_ARGUMENT;
    case qprim::ErrorKind::InvalidExponent: return QP_ERR_INVALID_EXPONENT;
    case qprim::ErrorKind::RefinementCap: return QP_ERR_REFINEMENT_CAP;
    case qprim::ErrorKind::DoublingCap: return QP_ERR_DOUBLING_CAP;
    case qprim::ErrorKind::IterationCap: return QP_ERR_ITERATION_CAP;
    case qprim::ErrorKind::Divergence: return QP_ERR_DIVERGENCE;
    case qprim::ErrorKind::Parse: return QP_ERR_PARSE;
    case qprim::ErrorKind::Io: return QP_ERR_IO;
  }
  return QP_ERR_INTERNAL;
}

template <class Fn>
qp_status guarded(Fn&& fn) {
  try {
    fn();
    return QP_OK;
  } catch (const qprim::Error& e) {
    last_error = e.what();
    return to_status(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return QP_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return QP_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return QP_ERR_INTERNAL;
  }
}

void require(const void* ptr, const char* what) {
  if (ptr == nullptr) qprim::fail(qprim::ErrorKind::InvalidArgument, std::string(what) + " must not be null");
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

qprim::SpaceTag space_from(const char* name) {
  require(name, "space");
  auto tag = qprim::parse_space_tag(name);
  if (!tag) qprim::fail(qprim::ErrorKind::InvalidArgument, std::string("unknown space '") + name + "'");
  return *tag;
}

std::vector<double> random_cells(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> cells(m);
  for (auto& c : cells) c = dist(rng);
  return cells;
}

// ||a||^p + ||b||^p with a, b disjointly supported, against ||a + b||^p.
bool disjoint_additive(const qprim::GridFunction& x, const qprim::GridFunction& y, const qprim::SpaceParams& sp) {
  const std::size_t m = x.size();
  std::vector<double> a(m, 0.0), b(m, 0.0), s(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (i % 2 == 0) {
      a[i] = x[i];
    } else {
      b[i] = y[i];
    }
    s[i] = a[i] + b[i];
  }
  const double lhs = qprim::p_mass(qprim::GridFunction(s), sp);
  const double rhs = qprim::p_mass(qprim::GridFunction(a), sp) + qprim::p_mass(qprim::GridFunction(b), sp);
  return std::abs(lhs - rhs) <= qprim::kRelSlack * std::max(lhs, rhs);
}

}  // namespace

extern "C" {

const char* qp_status_name(qp_status status) {
  switch (status) {
    case QP_OK: return "ok";
    case QP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case QP_ERR_INVALID_EXPONENT: return "invalid exponent";
    case QP_ERR_REFINEMENT_CAP: return "refinement cap exceeded";
    case QP_ERR_DOUBLING_CAP: return "doubling cap exceeded";
    case QP_ERR_ITERATION_CAP: return "iteration cap exceeded";
    case QP_ERR_DIVERGENCE: return "divergence";
    case QP_ERR_PARSE: return "parse error";
    case QP_ERR_IO: return "I/O error";
    case QP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* qp_last_error(void) { return last_error.c_str(); }

void qp_string_free(char* s) { std::free(s); }

qp_status qp_grid_create(const double* cells, size_t m, qp_grid** out) {
  return guarded([&] {
    require(out, "out");
    if (m > 0) require(cells, "cells");
    *out = new qp_grid{qprim::GridFunction(std::vector<double>(cells, cells + m))};
  });
}

qp_status qp_grid_from_csv(const char* row, qp_grid** out) {
  return guarded([&] {
    require(row, "row");
    require(out, "out");
    *out = new qp_grid{qprim::grid_function_from_csv(row)};
  });
}

qp_status qp_grid_from_json(const char* text, qp_grid** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new qp_grid{qprim::grid_function_from_json(text)};
  });
}

void qp_grid_destroy(qp_grid* g) { delete g; }

size_t qp_grid_size(const qp_grid* g) { return g == nullptr ? 0 : g->value.size(); }

qp_status qp_grid_cells(const qp_grid* g, double* out, size_t cap) {
  return guarded([&] {
    require(g, "grid");
    const std::size_t n = std::min(cap, g->value.size());
    if (n > 0) require(out, "out");
    for (std::size_t i = 0; i < n; ++i) out[i] = g->value[i];
  });
}

qp_status qp_grid_to_csv(const qp_grid* g, char** out) {
  return guarded([&] {
    require(g, "grid");
    require(out, "out");
    *out = copy_string(qprim::grid_function_to_csv(g->value));
  });
}

qp_status qp_grid_to_json(const qp_grid* g, char** out) {
  return guarded([&] {
    require(g, "grid");
    require(out, "out");
    *out = copy_string(qprim::grid_function_to_json(g->value));
  });
}

qp_status qp_lp_norm(const qp_grid* x, double p, double* out) {
  return guarded([&] {
    require(x, "x");
    require(out, "out");
    *out = qprim::lp_norm(x->value, qprim::SpaceParams(p));
  });
}

qp_status qp_combine(const qp_grid* x, const qp_grid* y, double a, double b, qp_grid** out) {
  return guarded([&] {
    require(x, "x");
    require(y, "y");
    require(out, "out");
    *out = new qp_grid{qprim::refine_and_combine(x->value, y->value, a, b)};
  });
}

qp_status qp_p_triangle_check(const qp_grid* x, const qp_grid* y, double p, qp_triangle_report* out) {
  return guarded([&] {
    require(x, "x");
    require(y, "y");
    require(out, "out");
    const auto r = qprim::p_triangle_check(x->value, y->value, qprim::SpaceParams(p));
    *out = {r.lhs, r.rhs, r.holds ? 1 : 0};
  });
}

qp_status qp_axioms_sweep(double p, size_t m, size_t pairs, uint64_t seed, qp_axioms_report* out) {
  return guarded([&] {
    require(out, "out");
    const qprim::SpaceParams sp(p);
    if (m == 0) qprim::fail(qprim::ErrorKind::InvalidArgument, "sweep needs m >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> scale(-4.0, 4.0);
    qp_axioms_report r{pairs, 0, 0, 0, 0.0};
    for (std::size_t k = 0; k < pairs; ++k) {
      const qprim::GridFunction x(random_cells(rng, m));
      const qprim::GridFunction y(random_cells(rng, m));
      const auto tri = qprim::p_triangle_check(x, y, sp);
      if (!tri.holds) ++r.triangle_violations;
      if (tri.rhs > 0.0) r.worst_triangle_ratio = std::max(r.worst_triangle_ratio, tri.lhs / tri.rhs);

      const double a = scale(rng);
      const double lhs = qprim::lp_norm(x.scaled(a), sp);
      const double rhs = std::abs(a) * qprim::lp_norm(x, sp);
      if (std::abs(lhs - rhs) > qprim::kRelSlack * std::max(lhs, rhs) * 8.0) ++r.homogeneity_violations;

      if (!disjoint_additive(x, y, sp)) ++r.disjoint_violations;
    }
    *out = r;
  });
}

qp_status qp_lift_create(const qp_grid* x, double p, qp_lift** out) {
  return guarded([&] {
    require(x, "x");
    require(out, "out");
    *out = new qp_lift{qprim::zero_derivative_lift(x->value, qprim::SpaceParams(p))};
  });
}

void qp_lift_destroy(qp_lift* f) { delete f; }

qp_status qp_lift_cut(const qp_lift* f, double t, double* out) {
  return guarded([&] {
    require(f, "lift");
    require(out, "out");
    *out = f->value.cut(t);
  });
}

qp_status qp_lift_increment_norm(const qp_lift* f, double s, double t, double* out) {
  return guarded([&] {
    require(f, "lift");
    require(out, "out");
    *out = qprim::lp_distance(f->value(t), f->value(s), f->value.params());
  });
}

qp_status qp_lift_c1_norm(const qp_lift* f, double* out) {
  return guarded([&] {
    require(f, "lift");
    require(out, "out");
    *out = f->value.c1_norm();
  });
}

qp_status qp_lift_rate_check(const qp_lift* f, const double* deltas, size_t count, int materialized,
                             double* quotients, qp_rate_fit* out) {
  return guarded([&] {
    require(f, "lift");
    require(out, "out");
    if (count > 0) require(deltas, "deltas");
    const auto fit = qprim::lift_rate_check(
        f->value, std::span<const double>(deltas, count),
        materialized ? qprim::QuotientSource::Materialized : qprim::QuotientSource::Analytic);
    if (quotients != nullptr) {
      for (std::size_t i = 0; i < fit.quotients.size(); ++i) quotients[i] = fit.quotients[i];
    }
    *out = {fit.slope, fit.intercept, fit.degenerate ? 1 : 0};
  });
}

qp_status qp_curve_generator(const char* name, size_t m, size_t mt, double p, qp_curve** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    const qprim::SpaceParams sp(p);
    if (std::strcmp(name, "lift") == 0) {
      const auto lift = qprim::zero_derivative_lift(qprim::GridFunction::constant(m, 1.0), sp);
      *out = new qp_curve{lift.sample(qprim::TimeGrid::uniform(mt))};
      return;
    }
    *out = new qp_curve{qprim::generator_curve(name, m, mt)};
  });
}

qp_status qp_curve_from_csv(const char* text, qp_curve** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new qp_curve{qprim::curve_from_csv(text)};
  });
}

void qp_curve_destroy(qp_curve* c) { delete c; }

size_t qp_curve_nodes(const qp_curve* c) { return c == nullptr ? 0 : c->value.grid().size(); }

qp_status qp_curve_sup_norm(const qp_curve* c, double p, double* out) {
  return guarded([&] {
    require(c, "curve");
    require(out, "out");
    *out = qprim::sup_norm(c->value, qprim::SpaceParams(p));
  });
}

qp_status qp_curve_to_csv(const qp_curve* c, char** out) {
  return guarded([&] {
    require(c, "curve");
    require(out, "out");
    *out = copy_string(qprim::curve_to_csv(c->value));
  });
}

void qp_primitive_options_default(qp_primitive_options* opts) {
  if (opts == nullptr) return;
  const qprim::PrimitiveOptions d;
  *opts = {d.tol, d.time_cells, d.iteration_cap, d.n_cap, d.compute_c1 ? 1 : 0, d.verify_fine ? 1 : 0};
}

qp_status qp_primitive_construct(const qp_curve* f, double p, const qp_primitive_options* opts,
                                 qp_primitive** out) {
  return guarded([&] {
    require(f, "curve");
    require(out, "out");
    qprim::PrimitiveOptions o;
    if (opts != nullptr) {
      o.tol = opts->tol;
      o.time_cells = opts->time_cells;
      o.iteration_cap = opts->iteration_cap;
      o.n_cap = opts->n_cap;
      o.compute_c1 = opts->compute_c1 != 0;
      o.verify_fine = opts->verify_fine != 0;
    }
    *out = new qp_primitive{qprim::construct_primitive(f->value, qprim::SpaceParams(p), o), p, o.tol};
  });
}

void qp_primitive_destroy(qp_primitive* r) { delete r; }

qp_status qp_primitive_summary_get(const qp_primitive* r, qp_primitive_summary* out) {
  return guarded([&] {
    require(r, "primitive");
    require(out, "out");
    const auto& v = r->value;
    *out = {v.trace.size(), v.residual, v.residual_fine, v.discretization_slack,
            v.remainder,    v.c1_estimate, v.c1_bound};
  });
}

qp_status qp_primitive_iteration(const qp_primitive* r, size_t index, qp_iteration* out) {
  return guarded([&] {
    require(r, "primitive");
    require(out, "out");
    if (index >= r->value.trace.size()) qprim::fail(qprim::ErrorKind::InvalidArgument, "iteration index out of range");
    const auto& rec = r->value.trace[index];
    *out = {rec.iter, rec.eps, rec.n, rec.eta, rec.c1_bound, rec.residual};
  });
}

qp_status qp_primitive_trace_csv(const qp_primitive* r, char** out) {
  return guarded([&] {
    require(r, "primitive");
    require(out, "out");
    *out = copy_string(qprim::trace_to_csv(r->value));
  });
}

qp_status qp_primitive_to_json(const qp_primitive* r, int include_curve, char** out) {
  return guarded([&] {
    require(r, "primitive");
    require(out, "out");
    *out = copy_string(qprim::primitive_to_json(r->value, r->p, r->tol, include_curve != 0));
  });
}

qp_status qp_counterexample(const size_t* ns, size_t count, double q, qp_table** out) {
  return guarded([&] {
    require(out, "out");
    if (count > 0) require(ns, "ns");
    auto rows = qprim::counterexample_report(std::span<const std::size_t>(ns, count), q);
    *out = new qp_table{qp_table::Counterexample{std::move(rows), q}};
  });
}

qp_status qp_averaging(const char* space, const size_t* ns, size_t count, double p, double q, qp_table** out) {
  return guarded([&] {
    require(out, "out");
    if (count > 0) require(ns, "ns");
    const qprim::SpaceTag tag = space_from(space);
    qprim::SpaceConfig cfg;
    cfg.p = qprim::SpaceParams(p).p();
    cfg.q = q;
    auto rows = qprim::averaging_growth(tag, std::span<const std::size_t>(ns, count), cfg);
    std::string family;
    switch (tag) {
      case qprim::SpaceTag::Ribe: family = "ribe-basis"; break;
      case qprim::SpaceTag::Lorentz: family = "disjoint-indicators+dyadic-scales"; break;
      default: family = "disjoint-indicators"; break;
    }
    *out = new qp_table{qp_table::Averaging{std::move(rows), tag, family}};
  });
}

void qp_table_destroy(qp_table* t) { delete t; }

size_t qp_table_rows(const qp_table* t) {
  if (t == nullptr) return 0;
  return std::visit([](const auto& v) { return v.rows.size(); }, t->value);
}

qp_status qp_table_value(const qp_table* t, size_t row, double* out) {
  return guarded([&] {
    require(t, "table");
    require(out, "out");
    if (row >= qp_table_rows(t)) qprim::fail(qprim::ErrorKind::InvalidArgument, "row index out of range");
    if (const auto* a = std::get_if<qp_table::Averaging>(&t->value)) {
      *out = a->rows[row].value;
    } else {
      *out = std::get<qp_table::Counterexample>(t->value).rows[row].an_x;
    }
  });
}

qp_status qp_table_counterexample_row(const qp_table* t, size_t row, qp_counterexample_row* out) {
  return guarded([&] {
    require(t, "table");
    require(out, "out");
    const auto* c = std::get_if<qp_table::Counterexample>(&t->value);
    if (c == nullptr) qprim::fail(qprim::ErrorKind::InvalidArgument, "not a counterexample table");
    if (row >= c->rows.size()) qprim::fail(qprim::ErrorKind::InvalidArgument, "row index out of range");
    const auto& r = c->rows[row];
    *out = {r.n, r.an_z, r.an_y, r.an_x, r.ratio_y, r.ratio_x, r.degenerate ? 1 : 0};
  });
}

qp_status qp_table_to_csv(const qp_table* t, char** out) {
  return guarded([&] {
    require(t, "table");
    require(out, "out");
    if (const auto* a = std::get_if<qp_table::Averaging>(&t->value)) {
      *out = copy_string(qprim::averaging_to_csv(a->rows, a->space, a->family));
    } else {
      *out = copy_string(qprim::counterexample_to_csv(std::get<qp_table::Counterexample>(t->value).rows));
    }
  });
}

qp_status qp_table_to_json(const qp_table* t, char** out) {
  return guarded([&] {
    require(t, "table");
    require(out, "out");
    if (const auto* a = std::get_if<qp_table::Averaging>(&t->value)) {
      *out = copy_string(qprim::averaging_to_json(a->rows, a->space, a->family));
    } else {
      const auto& c = std::get<qp_table::Counterexample>(t->value);
      *out = copy_string(qprim::counterexample_to_json(c.rows, c.q));
    }
  });
}

qp_status qp_an_estimate(const char* space, size_t n, const char* family, double p, double q, double* lower,
                         double* upper) {
  return guarded([&] {
    require(family, "family");
    require(lower, "lower");
    const qprim::SpaceTag tag = space_from(space);
    auto fam = qprim::parse_family_tag(family);
    if (!fam) qprim::fail(qprim::ErrorKind::InvalidArgument, std::string("unknown family '") + family + "'");
    qprim::SpaceConfig cfg;
    cfg.p = qprim::SpaceParams(p).p();
    cfg.q = q;
    const auto est = qprim::a_n_estimate(tag, n, *fam, cfg);
    *lower = est.lower;
    if (upper != nullptr) *upper = est.upper.value_or(std::numeric_limits<double>::quiet_NaN());
  });
}

double qp_bump_derivative_max(void) { return qprim::bump_derivative_max(); }

qp_status qp_bump_check(size_t n, double p, size_t time_cells, qp_bump_report* out) {
  return guarded([&] {
    require(out, "out");
    const qprim::SpaceParams sp(p);
    const qprim::BumpSuperposition F(qprim::disjoint_unit_family(n, sp));
    const auto r = qprim::check_bump_derivative(F, time_cells, sp);
    *out = {r.numeric_sup, r.analytic_sup, r.bound, r.holds ? 1 : 0};
  });
}

qp_status qp_theorem5_check(size_t n, double p, double relative_tol, size_t time_cells, qp_theorem5_report* out) {
  return guarded([&] {
    require(out, "out");
    const qprim::SpaceParams sp(p);
    qprim::Theorem5Options opts;
    opts.relative_tol = relative_tol;
    opts.primitive.time_cells = time_cells;
    const auto r = qprim::theorem5_consistency_check(qprim::disjoint_unit_family(n, sp), sp, opts);
    *out = {r.n, r.increment_bound, r.max_increment, r.slack, r.endpoint_norm, r.an_core, r.iterations,
            r.holds ? 1 : 0};
  });
}

}  // extern "C"
