#include "qprim/dichotomy.hpp"

#include <algorithm>
#include <cmath>

#include "qprim/error.hpp"

namespace qprim {

double bump(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

double bump_derivative(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  const double s = t * (1.0 - t);
  return 30.0 * s * s;
}

double bump_derivative_max() { return bump_derivative(0.5); }

BumpSuperposition::BumpSuperposition(std::vector<StepFunction> xs) : xs_(std::move(xs)) {
  if (xs_.empty()) fail(ErrorKind::InvalidArgument, "bump superposition needs at least one vector");
}

StepFunction BumpSuperposition::operator()(double t) const {
  const double nt = static_cast<double>(xs_.size()) * t;
  StepFunction sum;
  for (std::size_t k = 0; k < xs_.size(); ++k) {
    const double w = bump(nt - static_cast<double>(k));
    if (w != 0.0) sum = combine(sum, xs_[k], 1.0, w);
  }
  return sum;
}

StepFunction BumpSuperposition::derivative(double t) const {
  const double n = static_cast<double>(xs_.size());
  const auto [lo, hi] = changing(t, t);
  StepFunction sum;
  for (std::size_t k = lo; k < hi; ++k) {
    const double w = bump_derivative(n * t - static_cast<double>(k));
    if (w != 0.0) sum = combine(sum, xs_[k], 1.0, n * w);
  }
  return sum;
}

StepFunction BumpSuperposition::difference(double s, double t) const {
  const double n = static_cast<double>(xs_.size());
  const auto [lo, hi] = changing(s, t);
  StepFunction sum;
  for (std::size_t k = lo; k < hi; ++k) {
    const double w = bump(n * t - static_cast<double>(k)) - bump(n * s - static_cast<double>(k));
    if (w != 0.0) sum = combine(sum, xs_[k], 1.0, w);
  }
  return sum;
}

std::pair<std::size_t, std::size_t> BumpSuperposition::changing(double s, double t) const {
  // phi(Nu - k) is constant in u outside [k/N, (k+1)/N].
  const double n = static_cast<double>(xs_.size());
  const double a = std::floor(n * std::min(s, t)) - 1.0;
  const double b = std::floor(n * std::max(s, t)) + 2.0;
  const auto clamp = [&](double v) { return static_cast<std::size_t>(std::clamp(v, 0.0, n)); };
  return {clamp(a), clamp(b)};
}

TimeGrid BumpSuperposition::grid(std::size_t cells) const {
  const std::size_t n = xs_.size();
  const std::size_t rounded = std::max<std::size_t>(1, (cells + n - 1) / n) * n;
  return TimeGrid::uniform(rounded);
}

SampledCurve bump_superposition(std::vector<StepFunction> xs, std::size_t time_cells, const SpaceParams& sp,
                                bool normalize) {
  for (auto& x : xs) {
    const double nx = lp_norm(x, sp);
    if (nx > 1.0) {
      if (!normalize) fail(ErrorKind::InvalidArgument, "bump superposition members must satisfy ||x_k|| <= 1");
      x = x.scaled(1.0 / nx);
    }
  }
  auto F = std::make_shared<const BumpSuperposition>(std::move(xs));
  return SampledCurve::sample(F->grid(time_cells), [F](double t) { return (*F)(t); });
}

BumpDerivativeReport check_bump_derivative(const BumpSuperposition& F, std::size_t time_cells, const SpaceParams& sp,
                                           double rel_slack) {
  const TimeGrid grid = F.grid(time_cells);
  const std::size_t last = grid.size() - 1;
  if (grid.size() < 3) fail(ErrorKind::InvalidArgument, "bump check needs at least three time nodes");

  // Same difference scheme as differentiate_numeric, formed from the members
  // whose weight changes so no curve value is materialized.
  BumpDerivativeReport r;
  auto quotient = [&](std::size_t lo, std::size_t hi) {
    const double h = grid[hi] - grid[lo];
    return lp_norm(F.difference(grid[lo], grid[hi]), sp) / h;
  };
  r.numeric_sup = std::max(quotient(0, 1), quotient(last - 1, last));
  for (std::size_t i = 1; i < last; ++i) r.numeric_sup = std::max(r.numeric_sup, quotient(i - 1, i + 1));
  for (double t : grid.nodes()) r.analytic_sup = std::max(r.analytic_sup, lp_norm(F.derivative(t), sp));
  double max_member = 0.0;
  for (const auto& x : F.terms()) max_member = std::max(max_member, lp_norm(x, sp));
  r.bound = static_cast<double>(F.size()) * bump_derivative_max() * max_member;
  r.holds = r.numeric_sup <= r.bound * (1.0 + rel_slack);
  return r;
}

std::vector<StepFunction> disjoint_unit_family(std::size_t n, const SpaceParams& sp) {
  if (n == 0) fail(ErrorKind::InvalidArgument, "family needs N >= 1");
  const double height = std::pow(static_cast<double>(n), sp.inv_p());
  std::vector<StepFunction> xs;
  xs.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> cells(n, 0.0);
    cells[k] = height;
    xs.emplace_back(GridFunction(std::move(cells)));
  }
  return xs;
}

std::vector<AveragingRow> averaging_growth(SpaceTag space, std::span<const std::size_t> ns, const SpaceConfig& cfg) {
  std::vector<AveragingRow> rows;
  rows.reserve(ns.size());
  for (std::size_t n : ns) {
    if (n == 0) fail(ErrorKind::InvalidArgument, "averaging table needs N >= 1");
    double sum_norm = 0.0;
    switch (space) {
      case SpaceTag::Scalar:
        sum_norm = a_n_estimate(space, n, FamilyTag::DisjointIndicators, cfg).lower;
        break;
      case SpaceTag::Lp:
        sum_norm = a_n_estimate(space, n, FamilyTag::DisjointIndicators, cfg).lower;
        break;
      case SpaceTag::Ribe:
        sum_norm = a_n_estimate(space, n, FamilyTag::RibeBasis, cfg).lower;
        break;
      case SpaceTag::Lorentz:
        sum_norm = std::max(a_n_estimate(space, n, FamilyTag::DisjointIndicators, cfg).lower,
                            a_n_estimate(space, n, FamilyTag::DyadicScales, cfg).lower);
        break;
    }
    rows.push_back({n, sum_norm / static_cast<double>(n)});
  }
  return rows;
}

Theorem5Report theorem5_consistency_check(std::vector<StepFunction> xs, const SpaceParams& sp,
                                          const Theorem5Options& opts) {
  Theorem5Report r;
  r.n = xs.size();
  r.p = sp.p();
  r.K = bump_derivative_max();
  r.increment_bound = std::pow(std::pow(r.M, sp.p()) * std::pow(r.K, sp.p()) + 1.0, sp.inv_p());
  r.chain_constant = r.increment_bound;

  auto F = std::make_shared<const BumpSuperposition>(std::move(xs));
  PrimitiveOptions popts = opts.primitive;
  const TimeGrid grid = F->grid(popts.time_cells);
  popts.time_cells = grid.cells();
  const SampledCurve df = SampledCurve::sample(grid, [F](double t) { return F->derivative(t); });
  const double df_sup = sup_norm(df, sp, popts.dense_factor);
  popts.tol = opts.relative_tol * (df_sup > 0.0 ? df_sup : 1.0);

  const PrimitiveResult G = construct_primitive(df, sp, popts);
  r.iterations = G.trace.size();
  r.primitive_residual = G.residual;
  r.slack = std::max(G.residual, G.remainder);
  if (popts.compute_c1 && df_sup > 0.0) r.measured_m = G.c1_estimate / df_sup;

  const std::size_t n = F->size();
  auto H = [&](double t) { return (*F)(t) - G(t); };
  StepFunction prev = H(0.0);
  for (std::size_t k = 1; k <= n; ++k) {
    StepFunction next = H(static_cast<double>(k) / static_cast<double>(n));
    r.increments.push_back(lp_distance(next, prev, sp));
    prev = std::move(next);
  }
  r.max_increment = *std::max_element(r.increments.begin(), r.increments.end());
  r.endpoint_norm = lp_norm(prev, sp);
  r.an_core = std::pow(static_cast<double>(n), sp.inv_p());
  r.holds = r.max_increment <= r.increment_bound + r.slack &&
            r.endpoint_norm <= r.chain_constant * r.an_core + r.slack;
  return r;
}

}  // namespace qprim
