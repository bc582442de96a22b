#include "qprim/primitive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qprim/error.hpp"

namespace qprim {

namespace {

// Pairs whose floating-point gap overshoots eps by roundoff still count.
constexpr double kGapTolerance = 1e-12;

std::vector<StepFunction> sample_values(const TimeGrid& grid, const auto& eval) {
  std::vector<StepFunction> out;
  out.reserve(grid.size());
  for (double t : grid.nodes()) out.push_back(eval(t));
  return out;
}

}  // namespace

PiecewiseLinearPath::PiecewiseLinearPath(TimeGrid nodes, std::vector<StepFunction> values)
    : nodes_(std::move(nodes)), values_(std::move(values)) {
  if (values_.size() != nodes_.size()) fail(ErrorKind::InvalidArgument, "piecewise-linear path needs one value per node");
}

StepFunction PiecewiseLinearPath::operator()(double t) const {
  const std::size_t k = nodes_.segment_of(t);
  const double a = nodes_[k];
  const double b = nodes_[k + 1];
  if (t == a) return values_[k];
  if (t == b) return values_[k + 1];
  const double lambda = (t - a) / (b - a);
  return combine(values_[k], values_[k + 1], 1.0 - lambda, lambda);
}

SampledCurve PiecewiseLinearPath::sample(const TimeGrid& grid) const {
  auto self = std::make_shared<const PiecewiseLinearPath>(*this);
  return SampledCurve::sample(grid, [self](double t) { return (*self)(t); });
}

IntegralPath::IntegralPath(PiecewiseLinearPath h) : h_(std::move(h)) {
  const auto& g = h_.nodes();
  const auto v = h_.values();
  node_integrals_.reserve(g.size());
  node_integrals_.emplace_back();
  for (std::size_t k = 0; k + 1 < g.size(); ++k) {
    const double half = 0.5 * (g[k + 1] - g[k]);
    node_integrals_.push_back(combine(node_integrals_[k], combine(v[k], v[k + 1], half, half), 1.0, 1.0));
  }
}

StepFunction IntegralPath::operator()(double t) const {
  const auto& g = h_.nodes();
  const std::size_t k = g.segment_of(t);
  const double a = g[k];
  const double b = g[k + 1];
  if (t == a) return node_integrals_[k];
  if (t == b) return node_integrals_[k + 1];
  const double tau = t - a;
  const double quad = tau * tau / (2.0 * (b - a));
  const auto v = h_.values();
  return combine(node_integrals_[k], combine(v[k], v[k + 1], tau - quad, quad), 1.0, 1.0);
}

SampledCurve IntegralPath::sample(const TimeGrid& grid) const {
  auto self = std::make_shared<const IntegralPath>(*this);
  return SampledCurve::sample(grid, [self](double t) { return (*self)(t); });
}

double probed_error(const SampledCurve& f, const PiecewiseLinearPath& h, const SpaceParams& sp, std::size_t probes) {
  const auto& g = h.nodes();
  double best = 0.0;
  for (std::size_t k = 0; k + 1 < g.size(); ++k) {
    for (std::size_t j = 1; j <= probes; ++j) {
      const double t = g[k] + (g[k + 1] - g[k]) * static_cast<double>(j) / static_cast<double>(probes + 1);
      best = std::max(best, p_mass_of_difference(f.value_at(t), h(t), sp));
    }
  }
  return sp.root(best);
}

double grid_error(const SampledCurve& f, const PiecewiseLinearPath& h, const SpaceParams& sp,
                  std::size_t dense_factor) {
  const TimeGrid pts = f.has_evaluator() && dense_factor > 1 ? f.grid().refined(dense_factor) : f.grid();
  double best = 0.0;
  for (double t : pts.nodes()) best = std::max(best, p_mass_of_difference(f.value_at(t), h(t), sp));
  return sp.root(best);
}

PiecewiseLinearPath approximate_piecewise_linear(const SampledCurve& f, double eps, const SpaceParams& sp,
                                                 const PlOptions& opts) {
  if (!(eps > 0.0)) fail(ErrorKind::InvalidArgument, "approximation tolerance must be positive");
  for (std::size_t n = 1; n <= opts.max_segments; n *= 2) {
    TimeGrid nodes = TimeGrid::uniform(n);
    auto values = sample_values(nodes, [&](double t) { return f.value_at(t); });
    PiecewiseLinearPath h(std::move(nodes), std::move(values));
    if (probed_error(f, h, sp, opts.probes_per_segment) < eps && grid_error(f, h, sp, opts.dense_factor) < eps) {
      return h;
    }
  }
  fail(ErrorKind::DoublingCap, "piecewise-linear approximation did not reach tolerance within " +
                                   std::to_string(opts.max_segments) + " segments");
}

IntegralPath integrate_pl(const PiecewiseLinearPath& h) { return IntegralPath(h); }

double eta_modulus(const IntegralPath& H, double eps, const SpaceParams& sp, const TimeGrid& family) {
  if (!(eps > 0.0 && eps <= 1.0)) fail(ErrorKind::InvalidArgument, "eta modulus needs 0 < eps <= 1");
  const auto vals = sample_values(family, H);
  const double reach = eps * (1.0 + kGapTolerance);
  double best = 0.0;
  for (std::size_t i = 0; i < family.size(); ++i) {
    for (std::size_t j = i + 1; j < family.size() && family[j] - family[i] <= reach; ++j) {
      const double mass = p_mass_of_difference(vals[j], vals[i], sp);
      if (mass > 0.0) best = std::max(best, sp.root(mass) / (family[j] - family[i]));
    }
  }
  return best;
}

double eta_modulus(const IntegralPath& H, double eps, const SpaceParams& sp) {
  if (!(eps > 0.0 && eps <= 1.0)) fail(ErrorKind::InvalidArgument, "eta modulus needs 0 < eps <= 1");
  const double want = std::ceil(16.0 / eps);
  const auto cells = static_cast<std::size_t>(std::clamp(want, 256.0, 65536.0));
  return eta_modulus(H, eps, sp, TimeGrid::uniform(cells));
}

EtaTable::EtaTable(const IntegralPath& H, const TimeGrid& grid, const SpaceParams& sp) : grid_(grid) {
  const auto vals = sample_values(grid_, H);
  std::vector<std::pair<double, double>> pairs;
  pairs.reserve(grid_.size() * (grid_.size() - 1) / 2);
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    for (std::size_t j = i + 1; j < grid_.size(); ++j) {
      const double gap = grid_[j] - grid_[i];
      const double mass = p_mass_of_difference(vals[j], vals[i], sp);
      pairs.emplace_back(gap, mass > 0.0 ? sp.root(mass) / gap : 0.0);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  gaps_.reserve(pairs.size());
  prefix_.reserve(pairs.size());
  double run = 0.0;
  for (const auto& [gap, ratio] : pairs) {
    run = std::max(run, ratio);
    gaps_.push_back(gap);
    prefix_.push_back(run);
  }
}

double EtaTable::operator()(double eps) const {
  auto it = std::upper_bound(gaps_.begin(), gaps_.end(), eps * (1.0 + kGapTolerance));
  if (it == gaps_.begin()) return 0.0;
  return prefix_[static_cast<std::size_t>(it - gaps_.begin()) - 1];
}

// ---------------------------------------------------------------------------

CorrectedPath::CorrectedPath(IntegralPath H, std::size_t n, const SpaceParams& sp) : H_(std::move(H)) {
  if (n == 0) fail(ErrorKind::InvalidArgument, "endpoint correction needs n >= 1");
  plan_.n = n;
  nodes_.resize(n + 1);
  for (std::size_t k = 0; k <= n; ++k) nodes_[k] = static_cast<double>(k) / static_cast<double>(n);
  std::vector<StepFunction> at_nodes;
  at_nodes.reserve(n + 1);
  for (double t : nodes_) at_nodes.push_back(H_(t));
  plan_.increments.reserve(n);
  plan_.lifts.reserve(n);
  for (std::size_t k = 1; k <= n; ++k) {
    plan_.increments.push_back(at_nodes[k] - at_nodes[k - 1]);
    plan_.lifts.emplace_back(plan_.increments.back(), sp);
  }
}

StepFunction CorrectedPath::operator()(double t) const {
  // Segment k spans [nodes_[k-1], nodes_[k]]; a node belongs to the segment it ends.
  auto it = std::lower_bound(nodes_.begin() + 1, nodes_.end(), t);
  if (it == nodes_.end()) --it;
  const std::size_t k = static_cast<std::size_t>(it - nodes_.begin());
  const double a = nodes_[k - 1];
  const double b = nodes_[k];
  const double u = std::clamp((t - a) / (b - a), 0.0, 1.0);
  const StepFunction drift = H_(t) - H_(a);
  return drift - plan_.lifts[k - 1](u);
}

TimeGrid CorrectedPath::node_grid(const TimeGrid& grid) const { return grid.merged(TimeGrid(nodes_)); }

SampledCurve endpoint_correction(const IntegralPath& H, std::size_t n, const SpaceParams& sp, const TimeGrid& grid) {
  auto path = std::make_shared<const CorrectedPath>(H, n, sp);
  return SampledCurve::sample(path->node_grid(grid), [path](double t) { return (*path)(t); });
}

SegmentBoundReport check_segment_bound(const SampledCurve& Fn, const IntegralPath& H, std::size_t n,
                                       const SpaceParams& sp, double slack) {
  SegmentBoundReport r;
  const auto& g = Fn.grid();
  const auto vals = Fn.values();
  const double inv_n = 1.0 / static_cast<double>(n);
  r.eta = eta_modulus(H, inv_n, sp, g);
  r.constant = std::pow(2.0, sp.inv_p()) * std::pow(2.0, sp.inv_p());
  for (std::size_t k = 0; k <= n; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(n);
    auto it = std::lower_bound(g.nodes().begin(), g.nodes().end(), t);
    if (it == g.nodes().end() || *it != t) continue;
    const auto idx = static_cast<std::size_t>(it - g.nodes().begin());
    r.max_node_norm = std::max(r.max_node_norm, lp_norm(vals[idx], sp));
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      const double gap = g[j] - g[i];
      const double norm = sp.root(p_mass_of_difference(vals[j], vals[i], sp));
      const double span = std::min(gap, inv_n);
      const double rhs = r.constant * r.eta * span;
      ++r.pairs;
      if (norm > rhs + slack) ++r.violations;
      r.max_ratio = std::max(r.max_ratio, norm / span);
      r.c1_seminorm = std::max(r.c1_seminorm, norm / gap);
    }
  }
  r.holds = r.violations == 0 && r.max_node_norm == 0.0;
  return r;
}

// ---------------------------------------------------------------------------

StepFunction PrimitiveResult::operator()(double t) const {
  StepFunction sum;
  for (const auto& step : steps) sum = sum + (*step)(t);
  return sum;
}

double derivative_residual(const SampledCurve& F, const SampledCurve& f, const SpaceParams& sp) {
  const SampledCurve d = differentiate_numeric(F);
  const auto& g = F.grid();
  double best = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    best = std::max(best, p_mass_of_difference(d[i], f.value_at(g[i]), sp));
  }
  return sp.root(best);
}

namespace {

struct StepChoice {
  std::size_t n = 0;
  double eta = 0.0;
};

// Smallest power of two n whose eta(1/n), measured over the pairs of the
// sampling grid, is within target.
StepChoice choose_segments(const IntegralPath& H, const TimeGrid& grid, double target, const SpaceParams& sp,
                           std::size_t n_cap) {
  for (std::size_t n = 1; n <= n_cap; n *= 2) {
    // Node increments are pairs of the family, so each bounds eta(1/n) from below.
    double node_ratio = 0.0;
    StepFunction prev = H(0.0);
    for (std::size_t k = 1; k <= n; ++k) {
      StepFunction next = H(static_cast<double>(k) / static_cast<double>(n));
      node_ratio = std::max(node_ratio, lp_distance(next, prev, sp) * static_cast<double>(n));
      prev = std::move(next);
    }
    if (node_ratio > target) continue;
    TimeGrid family = grid;
    for (std::size_t k = 1; k < n; ++k) {
      if (!family.contains(static_cast<double>(k) / static_cast<double>(n))) {
        family = family.merged(TimeGrid::uniform(n));
        break;
      }
    }
    const double eta = eta_modulus(H, 1.0 / static_cast<double>(n), sp, family);
    if (eta <= target) return {n, eta};
  }
  fail(ErrorKind::DoublingCap, "segment count for the endpoint correction exceeded cap " + std::to_string(n_cap));
}

}  // namespace

PrimitiveResult construct_primitive(const SampledCurve& f, const SpaceParams& sp, const PrimitiveOptions& opts) {
  if (!(opts.tol > 0.0)) fail(ErrorKind::InvalidArgument, "primitive tolerance must be positive");
  const TimeGrid grid = TimeGrid::uniform(opts.time_cells);
  const SampledCurve f_on_grid = f.resampled(grid);
  const double f_sup = sup_norm(f_on_grid, sp, opts.dense_factor);

  auto hs = std::make_shared<std::vector<PiecewiseLinearPath>>();
  auto remainder_at = [&f, hs](double t) {
    StepFunction r = f.value_at(t);
    for (const auto& h : *hs) r = r - h(t);
    return r;
  };

  PrimitiveResult result{SampledCurve(grid, std::vector<StepFunction>(grid.size())), {}, {}, {}, {}, {}, {}, {}, {}};
  TimeGrid f_grid = grid;
  const double lift_constant = std::pow(4.0, sp.inv_p());  // 2^{1/p}(M^p+1)^{1/p}, M = 1

  auto steps = std::make_shared<std::vector<std::shared_ptr<const CorrectedPath>>>();
  auto evaluate = [steps](double t) {
    StepFunction sum;
    for (const auto& s : *steps) sum = sum + (*s)(t);
    return sum;
  };
  // sup over f_grid of ||D_num F - sum_i h_i||.
  auto slack_of = [&](const SampledCurve& F) {
    const SampledCurve d = differentiate_numeric(F);
    double worst = 0.0;
    for (std::size_t i = 0; i < F.grid().size(); ++i) {
      StepFunction exact;
      for (const auto& h : *hs) exact = exact + h(F.grid()[i]);
      worst = std::max(worst, p_mass_of_difference(d[i], exact, sp));
    }
    return sp.root(worst);
  };
  // Remainder sup over the dense construction grid and every node of F.
  auto remainder_sup = [&] {
    double worst = sup_norm(SampledCurve::sample(grid, remainder_at), sp, opts.dense_factor);
    for (double t : f_grid.nodes()) {
      if (!grid.contains(t)) worst = std::max(worst, lp_norm(remainder_at(t), sp));
    }
    return worst;
  };

  double r_sup = f_sup;
  double slack = 0.0;
  for (std::size_t i = 0;; ++i) {
    // Stop once ||r|| <= tol and the p-triangle inequality certifies
    // ||D_num F - f|| <= (slack^p + ||r||^p)^{1/p} <= tol + slack.
    if (r_sup <= opts.tol) {
      if (steps->empty()) break;
      slack = slack_of(SampledCurve::sample(f_grid, evaluate));
      const double budget =
          std::pow(std::max(0.0, std::pow(slack + opts.tol, sp.p()) - std::pow(slack, sp.p())), sp.inv_p());
      if (r_sup <= budget) break;
    }
    if (i == opts.iteration_cap) {
      fail(ErrorKind::IterationCap, "primitive construction did not converge within " +
                                        std::to_string(opts.iteration_cap) + " iterations (remainder " +
                                        std::to_string(r_sup) + ")");
    }
    const SampledCurve r = SampledCurve::sample(grid, remainder_at);
    IterationRecord rec;
    rec.iter = i;
    rec.eps = f_sup * std::ldexp(1.0, -static_cast<int>(i + 1));
    PiecewiseLinearPath h = approximate_piecewise_linear(r, rec.eps, sp, {opts.n_cap, 3, opts.dense_factor});
    rec.segments = h.segments();
    rec.h_sup = sup_norm(h.sample(grid), sp, opts.dense_factor);
    IntegralPath H(h);
    const double target = opts.target_factor * std::max(r_sup, rec.h_sup);
    const StepChoice choice = choose_segments(H, grid, target, sp, opts.n_cap);
    rec.n = choice.n;
    rec.eta = choice.eta;
    rec.c1_bound = lift_constant * choice.eta;

    auto step = std::make_shared<const CorrectedPath>(std::move(H), choice.n, sp);
    f_grid = step->node_grid(f_grid);
    steps->push_back(step);
    hs->push_back(std::move(h));

    r_sup = remainder_sup();
    rec.residual = r_sup;
    result.trace.push_back(rec);
  }
  result.remainder = r_sup;
  result.steps = *steps;

  double bound_mass = 0.0;
  for (const auto& rec : result.trace) bound_mass += std::pow(rec.c1_bound, sp.p());
  result.c1_bound = std::pow(bound_mass, sp.inv_p());

  result.F = SampledCurve::sample(f_grid, evaluate);
  result.residual = derivative_residual(result.F, f, sp);
  result.discretization_slack = steps->empty() ? 0.0 : slack_of(result.F);

  if (opts.verify_fine) {
    const SampledCurve fine = SampledCurve::sample(f_grid.refined(opts.fine_factor), evaluate);
    result.residual_fine = derivative_residual(fine, f, sp);
  }
  if (opts.compute_c1) result.c1_estimate = c1_norm_estimate(result.F, sp).total;
  return result;
}

SampledCurve generator_curve(const std::string& name, std::size_t m, std::size_t time_cells) {
  if (m == 0 || time_cells == 0) fail(ErrorKind::InvalidArgument, "generator needs m >= 1 and time cells >= 1");
  const TimeGrid grid = TimeGrid::uniform(time_cells);
  if (name == "zero") {
    return SampledCurve::sample(grid, [](double) { return StepFunction(); });
  }
  if (name == "constant") {
    const StepFunction one(GridFunction::constant(m, 1.0));
    return SampledCurve::sample(grid, [one](double) { return one; });
  }
  if (name == "indicator-path") {
    const StepFunction one(GridFunction::constant(1, 1.0));
    return SampledCurve::sample(grid, [one](double t) { return one.truncated(std::clamp(t, 0.0, 1.0)); });
  }
  fail(ErrorKind::InvalidArgument, "unknown generator '" + name + "'");
}

}  // namespace qprim
