#include "qprim/curves.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "qprim/error.hpp"

namespace qprim {

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) fail(ErrorKind::InvalidArgument, "time grid needs at least two nodes");
  if (nodes_.front() != 0.0 || nodes_.back() != 1.0) {
    fail(ErrorKind::InvalidArgument, "time grid must start at 0 and end at 1");
  }
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
    if (!(nodes_[i] < nodes_[i + 1])) fail(ErrorKind::InvalidArgument, "time grid must be strictly increasing");
  }
}

TimeGrid TimeGrid::uniform(std::size_t cells) {
  if (cells == 0) fail(ErrorKind::InvalidArgument, "time grid needs at least one cell");
  std::vector<double> nodes(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) nodes[i] = static_cast<double>(i) / static_cast<double>(cells);
  return TimeGrid(std::move(nodes));
}

std::size_t TimeGrid::segment_of(double t) const {
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  std::size_t k = it == nodes_.begin() ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
  return std::min(k, cells() - 1);
}

bool TimeGrid::contains(double t) const { return std::binary_search(nodes_.begin(), nodes_.end(), t); }

TimeGrid TimeGrid::merged(const TimeGrid& other) const {
  std::vector<double> out;
  out.reserve(size() + other.size());
  std::merge(nodes_.begin(), nodes_.end(), other.nodes_.begin(), other.nodes_.end(), std::back_inserter(out));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return TimeGrid(std::move(out));
}

TimeGrid TimeGrid::refined(std::size_t factor) const {
  if (factor == 0) fail(ErrorKind::InvalidArgument, "refinement factor must be positive");
  std::vector<double> out;
  out.reserve(cells() * factor + 1);
  for (std::size_t k = 0; k + 1 < nodes_.size(); ++k) {
    const double a = nodes_[k];
    const double b = nodes_[k + 1];
    out.push_back(a);
    for (std::size_t j = 1; j < factor; ++j) {
      out.push_back(a + (b - a) * static_cast<double>(j) / static_cast<double>(factor));
    }
  }
  out.push_back(1.0);
  return TimeGrid(std::move(out));
}

// ---------------------------------------------------------------------------

SampledCurve::SampledCurve(TimeGrid grid, std::vector<StepFunction> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    fail(ErrorKind::InvalidArgument, "sampled curve needs one value per time node");
  }
}

SampledCurve SampledCurve::sample(TimeGrid grid, CurveEvaluator evaluator) {
  std::vector<StepFunction> values;
  values.reserve(grid.size());
  for (double t : grid.nodes()) values.push_back(evaluator(t));
  SampledCurve c(std::move(grid), std::move(values));
  c.evaluator_ = std::move(evaluator);
  return c;
}

StepFunction SampledCurve::value_at(double t) const {
  if (evaluator_) return evaluator_(t);
  const std::size_t k = grid_.segment_of(t);
  const double a = grid_[k];
  const double b = grid_[k + 1];
  if (t == a) return values_[k];
  if (t == b) return values_[k + 1];
  const double lambda = (t - a) / (b - a);
  return combine(values_[k], values_[k + 1], 1.0 - lambda, lambda);
}

SampledCurve SampledCurve::resampled(const TimeGrid& grid) const {
  if (evaluator_) {
    SampledCurve c = sample(grid, evaluator_);
    c.exact_c1_ = exact_c1_;
    return c;
  }
  std::vector<StepFunction> values;
  values.reserve(grid.size());
  for (double t : grid.nodes()) values.push_back(value_at(t));
  return SampledCurve(grid, std::move(values));
}

double sup_norm(const SampledCurve& f, const SpaceParams& sp, std::size_t dense_factor) {
  double best = 0.0;
  for (const auto& v : f.values()) best = std::max(best, p_mass(v, sp));
  if (f.has_evaluator() && dense_factor > 1) {
    const auto& g = f.grid();
    for (std::size_t k = 0; k + 1 < g.size(); ++k) {
      for (std::size_t j = 1; j < dense_factor; ++j) {
        const double t = g[k] + (g[k + 1] - g[k]) * static_cast<double>(j) / static_cast<double>(dense_factor);
        best = std::max(best, p_mass(f.value_at(t), sp));
      }
    }
  }
  return sp.root(best);
}

C1Report c1_norm_estimate(const SampledCurve& f, const SpaceParams& sp) {
  C1Report r;
  const auto& g = f.grid();
  const auto vals = f.values();
  r.at_zero = lp_norm(vals[0], sp);
  double best = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      const double mass = p_mass_of_difference(vals[j], vals[i], sp);
      if (mass == 0.0) continue;
      best = std::max(best, sp.root(mass) / (g[j] - g[i]));
    }
  }
  r.seminorm = best;
  r.total = r.at_zero + r.seminorm;
  r.exact = f.exact_c1();
  return r;
}

// ---------------------------------------------------------------------------

LiftCurve::LiftCurve(StepFunction x, SpaceParams sp) : source_(std::move(x)), sp_(sp) {
  const auto b = source_.breaks();
  const auto v = source_.values();
  std::vector<double> cumulative(b.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double piece = v[i] == 0.0 ? 0.0 : sp_.pow_p(v[i]) * (b[i + 1] - b[i]);
    cumulative[i + 1] = cumulative[i] + piece;
  }
  total_mass_ = cumulative.back();
  source_norm_ = sp_.root(total_mass_);
  fractions_.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    fractions_[i] = total_mass_ > 0.0 ? cumulative[i] / total_mass_ : b[i];
  }
  fractions_.back() = 1.0;
}

double LiftCurve::cut(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  if (total_mass_ == 0.0) return t;
  const auto b = source_.breaks();
  // First piece whose right-end fraction reaches t; its left-end fraction is < t.
  auto it = std::lower_bound(fractions_.begin() + 1, fractions_.end(), t);
  const std::size_t j = static_cast<std::size_t>(it - fractions_.begin()) - 1;
  const double c0 = fractions_[j];
  const double c1 = fractions_[j + 1];
  const double pos = b[j] + (t - c0) / (c1 - c0) * (b[j + 1] - b[j]);
  return std::clamp(pos, b[j], b[j + 1]);
}

StepFunction LiftCurve::value(double t) const {
  if (t >= 1.0) return source_;
  if (t <= 0.0 || total_mass_ == 0.0) return StepFunction();
  return source_.truncated(cut(t));
}

double LiftCurve::increment_norm(double s, double t) const {
  return source_norm_ * std::pow(std::abs(t - s), sp_.inv_p());
}

SampledCurve LiftCurve::sample(const TimeGrid& grid) const {
  auto self = std::make_shared<const LiftCurve>(*this);
  SampledCurve c = SampledCurve::sample(grid, [self](double t) { return self->value(t); });
  c.set_exact_c1(source_norm_);
  return c;
}

LiftCurve zero_derivative_lift(const GridFunction& x, const SpaceParams& sp) {
  return LiftCurve(StepFunction(x), sp);
}

LiftCurve zero_derivative_lift(const StepFunction& x, const SpaceParams& sp) { return LiftCurve(x, sp); }

LogLogFit fit_log_log(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) fail(ErrorKind::InvalidArgument, "log-log fit needs at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]);
    const double ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dn = static_cast<double>(n);
  const double denom = dn * sxx - sx * sx;
  if (denom == 0.0) fail(ErrorKind::InvalidArgument, "log-log fit needs distinct abscissae");
  LogLogFit fit;
  fit.slope = (dn * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / dn;
  return fit;
}

RateFit lift_rate_check(const LiftCurve& f, std::span<const double> deltas, QuotientSource source) {
  if (deltas.size() < 2) fail(ErrorKind::InvalidArgument, "rate check needs at least two gaps");
  constexpr int kOffsets = 16;
  RateFit fit;
  for (double delta : deltas) {
    if (!(delta > 0.0 && delta <= 1.0)) fail(ErrorKind::InvalidArgument, "rate check gaps must lie in (0,1]");
    double best = 0.0;
    for (int j = 0; j <= kOffsets; ++j) {
      const double s = (1.0 - delta) * j / kOffsets;
      const double t = std::min(1.0, s + delta);
      const double norm = source == QuotientSource::Analytic
                              ? f.increment_norm(s, t)
                              : lp_distance(f.value(t), f.value(s), f.params());
      best = std::max(best, norm / delta);
    }
    fit.deltas.push_back(delta);
    fit.quotients.push_back(best);
  }
  fit.degenerate = std::all_of(fit.quotients.begin(), fit.quotients.end(), [](double q) { return q == 0.0; });
  if (!fit.degenerate) {
    const auto ll = fit_log_log(fit.deltas, fit.quotients);
    fit.slope = ll.slope;
    fit.intercept = ll.intercept;
  }
  return fit;
}

SampledCurve differentiate_numeric(const SampledCurve& f) {
  const auto& g = f.grid();
  if (g.size() < 3) fail(ErrorKind::InvalidArgument, "numeric derivative needs at least three nodes");
  const auto v = f.values();
  const std::size_t last = g.size() - 1;
  std::vector<StepFunction> d;
  d.reserve(g.size());
  auto quotient = [&](std::size_t lo, std::size_t hi) {
    const double w = 1.0 / (g[hi] - g[lo]);
    return combine(v[hi], v[lo], w, -w);
  };
  d.push_back(quotient(0, 1));
  for (std::size_t i = 1; i < last; ++i) d.push_back(quotient(i - 1, i + 1));
  d.push_back(quotient(last - 1, last));
  return SampledCurve(g, std::move(d));
}

}  // namespace qprim
