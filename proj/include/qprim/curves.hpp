#pragma once

// Paths I -> L_p: sampled curves, the C(I;X) sup-norm, the C^1 quasi-norm
// and the explicit zero-derivative lift.

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qprim/space_kernel.hpp"

namespace qprim {

/// Strictly increasing nodes t_0 = 0 < ... < t_m = 1.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> nodes);
  /// m uniform cells, m + 1 nodes j/m.
  static TimeGrid uniform(std::size_t cells);

  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t cells() const noexcept { return nodes_.size() - 1; }
  double operator[](std::size_t i) const { return nodes_[i]; }
  std::span<const double> nodes() const noexcept { return nodes_; }

  /// Index k with t_k <= t <= t_{k+1}, clamped to [0, cells()-1].
  std::size_t segment_of(double t) const;
  bool contains(double t) const;

  /// Union of the two node sets.
  TimeGrid merged(const TimeGrid& other) const;
  /// Each cell split into `factor` equal subcells (original nodes kept).
  TimeGrid refined(std::size_t factor) const;

 private:
  std::vector<double> nodes_;
};

using CurveEvaluator = std::function<StepFunction(double)>;

/// A path sampled on a time grid. When an evaluator is attached the curve is
/// exactly computable at every t; otherwise it is read as the affine
/// interpolant of its node values.
class SampledCurve {
 public:
  SampledCurve(TimeGrid grid, std::vector<StepFunction> values);
  static SampledCurve sample(TimeGrid grid, CurveEvaluator evaluator);

  const TimeGrid& grid() const noexcept { return grid_; }
  std::span<const StepFunction> values() const noexcept { return values_; }
  const StepFunction& operator[](std::size_t i) const { return values_[i]; }
  bool has_evaluator() const noexcept { return static_cast<bool>(evaluator_); }

  StepFunction value_at(double t) const;
  /// Same curve, re-sampled on another grid. Requires an evaluator or uses
  /// affine interpolation.
  SampledCurve resampled(const TimeGrid& grid) const;

  /// Closed-form C^1 quasi-norm, when known (lifts).
  std::optional<double> exact_c1() const noexcept { return exact_c1_; }
  void set_exact_c1(double v) { exact_c1_ = v; }

 private:
  TimeGrid grid_;
  std::vector<StepFunction> values_;
  CurveEvaluator evaluator_;
  std::optional<double> exact_c1_;
};

/// Dense refinement factor used by sup_norm for curves with an evaluator.
inline constexpr std::size_t kDefaultDenseFactor = 4;

double sup_norm(const SampledCurve& f, const SpaceParams& sp, std::size_t dense_factor = kDefaultDenseFactor);

struct C1Report {
  double at_zero = 0.0;
  double seminorm = 0.0;  // max over node pairs of ||f(t)-f(s)||/(t-s)
  double total = 0.0;
  std::optional<double> exact;
};

/// Grid lower bound of ||f||_{C^1}; scans every node pair.
C1Report c1_norm_estimate(const SampledCurve& f, const SpaceParams& sp);

/// The curve t -> x * 1_[0, tau(t)], where tau is chosen so that
/// int_0^tau(t) |x|^p = t * int_0^1 |x|^p. Every increment then satisfies
/// ||F(t) - F(s)|| = ||x|| |t - s|^{1/p}, so F has zero derivative, F(0) = 0,
/// F(1) = x and ||F||_{C^1} = ||x||.
class LiftCurve {
 public:
  LiftCurve(StepFunction x, SpaceParams sp);

  const StepFunction& source() const noexcept { return source_; }
  const SpaceParams& params() const noexcept { return sp_; }
  double source_norm() const noexcept { return source_norm_; }
  bool is_zero() const noexcept { return total_mass_ == 0.0; }

  /// tau(t); nondecreasing with tau(0) = 0 and tau(1) = 1.
  double cut(double t) const;
  /// Breakpoints (fraction, position) of the piecewise-linear tau.
  std::span<const double> cut_fractions() const noexcept { return fractions_; }

  StepFunction value(double t) const;
  StepFunction operator()(double t) const { return value(t); }

  /// Closed form ||F(t) - F(s)||.
  double increment_norm(double s, double t) const;
  /// Exact C^1 quasi-norm, equal to ||x||.
  double c1_norm() const noexcept { return source_norm_; }

  SampledCurve sample(const TimeGrid& grid) const;

 private:
  StepFunction source_;
  SpaceParams sp_;
  std::vector<double> fractions_;  // cumulative |x|^p mass at each breakpoint / total
  double total_mass_ = 0.0;
  double source_norm_ = 0.0;
};

LiftCurve zero_derivative_lift(const GridFunction& x, const SpaceParams& sp);
LiftCurve zero_derivative_lift(const StepFunction& x, const SpaceParams& sp);

enum class QuotientSource {
  Analytic,      // closed-form increment norm
  Materialized,  // norm of the materialized truncation difference
};

struct RateFit {
  std::vector<double> deltas;
  std::vector<double> quotients;  // sup over t-s = delta of ||F(t)-F(s)||/delta
  double slope = 0.0;
  double intercept = 0.0;
  bool degenerate = false;  // every quotient zero; no fit
};

/// Log-log least-squares slope of the sup divided-difference norm against the
/// gap. For a lift the slope is 1/p - 1.
RateFit lift_rate_check(const LiftCurve& f, std::span<const double> deltas,
                        QuotientSource source = QuotientSource::Analytic);

/// Least-squares slope of log(y) against log(x).
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
};
LogLogFit fit_log_log(std::span<const double> x, std::span<const double> y);

/// Central divided differences at interior nodes, one-sided at the ends.
SampledCurve differentiate_numeric(const SampledCurve& f);

}  // namespace qprim
