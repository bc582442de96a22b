#pragma once

// Construction of primitives for continuous L_p-valued paths: piecewise-linear
// approximation, exact integration, endpoint correction by zero-derivative
// lifts, and the geometric-series iteration that removes the approximation
// error.

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "qprim/curves.hpp"

namespace qprim {

/// Affine interpolation of node values.
class PiecewiseLinearPath {
 public:
  PiecewiseLinearPath(TimeGrid nodes, std::vector<StepFunction> values);

  const TimeGrid& nodes() const noexcept { return nodes_; }
  std::span<const StepFunction> values() const noexcept { return values_; }
  std::size_t segments() const noexcept { return nodes_.cells(); }

  StepFunction operator()(double t) const;
  SampledCurve sample(const TimeGrid& grid) const;

 private:
  TimeGrid nodes_;
  std::vector<StepFunction> values_;
};

/// H(t) = int_0^t h, exact: quadratic on each segment of h.
class IntegralPath {
 public:
  explicit IntegralPath(PiecewiseLinearPath h);

  const PiecewiseLinearPath& integrand() const noexcept { return h_; }
  std::span<const StepFunction> node_integrals() const noexcept { return node_integrals_; }

  StepFunction operator()(double t) const;
  SampledCurve sample(const TimeGrid& grid) const;

 private:
  PiecewiseLinearPath h_;
  std::vector<StepFunction> node_integrals_;
};

struct PlOptions {
  std::size_t max_segments = std::size_t{1} << 14;
  std::size_t probes_per_segment = 3;  // at j/(probes+1); 3 gives quarter points and the midpoint
  /// f's own grid is also checked, refined by this factor when f has an evaluator.
  std::size_t dense_factor = kDefaultDenseFactor;
};

/// Interpolates f at n uniform nodes, doubling n until both the probed error
/// and the error over f's grid are below eps. Throws DoublingCap when max_segments is reached first.
PiecewiseLinearPath approximate_piecewise_linear(const SampledCurve& f, double eps, const SpaceParams& sp,
                                                 const PlOptions& opts = {});

/// Sup of probed ||f(t) - h(t)|| with `probes` points per segment of h.
double probed_error(const SampledCurve& f, const PiecewiseLinearPath& h, const SpaceParams& sp,
                    std::size_t probes);

/// Sup of ||f(t) - h(t)|| over f's grid, refined by `dense_factor` when f has
/// an evaluator.
double grid_error(const SampledCurve& f, const PiecewiseLinearPath& h, const SpaceParams& sp,
                  std::size_t dense_factor);

IntegralPath integrate_pl(const PiecewiseLinearPath& h);

/// Sup of ||H(t) - H(s)|| / |t - s| over pairs of `family` with |t - s| <= eps.
double eta_modulus(const IntegralPath& H, double eps, const SpaceParams& sp, const TimeGrid& family);
/// Same, over a uniform family with max(256, 16/eps) cells (capped at 2^16).
double eta_modulus(const IntegralPath& H, double eps, const SpaceParams& sp);

/// Values of H on a fixed grid with every pair's divided difference; answers
/// eta(eps) queries for any eps in O(log) after one O(m^2) scan.
class EtaTable {
 public:
  EtaTable(const IntegralPath& H, const TimeGrid& grid, const SpaceParams& sp);
  double operator()(double eps) const;
  const TimeGrid& grid() const noexcept { return grid_; }

 private:
  TimeGrid grid_;
  std::vector<double> gaps_;     // sorted
  std::vector<double> prefix_;   // running max of the divided difference norm
};

/// Increments x_k = H(k/n) - H((k-1)/n) and their zero-derivative lifts.
struct CorrectionPlan {
  std::size_t n = 0;
  std::vector<StepFunction> increments;
  std::vector<LiftCurve> lifts;
};

/// F_n(t) = H(t) - H((k-1)/n) - f_k(nt - k + 1) on [(k-1)/n, k/n], where f_k
/// lifts the k-th increment. F_n vanishes at every k/n and DF_n = h.
class CorrectedPath {
 public:
  CorrectedPath(IntegralPath H, std::size_t n, const SpaceParams& sp);

  const IntegralPath& integral() const noexcept { return H_; }
  const CorrectionPlan& plan() const noexcept { return plan_; }
  std::size_t n() const noexcept { return plan_.n; }

  StepFunction operator()(double t) const;
  /// Grid t with all nodes k/n adjoined.
  TimeGrid node_grid(const TimeGrid& grid) const;

 private:
  IntegralPath H_;
  CorrectionPlan plan_;
  std::vector<double> nodes_;  // k/n
};

/// Samples F_n on the union of `grid` and the points k/n.
SampledCurve endpoint_correction(const IntegralPath& H, std::size_t n, const SpaceParams& sp, const TimeGrid& grid);

struct SegmentBoundReport {
  double eta = 0.0;         // eta(1/n) over the pairs of the sampling grid
  double constant = 0.0;    // 2^{1/p} (M^p + 1)^{1/p} with M = 1
  double max_ratio = 0.0;   // max ||F_n(t)-F_n(s)|| / min(t-s, 1/n)
  double c1_seminorm = 0.0; // max ||F_n(t)-F_n(s)|| / (t-s)
  double max_node_norm = 0.0;
  std::size_t pairs = 0;
  std::size_t violations = 0;
  bool holds = false;
};

/// Checks ||F_n(t)-F_n(s)|| <= 2^{1/p}(M^p+1)^{1/p} eta(1/n) min(t-s, 1/n) at
/// every pair of F_n's grid, and that F_n vanishes at every k/n.
SegmentBoundReport check_segment_bound(const SampledCurve& Fn, const IntegralPath& H, std::size_t n,
                                       const SpaceParams& sp, double slack = 1e-9);

struct PrimitiveOptions {
  double tol = 1e-3;
  std::size_t time_cells = 1024;
  std::size_t iteration_cap = 40;
  std::size_t n_cap = std::size_t{1} << 14;
  /// eta_i(1/n_i) must not exceed this factor times the step's sup-norm scale.
  double target_factor = 1.125;
  std::size_t dense_factor = kDefaultDenseFactor;
  std::size_t fine_factor = 4;
  bool compute_c1 = true;
  bool verify_fine = true;
};

struct IterationRecord {
  std::size_t iter = 0;
  double eps = 0.0;
  std::size_t segments = 0;  // of h_i
  std::size_t n = 0;
  double eta = 0.0;
  double h_sup = 0.0;
  double c1_bound = 0.0;  // 4^{1/p} M eta_i(1/n_i)
  double residual = 0.0;  // sup-norm of r_{i+1}
};

struct PrimitiveResult {
  SampledCurve F;
  /// sup ||D_num F - f|| on the construction grid.
  double residual = 0.0;
  /// Same on the grid refined by fine_factor (0 when not verified).
  double residual_fine = 0.0;
  /// sup ||D_num F - sum_i h_i||: the part of the residual due to the grid.
  double discretization_slack = 0.0;
  /// sup-norm of the last approximation remainder f - sum_i h_i.
  double remainder = 0.0;
  double c1_estimate = 0.0;
  /// (sum_i c1_bound_i^p)^{1/p}
  double c1_bound = 0.0;
  std::vector<IterationRecord> trace;
  std::vector<std::shared_ptr<const CorrectedPath>> steps;

  StepFunction operator()(double t) const;
};

/// Builds F with DF = f up to `tol`. Throws IterationCap or DoublingCap.
PrimitiveResult construct_primitive(const SampledCurve& f, const SpaceParams& sp, const PrimitiveOptions& opts = {});

/// sup ||D_num F - f|| over `grid`, with f read through its evaluator.
double derivative_residual(const SampledCurve& F, const SampledCurve& f, const SpaceParams& sp);

/// Built-in test curves on a uniform grid of `time_cells` cells:
///   "zero"            f = 0
///   "constant"        f = 1 on m spatial cells
///   "indicator-path"  f(t) = 1_[0,t]
/// Throws InvalidArgument for an unknown name.
SampledCurve generator_curve(const std::string& name, std::size_t m, std::size_t time_cells);

}  // namespace qprim
