#pragma once

// Bump superpositions F(t) = sum_k phi(Nt - k + 1) x_k, averaging growth
// tables, and the a_N constant chain for primitives of bump derivatives.

#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "qprim/pathological_spaces.hpp"
#include "qprim/primitive.hpp"

namespace qprim {

/// Quintic smoothstep 6t^5 - 15t^4 + 10t^3, clamped to 0 below 0 and 1 above 1.
double bump(double t);
/// 30 t^2 (1-t)^2 on [0,1], zero outside.
double bump_derivative(double t);
/// max |phi'| = phi'(1/2) = 15/8.
double bump_derivative_max();

class BumpSuperposition {
 public:
  /// Throws InvalidArgument on an empty list.
  explicit BumpSuperposition(std::vector<StepFunction> xs);

  std::size_t size() const noexcept { return xs_.size(); }
  std::span<const StepFunction> terms() const noexcept { return xs_; }

  StepFunction operator()(double t) const;
  /// DF(t) = N phi'(Nt - k + 1) x_k for the k whose bump is active.
  StepFunction derivative(double t) const;
  /// F(t) - F(s), summed over the members whose weight differs.
  StepFunction difference(double s, double t) const;
  /// Uniform grid with at least `cells` cells containing every k/N.
  TimeGrid grid(std::size_t cells) const;

 private:
  std::pair<std::size_t, std::size_t> changing(double s, double t) const;

  std::vector<StepFunction> xs_;
};

/// Samples F on a grid containing every bump breakpoint. With `normalize`,
/// members with ||x_k|| > 1 are scaled to the unit sphere.
SampledCurve bump_superposition(std::vector<StepFunction> xs, std::size_t time_cells, const SpaceParams& sp,
                                bool normalize = false);

struct BumpDerivativeReport {
  double numeric_sup = 0.0;   // sup-norm of the numeric derivative
  double analytic_sup = 0.0;  // sup-norm of DF sampled densely
  double bound = 0.0;         // N K max ||x_k||
  bool holds = false;         // numeric_sup <= bound (1 + rel_slack)
};

BumpDerivativeReport check_bump_derivative(const BumpSuperposition& F, std::size_t time_cells, const SpaceParams& sp,
                                           double rel_slack = 1e-2);

/// N unit-norm indicators of the cells of the uniform N-grid in L_p.
std::vector<StepFunction> disjoint_unit_family(std::size_t n, const SpaceParams& sp);

struct AveragingRow {
  std::size_t n = 0;
  double value = 0.0;  // max over families of ||(x_1 + ... + x_N)/N||
};

std::vector<AveragingRow> averaging_growth(SpaceTag space, std::span<const std::size_t> ns, const SpaceConfig& cfg = {});

struct Theorem5Options {
  /// Primitive tolerance relative to ||DF||_inf.
  double relative_tol = 1e-2;
  PrimitiveOptions primitive{};
};

struct Theorem5Report {
  std::size_t n = 0;
  double p = 0.0;
  double M = 1.0;
  double K = 0.0;
  double increment_bound = 0.0;  // (M^p K^p + 1)^{1/p}
  std::vector<double> increments;  // ||H(k/N) - H((k-1)/N)||
  double max_increment = 0.0;
  double slack = 0.0;            // primitive residual slack
  double endpoint_norm = 0.0;    // ||H(1)||
  double an_core = 0.0;          // a_N(L_p) = N^{1/p}
  double chain_constant = 0.0;   // C = (M^p K^p + 1)^{1/p}
  double measured_m = 0.0;       // ||G||_{C^1} / ||DF||_inf (0 when not computed)
  std::size_t iterations = 0;
  double primitive_residual = 0.0;
  bool holds = false;
};

/// Builds F from `xs`, a primitive G of DF, and H = F - G; checks every
/// increment of H at the bump nodes against (M^p K^p + 1)^{1/p} and
/// ||H(1)|| <= C a_N(core).
Theorem5Report theorem5_consistency_check(std::vector<StepFunction> xs, const SpaceParams& sp,
                                          const Theorem5Options& opts = {});

}  // namespace qprim
