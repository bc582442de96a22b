#pragma once

// Step-function models of L_p[0,1], 0 < p < 1, with the p-homogeneous
// quasi-norm ||x|| = (int |x|^p)^{1/p}.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qprim {

/// Relative slack for floating-point equality assertions (2^-40).
inline constexpr double kRelSlack = 0x1p-40;

/// Default cap on the common refinement of two uniform grids.
inline constexpr std::size_t kDefaultRefinementCap = std::size_t{1} << 20;

class SpaceParams {
 public:
  /// Throws InvalidExponent unless 0 < p < 1.
  explicit SpaceParams(double p);
  double p() const noexcept { return p_; }
  double inv_p() const noexcept { return 1.0 / p_; }
  /// |v|^p. At p = 1/2 this is the correctly rounded square root.
  double pow_p(double v) const noexcept { return half_ ? std::sqrt(std::abs(v)) : std::pow(std::abs(v), p_); }
  /// mass^{1/p}, the norm belonging to a p-mass.
  double root(double mass) const noexcept { return half_ ? mass * mass : std::pow(mass, 1.0 / p_); }

 private:
  double p_;
  bool half_ = false;
};

/// Element of L_p[0,1] that is constant on each of m uniform cells.
class GridFunction {
 public:
  /// Throws InvalidArgument for an empty or non-finite cell list.
  explicit GridFunction(std::vector<double> cells);
  static GridFunction zero(std::size_t m);
  static GridFunction constant(std::size_t m, double value);

  std::size_t size() const noexcept { return cells_.size(); }
  std::span<const double> cells() const noexcept { return cells_; }
  double operator[](std::size_t i) const { return cells_[i]; }

  /// Replicates each cell `factor` times; the represented function is unchanged.
  GridFunction refined(std::size_t factor) const;
  GridFunction scaled(double a) const;

  bool operator==(const GridFunction&) const = default;

 private:
  std::vector<double> cells_;
};

/// p-th power of the quasi-norm: (1/m) sum |v_i|^p.
double p_mass(const GridFunction& x, const SpaceParams& sp);
double lp_norm(const GridFunction& x, const SpaceParams& sp);

/// a*x + b*y on the least common refinement of the two grids. Throws
/// RefinementCap when that refinement would exceed `cap` cells.
GridFunction refine_and_combine(const GridFunction& x, const GridFunction& y, double a, double b,
                                std::size_t cap = kDefaultRefinementCap);

struct TriangleReport {
  double lhs = 0.0;  // ||x+y||^p
  double rhs = 0.0;  // ||x||^p + ||y||^p
  bool holds = false;
};

TriangleReport p_triangle_check(const GridFunction& x, const GridFunction& y, const SpaceParams& sp);

/// Piecewise-constant function on [0,1] with arbitrary breakpoints
/// 0 = b_0 < b_1 < ... < b_r = 1. Curve values live here because truncation
/// cuts fall at arbitrary real positions.
class StepFunction {
 public:
  StepFunction();  // the zero function
  StepFunction(std::vector<double> breaks, std::vector<double> values);
  explicit StepFunction(const GridFunction& g);

  std::size_t pieces() const noexcept { return values_.size(); }
  std::span<const double> breaks() const noexcept { return breaks_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Value at position u in [0,1] (right-continuous; the last piece is closed).
  double at(double u) const;
  bool is_zero() const noexcept;

  /// x * 1_[0,u], splitting the cut piece exactly.
  StepFunction truncated(double u) const;
  StepFunction scaled(double a) const;

  /// Samples cell midpoints of a uniform m-grid. Exact when every breakpoint is
  /// a multiple of 1/m.
  GridFunction to_grid(std::size_t m) const;

  /// Equal as functions: same value on every piece of the merged partition.
  bool operator==(const StepFunction& other) const;

 private:
  std::vector<double> breaks_;
  std::vector<double> values_;
};

/// a*x + b*y on the merged breakpoints (exact).
StepFunction combine(const StepFunction& x, const StepFunction& y, double a, double b);
StepFunction operator+(const StepFunction& x, const StepFunction& y);
StepFunction operator-(const StepFunction& x, const StepFunction& y);

double p_mass(const StepFunction& x, const SpaceParams& sp);
double lp_norm(const StepFunction& x, const SpaceParams& sp);

/// ||a*x + b*y||^p without materializing the combination.
double p_mass_of_combination(const StepFunction& x, const StepFunction& y, double a, double b,
                             const SpaceParams& sp);
inline double p_mass_of_difference(const StepFunction& x, const StepFunction& y, const SpaceParams& sp) {
  return p_mass_of_combination(x, y, 1.0, -1.0, sp);
}
double lp_distance(const StepFunction& x, const StepFunction& y, const SpaceParams& sp);

/// int_lo^hi |x|^p over [lo, hi] subset of [0,1], with partial pieces weighted
/// by their covered length.
double p_mass_between(const StepFunction& x, double lo, double hi, const SpaceParams& sp);

}  // namespace qprim
