#pragma once

// The spaces of the counterexample: the Ribe twisted sum Z of R and l_1, the
// Lorentz space L(1,q), their product, and the quotient of Y x Z by the line
// {(j z, z) : z in L}.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qprim/space_kernel.hpp"

namespace qprim {

/// (alpha, x): twist coordinate plus a finitely supported sequence.
struct RibeElement {
  double alpha = 0.0;
  std::vector<double> coords;
};

/// sum_i x_i log|x_i| - s log|s| with s = sum_i x_i and 0 log 0 = 0.
double ribe_functional(std::span<const double> coords);
/// |alpha - F(x)| + ||x||_1.
double ribe_norm(const RibeElement& z);
RibeElement ribe_combine(const RibeElement& a, const RibeElement& b, double s, double t);
/// e_1 + ... + e_N.
RibeElement ribe_basis_sum(std::size_t n);

struct QuasiTriangleReport {
  double max_ratio = 0.0;  // sup ||a+b|| / (||a|| + ||b||)
  std::size_t pairs = 0;
};

/// Randomized measurement of the quasi-triangle constant of the Ribe norm.
QuasiTriangleReport ribe_quasi_triangle(std::size_t pairs, std::size_t dim, std::uint64_t seed);

class LorentzFunction {
 public:
  /// Throws InvalidArgument unless q > 1.
  LorentzFunction(StepFunction f, double q);
  const StepFunction& function() const noexcept { return f_; }
  double q() const noexcept { return q_; }

 private:
  StepFunction f_;
  double q_;
};

/// (int_0^1 (t f*(t))^q dt/t)^{1/q}, evaluated piecewise on the decreasing
/// rearrangement in closed form.
double lorentz_norm(const StepFunction& f, double q);
double lorentz_norm(const LorentzFunction& f);

/// Unit vector y0 = 1_[0,1] / ||1_[0,1]||, the image of the twist line.
StepFunction lorentz_unit_constant(double q);

struct ProductElement {
  LorentzFunction y;
  RibeElement z;
};

/// max(||y||_Y, ||z||_Z).
double product_norm(const ProductElement& e);

struct QuotientElement {
  ProductElement representative;
  StepFunction y0;  // j(u)
  RibeElement u;    // spans L
};

/// The quotient element with direction (y0, (1, 0)).
QuotientElement make_quotient_element(ProductElement representative);

struct QuotientNormResult {
  double value = 0.0;
  double argmin = 0.0;
  double representative_norm = 0.0;
};

struct QuotientOptions {
  std::size_t scan_points = 1000;
  double golden_tol = 1e-12;
};

/// inf over lambda of max(||y - lambda y0||, ||z - lambda u||): global scan of
/// [-2R, 2R] then golden-section refinement of the best bracket. Throws
/// Divergence when the scan minimum sits on the boundary.
QuotientNormResult quotient_norm(const QuotientElement& e, const QuotientOptions& opts = {});

/// Golden-section minimizer on [a, b]; returns the abscissa.
double golden_section_minimize(const std::function<double(double)>& fn, double a, double b, double tol);

enum class SpaceTag { Lp, Ribe, Lorentz, Scalar };
enum class FamilyTag { DisjointIndicators, RibeBasis, DyadicScales, Custom };

std::optional<SpaceTag> parse_space_tag(const std::string& s);
std::optional<FamilyTag> parse_family_tag(const std::string& s);
std::string to_string(SpaceTag s);
std::string to_string(FamilyTag f);

struct AnEstimate {
  double lower = 0.0;               // ||x_1 + ... + x_N|| for the unit family
  std::optional<double> upper;      // N^{1/p} in L_p
};

struct SpaceConfig {
  double p = 0.5;  // L_p exponent
  double q = 2.0;  // Lorentz index
};

/// Certified lower bound on a_N from a unit-norm family. Throws
/// InvalidArgument on a family/space mismatch.
AnEstimate a_n_estimate(SpaceTag space, std::size_t n, FamilyTag family, const SpaceConfig& cfg = {});
/// Custom family in L_p or L(1,q); members are normalized to unit norm.
AnEstimate a_n_estimate(SpaceTag space, std::span<const StepFunction> family, const SpaceConfig& cfg = {});

struct CounterexampleRow {
  std::size_t n = 0;
  double an_z = 0.0;
  double an_y = 0.0;
  double an_x = 0.0;
  double ratio_y = 0.0;  // an_y / (N ln N)
  double ratio_x = 0.0;  // an_x / (N ln N)
  bool degenerate = false;  // N = 1: ln N = 0
};

std::vector<CounterexampleRow> counterexample_report(std::span<const std::size_t> ns, double q = 2.0);

}  // namespace qprim
