#include "qprim/space_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qprim/error.hpp"

namespace qprim {

SpaceParams::SpaceParams(double p) : p_(p), half_(p == 0.5) {
  if (!(p > 0.0 && p < 1.0)) {
    fail(ErrorKind::InvalidExponent, "exponent p must satisfy 0 < p < 1, got " + std::to_string(p));
  }
}

GridFunction::GridFunction(std::vector<double> cells) : cells_(std::move(cells)) {
  if (cells_.empty()) fail(ErrorKind::InvalidArgument, "grid function needs at least one cell");
  for (double v : cells_) {
    if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "grid function cell value is not finite");
  }
}

GridFunction GridFunction::zero(std::size_t m) { return constant(m, 0.0); }

GridFunction GridFunction::constant(std::size_t m, double value) {
  return GridFunction(std::vector<double>(m, value));
}

GridFunction GridFunction::refined(std::size_t factor) const {
  if (factor == 0) fail(ErrorKind::InvalidArgument, "refinement factor must be positive");
  std::vector<double> out;
  out.reserve(cells_.size() * factor);
  for (double v : cells_) out.insert(out.end(), factor, v);
  return GridFunction(std::move(out));
}

GridFunction GridFunction::scaled(double a) const {
  std::vector<double> out(cells_);
  for (double& v : out) v *= a;
  return GridFunction(std::move(out));
}

double p_mass(const GridFunction& x, const SpaceParams& sp) {
  double sum = 0.0;
  for (double v : x.cells()) sum += sp.pow_p(v);
  return sum / static_cast<double>(x.size());
}

double lp_norm(const GridFunction& x, const SpaceParams& sp) {
  return sp.root(p_mass(x, sp));
}

GridFunction refine_and_combine(const GridFunction& x, const GridFunction& y, double a, double b,
                                std::size_t cap) {
  const std::size_t m = std::lcm(x.size(), y.size());
  if (m > cap) {
    fail(ErrorKind::RefinementCap, "common refinement of " + std::to_string(x.size()) + " and " +
                                       std::to_string(y.size()) + " cells exceeds cap " +
                                       std::to_string(cap));
  }
  const std::size_t fx = m / x.size();
  const std::size_t fy = m / y.size();
  std::vector<double> out(m);
  for (std::size_t i = 0; i < m; ++i) out[i] = a * x[i / fx] + b * y[i / fy];
  return GridFunction(std::move(out));
}

TriangleReport p_triangle_check(const GridFunction& x, const GridFunction& y, const SpaceParams& sp) {
  TriangleReport r;
  r.lhs = p_mass(refine_and_combine(x, y, 1.0, 1.0), sp);
  r.rhs = p_mass(x, sp) + p_mass(y, sp);
  r.holds = r.lhs <= r.rhs * (1.0 + kRelSlack);
  return r;
}

// ---------------------------------------------------------------------------

StepFunction::StepFunction() : breaks_{0.0, 1.0}, values_{0.0} {}

StepFunction::StepFunction(std::vector<double> breaks, std::vector<double> values)
    : breaks_(std::move(breaks)), values_(std::move(values)) {
  if (values_.empty() || breaks_.size() != values_.size() + 1) {
    fail(ErrorKind::InvalidArgument, "step function needs r >= 1 pieces and r+1 breakpoints");
  }
  if (breaks_.front() != 0.0 || breaks_.back() != 1.0) {
    fail(ErrorKind::InvalidArgument, "step function breakpoints must start at 0 and end at 1");
  }
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
    if (!(breaks_[i] < breaks_[i + 1])) {
      fail(ErrorKind::InvalidArgument, "step function breakpoints must be strictly increasing");
    }
  }
  for (double v : values_) {
    if (!std::isfinite(v)) fail(ErrorKind::InvalidArgument, "step function value is not finite");
  }
}

StepFunction::StepFunction(const GridFunction& g) {
  // Runs of equal cells become one piece.
  const std::size_t m = g.size();
  const auto c = g.cells();
  breaks_.push_back(0.0);
  for (std::size_t i = 0; i < m; ++i) {
    if (i + 1 < m && c[i + 1] == c[i]) continue;
    breaks_.push_back(static_cast<double>(i + 1) / static_cast<double>(m));
    values_.push_back(c[i]);
  }
}

double StepFunction::at(double u) const {
  if (u >= 1.0) return values_.back();
  if (u <= 0.0) return values_.front();
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), u);
  return values_[static_cast<std::size_t>(it - breaks_.begin()) - 1];
}

bool StepFunction::is_zero() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

StepFunction StepFunction::truncated(double u) const {
  if (u <= 0.0) return StepFunction();
  if (u >= 1.0) return *this;
  std::vector<double> b;
  std::vector<double> v;
  b.push_back(0.0);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (breaks_[i + 1] <= u) {
      b.push_back(breaks_[i + 1]);
      v.push_back(values_[i]);
      if (breaks_[i + 1] == u) break;
    } else {
      b.push_back(u);
      v.push_back(values_[i]);
      break;
    }
  }
  b.push_back(1.0);
  v.push_back(0.0);
  return StepFunction(std::move(b), std::move(v));
}

StepFunction StepFunction::scaled(double a) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= a;
  return StepFunction(breaks_, std::move(v));
}

GridFunction StepFunction::to_grid(std::size_t m) const {
  std::vector<double> cells(m);
  for (std::size_t i = 0; i < m; ++i) cells[i] = at((static_cast<double>(i) + 0.5) / static_cast<double>(m));
  return GridFunction(std::move(cells));
}

namespace {

// Visits the pieces of the merged partition of x and y as (length, vx, vy).
template <class Visit>
void merge_walk(const StepFunction& x, const StepFunction& y, Visit&& visit) {
  const auto bx = x.breaks();
  const auto by = y.breaks();
  const auto vx = x.values();
  const auto vy = y.values();
  std::size_t i = 0;
  std::size_t j = 0;
  double left = 0.0;
  while (i < vx.size() && j < vy.size()) {
    const double rx = bx[i + 1];
    const double ry = by[j + 1];
    const double right = std::min(rx, ry);
    if (right > left) visit(left, right, vx[i], vy[j]);
    left = right;
    if (rx == right) ++i;
    if (ry == right) ++j;
  }
}

}  // namespace

bool StepFunction::operator==(const StepFunction& other) const {
  bool same = true;
  merge_walk(*this, other, [&](double, double, double u, double w) { same = same && u == w; });
  return same;
}

StepFunction combine(const StepFunction& x, const StepFunction& y, double a, double b) {
  std::vector<double> br{0.0};
  std::vector<double> vals;
  br.reserve(x.pieces() + y.pieces() + 1);
  vals.reserve(x.pieces() + y.pieces());
  merge_walk(x, y, [&](double, double right, double u, double w) {
    br.push_back(right);
    vals.push_back(a * u + b * w);
  });
  return StepFunction(std::move(br), std::move(vals));
}

StepFunction operator+(const StepFunction& x, const StepFunction& y) { return combine(x, y, 1.0, 1.0); }
StepFunction operator-(const StepFunction& x, const StepFunction& y) { return combine(x, y, 1.0, -1.0); }

double p_mass(const StepFunction& x, const SpaceParams& sp) {
  double sum = 0.0;
  const auto b = x.breaks();
  const auto v = x.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) sum += sp.pow_p(v[i]) * (b[i + 1] - b[i]);
  }
  return sum;
}

double lp_norm(const StepFunction& x, const SpaceParams& sp) { return sp.root(p_mass(x, sp)); }

double p_mass_of_combination(const StepFunction& x, const StepFunction& y, double a, double b,
                             const SpaceParams& sp) {
  double sum = 0.0;
  merge_walk(x, y, [&](double left, double right, double u, double w) {
    const double d = a * u + b * w;
    if (d != 0.0) sum += sp.pow_p(d) * (right - left);
  });
  return sum;
}

double lp_distance(const StepFunction& x, const StepFunction& y, const SpaceParams& sp) {
  return sp.root(p_mass_of_difference(x, y, sp));
}

double p_mass_between(const StepFunction& x, double lo, double hi, const SpaceParams& sp) {
  lo = std::clamp(lo, 0.0, 1.0);
  hi = std::clamp(hi, 0.0, 1.0);
  if (hi <= lo) return 0.0;
  double sum = 0.0;
  const auto b = x.breaks();
  const auto v = x.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double l = std::max(lo, b[i]);
    const double r = std::min(hi, b[i + 1]);
    if (r > l && v[i] != 0.0) sum += sp.pow_p(v[i]) * (r - l);
  }
  return sum;
}

}  // namespace qprim
