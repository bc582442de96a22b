#include "qprim/pathological_spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "qprim/error.hpp"

namespace qprim {

namespace {

double x_log_abs_x(double x) { return x == 0.0 ? 0.0 : x * std::log(std::abs(x)); }

// A piece of a decreasing rearrangement, stored scale-free: `top` is the value
// times the right end b, `ratio` is a / b. Keeps the dyadic family finite
// where c and b alone would overflow and underflow.
struct ScaledPiece {
  double top;
  double ratio;
};

double lorentz_norm_scaled(std::span<const ScaledPiece> pieces, double q) {
  double sum = 0.0;
  for (const auto& piece : pieces) {
    if (piece.top == 0.0) continue;
    sum += std::pow(piece.top, q) * (1.0 - std::pow(piece.ratio, q)) / q;
  }
  return std::pow(sum, 1.0 / q);
}

void require_q(double q) {
  if (!(q > 1.0) || !std::isfinite(q)) fail(ErrorKind::InvalidArgument, "Lorentz index q must satisfy 1 < q < inf");
}

}  // namespace

double ribe_functional(std::span<const double> coords) {
  double sum = 0.0;
  double s = 0.0;
  for (double x : coords) {
    sum += x_log_abs_x(x);
    s += x;
  }
  return sum - x_log_abs_x(s);
}

double ribe_norm(const RibeElement& z) {
  double l1 = 0.0;
  for (double x : z.coords) l1 += std::abs(x);
  return std::abs(z.alpha - ribe_functional(z.coords)) + l1;
}

RibeElement ribe_combine(const RibeElement& a, const RibeElement& b, double s, double t) {
  RibeElement out;
  out.alpha = s * a.alpha + t * b.alpha;
  out.coords.assign(std::max(a.coords.size(), b.coords.size()), 0.0);
  for (std::size_t i = 0; i < a.coords.size(); ++i) out.coords[i] += s * a.coords[i];
  for (std::size_t i = 0; i < b.coords.size(); ++i) out.coords[i] += t * b.coords[i];
  return out;
}

RibeElement ribe_basis_sum(std::size_t n) { return RibeElement{0.0, std::vector<double>(n, 1.0)}; }

QuasiTriangleReport ribe_quasi_triangle(std::size_t pairs, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  std::uniform_int_distribution<int> sparse(0, 3);
  auto draw = [&] {
    RibeElement z;
    z.alpha = 4.0 * coord(rng);
    z.coords.resize(dim);
    for (double& x : z.coords) x = sparse(rng) == 0 ? 0.0 : coord(rng);
    return z;
  };
  QuasiTriangleReport r;
  for (std::size_t i = 0; i < pairs; ++i) {
    const RibeElement a = draw();
    const RibeElement b = draw();
    const double denom = ribe_norm(a) + ribe_norm(b);
    if (denom == 0.0) continue;
    r.max_ratio = std::max(r.max_ratio, ribe_norm(ribe_combine(a, b, 1.0, 1.0)) / denom);
    ++r.pairs;
  }
  return r;
}

// ---------------------------------------------------------------------------

LorentzFunction::LorentzFunction(StepFunction f, double q) : f_(std::move(f)), q_(q) { require_q(q); }

double lorentz_norm(const StepFunction& f, double q) {
  require_q(q);
  const auto b = f.breaks();
  const auto v = f.values();
  std::vector<std::pair<double, double>> parts;  // (|value|, length)
  parts.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0) parts.emplace_back(std::abs(v[i]), b[i + 1] - b[i]);
  }
  std::stable_sort(parts.begin(), parts.end(), [](const auto& l, const auto& r) { return l.first > r.first; });
  std::vector<ScaledPiece> pieces;
  pieces.reserve(parts.size());
  double left = 0.0;
  for (const auto& [value, length] : parts) {
    const double right = left + length;
    pieces.push_back({value * right, left / right});
    left = right;
  }
  return lorentz_norm_scaled(pieces, q);
}

double lorentz_norm(const LorentzFunction& f) { return lorentz_norm(f.function(), f.q()); }

StepFunction lorentz_unit_constant(double q) {
  const double scale = 1.0 / lorentz_norm(StepFunction(GridFunction::constant(1, 1.0)), q);
  return StepFunction(GridFunction::constant(1, scale));
}

double product_norm(const ProductElement& e) { return std::max(lorentz_norm(e.y), ribe_norm(e.z)); }

QuotientElement make_quotient_element(ProductElement representative) {
  const double q = representative.y.q();
  return QuotientElement{std::move(representative), lorentz_unit_constant(q), RibeElement{1.0, {}}};
}

double golden_section_minimize(const std::function<double(double)>& fn, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  for (int iter = 0; iter < 200 && std::abs(b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++iter) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = fn(d);
    }
  }
  return fc < fd ? c : d;
}

QuotientNormResult quotient_norm(const QuotientElement& e, const QuotientOptions& opts) {
  if (opts.scan_points < 3) fail(ErrorKind::InvalidArgument, "quotient scan needs at least three points");
  const double q = e.representative.y.q();
  const StepFunction& y = e.representative.y.function();
  auto objective = [&](double lambda) {
    const double ny = lorentz_norm(combine(y, e.y0, 1.0, -lambda), q);
    const double nz = ribe_norm(ribe_combine(e.representative.z, e.u, 1.0, -lambda));
    return std::max(ny, nz);
  };

  QuotientNormResult r;
  r.representative_norm = product_norm(e.representative);
  r.value = r.representative_norm;
  if (r.representative_norm == 0.0) return r;

  const double reach = 2.0 * r.representative_norm;
  const std::size_t n = opts.scan_points;
  std::vector<double> lambdas(n);
  std::vector<double> values(n);
  std::size_t best = 0;
  for (std::size_t k = 0; k < n; ++k) {
    lambdas[k] = -reach + 2.0 * reach * static_cast<double>(k) / static_cast<double>(n - 1);
    values[k] = objective(lambdas[k]);
    if (values[k] < values[best]) best = k;
  }
  if ((best == 0 || best == n - 1) && values[best] < r.representative_norm) {
    fail(ErrorKind::Divergence, "quotient minimizer reached the scan boundary; direction pair is invalid");
  }
  if (values[best] < r.value) {
    r.value = values[best];
    r.argmin = lambdas[best];
  }
  const double lo = lambdas[best == 0 ? 0 : best - 1];
  const double hi = lambdas[best == n - 1 ? n - 1 : best + 1];
  const double refined = golden_section_minimize(objective, lo, hi, opts.golden_tol);
  const double refined_value = objective(refined);
  if (refined_value < r.value) {
    r.value = refined_value;
    r.argmin = refined;
  }
  return r;
}

// ---------------------------------------------------------------------------

std::optional<SpaceTag> parse_space_tag(const std::string& s) {
  if (s == "lp" || s == "Lp" || s == "L_p") return SpaceTag::Lp;
  if (s == "ribe") return SpaceTag::Ribe;
  if (s == "lorentz") return SpaceTag::Lorentz;
  if (s == "scalar") return SpaceTag::Scalar;
  return std::nullopt;
}

std::optional<FamilyTag> parse_family_tag(const std::string& s) {
  if (s == "disjoint-indicators") return FamilyTag::DisjointIndicators;
  if (s == "ribe-basis") return FamilyTag::RibeBasis;
  if (s == "dyadic-scales") return FamilyTag::DyadicScales;
  if (s == "custom") return FamilyTag::Custom;
  return std::nullopt;
}

std::string to_string(SpaceTag s) {
  switch (s) {
    case SpaceTag::Lp: return "lp";
    case SpaceTag::Ribe: return "ribe";
    case SpaceTag::Lorentz: return "lorentz";
    case SpaceTag::Scalar: return "scalar";
  }
  return "?";
}

std::string to_string(FamilyTag f) {
  switch (f) {
    case FamilyTag::DisjointIndicators: return "disjoint-indicators";
    case FamilyTag::RibeBasis: return "ribe-basis";
    case FamilyTag::DyadicScales: return "dyadic-scales";
    case FamilyTag::Custom: return "custom";
  }
  return "?";
}

namespace {

[[noreturn]] void mismatch(SpaceTag s, FamilyTag f) {
  fail(ErrorKind::InvalidArgument, "family " + to_string(f) + " is not defined on space " + to_string(s));
}

// Sum of the N unit-norm indicators of the cells of the uniform N-grid.
GridFunction disjoint_sum(std::size_t n, double cell_value) {
  std::vector<double> sum(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) sum[k] += cell_value;
  return GridFunction(std::move(sum));
}

double lorentz_dyadic_sum_norm(std::size_t n, double q) {
  // x_i = 1_[0,2^-i] / ||1_[0,2^-i]||, i = 0..N-1; the sum is already decreasing.
  const double unit = std::pow(q, 1.0 / q);
  std::vector<ScaledPiece> pieces;
  pieces.reserve(n);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    pieces.push_back({unit * (2.0 - std::ldexp(1.0, -static_cast<int>(j))), 0.5});
  }
  pieces.push_back({unit * (2.0 - std::ldexp(1.0, -static_cast<int>(n - 1))), 0.0});
  return lorentz_norm_scaled(pieces, q);
}

}  // namespace

AnEstimate a_n_estimate(SpaceTag space, std::size_t n, FamilyTag family, const SpaceConfig& cfg) {
  if (n == 0) fail(ErrorKind::InvalidArgument, "a_N needs N >= 1");
  AnEstimate est;
  switch (space) {
    case SpaceTag::Lp: {
      if (family != FamilyTag::DisjointIndicators) mismatch(space, family);
      const SpaceParams sp(cfg.p);
      const double dn = static_cast<double>(n);
      // ||1_cell|| = N^{-1/p}
      est.lower = lp_norm(disjoint_sum(n, std::pow(dn, sp.inv_p())), sp);
      est.upper = std::pow(dn, sp.inv_p());
      return est;
    }
    case SpaceTag::Ribe:
      if (family != FamilyTag::RibeBasis) mismatch(space, family);
      est.lower = ribe_norm(ribe_basis_sum(n));
      return est;
    case SpaceTag::Lorentz: {
      require_q(cfg.q);
      if (family == FamilyTag::DisjointIndicators) {
        const double dn = static_cast<double>(n);
        const double cell_norm = (1.0 / dn) * std::pow(cfg.q, -1.0 / cfg.q);
        est.lower = lorentz_norm(StepFunction(disjoint_sum(n, 1.0 / cell_norm)), cfg.q);
        return est;
      }
      if (family == FamilyTag::DyadicScales) {
        est.lower = lorentz_dyadic_sum_norm(n, cfg.q);
        return est;
      }
      mismatch(space, family);
    }
    case SpaceTag::Scalar:
      if (family != FamilyTag::DisjointIndicators) mismatch(space, family);
      est.lower = static_cast<double>(n);
      return est;
  }
  mismatch(space, family);
}

AnEstimate a_n_estimate(SpaceTag space, std::span<const StepFunction> family, const SpaceConfig& cfg) {
  if (family.empty()) fail(ErrorKind::InvalidArgument, "custom family is empty");
  if (space != SpaceTag::Lp && space != SpaceTag::Lorentz) mismatch(space, FamilyTag::Custom);
  auto norm = [&](const StepFunction& f) {
    return space == SpaceTag::Lp ? lp_norm(f, SpaceParams(cfg.p)) : lorentz_norm(f, cfg.q);
  };
  StepFunction sum;
  for (const auto& x : family) {
    const double nx = norm(x);
    sum = nx > 0.0 ? combine(sum, x, 1.0, 1.0 / nx) : sum;
  }
  AnEstimate est;
  est.lower = norm(sum);
  if (space == SpaceTag::Lp) est.upper = std::pow(static_cast<double>(family.size()), 1.0 / cfg.p);
  return est;
}

std::vector<CounterexampleRow> counterexample_report(std::span<const std::size_t> ns, double q) {
  require_q(q);
  std::vector<CounterexampleRow> rows;
  const SpaceConfig cfg{0.5, q};
  const LorentzFunction y_zero(StepFunction(), q);
  // Quotient image of one basis vector; the family's common norm.
  const double member = quotient_norm(make_quotient_element({y_zero, RibeElement{0.0, {1.0}}})).value;
  std::size_t prev = 0;
  for (std::size_t n : ns) {
    if (n == 0 || n < prev) fail(ErrorKind::InvalidArgument, "counterexample N list must be positive and ascending");
    prev = n;
    CounterexampleRow row;
    row.n = n;
    row.an_z = a_n_estimate(SpaceTag::Ribe, n, FamilyTag::RibeBasis, cfg).lower;
    row.an_y = std::max(a_n_estimate(SpaceTag::Lorentz, n, FamilyTag::DisjointIndicators, cfg).lower,
                        a_n_estimate(SpaceTag::Lorentz, n, FamilyTag::DyadicScales, cfg).lower);
    row.an_x = quotient_norm(make_quotient_element({y_zero, ribe_basis_sum(n)})).value / member;
    const double nlogn = static_cast<double>(n) * std::log(static_cast<double>(n));
    row.degenerate = n == 1;
    row.ratio_y = row.degenerate ? std::numeric_limits<double>::quiet_NaN() : row.an_y / nlogn;
    row.ratio_x = row.degenerate ? std::numeric_limits<double>::quiet_NaN() : row.an_x / nlogn;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qprim
