#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "qprim/error.hpp"
#include "qprim/pathological_spaces.hpp"

using namespace qprim;

namespace {

// Lorentz norm by brute force: rearrange cell values, then integrate
// (t f*(t))^q / t with a fine midpoint rule.
double oracle_lorentz(std::vector<double> cells, double q, std::size_t steps) {
  for (auto& c : cells) c = std::fabs(c);
  std::sort(cells.begin(), cells.end(), std::greater<>());
  const double m = static_cast<double>(cells.size());
  double acc = 0.0;
  const double dt = 1.0 / static_cast<double>(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    const double t = (static_cast<double>(s) + 0.5) * dt;
    const auto i = std::min(cells.size() - 1, static_cast<std::size_t>(t * m));
    acc += std::pow(t * cells[i], q) / t * dt;
  }
  return std::pow(acc, 1.0 / q);
}

}  // namespace

TEST_CASE("Ribe functional examples") {
  const std::vector<double> e1 = {1.0};
  CHECK(ribe_functional(e1) == 0.0);
  CHECK(ribe_functional(std::vector<double>{}) == 0.0);
  for (std::size_t n : {2, 5, 100}) {
    const std::vector<double> ones(n, 1.0);
    CHECK(ribe_functional(ones) == doctest::Approx(-static_cast<double>(n) * std::log(static_cast<double>(n))));
  }
  // Zero coordinates follow 0 log 0 = 0.
  CHECK(ribe_functional(std::vector<double>{0.0, 1.0, 0.0}) == 0.0);
}

TEST_CASE("Ribe norm examples") {
  for (std::size_t k : {0, 3}) {
    RibeElement e;
    e.coords.assign(k + 1, 0.0);
    e.coords[k] = 1.0;
    CHECK(ribe_norm(e) == 1.0);
  }
  for (double a : {-2.5, 0.0, 7.0}) CHECK(ribe_norm({a, {}}) == std::fabs(a));
  for (std::size_t n : {4, 16, 4096}) {
    const double dn = static_cast<double>(n);
    CHECK(ribe_norm(ribe_basis_sum(n)) == doctest::Approx(dn * std::log(dn) + dn).epsilon(1e-14));
  }
}

TEST_CASE("Ribe quasi-triangle constant is finite") {
  const auto r = ribe_quasi_triangle(20000, 6, 99);
  CHECK(r.pairs == 20000);
  CHECK(r.max_ratio >= 1.0);
  CHECK(r.max_ratio < 4.0);
  MESSAGE("measured Ribe quasi-triangle ratio " << r.max_ratio);
}

TEST_CASE("Ribe combination is coordinatewise") {
  const RibeElement a{1.0, {1.0, 2.0}};
  const RibeElement b{-1.0, {0.0, 1.0, 3.0}};
  const RibeElement c = ribe_combine(a, b, 2.0, 1.0);
  CHECK(c.alpha == 1.0);
  CHECK(c.coords == std::vector<double>{2.0, 5.0, 3.0});
}

TEST_CASE("Lorentz norm examples") {
  for (double w : {0.125, 0.5, 1.0}) {
    const StepFunction f = w < 1.0 ? StepFunction({0.0, w, 1.0}, {1.0, 0.0}) : StepFunction(GridFunction({1.0}));
    CHECK(lorentz_norm(f, 2.0) == doctest::Approx(w / std::sqrt(2.0)).epsilon(1e-15));
  }
  CHECK(lorentz_norm(StepFunction(), 2.0) == 0.0);
  CHECK_THROWS_AS(LorentzFunction(StepFunction(), 1.0), Error);
  CHECK(lorentz_norm(lorentz_unit_constant(3.0), 3.0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("Lorentz norm is rearrangement invariant, homogeneous and matches quadrature") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (double q : {1.5, 2.0, 4.0}) {
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<double> cells(1 + rng() % 12);
      for (auto& c : cells) c = u(rng);
      const double base = lorentz_norm(StepFunction(GridFunction(cells)), q);
      auto shuffled = cells;
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      CHECK(std::fabs(lorentz_norm(StepFunction(GridFunction(shuffled)), q) - base) <= kRelSlack * base * 8);
      const double a = u(rng);
      CHECK(lorentz_norm(StepFunction(GridFunction(cells)).scaled(a), q) ==
            doctest::Approx(std::fabs(a) * base).epsilon(1e-14));
      CHECK(base == doctest::Approx(oracle_lorentz(cells, q, 200000)).epsilon(1e-6));
    }
  }
}

TEST_CASE("quotient norm of a point on the twist axis") {
  for (double alpha : {1.0, -3.0, 10.0}) {
    const ProductElement rep{LorentzFunction(StepFunction(), 2.0), RibeElement{alpha, {}}};
    const auto r = quotient_norm(make_quotient_element(rep));
    CHECK(r.value == doctest::Approx(std::fabs(alpha) / 2.0).epsilon(1e-9));
    CHECK(r.argmin == doctest::Approx(alpha / 2.0).epsilon(1e-6));
    CHECK(r.representative_norm == std::fabs(alpha));
  }
}

TEST_CASE("quotient norm of a point on the quotiented line") {
  const double lambda = 2.5;
  const StepFunction y0 = lorentz_unit_constant(2.0);
  const ProductElement rep{LorentzFunction(y0.scaled(lambda), 2.0), RibeElement{lambda, {}}};
  CHECK(quotient_norm(make_quotient_element(rep)).value < 1e-9);
}

TEST_CASE("quotient image of the Ribe basis sum balances at half") {
  for (std::size_t n : {16, 256}) {
    const double dn = static_cast<double>(n);
    const ProductElement rep{LorentzFunction(StepFunction(), 2.0), ribe_basis_sum(n)};
    const auto e = make_quotient_element(rep);
    const auto r = quotient_norm(e);
    // Scan oracle: max(|l|, |N log N - l| + N) over a fine lambda grid.
    double best = std::numeric_limits<double>::infinity();
    const double top = 2.0 * (dn * std::log(dn) + dn);
    for (int i = -20000; i <= 20000; ++i) {
      const double l = top * i / 20000.0;
      best = std::min(best, std::max(std::fabs(l), std::fabs(-dn * std::log(dn) - l) + dn));
    }
    CHECK(r.value == doctest::Approx((dn * std::log(dn) + dn) / 2.0).epsilon(1e-9));
    CHECK(r.value <= best * (1.0 + 1e-12));
    // Dominance over a grid of explicit shifts.
    for (double l : {-5.0, 0.0, 3.0, 40.0}) {
      const double shifted = std::max(lorentz_norm(e.y0.scaled(-l), 2.0),
                                      ribe_norm(ribe_combine(rep.z, e.u, 1.0, -l)));
      CHECK(r.value <= shifted * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("golden-section minimizer") {
  const double x = golden_section_minimize([](double t) { return (t - 0.3) * (t - 0.3); }, -1.0, 2.0, 1e-12);
  CHECK(x == doctest::Approx(0.3).epsilon(1e-8));
}

TEST_CASE("a_N estimates") {
  SpaceConfig cfg;
  cfg.p = 0.5;
  const auto lp = a_n_estimate(SpaceTag::Lp, 4, FamilyTag::DisjointIndicators, cfg);
  CHECK(lp.lower == doctest::Approx(16.0).epsilon(1e-12));
  REQUIRE(lp.upper.has_value());
  CHECK(*lp.upper == 16.0);

  for (auto [space, family] : {std::pair{SpaceTag::Lp, FamilyTag::DisjointIndicators},
                               std::pair{SpaceTag::Ribe, FamilyTag::RibeBasis},
                               std::pair{SpaceTag::Lorentz, FamilyTag::DisjointIndicators},
                               std::pair{SpaceTag::Lorentz, FamilyTag::DyadicScales},
                               std::pair{SpaceTag::Scalar, FamilyTag::DisjointIndicators}}) {
    CHECK(a_n_estimate(space, 1, family, cfg).lower == doctest::Approx(1.0).epsilon(1e-12));
    double prev = 0.0;
    for (std::size_t n : {1, 2, 4, 16, 64, 256, 1024}) {
      const double v = a_n_estimate(space, n, family, cfg).lower;
      CHECK(v >= prev);
      prev = v;
    }
  }
  CHECK_THROWS_AS(a_n_estimate(SpaceTag::Lp, 4, FamilyTag::RibeBasis, cfg), Error);
  CHECK_THROWS_AS(a_n_estimate(SpaceTag::Ribe, 4, FamilyTag::DyadicScales, cfg), Error);
}

TEST_CASE("Lorentz dyadic family matches a direct sum") {
  // x_i = c_i 1_[0, 2^-i], unit normalized, i = 0..N-1.
  const double q = 2.0;
  for (std::size_t n : {1, 3, 8}) {
    StepFunction sum;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = std::ldexp(1.0, -static_cast<int>(i));
      const StepFunction ind = w < 1.0 ? StepFunction({0.0, w, 1.0}, {1.0, 0.0}) : StepFunction(GridFunction({1.0}));
      sum = sum + ind.scaled(1.0 / lorentz_norm(ind, q));
    }
    CHECK(a_n_estimate(SpaceTag::Lorentz, n, FamilyTag::DyadicScales, {0.5, q}).lower ==
          doctest::Approx(lorentz_norm(sum, q)).epsilon(1e-12));
  }
}

TEST_CASE("custom family estimate normalizes members") {
  const std::vector<StepFunction> fam = {StepFunction(GridFunction({3.0, 0.0})), StepFunction(GridFunction({0.0, 5.0}))};
  const auto est = a_n_estimate(SpaceTag::Lp, fam, {0.5, 2.0});
  CHECK(est.lower == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("counterexample table") {
  const std::vector<std::size_t> ns = {1, 16, 64, 256, 1024};
  const auto rows = counterexample_report(ns, 2.0);
  REQUIRE(rows.size() == ns.size());
  CHECK(rows[0].degenerate);
  CHECK(rows[0].an_z == 1.0);
  CHECK(rows[0].an_y == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::isnan(rows[0].ratio_x));
  CHECK(rows[1].an_z == doctest::Approx(16.0 * std::log(16.0) + 16.0).epsilon(1e-14));
  for (std::size_t i = 2; i < rows.size(); ++i) {
    CHECK(rows[i].ratio_y < rows[i - 1].ratio_y);
    CHECK(rows[i].an_x >= 0.4 * rows[i].n * std::log(static_cast<double>(rows[i].n)));
  }
  const std::vector<std::size_t> descending = {16, 4};
  CHECK_THROWS_AS(counterexample_report(descending, 2.0), Error);
}

TEST_CASE("tag parsing round-trips") {
  for (auto s : {SpaceTag::Lp, SpaceTag::Ribe, SpaceTag::Lorentz, SpaceTag::Scalar}) {
    CHECK(parse_space_tag(to_string(s)) == s);
  }
  for (auto f : {FamilyTag::DisjointIndicators, FamilyTag::RibeBasis, FamilyTag::DyadicScales, FamilyTag::Custom}) {
    CHECK(parse_family_tag(to_string(f)) == f);
  }
  CHECK_FALSE(parse_space_tag("banach").has_value());
}
