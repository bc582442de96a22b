#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "qprim/error.hpp"
#include "qprim/space_kernel.hpp"

using namespace qprim;

namespace {

// Independent oracle: (sum |v|^p / m)^{1/p} straight from the definition.
double oracle_norm(const std::vector<double>& v, double p) {
  long double s = 0.0L;
  for (double c : v) s += std::pow(static_cast<long double>(std::fabs(c)), static_cast<long double>(p));
  return static_cast<double>(std::pow(s / static_cast<long double>(v.size()), 1.0L / p));
}

std::vector<double> random_cells(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  std::vector<double> v(m);
  for (auto& c : v) c = u(rng);
  return v;
}

bool close(double a, double b, double rel) { return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b)); }

}  // namespace

TEST_CASE("exponent must lie strictly between 0 and 1") {
  for (double p : {0.0, 1.0, 1.5, -0.25, std::numeric_limits<double>::quiet_NaN()}) {
    try {
      SpaceParams sp(p);
      FAIL("accepted p = " << p);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InvalidExponent);
    }
  }
  CHECK(SpaceParams(0.5).inv_p() == 2.0);
}

TEST_CASE("grid functions reject empty and non-finite input") {
  CHECK_THROWS_AS(GridFunction(std::vector<double>{}), Error);
  CHECK_THROWS_AS(GridFunction({1.0, std::numeric_limits<double>::infinity()}), Error);
  CHECK_THROWS_AS(GridFunction({std::numeric_limits<double>::quiet_NaN()}), Error);
}

TEST_CASE("lp_norm examples") {
  const SpaceParams half(0.5);
  CHECK(lp_norm(GridFunction::constant(7, 1.0), half) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(lp_norm(GridFunction({1.0, 0.0}), half) == 0.25);
  CHECK(lp_norm(GridFunction({1.0, 1.0, 0.0, 0.0}), half) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(lp_norm(GridFunction::zero(5), half) == 0.0);
}

TEST_CASE("lp_norm agrees with the definition on random input") {
  std::mt19937_64 rng(11);
  for (double p : {0.3, 0.5, 0.7}) {
    const SpaceParams sp(p);
    for (int k = 0; k < 200; ++k) {
      const auto v = random_cells(rng, 1 + rng() % 64);
      CHECK(close(lp_norm(GridFunction(v), sp), oracle_norm(v, p), 1e-12));
    }
  }
}

TEST_CASE("refine_and_combine") {
  const GridFunction x({1.0, 2.0});
  const GridFunction y({1.0, 1.0, 1.0, 1.0});
  CHECK(refine_and_combine(x, y, 1.0, 1.0) == GridFunction({2.0, 2.0, 3.0, 3.0}));
  CHECK(refine_and_combine(x, y, 1.0, 0.0) == GridFunction({1.0, 1.0, 2.0, 2.0}));
  CHECK(refine_and_combine(x, x, -1.0, 1.0) == GridFunction::zero(2));

  // lcm(2, 3) = 6
  const auto z = refine_and_combine(GridFunction({1.0, 2.0}), GridFunction({10.0, 20.0, 30.0}), 1.0, 1.0);
  CHECK(z == GridFunction({11.0, 11.0, 21.0, 22.0, 32.0, 32.0}));

  try {
    refine_and_combine(GridFunction::zero(1021), GridFunction::zero(1031), 1.0, 1.0, 1000);
    FAIL("refinement cap not enforced");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::RefinementCap);
  }
}

TEST_CASE("p-triangle report examples") {
  const SpaceParams half(0.5);
  const auto r = p_triangle_check(GridFunction({4.0, 0.0}), GridFunction({0.0, 4.0}), half);
  CHECK(r.lhs == r.rhs);
  CHECK(r.rhs == 2.0);
  CHECK(r.holds);

  const auto y0 = p_triangle_check(GridFunction({3.0, 1.0}), GridFunction::zero(2), half);
  CHECK(y0.lhs == y0.rhs);

  const auto same = p_triangle_check(GridFunction::constant(3, 1.0), GridFunction::constant(3, 1.0), half);
  CHECK(same.lhs == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(same.rhs == 2.0);
  CHECK(same.holds);
}

TEST_CASE("quasi-norm axioms on random pairs") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> scale(-10.0, 10.0);
  for (double p : {0.3, 0.5, 0.7}) {
    const SpaceParams sp(p);
    int triangle = 0, homogeneity = 0, disjoint = 0;
    for (int k = 0; k < 10000; ++k) {
      const std::size_t m = 1 + rng() % 16;
      const GridFunction x(random_cells(rng, m));
      const GridFunction y(random_cells(rng, 1 + rng() % 16));
      if (!p_triangle_check(x, y, sp).holds) ++triangle;

      const double a = scale(rng);
      if (!close(lp_norm(x.scaled(a), sp), std::fabs(a) * lp_norm(x, sp), 1e-13)) ++homogeneity;

      // Split x into its even and odd cells.
      std::vector<double> even(m, 0.0), odd(m, 0.0);
      for (std::size_t i = 0; i < m; ++i) (i % 2 == 0 ? even : odd)[i] = x[i];
      const double lhs = p_mass(x, sp);
      const double rhs = p_mass(GridFunction(even), sp) + p_mass(GridFunction(odd), sp);
      if (!close(lhs, rhs, kRelSlack)) ++disjoint;
    }
    CHECK(triangle == 0);
    CHECK(homogeneity == 0);
    CHECK(disjoint == 0);
  }
}

TEST_CASE("refinement leaves the norm unchanged") {
  std::mt19937_64 rng(5);
  const SpaceParams sp(0.4);
  for (int k = 0; k < 100; ++k) {
    const GridFunction x(random_cells(rng, 1 + rng() % 20));
    const std::size_t factor = 1 + rng() % 7;
    CHECK(close(lp_norm(x.refined(factor), sp), lp_norm(x, sp), kRelSlack));
  }
}

TEST_CASE("step function truncation splits the cut piece") {
  const SpaceParams half(0.5);
  const StepFunction x(GridFunction({4.0, 1.0}));
  const StepFunction t = x.truncated(0.75);
  CHECK(t.at(0.2) == 4.0);
  CHECK(t.at(0.6) == 1.0);
  CHECK(t.at(0.8) == 0.0);
  // int |t|^{1/2} = 2 * 0.5 + 1 * 0.25
  CHECK(p_mass(t, half) == doctest::Approx(1.25).epsilon(1e-15));
  CHECK(x.truncated(0.0).is_zero());
  CHECK(x.truncated(1.0) == x);
  CHECK(p_mass_between(x, 0.25, 0.75, half) == doctest::Approx(2.0 * 0.25 + 1.0 * 0.25).epsilon(1e-15));
}

TEST_CASE("step function combination matches the grid combination") {
  std::mt19937_64 rng(9);
  const SpaceParams sp(0.6);
  for (int k = 0; k < 100; ++k) {
    const GridFunction x(random_cells(rng, 1 + rng() % 6));
    const GridFunction y(random_cells(rng, 1 + rng() % 6));
    const auto g = refine_and_combine(x, y, 2.0, -0.5);
    const auto s = combine(StepFunction(x), StepFunction(y), 2.0, -0.5);
    CHECK(close(lp_norm(s, sp), lp_norm(g, sp), 1e-13));
    CHECK(close(std::pow(p_mass_of_combination(StepFunction(x), StepFunction(y), 2.0, -0.5, sp), 1.0 / 0.6),
                lp_norm(g, sp), 1e-13));
    CHECK(s.to_grid(g.size()) == g);
  }
}

TEST_CASE("step function validation") {
  CHECK_THROWS_AS(StepFunction({0.0, 0.5}, {1.0}), Error);
  CHECK_THROWS_AS(StepFunction({0.0, 0.6, 0.5, 1.0}, {1.0, 2.0, 3.0}), Error);
  CHECK_THROWS_AS(StepFunction({0.0, 1.0}, {1.0, 2.0}), Error);
  CHECK(StepFunction().is_zero());
}

TEST_CASE("equal neighbouring cells share a piece") {
  const StepFunction x(GridFunction({2.0, 2.0, 2.0, -1.0, -1.0, 2.0}));
  CHECK(x.pieces() == 3);
  CHECK(x.breaks()[1] == 0.5);
  CHECK(StepFunction(GridFunction::constant(1024, 1.0)).pieces() == 1);
  for (double u : {0.1, 0.49, 0.5, 0.7, 0.9}) CHECK(x.at(u) == (u < 0.5 ? 2.0 : u < 5.0 / 6.0 ? -1.0 : 2.0));
}

TEST_CASE("step functions compare as functions") {
  const StepFunction split({0.0, 0.25, 1.0}, {3.0, 3.0});
  const StepFunction whole(GridFunction({3.0}));
  CHECK(split == whole);
  CHECK_FALSE(split == StepFunction({0.0, 0.25, 1.0}, {3.0, 3.5}));
  CHECK(StepFunction() == whole.scaled(0.0));
}

TEST_CASE("p-th powers and roots agree with std::pow") {
  for (double p : {0.3, 0.5, 0.7}) {
    const SpaceParams sp(p);
    for (double v : {0.0, 1e-300, 0.25, 2.0, -7.5, 1e200}) {
      CHECK(sp.pow_p(v) == doctest::Approx(std::pow(std::fabs(v), p)).epsilon(1e-15));
      if (std::fabs(v) < 1e50) {
        CHECK(sp.root(std::fabs(v)) == doctest::Approx(std::pow(std::fabs(v), 1.0 / p)).epsilon(1e-15));
      }
    }
  }
}
