#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "qprim/curves.hpp"
#include "qprim/error.hpp"

using namespace qprim;

namespace {

std::vector<double> random_cells(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(m);
  for (auto& c : v) c = u(rng);
  return v;
}

// Position tau with int_0^tau |x|^p = t * int_0^1 |x|^p, by bisection on the
// cellwise cumulative mass. Independent of LiftCurve::cut.
double oracle_cut(const std::vector<double>& cells, double p, double t) {
  const double m = static_cast<double>(cells.size());
  auto mass_to = [&](double u) {
    double s = 0.0;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const double lo = static_cast<double>(i) / m;
      const double hi = static_cast<double>(i + 1) / m;
      const double cover = std::clamp(u, lo, hi) - lo;
      s += cover * std::pow(std::fabs(cells[i]), p);
    }
    return s;
  };
  const double target = t * mass_to(1.0);
  double lo = 0.0, hi = 1.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (mass_to(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

SampledCurve linear_path(const StepFunction& x, std::size_t cells) {
  return SampledCurve::sample(TimeGrid::uniform(cells), [x](double t) { return x.scaled(t); });
}

}  // namespace

TEST_CASE("time grid validation and lookup") {
  CHECK_THROWS_AS(TimeGrid({0.0, 0.5}), Error);
  CHECK_THROWS_AS(TimeGrid({0.0, 0.5, 0.5, 1.0}), Error);
  const TimeGrid g = TimeGrid::uniform(4);
  CHECK(g.size() == 5);
  CHECK(g[2] == 0.5);
  CHECK(g.segment_of(0.3) == 1);
  CHECK(g.segment_of(1.0) == 3);
  CHECK(g.contains(0.75));
  CHECK_FALSE(g.contains(0.7));
  const TimeGrid merged = g.merged(TimeGrid::uniform(3));
  CHECK(merged.size() == 7);
  CHECK(g.refined(2).size() == 9);
}

TEST_CASE("sup norm examples") {
  const SpaceParams half(0.5);
  CHECK(sup_norm(SampledCurve::sample(TimeGrid::uniform(8), [](double) { return StepFunction(); }), half) == 0.0);
  const StepFunction x(GridFunction::constant(4, 1.0));
  CHECK(sup_norm(linear_path(x, 16), half) == doctest::Approx(1.0).epsilon(1e-15));
  const LiftCurve lift = zero_derivative_lift(GridFunction::constant(4, 1.0), half);
  CHECK(sup_norm(lift.sample(TimeGrid::uniform(32)), half) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("C1 estimate examples") {
  const SpaceParams half(0.5);
  const StepFunction x(GridFunction::constant(2, 1.0));
  const auto lin = c1_norm_estimate(linear_path(x, 16), half);
  CHECK(lin.at_zero == 0.0);
  CHECK(lin.total == doctest::Approx(1.0).epsilon(1e-12));

  const auto zero = c1_norm_estimate(SampledCurve::sample(TimeGrid::uniform(4), [](double) { return StepFunction(); }),
                                     half);
  CHECK(zero.total == 0.0);

  const LiftCurve lift = zero_derivative_lift(GridFunction::constant(3, 1.0), half);
  const auto r = c1_norm_estimate(lift.sample(TimeGrid::uniform(64)), half);
  CHECK(r.seminorm == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(r.exact.has_value());
  CHECK(*r.exact == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("C1 estimate never decreases under refinement") {
  std::mt19937_64 rng(3);
  const SpaceParams sp(0.5);
  for (int trial = 0; trial < 5; ++trial) {
    const StepFunction a(GridFunction(random_cells(rng, 5)));
    const StepFunction b(GridFunction(random_cells(rng, 3)));
    auto eval = [a, b](double t) { return combine(a, b, std::sin(3.0 * t), t * t); };
    double prev = 0.0;
    for (std::size_t m : {4, 8, 16, 32, 64}) {
      const double s = c1_norm_estimate(SampledCurve::sample(TimeGrid::uniform(m), eval), sp).seminorm;
      CHECK(s >= prev);
      prev = s;
    }
  }
}

TEST_CASE("lift of the constant one is the indicator path") {
  const SpaceParams half(0.5);
  const LiftCurve F = zero_derivative_lift(GridFunction::constant(8, 1.0), half);
  for (double t : {0.1, 0.37, 0.5, 0.93}) {
    CHECK(F.cut(t) == doctest::Approx(t).epsilon(1e-15));
    CHECK(F(t).at(t * 0.99) == 1.0);
    CHECK(F(t).at(std::min(1.0, t * 1.01)) == 0.0);
  }
  for (auto [s, t] : {std::pair{0.1, 0.4}, std::pair{0.0, 1.0}, std::pair{0.25, 0.26}}) {
    CHECK(lp_distance(F(t), F(s), half) == doctest::Approx((t - s) * (t - s)).epsilon(1e-12));
  }
}

TEST_CASE("lift of a half-supported indicator") {
  const SpaceParams half(0.5);
  const LiftCurve F = zero_derivative_lift(GridFunction({1.0, 0.0}), half);
  for (double t : {0.2, 0.5, 0.8}) CHECK(F.cut(t) == doctest::Approx(t / 2.0).epsilon(1e-15));
  CHECK(F(1.0) == StepFunction(GridFunction({1.0, 0.0})));
  CHECK(lp_distance(F(1.0), F(0.0), half) == 0.25);
  CHECK(F.c1_norm() == 0.25);
}

TEST_CASE("zero lift is the zero curve") {
  const SpaceParams sp(0.3);
  const LiftCurve F = zero_derivative_lift(GridFunction::zero(6), sp);
  CHECK(F.is_zero());
  for (double t : {0.0, 0.4, 1.0}) CHECK(lp_norm(F(t), sp) == 0.0);
  const double deltas[] = {0.1, 0.01};
  CHECK(lift_rate_check(F, deltas).degenerate);
}

TEST_CASE("lift endpoints and exact increments on random input") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (double p : {0.3, 0.5, 0.7}) {
    const SpaceParams sp(p);
    for (int trial = 0; trial < 20; ++trial) {
      const auto cells = random_cells(rng, 1 + rng() % 32);
      const GridFunction x(cells);
      const LiftCurve F = zero_derivative_lift(x, sp);
      CHECK(F(0.0).is_zero());
      CHECK(F(1.0).to_grid(x.size()) == x);
      const double nx = lp_norm(x, sp);
      CHECK(F.c1_norm() == doctest::Approx(nx).epsilon(1e-12));
      for (int k = 0; k < 20; ++k) {
        double s = u01(rng), t = u01(rng);
        if (s > t) std::swap(s, t);
        if (t - s < 1e-6) continue;
        const double expected = nx * std::pow(t - s, 1.0 / p);
        CHECK(F.increment_norm(s, t) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(lp_distance(F(t), F(s), sp) == doctest::Approx(expected).epsilon(1e-10));
        CHECK(F.cut(t) == doctest::Approx(oracle_cut(cells, p, t)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("rate law of the lift") {
  std::mt19937_64 rng(23);
  const std::vector<double> deltas = {0.5, 0.2, 0.1, 0.05, 0.02, 0.01, 0.005, 0.001};
  for (double p : {0.3, 0.5, 2.0 / 3.0, 0.7}) {
    const SpaceParams sp(p);
    const LiftCurve F = zero_derivative_lift(GridFunction(random_cells(rng, 16)), sp);
    for (auto src : {QuotientSource::Analytic, QuotientSource::Materialized}) {
      const auto fit = lift_rate_check(F, deltas, src);
      CHECK_FALSE(fit.degenerate);
      CHECK(std::fabs(fit.slope - (1.0 / p - 1.0)) < 1e-2);
    }
  }
  const LiftCurve F = zero_derivative_lift(GridFunction::constant(2, 1.0), SpaceParams(0.5));
  const double one[] = {0.1};
  CHECK_THROWS_AS(lift_rate_check(F, one), Error);
  const double bad[] = {0.1, 1.5};
  CHECK_THROWS_AS(lift_rate_check(F, bad), Error);
}

TEST_CASE("numeric derivative examples") {
  const SpaceParams half(0.5);
  const StepFunction x(GridFunction({1.0, -2.0, 0.5}));
  const SampledCurve d = differentiate_numeric(linear_path(x, 10));
  for (const auto& v : d.values()) CHECK(lp_distance(v, x, half) < 1e-12);

  const SampledCurve c = SampledCurve::sample(TimeGrid::uniform(10), [x](double) { return x; });
  CHECK(sup_norm(differentiate_numeric(c), half) == 0.0);

  // Central differences span 2/m, so each has norm (2/m)^{1/p}/(2/m).
  const std::size_t m = 256;
  const LiftCurve F = zero_derivative_lift(GridFunction::constant(4, 1.0), half);
  const SampledCurve dl = differentiate_numeric(F.sample(TimeGrid::uniform(m)));
  const double bound = std::pow(2.0 / static_cast<double>(m), 1.0 / 0.5 - 1.0);
  double worst = 0.0;
  for (const auto& v : dl.values()) worst = std::max(worst, lp_norm(v, half));
  CHECK(worst <= bound * (1.0 + 1e-9));
  CHECK(worst == doctest::Approx(bound).epsilon(1e-9));

  CHECK_THROWS_AS(differentiate_numeric(SampledCurve::sample(TimeGrid::uniform(1), [x](double) { return x; })), Error);
}

TEST_CASE("log-log fit recovers a power law") {
  const std::vector<double> x = {1.0, 2.0, 4.0, 8.0};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 1.7));
  const auto fit = fit_log_log(x, y);
  CHECK(fit.slope == doctest::Approx(1.7).epsilon(1e-12));
  CHECK(std::exp(fit.intercept) == doctest::Approx(3.0).epsilon(1e-12));
}
