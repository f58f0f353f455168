#include <cmath>
#include <random>

#include "doctest.h"
#include "jumpinterp/error.hpp"
#include "jumpinterp/measure.hpp"
#include "jumpinterp/rng.hpp"
#include "jumpinterp/suites.hpp"
#include "oracles.hpp"

using namespace jumpinterp;

namespace {

SampledProcess one_atom(std::vector<double> v) {
  return SampledProcess::scalar(AtomicMeasureSpace::uniform(1), {std::move(v)});
}

}  // namespace

TEST_SUITE("measure-lorentz") {
  TEST_CASE("Lorentz norm examples") {
    const auto one = AtomicMeasureSpace::with_weights({2.5});
    const std::vector<double> c{-3.0};
    CHECK(lorentz_norm(c, one, 2.0, kInf) == doctest::Approx(3.0 * std::sqrt(2.5)));
    const auto two = AtomicMeasureSpace::uniform(2);
    const std::vector<double> g{2.0, 1.0};
    CHECK(lorentz_norm(g, two, 1.0, kInf) == doctest::Approx(2.0));
    const auto sp = AtomicMeasureSpace::with_weights({0.5, 1.0, 2.0});
    const std::vector<double> h{1.0, -4.0, 2.0};
    CHECK(lorentz_norm(h, sp, 3.0, 3.0) == doctest::Approx(lp_norm(h, sp, 3.0)).epsilon(1e-14));
  }

  TEST_CASE("Lorentz norm against the distribution-function formula") {
    for (std::size_t i = 0; i < 200; ++i) {
      auto rng = instance_rng(21, i);
      std::uniform_real_distribution<double> u(0.1, 3.0);
      std::normal_distribution<double> gauss;
      const std::size_t n = 1 + i % 7;
      std::vector<double> w(n), g(n);
      for (auto& x : w) x = u(rng);
      for (auto& x : g) x = (i % 3 == 0) ? std::round(gauss(rng)) : gauss(rng);
      const auto sp = AtomicMeasureSpace::with_weights(w);
      for (double p : {0.5, 1.0, 2.0, 3.0}) {
        REQUIRE(lorentz_norm(g, sp, p, kInf) == doctest::Approx(oracle::weak_norm(g, w, p)).epsilon(1e-13));
        REQUIRE(weak_norm_by_levels(g, sp, p) == doctest::Approx(oracle::weak_norm(g, w, p)).epsilon(1e-13));
        for (double q : {0.5, 1.0, 2.0, 4.0})
          REQUIRE(lorentz_norm(g, sp, p, q) == doctest::Approx(oracle::lorentz_norm(g, w, p, q)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("jump seminorm examples") {
    CHECK(jump_seminorm(one_atom({0, 1, 0, 1}), 2, 2, 2).value == doctest::Approx(std::sqrt(3.0)));
    CHECK(jump_seminorm(one_atom({4, 4, 4}), 2, 2, 2).value == 0.0);
    const auto sp = AtomicMeasureSpace::with_weights({1.0, 2.0});
    const auto f = SampledProcess::scalar(sp, {{0, 1, 3, 2}, {1, -1, 0, 2}});
    const double J = jump_seminorm(f, 2, 3, 2.5).value;
    CHECK(jump_seminorm(f.scaled(3.0), 2, 3, 2.5).value == doctest::Approx(3.0 * J).epsilon(1e-14));
  }

  TEST_CASE("jump seminorm against a dense lambda grid") {
    for (std::size_t i = 0; i < 60; ++i) {
      auto rng = instance_rng(22, i);
      const SampledProcess f = random_process(rng, 1 + i % 4, 2 + i % 7);
      const double p = 1.5, q = (i % 2) ? kInf : 2.0, rho = 2.5;
      const double J = jump_seminorm(f, p, q, rho).value;
      // sup over lambda evaluated directly at every breakpoint and nearby points
      double best = 0.0;
      for (std::size_t x = 0; x < f.atoms(); ++x) {
        for (double b : jump_breakpoints(f.series(x))) {
          for (double lam : {b, b * (1 - 1e-9), b * (1 + 1e-9)}) {
            std::vector<double> g(f.atoms());
            for (std::size_t y = 0; y < f.atoms(); ++y)
              g[y] = lam * std::pow(static_cast<double>(oracle::jump_count(f.series(y), lam)), 1.0 / rho);
            best = std::max(best, std::isinf(q) ? oracle::weak_norm(g, f.space().weights(), p)
                                                : oracle::lorentz_norm(g, f.space().weights(), p, q));
          }
        }
      }
      REQUIRE(J == doctest::Approx(best).epsilon(1e-12));
    }
  }

  TEST_CASE("log-convexity and p-convexity examples") {
    const auto sp = AtomicMeasureSpace::uniform(2);
    const std::vector<std::vector<double>> single{{1.0, 0.5}};
    const double a = lorentz_norm(single[0], sp, 1.0, kInf);
    const Check c1 = check_l1inf_logconvex(single, {a}, sp);
    CHECK(c1.rhs == doctest::Approx(4.0 * a));
    CHECK(c1.holds);
    const std::vector<std::vector<double>> disjoint{{1.0, 0.0}, {0.0, 1.0}};
    const Check c2 = check_l1inf_logconvex(disjoint, {1.0, 1.0}, sp);
    CHECK(c2.rhs == doctest::Approx(2.0 * 2.0 * (std::log(2.0) + 2.0)));
    CHECK(c2.holds);
    CHECK_THROWS_AS(check_l1inf_logconvex(single, {0.5 * a}, sp), InputError);

    const Check p1 = check_lpinf_pconvex(single, 0.5, sp);
    CHECK(p1.ratio == doctest::Approx(1.0));
    const auto atom = AtomicMeasureSpace::uniform(1);
    const Check p2 = check_lpinf_pconvex({{1.0}, {1.0}}, 0.5, atom);
    CHECK(p2.lhs == doctest::Approx(std::sqrt(2.0)));
    CHECK(p2.rhs == doctest::Approx(2.0));
    CHECK(p2.holds);
    CHECK_THROWS_AS(check_lpinf_pconvex(single, 1.0, sp), DomainError);
  }

  TEST_CASE("variation from jumps example") {
    const auto checks = variation_from_jumps_report(one_atom({0, 1, 0, 1}), 2.0, 2.0, 3.0);
    REQUIRE(checks.size() == 2);
    for (const auto& c : checks) {
      CHECK(c.lhs == doctest::Approx(std::cbrt(3.0)));
      CHECK(c.witness["jump_seminorm"].get<double>() == doctest::Approx(std::sqrt(3.0)));
      CHECK(c.holds);
    }
    CHECK(variation_from_jumps_report(one_atom({1, 1, 1}), 2.0, 2.0, 3.0)[0].lhs == 0.0);
    CHECK_THROWS_AS(variation_from_jumps_report(one_atom({0, 1}), 2.0, 2.0, 2.0), DomainError);
  }

  TEST_CASE("invalid exponents") {
    const auto sp = AtomicMeasureSpace::uniform(1);
    const std::vector<double> g{1.0};
    CHECK_THROWS_AS(lorentz_norm(g, sp, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(lorentz_norm(g, sp, kInf, 1.0), DomainError);
    CHECK_THROWS_AS(jump_seminorm(one_atom({0, 1}), 2, 2, 1.0), DomainError);
    CHECK_THROWS_AS(AtomicMeasureSpace::with_weights({1.0, 0.0}), InputError);
  }
}
