#include <cmath>
#include <random>

#include "doctest.h"
#include "jumpinterp/error.hpp"
#include "jumpinterp/martingale.hpp"
#include "jumpinterp/rng.hpp"

using namespace jumpinterp;

namespace {

FiniteMartingale scalar_martingale(const AtomicMeasureSpace& sp, const Filtration& filt,
                                   std::vector<double> terminal) {
  std::vector<std::vector<double>> t;
  for (double v : terminal) t.push_back({v});
  return make_martingale(sp, filt, t, BNorm(1, 2.0));
}

}  // namespace

TEST_SUITE("martingale") {
  TEST_CASE("conditional expectation examples") {
    const auto sp = AtomicMeasureSpace::with_weights({1, 1, 2, 2});
    const std::vector<double> g{0, 2, 3, 1};
    const auto e = conditional_expectation(g, 1, {0, 0, 1, 1}, sp);
    CHECK(e[0] == doctest::Approx(1.0));
    CHECK(e[1] == doctest::Approx(1.0));
    // (2 * 3 + 2 * 1) / 4
    CHECK(e[2] == doctest::Approx(2.0));
    CHECK(e[3] == doctest::Approx(2.0));
    CHECK(conditional_expectation(g, 1, {0, 1, 2, 3}, sp) == g);
    const auto one = conditional_expectation(g, 1, {0, 0, 0, 0}, sp);
    for (double v : one) CHECK(v == doctest::Approx(5.0 / 3.0));
  }

  TEST_CASE("dyadic depth-2 martingale") {
    const auto m = scalar_martingale(AtomicMeasureSpace::uniform(4, 0.25), Filtration::dyadic(2),
                                     {1, -1, 1, -1});
    REQUIRE(m.steps() == 3);
    for (double v : m.at(0)) CHECK(v == doctest::Approx(0.0));
    for (double v : m.at(1)) CHECK(v == doctest::Approx(0.0));
    CHECK(m.at(2) == std::vector<double>{1, -1, 1, -1});
    CHECK(m.tower_defect() < 1e-12);
  }

  TEST_CASE("square and maximal functions") {
    const auto c = scalar_martingale(AtomicMeasureSpace::uniform(4, 0.25), Filtration::dyadic(2),
                                     {2, 2, 2, 2});
    for (double v : square_function(c, 2.0)) CHECK(v == 0.0);
    for (double v : doob_max(c)) CHECK(v == doctest::Approx(2.0));

    const auto m = scalar_martingale(AtomicMeasureSpace::uniform(4, 0.25), Filtration::dyadic(2),
                                     {3, 1, -2, 0});
    const auto s = square_function(m, 2.0);
    // atom 0: f = 0.5, 2, 3 so d1 = 1.5, d2 = 1
    CHECK(s[0] == doctest::Approx(std::sqrt(1.5 * 1.5 + 1.0)));
    CHECK(doob_max(m)[2] == doctest::Approx(2.0));
    const Check d = doob_check(m, 2.0);
    CHECK(d.holds);
    CHECK(d.lhs <= 2.0 * sup_lp(m, 2.0) + 1e-12);
  }

  TEST_CASE("splitting above every oscillation") {
    const auto m = scalar_martingale(AtomicMeasureSpace::uniform(4, 0.25), Filtration::dyadic(2),
                                     {3, 1, -2, 0});
    const LepingleSplit sp = lepingle_split(m, 100.0, 2.0);
    for (std::size_t x = 0; x < 4; ++x) {
      const auto& f1 = sp.f1.series(x).flat_values();
      for (double v : f1) CHECK(v == doctest::Approx(m.at(0)[x]));
    }
    CHECK(sp.cert_variation.lhs == 0.0);
    CHECK(sp.cert_sup.holds);
  }

  TEST_CASE("unit-step walk makes the variation certificate an equality") {
    for (std::size_t i = 0; i < 10; ++i) {
      auto rng = instance_rng(41, i);
      const auto m = dyadic_random_walk(4, BNorm(1, 2.0), rng, StepLaw::sign);
      const LepingleSplit sp = lepingle_split(m, 1.0, 2.0);
      CHECK(sp.cert_variation.lhs == doctest::Approx(sp.cert_variation.rhs));
      CHECK(sp.cert_variation.lhs > 0.0);
      CHECK(sp.cert_sup.holds);
    }
  }

  TEST_CASE("stopped sequences: frozen one is not a martingale") {
    const auto sp = AtomicMeasureSpace::with_weights({0.25, 0.75});
    const Filtration filt(std::vector<Partition>{{0, 0}, {0, 1}});
    const auto m = scalar_martingale(sp, filt, {3, -1});
    const auto st = stop_at_jumps(m, 2.0);
    const auto d = stopped_martingale_defects(m, st);
    CHECK(d.frozen == doctest::Approx(0.25));
    CHECK(d.standard < 1e-12);
  }

  TEST_CASE("stopping times are adapted") {
    for (std::size_t i = 0; i < 20; ++i) {
      auto rng = instance_rng(42, i);
      const auto m = random_refinement(12, 5, BNorm(2, 2.0), rng);
      for (double lam : {0.3, 1.0}) {
        const auto stops = jump_stopping_times(m, lam);
        REQUIRE(stopping_time_violations(m, stops) == 0);
        REQUIRE(stopped_martingale_defects(m, stop_at_jumps(m, lam)).standard < 1e-10);
      }
    }
  }

  TEST_CASE("Lepingle report on small walks") {
    auto rng = instance_rng(43, 0);
    const auto m = dyadic_random_walk(6, BNorm(1, 2.0), rng);
    const auto rep = verify_lepingle(m, 2.0, 2.0);
    CHECK(rep.J <= 3.0 * rep.sup);
    const auto c = scalar_martingale(AtomicMeasureSpace::uniform(4, 0.25), Filtration::dyadic(2),
                                     {1, 1, 1, 1});
    CHECK(verify_lepingle(c, 2.0, 2.0).J == 0.0);
  }

  TEST_CASE("invalid martingales") {
    const auto sp = AtomicMeasureSpace::uniform(2, 0.5);
    const Filtration filt(std::vector<Partition>{{0, 0}, {0, 1}});
    // not adapted: value at time 0 differs across the single block
    const auto f = SampledProcess::scalar(sp, {{0, 1}, {1, -1}});
    CHECK_THROWS_AS(FiniteMartingale(filt, f), InputError);
    // not a martingale: E[f_1] = 1 but f_0 = 0
    const auto g = SampledProcess::scalar(sp, {{0, 1}, {0, 1}});
    CHECK_THROWS_AS(FiniteMartingale(filt, g), InputError);
  }
}
