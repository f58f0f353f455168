#include <cmath>
#include <random>

#include "doctest.h"
#include "jumpinterp/core_seq.hpp"
#include "jumpinterp/error.hpp"
#include "jumpinterp/rng.hpp"
#include "jumpinterp/suites.hpp"
#include "oracles.hpp"

using namespace jumpinterp;

TEST_SUITE("core-seq") {
  TEST_CASE("jump count examples") {
    const auto ts = TimeSeries::scalar({0, 1, 0, 1});
    CHECK(jump_count(ts, 1.0).count == 3);
    CHECK(jump_count(ts, 1.5).count == 0);
    CHECK(jump_count(TimeSeries::scalar({2, 2, 2, 2, 2}), 0.5).count == 0);
    const auto w = jump_count(ts, 1.0);
    CHECK(w.times == std::vector<std::size_t>{0, 1, 2, 3});
  }

  TEST_CASE("count is the supremum, not the first-index stopping rule") {
    const auto ts = TimeSeries::scalar({0, 1, -1});
    CHECK(jump_count(ts, 2.0).count == 1);
    CHECK(stopping_positions(DistanceMatrix(ts), 2.0).size() == 1);
  }

  TEST_CASE("breakpoints") {
    CHECK(jump_breakpoints(TimeSeries::scalar({0, 1, 0, 1})) == std::vector<double>{1.0});
    CHECK(jump_breakpoints(TimeSeries::scalar({3, 3, 3})).empty());
    CHECK(jump_breakpoints(TimeSeries::scalar({0, 1, 3})) == std::vector<double>{1.0, 2.0, 3.0});
  }

  TEST_CASE("variation examples") {
    CHECK(variation(TimeSeries::scalar({0, 1, 0}), 2.0).value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(variation(TimeSeries::scalar({0, 1, 3}), 1.0).value == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(variation(TimeSeries::scalar({0, 1, 0}), kInf).value == 1.0);
  }

  TEST_CASE("norms on R^m") {
    const BNorm n1(2, 1.0), n2(2, 2.0), ni(2, kInf);
    const std::vector<double> v{3, -4};
    CHECK(n1(v) == 7.0);
    CHECK(n2(v) == doctest::Approx(5.0));
    CHECK(ni(v) == 4.0);
    CHECK_THROWS_AS(BNorm(2, 0.5), DomainError);
  }

  TEST_CASE("invalid arguments") {
    const auto ts = TimeSeries::scalar({0, 1});
    CHECK_THROWS_AS(jump_count(ts, 0.0), DomainError);
    CHECK_THROWS_AS(jump_count(ts, -1.0), DomainError);
    CHECK_THROWS_AS(variation(ts, 0.0), DomainError);
    CHECK_THROWS_AS(TimeSeries({0.0, 0.0}, {1.0, 2.0}, BNorm(1, 2.0)), InputError);
  }

  TEST_CASE("count, profile and variation against exhaustive search") {
    for (std::size_t i = 0; i < 300; ++i) {
      auto rng = instance_rng(11, i);
      const std::size_t n = 1 + i % 9;
      const std::size_t m = 1 + i % 3;
      const double s = (i % 4 == 0) ? kInf : 1.0 + static_cast<double>(i % 3);
      const TimeSeries ts = random_series(rng, n, m, s);
      const auto prof = jump_profile(ts);
      for (double lam : {0.1, 0.5, 1.0, 1.7, 3.0}) {
        const std::size_t want = oracle::jump_count(ts, lam);
        REQUIRE(jump_count(ts, lam).count == want);
        REQUIRE(prof.at(lam) == want);
      }
      for (double r : {0.5, 1.0, 2.0, 3.5, kInf}) {
        const double want = oracle::variation(ts, r);
        REQUIRE(variation(ts, r).value == doctest::Approx(want).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("profile is constant between breakpoints") {
    auto rng = instance_rng(3, 0);
    const TimeSeries ts = random_series(rng, 10, 2, 2.0);
    const auto prof = jump_profile(ts);
    for (std::size_t k = 0; k + 1 < prof.breakpoints.size(); ++k) {
      const double mid = 0.5 * (prof.breakpoints[k] + prof.breakpoints[k + 1]);
      CHECK(jump_count(ts, mid).count == prof.counts[k + 1]);
    }
    CHECK(jump_count(ts, prof.breakpoints.back() * 1.01).count == 0);
  }

  TEST_CASE("variation witness attains the value") {
    auto rng = instance_rng(5, 0);
    const TimeSeries ts = random_series(rng, 12, 1, 2.0);
    const DistanceMatrix d(ts);
    const auto v = variation(d, 1.5);
    CHECK(std::pow(chain_power_sum(d, v.witness, 1.5), 1.0 / 1.5) == doctest::Approx(v.value).epsilon(1e-13));
  }
}
