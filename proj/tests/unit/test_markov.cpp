#include <cmath>
#include <random>

#include "doctest.h"
#include "jumpinterp/error.hpp"
#include "jumpinterp/markov.hpp"
#include "jumpinterp/rng.hpp"

using namespace jumpinterp;

namespace {

std::vector<std::vector<double>> column(std::vector<double> v) {
  std::vector<std::vector<double>> out;
  for (double x : v) out.push_back({x});
  return out;
}

}  // namespace

TEST_SUITE("markov") {
  TEST_CASE("identity and permutations give constant orbits") {
    const std::vector<double> f{1, -2, 0.5, 3};
    const std::vector<std::size_t> perm{2, 0, 3, 1};
    for (const auto& Q : {DoublyStochasticMatrix::identity(4), DoublyStochasticMatrix::permutation(perm)}) {
      const SampledProcess orbit = semigroup_orbit(Q, f, 8);
      REQUIRE(orbit.indices() == 9);
      for (std::size_t x = 0; x < 4; ++x)
        for (double v : orbit.series(x).flat_values()) CHECK(v == doctest::Approx(f[x]));
      const auto rep = verify_markov_jump(Q, column(f), BNorm(1, 2.0), 2.0, 2.0, 8);
      CHECK(rep.J == 0.0);
      CHECK(rep.ratio == 0.0);
    }
  }

  TEST_CASE("averaging matrix reaches the mean after one step") {
    const std::size_t n = 4;
    const auto Q = DoublyStochasticMatrix(n, std::vector<double>(n * n, 1.0 / n));
    const std::vector<double> f{1, 2, 3, 6};
    const SampledProcess orbit = semigroup_orbit(Q, f, 3);
    for (std::size_t x = 0; x < n; ++x) {
      const auto& v = orbit.series(x).flat_values();
      CHECK(v[0] == f[x]);
      for (std::size_t k = 1; k < v.size(); ++k) CHECK(v[k] == doctest::Approx(3.0));
    }
  }

  TEST_CASE("constant data has no jumps") {
    auto rng = instance_rng(51, 0);
    const auto Q = random_doubly_stochastic(6, DsMethod::sinkhorn, rng);
    const auto rep = verify_markov_jump(Q, column({2, 2, 2, 2, 2, 2}), BNorm(1, 2.0), 2.0, 2.0, 16);
    CHECK(rep.J == doctest::Approx(0.0).epsilon(1e-9));
  }

  TEST_CASE("generators") {
    auto rng = instance_rng(52, 0);
    const auto one = random_doubly_stochastic(1, DsMethod::birkhoff, rng);
    CHECK(one.entries() == std::vector<double>{1.0});
    const auto p = random_doubly_stochastic(5, DsMethod::birkhoff, rng, 1);
    for (double v : p.entries()) CHECK((v == 0.0 || v == 1.0));
    const auto s = random_doubly_stochastic(8, DsMethod::sinkhorn, rng);
    CHECK(s.stochastic_defect() < 1e-10);
    CHECK_THROWS_AS(sinkhorn(2, {1.0, 1.0, 0.0, 1.0}, 1e-10, 5), ConvergenceError);
    CHECK_THROWS_AS(DoublyStochasticMatrix(2, {0.5, 0.5, 0.5, 0.6}), InputError);
  }

  TEST_CASE("contractivity on random operators") {
    for (std::size_t i = 0; i < 40; ++i) {
      auto rng = instance_rng(53, i);
      const DsMethod method = (i % 2) ? DsMethod::birkhoff : DsMethod::sinkhorn;
      const std::size_t n = 2 + i % 7;
      const auto Q = random_doubly_stochastic(n, method, rng);
      std::normal_distribution<double> g;
      std::vector<double> f(n);
      for (auto& v : f) v = g(rng);
      for (const auto& c : contractivity_checks(Q, f)) REQUIRE(c.holds);
      for (const auto& c : orbit_contraction_checks(semigroup_orbit(Q, f, 16), 1e-10))
        if (c.name.rfind("orbit_contractive", 0) == 0) REQUIRE(c.holds);
      const auto rep = verify_markov_jump(Q, column(f), BNorm(1, 2.0), 2.0, 2.0, 16);
      REQUIRE(rep.ratio >= 0.0);
      REQUIRE(std::isfinite(rep.ratio));
    }
  }
}
