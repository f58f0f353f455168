#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "jumpinterp/error.hpp"
#include "jumpinterp/interpolation.hpp"
#include "jumpinterp/rng.hpp"
#include "jumpinterp/suites.hpp"

using namespace jumpinterp;

namespace {

SampledProcess one_atom(std::vector<double> v) {
  return SampledProcess::scalar(AtomicMeasureSpace::uniform(1), {std::move(v)});
}

double max_abs(const TimeSeries& ts) {
  double m = 0.0;
  for (double v : ts.flat_values()) m = std::max(m, std::abs(v));
  return m;
}

// Greedy fill of the budget t^rho over atoms sorted by ||f(x)||^rho; exact when
// both sides of the couple coincide, since then K(psi, a) = min(1, psi) ||a||.
double water_filling(const std::vector<std::vector<double>>& f, const AtomicMeasureSpace& sp,
                     double s, double rho, double t) {
  const BoxCouple c{f.front().size(), s, 1.0, 1.0};
  std::vector<std::pair<double, double>> w;  // (||f(x)||^rho, mass)
  for (std::size_t x = 0; x < f.size(); ++x)
    w.emplace_back(std::pow(ell_norm(c, f[x]), rho), sp.weight(x));
  std::sort(w.begin(), w.end(), std::greater<>());
  double budget = std::pow(t, rho), out = 0.0;
  for (const auto& [v, m] : w) {
    const double take = std::min(budget, m);
    out += v * take;
    budget -= take;
  }
  return out;
}

}  // namespace

TEST_SUITE("interpolation") {
  TEST_CASE("interp_norm of a two-sided envelope") {
    const double c = 2.5;
    const KFunction K = [c](double t) { return c * std::min(1.0, t); };
    const auto r = interp_norm(K, c, c, 0.3, kInf);
    CHECK(r.value == doctest::Approx(c));
    CHECK(r.argmax_j == 0);
    // (sum_j (2^{-j/2} min(1, 2^j))^2)^{1/2} = sqrt(2 + 1)
    CHECK(interp_norm(K, c, c, 0.5, 2.0, 1e-13).value == doctest::Approx(c * std::sqrt(3.0)).epsilon(1e-10));
    const KFunction zero = [](double) { return 0.0; };
    CHECK(interp_norm(zero, 0.0, 0.0, 0.5, kInf).value == 0.0);
    CHECK_THROWS_AS(interp_norm(K, c, c, 1.0, kInf), DomainError);
  }

  TEST_CASE("K-functional at t = 0 and on constants") {
    const JumpCouple c{2, 2, 2, 0.75};
    const auto f = one_atom({0, 1, 0, 1});
    for (KMode m : {KMode::constructive, KMode::numeric, KMode::brute}) {
      CHECK(JumpKFunctional(f, c, m)(0.0) == doctest::Approx(0.0));
      CHECK(JumpKFunctional(one_atom({2, 2, 2}), c, m)(1.0) == doctest::Approx(0.0));
    }
  }

  TEST_CASE("stopping-time splitting examples") {
    const JumpCouple c{2, 2, 2, 0.75};
    const auto f = one_atom({0, 1, 0, 1});
    const Splitting all = k_splitting(f, 1.0, c);
    CHECK(max_abs(all.f0.series(0)) == 0.0);
    CHECK(all.f1.series(0).flat_values() == f.series(0).flat_values());
    CHECK(all.cert0 == 0.0);

    const auto g = one_atom({1, 2, 0, 3});
    const Splitting none = k_splitting(g, 10.0, c);
    CHECK(none.f1.series(0).flat_values() == std::vector<double>{1, 1, 1, 1});
    CHECK(none.f0.series(0).flat_values() == std::vector<double>{0, 1, -1, 2});
    CHECK(none.cert1 == 0.0);
    CHECK(none.cert0 < 10.0);
    const Splitting inf = k_splitting(g, kInf, c);
    CHECK(inf.f1.series(0).flat_values() == std::vector<double>{1, 1, 1, 1});
  }

  TEST_CASE("splitting sums back to f and stays within the certificates") {
    const JumpCouple c{2, 3, 2, 2.0 / 3.0};
    for (std::size_t i = 0; i < 50; ++i) {
      auto rng = instance_rng(31, i);
      const SampledProcess f = random_process(rng, 1 + i % 3, 3 + i % 6);
      for (double lam : {0.3, 1.0, 2.5}) {
        const Splitting sp = k_splitting(f, lam, c);
        const SampledProcess back = sp.f0.plus(sp.f1);
        for (std::size_t x = 0; x < f.atoms(); ++x) {
          const auto& a = back.series(x).flat_values();
          const auto& b = f.series(x).flat_values();
          for (std::size_t k = 0; k < a.size(); ++k) REQUIRE(a[k] == doctest::Approx(b[k]));
        }
        REQUIRE(sp.cert0 == doctest::Approx(jump_norm0(sp.f0)));
        REQUIRE(sp.cert1 == doctest::Approx(jump_norm1(sp.f1, c)));
        REQUIRE(sp.cert0 <= 2.0 * lam * (1 + 1e-12));
      }
    }
  }

  TEST_CASE("tube variation at the ends of the budget") {
    const std::vector<double> f{0, 2, -1, 3, 1};
    CHECK(tube_min_variation(f, 0.0, 2.0).value ==
          doctest::Approx(variation(TimeSeries::scalar(f), 2.0).value).epsilon(1e-12));
    CHECK(tube_min_variation(f, 4.0, 2.0).value == doctest::Approx(0.0));
    CHECK(tube_min_variation(f, 4.0, 0.5).value == doctest::Approx(0.0));
  }

  TEST_CASE("equivalence is positive and scale invariant") {
    const auto f = one_atom({0, 1, 0, 1});
    const auto e = jump_interp_equivalence(f, 2, 2, 2, 0.75);
    CHECK(e.J == doctest::Approx(std::sqrt(3.0)));
    CHECK(e.I > 0.0);
    const auto e3 = jump_interp_equivalence(f.scaled(3.0), 2, 2, 2, 0.75);
    CHECK(e3.J == doctest::Approx(3.0 * e.J));
    CHECK(e3.I == doctest::Approx(3.0 * e.I).epsilon(1e-6));
    CHECK(e3.ratio_IJ == doctest::Approx(e.ratio_IJ).epsilon(1e-6));
    const auto z = jump_interp_equivalence(one_atom({5, 5, 5}), 2, 2, 2, 0.75);
    CHECK(z.J == 0.0);
    CHECK(z.I == 0.0);
  }

  TEST_CASE("box K-functional against a grid over u") {
    for (std::size_t i = 0; i < 40; ++i) {
      auto rng = instance_rng(32, i);
      std::normal_distribution<double> g;
      std::uniform_real_distribution<double> u(0.5, 2.0);
      const BoxCouple c{1 + i % 4, (i % 3 == 0) ? kInf : 1.0 + (i % 3), u(rng), u(rng)};
      std::vector<double> a(c.m);
      for (auto& v : a) v = g(rng);
      for (double t : {0.1, 1.0, 3.0}) {
        double top = 0.0;
        for (double v : a) top = std::max(top, c.c_box * std::abs(v));
        double best = kInf;
        constexpr int kGrid = 200000;
        for (int k = 0; k <= kGrid; ++k) {
          const double uu = top * k / kGrid;
          std::vector<double> rest(c.m);
          for (std::size_t j = 0; j < c.m; ++j) rest[j] = std::max(std::abs(a[j]) - uu / c.c_box, 0.0);
          best = std::min(best, ell_norm(c, rest) + t * uu);
        }
        const double K = box_k(c, a, t);
        REQUIRE(K <= best + 1e-12);
        REQUIRE(K >= best - 1e-4 * (1.0 + best));
      }
    }
  }

  TEST_CASE("vector K supremum matches water-filling when the sides coincide") {
    for (std::size_t i = 0; i < 30; ++i) {
      auto rng = instance_rng(33, i);
      std::normal_distribution<double> g;
      std::uniform_real_distribution<double> u(0.3, 2.0);
      const std::size_t atoms = 1 + i % 4, m = 1 + i % 2;
      std::vector<double> w(atoms);
      for (auto& v : w) v = u(rng);
      const auto sp = AtomicMeasureSpace::with_weights(w);
      std::vector<std::vector<double>> f(atoms, std::vector<double>(m));
      for (auto& row : f)
        for (auto& v : row) v = g(rng);
      const BoxCouple c{m, kInf, 1.0, 1.0};
      for (double t : {0.2, 1.0, 5.0}) {
        const double want = water_filling(f, sp, kInf, 2.0, t);
        REQUIRE(vector_k_sup(c, f, sp, 2.0, t).value == doctest::Approx(want).epsilon(1e-6));
      }
    }
  }

  TEST_CASE("vector K supremum against a grid on two atoms") {
    for (std::size_t i = 0; i < 20; ++i) {
      auto rng = instance_rng(34, i);
      std::normal_distribution<double> g;
      std::uniform_real_distribution<double> u(0.3, 2.0);
      const auto sp = AtomicMeasureSpace::with_weights({u(rng), u(rng)});
      const BoxCouple c{2, 2.0, 1.0, 1.0};
      std::vector<std::vector<double>> f(2, std::vector<double>(2));
      for (auto& row : f)
        for (auto& v : row) v = g(rng);
      const double rho = 2.0, t = 1.0;
      double best = 0.0;
      constexpr int kGrid = 20000;
      for (int k = 1; k < kGrid; ++k) {
        const double a = static_cast<double>(k) / kGrid;
        const double p0 = std::pow(a / sp.weight(0), 1.0 / rho);
        const double p1 = std::pow((1.0 - a) / sp.weight(1), 1.0 / rho);
        const double v = std::pow(box_k(c, f[0], p0), rho) * sp.weight(0) +
                         std::pow(box_k(c, f[1], p1), rho) * sp.weight(1);
        best = std::max(best, v);
      }
      const double got = vector_k_sup(c, f, sp, rho, t).value;
      REQUIRE(got >= best * (1.0 - 1e-9));
      REQUIRE(got <= best * 1.01);
    }
  }

  TEST_CASE("one-part partition gives ratio 1") {
    const auto sp = AtomicMeasureSpace::with_weights({1.0, 0.5, 2.0});
    const BoxCouple c{2, 2.0, 1.0, 1.0};
    const std::vector<std::vector<double>> f{{1, -2}, {0.5, 0}, {3, 1}};
    const Check chk = partition_interp_bound(c, f, sp, {{0, 1, 2}}, 0.5, 2.0);
    CHECK(chk.ratio == doctest::Approx(1.0));
    CHECK_THROWS(partition_interp_bound(c, f, sp, {{0, 1}}, 0.5, 2.0));
  }
}
