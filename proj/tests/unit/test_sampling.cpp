#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "jumpinterp/error.hpp"
#include "jumpinterp/sampling.hpp"

using namespace jumpinterp;

TEST_SUITE("sampling") {
  TEST_CASE("profiles") {
    CHECK(psi1(0.0) == 1.0);
    CHECK(psi1(3.0) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(psi1(0.5) == doctest::Approx(4.0 / (std::numbers::pi * std::numbers::pi)));
    CHECK(psi_hat1(0.25) == 0.75);
    CHECK(psi_hat1(1.5) == 0.0);
    CHECK(phi_hat1(0.9) == 1.0);
    CHECK(phi_hat1(2.1) == 0.0);
    CHECK(smooth_step(0.5) == doctest::Approx(0.5));
  }

  TEST_CASE("extension of a delta is psi") {
    const KernelSpec spec;
    const GridFunction F = extend(ZSequence::scalar(0, {1.0}), spec, 8.0);
    for (std::size_t k = 0; k < F.size(); ++k)
      REQUIRE(F.values[k] == doctest::Approx(psi1(F.x(k))).epsilon(1e-14));
  }

  TEST_CASE("restriction inverts extension") {
    const PhiTable phi;
    CHECK(phi.quadrature_error() < 1e-9);
    const ZSequence f = ZSequence::scalar(-2, {1.0, -0.5, 2.0, 0.0, 0.25});
    const GridFunction F = extend(f, phi.spec(), phi.spec().radius + 4.0);
    const ZSequence back = restrict(F, phi, f.first, f.last());
    for (long n = f.first; n <= f.last(); ++n) REQUIRE(back.at(n) == doctest::Approx(f.at(n)).epsilon(1e-6));
    GridFunction zero = F;
    std::fill(zero.values.begin(), zero.values.end(), 0.0);
    for (double v : restrict(zero, phi, -2, 2).values) CHECK(v == 0.0);
    for (const auto& c : sampling_identity_checks(f, phi))
      if (c.name.find("identity") != std::string::npos) CHECK(c.holds);
  }

  TEST_CASE("extension norm by the Gram matrix") {
    const ZSequence d = ZSequence::scalar(0, {1.0});
    CHECK(extension_l2_norm(d) == doctest::Approx(std::sqrt(2.0 / 3.0)));
  }

  TEST_CASE("periodised multipliers") {
    const auto fam = MultiplierFamily::dilated_cutoff(1.0 / 6.0, 3);
    const PeriodicSymbol m1 = periodize_multiplier(fam, 1);
    for (double xi : {0.0, 0.05, 0.1, 0.3}) {
      CHECK(m1(0, xi) == doctest::Approx(fam.value(0, xi)));
      CHECK(m1(0, xi + 1.0) == doctest::Approx(fam.value(0, xi)));
      CHECK(m1(1, xi) == doctest::Approx(m1.truncated_sum(1, xi, 3)));
    }
    const PeriodicSymbol m3 = periodize_multiplier(fam, 3);
    CHECK(m3(0, 1.0 / 3.0 + 0.02) == doctest::Approx(fam.value(0, 0.02)));
    const auto wide = MultiplierFamily::dilated_cutoff(0.4, 1);
    CHECK_THROWS_AS(periodize_multiplier(wide, 2), InputError);
  }

  TEST_CASE("unit multiplier on the band gives the identity for q = 1") {
    const auto one = MultiplierFamily::table({0.0, 0.5}, {{1.0, 1.0}, {1.0, 1.0}});
    const KernelTable K(kernel_symbol(one), 1.0, 1e-9, 8.0);
    CHECK(K(0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    for (long k = 1; k <= 8; ++k) CHECK(std::abs(K(0, k)) < 1e-12);
    const ZSequence f = ZSequence::scalar(0, {1.0, -2.0, 0.5});
    const SampledProcess T = apply_discrete(K, f, 1);
    double err = 0.0;
    for (std::size_t x = 0; x < T.atoms(); ++x) {
      const long n = f.first - K.half_width() + static_cast<long>(x);
      for (double v : T.series(x).flat_values()) err = std::max(err, std::abs(v - f.at(n)));
    }
    CHECK(err < 1e-9);
    const SampledProcess Z = apply_discrete(K, ZSequence::scalar(0, {0.0, 0.0}), 1);
    for (const auto& s : Z.all_series())
      for (double v : s.flat_values()) CHECK(v == 0.0);
  }

  TEST_CASE("Fourier and kernel routes agree") {
    const auto fam = MultiplierFamily::dilated_cutoff(1.0 / 6.0, 4);
    const KernelTable K(kernel_symbol(fam), 1.0, 1e-9);
    const ZSequence f = random_test_sequence(12, 3, 0);
    for (int q : {1, 2, 3}) {
      const PeriodicSymbol m = periodize_multiplier(fam, q);
      for (const auto& c : fourier_kernel_checks(K, m, f, 1e-7)) REQUIRE(c.holds);
    }
  }
}
