#pragma once

// Verification suites. Each suite draws a seeded ensemble, runs the checks of
// the library on it and collects the records into a Report.
//
//  jump-oracle           N_lambda against exhaustive subsequence search
//  variation-oracle      dynamic-programming V^r against exhaustive search
//  jump-variation        lambda N_lambda^{1/r} <= V^r and V^r <= 2 ||f||_{l^r}
//  interp-equivalence    jump seminorm against the interpolation norm (brute K)
//  variation-from-jumps  weak-type variation bounds from jump seminorms
//  convexity             L^{1,inf} log-convexity and L^{p,inf} p-convexity
//  lepingle              martingale jump inequality, certificates, Doob
//  markov                orbits of doubly stochastic operators
//  sampling-identity     R E = id, Fourier against kernel route, periodisation
//  jump-transfer         discrete against continuous multiplier jump norms
//  kvector               K-functional of vector-valued box couples
//  class-split           interpolation norm against a partition of the atoms
//
// Every record of an ensemble suite carries witness.instance; re-running with
// `instance` set reproduces that record alone.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "jumpinterp/measure.hpp"
#include "jumpinterp/report.hpp"

namespace jumpinterp {

struct SuiteConfig {
  std::string suite;
  std::optional<double> p, q, rho, theta, r;
  std::optional<std::size_t> trials;  // ensemble size (suite default when empty)
  std::uint64_t seed = 1;
  std::optional<double> tol;          // suite tolerance (suite default when empty)
  std::optional<std::size_t> size;    // largest instance size (suite-specific)
  json family;                        // multiplier family (jump-transfer)
  std::optional<std::size_t> instance;

  json to_json() const;
  static SuiteConfig from_json(const json& j);
};

std::vector<std::string> suite_names();

// Throws InputError for an unknown suite or an empty ensemble and DomainError
// for parameters outside a suite's range.
Report run_suite(const SuiteConfig& config);

// Random test data shared by the suites.
//  series kinds by draw: Gaussian, small integers (ties), random walk, spikes
TimeSeries random_series(std::mt19937_64& rng, std::size_t n, std::size_t m, double s);
// Process with random positive weights; at least one atom moves in time.
SampledProcess random_process(std::mt19937_64& rng, std::size_t atoms, std::size_t indices,
                              std::size_t m = 1, double s = 2.0);

}  // namespace jumpinterp
