#pragma once

// Doubly stochastic operators on finite weighted state spaces and the
// orbits ((Q^*)^n Q^n f)_n.

#include <cstddef>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jumpinterp/measure.hpp"
#include "jumpinterp/report.hpp"

namespace jumpinterp {

// Q acting on functions by (Qg)(i) = sum_j Q_ij g(j). With state weights m,
// Q is doubly stochastic when Q1 = 1 and m^T Q = m^T (so that the weighted
// adjoint Q^*_ij = m_j Q_ji / m_i also fixes 1), entries >= 0.
class DoublyStochasticMatrix {
 public:
  DoublyStochasticMatrix() = default;
  // Row-major n x n entries; uniform weights when `weights` is empty.
  DoublyStochasticMatrix(std::size_t n, std::vector<double> entries,
                         std::vector<double> weights = {});
  static DoublyStochasticMatrix from_rows(const std::vector<std::vector<double>>& rows,
                                          std::vector<double> weights = {});
  static DoublyStochasticMatrix identity(std::size_t n);
  // (Pg)(i) = g(perm[i])
  static DoublyStochasticMatrix permutation(std::span<const std::size_t> perm);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * n_ + j]; }
  const std::vector<double>& entries() const noexcept { return a_; }
  const std::vector<double>& weights() const noexcept { return w_; }
  AtomicMeasureSpace space() const;

  DoublyStochasticMatrix adjoint() const;
  // this * other (apply other first)
  DoublyStochasticMatrix compose(const DoublyStochasticMatrix& other) const;
  // Apply to m-tuples per state (flat, state-major).
  std::vector<double> apply(std::span<const double> g, std::size_t m = 1) const;

  // Largest deviation of row sums and of weighted column sums from 1.
  double stochastic_defect() const;

 private:
  struct Unchecked {};
  // Products and adjoints of validated matrices; skips the sum check so that
  // rounding in long products does not accumulate into a rejection.
  DoublyStochasticMatrix(Unchecked, std::size_t n, std::vector<double> entries,
                         std::vector<double> weights)
      : n_(n), a_(std::move(entries)), w_(std::move(weights)) {}

  std::size_t n_ = 0;
  std::vector<double> a_;
  std::vector<double> w_;
};

enum class DsMethod { birkhoff, sinkhorn };
DsMethod parse_ds_method(const std::string& s);
const char* to_string(DsMethod m);

// Alternating row/column normalisation until both sums are within `tol` of 1.
// Throws ConvergenceError after `max_iter` sweeps.
DoublyStochasticMatrix sinkhorn(std::size_t n, std::vector<double> positive, double tol = 1e-10,
                                int max_iter = 10000);

// birkhoff: convex combination of `components` random permutation matrices
// (0 = random count in 1..n); sinkhorn: normalisation of a random positive matrix.
DoublyStochasticMatrix random_doubly_stochastic(std::size_t n, DsMethod method,
                                                std::mt19937_64& rng,
                                                std::size_t components = 0);

// Orbit n -> (Q^*)^n Q^n f for n = 0..N as a process over the states, via
// P_{n+1} = Q^* P_n Q. f holds one m-tuple per state.
SampledProcess semigroup_orbit(const DoublyStochasticMatrix& Q,
                               const std::vector<std::vector<double>>& f, BNorm norm,
                               std::size_t N);
SampledProcess semigroup_orbit(const DoublyStochasticMatrix& Q, std::span<const double> f,
                               std::size_t N);

// Orbit restricted to the index set 0..N (N < indices()).
SampledProcess orbit_prefix(const SampledProcess& orbit, std::size_t N);

// ||Qg||_p <= ||g||_p and ||Q^* g||_p <= ||g||_p for p in {1, 2, inf}, and
// Q|g| >= 0. g is scalar per state. The relative tolerance is 1e-12 plus a
// multiple of the stochastic defect of Q.
std::vector<Check> contractivity_checks(const DoublyStochasticMatrix& Q,
                                        std::span<const double> g);
// For p in {1, 2, inf}: "orbit_contractive" asserts ||P_n f||_{L^p(B)} <= ||f||
// for every n (relative `tol`); "orbit_stepwise" records the largest ratio
// ||P_n f|| / ||P_{n-1} f||, which may exceed 1.
std::vector<Check> orbit_contraction_checks(const SampledProcess& orbit, double tol = 1e-12);

struct HorizonRatio {
  std::size_t N = 0;
  double J = 0.0;
  double ratio = 0.0;
};

struct MarkovReport {
  double J = 0.0;
  double norm_f = 0.0;
  double ratio = 0.0;
  std::vector<HorizonRatio> by_horizon;  // N, N/2, N/4, ... down to 1
  std::vector<Check> checks;
  json summary() const;
};

// J^p_rho of the orbit over 0..N against ||f||_{L^p(X;B)}. p in (1, inf),
// rho in [2, inf).
MarkovReport verify_markov_jump(const DoublyStochasticMatrix& Q,
                                const std::vector<std::vector<double>>& f, BNorm norm,
                                double p, double rho, std::size_t N);

}  // namespace jumpinterp
