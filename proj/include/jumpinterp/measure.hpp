#pragma once

// Atomic measure spaces, Lorentz quasinorms, the jump quasi-seminorm
// J^{p,q}_rho and the weak-type convexity checks.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "jumpinterp/core_seq.hpp"
#include "jumpinterp/report.hpp"

namespace jumpinterp {

class AtomicMeasureSpace {
 public:
  AtomicMeasureSpace() = default;
  AtomicMeasureSpace(std::vector<std::string> ids, std::vector<double> weights);

  // n atoms named "0".."n-1", each of mass `weight`.
  static AtomicMeasureSpace uniform(std::size_t n, double weight = 1.0);
  static AtomicMeasureSpace with_weights(std::vector<double> weights);

  std::size_t size() const noexcept { return weights_.size(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }
  double total_mass() const;

  AtomicMeasureSpace restrict_to(std::span<const std::size_t> atoms) const;

 private:
  std::vector<std::string> ids_;
  std::vector<double> weights_;
};

// f : X x I -> B with one TimeSeries per atom, all on the same labels and norm.
class SampledProcess {
 public:
  SampledProcess() = default;
  SampledProcess(AtomicMeasureSpace space, std::vector<TimeSeries> series);

  // Scalar process; rows[x] is the series at atom x.
  static SampledProcess scalar(AtomicMeasureSpace space,
                               const std::vector<std::vector<double>>& rows);

  const AtomicMeasureSpace& space() const noexcept { return space_; }
  std::size_t atoms() const noexcept { return series_.size(); }
  std::size_t indices() const { return series_.empty() ? 0 : series_.front().size(); }
  std::size_t dimension() const { return norm().dimension(); }
  const BNorm& norm() const { return series_.front().norm(); }
  const std::vector<double>& labels() const { return series_.front().labels(); }
  const TimeSeries& series(std::size_t x) const { return series_[x]; }
  const std::vector<TimeSeries>& all_series() const noexcept { return series_; }

  SampledProcess restrict_atoms(std::span<const std::size_t> atoms) const;
  SampledProcess scaled(double c) const;
  SampledProcess plus(const SampledProcess& other) const;
  SampledProcess minus(const SampledProcess& other) const;

 private:
  AtomicMeasureSpace space_;
  std::vector<TimeSeries> series_;
};

// F : X x N -> [0, inf), one finite sequence per atom (implicitly 0 beyond).
class NonnegProcess {
 public:
  NonnegProcess(AtomicMeasureSpace space, std::vector<std::vector<double>> values);

  const AtomicMeasureSpace& space() const noexcept { return space_; }
  const std::vector<double>& row(std::size_t x) const { return values_[x]; }
  std::size_t atoms() const noexcept { return values_.size(); }

 private:
  AtomicMeasureSpace space_;
  std::vector<std::vector<double>> values_;
};

// Per-atom step functions lambda -> N_lambda(f(x, .)).
struct JumpProfile {
  std::vector<CountProfile> atoms;
};

JumpProfile jump_profile(const SampledProcess& f);
// Counting profile of N_lambda(x) = #{n : F(x,n) >= lambda}.
JumpProfile count_profile(const NonnegProcess& F);

// Lorentz L^{p,q}(X) quasinorm of |g| by the decreasing rearrangement,
// p in (0, inf), q in (0, inf].
double lorentz_norm(std::span<const double> g, const AtomicMeasureSpace& space,
                    double p, double q);
// sup_lambda lambda * m(|g| > lambda)^{1/p}, evaluated from the distribution
// function directly. Agrees with lorentz_norm(g, space, p, inf).
double weak_norm_by_levels(std::span<const double> g, const AtomicMeasureSpace& space,
                           double p);
// Lebesgue L^p(X) norm, p in (0, inf].
double lp_norm(std::span<const double> g, const AtomicMeasureSpace& space, double p);

struct JumpSeminorm {
  double value = 0.0;
  std::optional<double> argmax_lambda;  // empty when every series is constant
};

// sup_{lambda > 0} || lambda N_lambda^{1/rho} ||_{L^{p,q}(X)}, evaluated exactly
// at the union of the atoms' breakpoints. rho > 1.
JumpSeminorm jump_seminorm(const SampledProcess& f, double p, double q, double rho);
// Same supremum for an arbitrary counting profile; rho > 0.
JumpSeminorm profile_seminorm(const JumpProfile& profile,
                              const AtomicMeasureSpace& space, double p, double q,
                              double rho);
// The counting-function analogue for nonnegative sequences.
JumpSeminorm nonneg_jump_seminorm(const NonnegProcess& F, double p, double q,
                                  double rho);

// x -> V^r(f(x, .)).
std::vector<double> atom_variations(const SampledProcess& f, double r);
// x -> ||F(x, .)||_{l^r}.
std::vector<double> atom_sequence_norms(const NonnegProcess& F, double r);

// F(x, j) = ||f(x, t_{j+1}) - f(x, t_j)|| along an optimal r-variation chain.
NonnegProcess difference_process(const SampledProcess& f, double r);

// || sum g_j ||_{L^{1,inf}} <= 2 sum_j a_j (log(a_j^{-1} sum a) + 2), given
// ||g_j||_{L^{1,inf}} <= a_j. Throws InputError naming j if a bound fails.
Check check_l1inf_logconvex(const std::vector<std::vector<double>>& g,
                            const std::vector<double>& a,
                            const AtomicMeasureSpace& space);

// p-convexity of L^{p,inf}, p in (0,1): lhs = ||sum g_j||^p, rhs = sum ||g_j||^p,
// holds when lhs <= (1 + 2/(1-p)) rhs.
Check check_lpinf_pconvex(const std::vector<std::vector<double>>& g, double p,
                          const AtomicMeasureSpace& space);

// Weak-type variation bound from jumps. One Check per applicable case of the
// estimate (two when p == rho). Each has lhs = ||f||_{L^{p,inf}(V^r)},
// rhs = coefficient * jump seminorm and ratio = the empirical constant.
std::vector<Check> variation_from_jumps_report(const SampledProcess& f, double p,
                                               double rho, double r);
std::vector<Check> variation_from_jumps_report(const NonnegProcess& F, double p,
                                               double rho, double r);

}  // namespace jumpinterp
