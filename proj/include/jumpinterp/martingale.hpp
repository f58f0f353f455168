#pragma once

// Finite martingales on atomic probability spaces: filtrations, conditional
// expectations, square and maximal functions, the lambda-jump stopping-time
// splitting and the endpoint Lepingle verification.

#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "jumpinterp/measure.hpp"
#include "jumpinterp/report.hpp"

namespace jumpinterp {

// A partition of the atoms as block labels 0..blocks-1, one per atom.
using Partition = std::vector<std::size_t>;

// Refining sequence of partitions indexed by 0..steps-1.
class Filtration {
 public:
  Filtration() = default;
  // labels[t][x] is the block of atom x at time t (any integer labels).
  explicit Filtration(std::vector<Partition> labels);
  // blocks[t] lists the blocks at time t as lists of atoms.
  static Filtration from_blocks(std::size_t atoms,
                                const std::vector<std::vector<std::vector<std::size_t>>>& blocks);
  // 2^depth atoms; at time t the blocks are the dyadic intervals of length 2^{depth-t}.
  static Filtration dyadic(std::size_t depth);

  std::size_t atoms() const { return parts_.empty() ? 0 : parts_.front().size(); }
  std::size_t steps() const noexcept { return parts_.size(); }
  const Partition& partition(std::size_t t) const { return parts_[t]; }
  std::size_t blocks(std::size_t t) const { return counts_[t]; }
  std::vector<std::vector<std::size_t>> block_lists(std::size_t t) const;

 private:
  std::vector<Partition> parts_;
  std::vector<std::size_t> counts_;
};

// Relabel blocks as 0..k-1 in order of first appearance; returns k.
std::size_t canonicalize(Partition& p);

// E[g | partition]: block-wise weighted means of the m-tuples in `flat`
// (atom-major, m entries per atom).
std::vector<double> conditional_expectation(std::span<const double> flat, std::size_t m,
                                            const Partition& partition,
                                            const AtomicMeasureSpace& space);

class FiniteMartingale {
 public:
  // Checks adaptedness and E[f_{t+1} | G_t] = f_t to 1e-12 relative.
  FiniteMartingale(Filtration filtration, SampledProcess values);

  const Filtration& filtration() const noexcept { return filt_; }
  const SampledProcess& process() const noexcept { return f_; }
  const AtomicMeasureSpace& space() const noexcept { return f_.space(); }
  std::size_t atoms() const noexcept { return f_.atoms(); }
  std::size_t steps() const { return f_.indices(); }
  std::size_t dimension() const { return f_.dimension(); }
  // f_t as flat atom-major m-tuples
  std::vector<double> at(std::size_t t) const;

  // Largest |E[f_{t'} | G_t] - f_t| over t < t', relative to the sup norm.
  double tower_defect() const;

 private:
  Filtration filt_;
  SampledProcess f_;
};

// f_t = E[terminal | G_t]; terminal holds one m-tuple per atom and is
// conditioned on the last partition first.
FiniteMartingale make_martingale(const AtomicMeasureSpace& space, const Filtration& filtration,
                                 const std::vector<std::vector<double>>& terminal, BNorm norm);

// S_rho f(x) = (sum_{n>0} ||f_n(x) - f_{n-1}(x)||^rho)^{1/rho}
std::vector<double> square_function(const FiniteMartingale& m, double rho);
// f_*(x) = max_t ||f_t(x)||
std::vector<double> doob_max(const FiniteMartingale& m);
// sup_t ||f_t||_{L^p(X;B)}, p in (0, inf]
double sup_lp(const FiniteMartingale& m, double p);

// ||f_*||_p <= p' sup_t ||f_t||_p, p in (1, inf].
Check doob_check(const FiniteMartingale& m, double p);
// ||S_rho f||_p against ||f_*||_p; the ratio is the empirical constant A.
Check square_max_check(const FiniteMartingale& m, double p, double rho);

// lambda-jump stopping times t_0 = 0 < t_1 < ... per atom (positions).
std::vector<std::vector<std::size_t>> jump_stopping_times(const FiniteMartingale& m,
                                                          double lambda);
// Counts pairs (k, t) for which {x : t_k(x) <= t} is not a union of G_t blocks.
std::size_t stopping_time_violations(const FiniteMartingale& m,
                                     const std::vector<std::vector<std::size_t>>& stops);

// Stopped sequences k = 0..levels-1 along the lambda-jump stopping times.
// `frozen` stays at the last finite stopping time; `standard` uses
// f_{t_k ^ T} with T the last index (after the final jump it moves once to f_T).
struct StoppedMartingale {
  double lambda = 0.0;
  std::vector<std::vector<std::size_t>> stops;
  std::size_t levels = 0;
  std::size_t m = 1;
  std::vector<std::vector<double>> frozen;     // [k] -> flat atom-major values
  std::vector<std::vector<double>> standard;  // [k] -> flat atom-major values
  // Partition of G_{t_k ^ T} for each k.
  std::vector<Partition> sigma;
};

StoppedMartingale stop_at_jumps(const FiniteMartingale& m, double lambda);

// max_k |E[g_k | G_{t_{k-1} ^ T}] - g_{k-1}| relative to the sup norm.
struct StoppedDefects {
  double frozen = 0.0;
  double standard = 0.0;
};
StoppedDefects stopped_martingale_defects(const FiniteMartingale& m, const StoppedMartingale& s);

// S_rho of a stopped sequence, per atom.
std::vector<double> stopped_square_function(const StoppedMartingale& s, bool frozen, double rho,
                                            const BNorm& norm);

struct LepingleSplit {
  SampledProcess f0;
  SampledProcess f1;
  StoppedMartingale stopped;
  Check cert_sup;        // max ||f0_t(x)|| <= lambda
  Check cert_variation;  // V^1(f1(x)) <= lambda^{1-rho} S_rho(f~)(x)^rho, worst atom
};

LepingleSplit lepingle_split(const FiniteMartingale& m, double lambda, double rho);

// Both certificates of lepingle_split for every lambda at once. The splitting
// of atom x only changes at the breakpoints of f(x, .), so each atom is checked
// at its own breakpoints. Returns the worst case of each certificate;
// `violations` in the witness counts failing (atom, lambda) pairs.
std::vector<Check> lepingle_certificates(const FiniteMartingale& m, double rho);

struct LepingleOptions {
  bool middle = true;               // constructive interpolation quantity
  std::size_t middle_max_atoms = 1024;
  bool weak = true;                 // J^{1,inf} against sup ||f_t||_{L^1}
};

struct LepingleReport {
  double J = 0.0;
  double sup = 0.0;
  double middle = -1.0;  // -1 when skipped
  double A_emp = 0.0;    // max over lambda of ||S_rho f~||_p / sup
  double A_self = 0.0;   // ||S_rho f||_p / sup
  std::vector<Check> checks;
  json summary() const;
};

// p in (1, inf), rho in [2, inf). For scalar B with p = rho = 2 the record
// "lepingle:J<=3sup" asserts J <= 3 sup; otherwise ratios are recorded.
LepingleReport verify_lepingle(const FiniteMartingale& m, double p, double rho,
                               LepingleOptions opt = {});

// Generators ----------------------------------------------------------------

enum class StepLaw { sign, gaussian, mixed };

// Dyadic martingale on 2^depth equal atoms (total mass 1). At step t every
// block splits in halves that move by +v and -v, v drawn per block.
FiniteMartingale dyadic_random_walk(std::size_t depth, BNorm norm, std::mt19937_64& rng,
                                    StepLaw law = StepLaw::mixed);

// Random weights, random refinements (each block splits into up to 3 parts
// per step) and Gaussian terminal data.
FiniteMartingale random_refinement(std::size_t atoms, std::size_t depth, BNorm norm,
                                   std::mt19937_64& rng);

// Hill-climb on the terminal values of a dyadic martingale to maximise
// `objective`. Returns the best martingale found.
FiniteMartingale adversarial_martingale(std::size_t depth, BNorm norm, std::mt19937_64& rng,
                                        const std::function<double(const FiniteMartingale&)>& objective,
                                        int iterations = 200);

}  // namespace jumpinterp
