#pragma once

// K-functionals and real interpolation norms. Two families of couples are
// supported:
//
//  * the jump couple (L^inf(X; V^inf), L^{theta p, theta q}(X; V^{theta rho}))
//    over a SampledProcess, with constructive / numeric / brute K;
//  * box couples on R^m, where one side is c_ell * l^s and the other is
//    c_box * l^inf, lifted to Bochner spaces over an atomic measure space.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "jumpinterp/measure.hpp"
#include "jumpinterp/report.hpp"

namespace jumpinterp {

// ---------------------------------------------------------------------------
// Generic real interpolation

using KFunction = std::function<double(double)>;

struct InterpResult {
  double value = 0.0;
  int argmax_j = 0;     // r = inf: attaining dyadic exponent
  int j_lo = 0;         // range of j actually evaluated
  int j_hi = 0;
  double tail_bound = 0.0;  // bound on the omitted part (0 when r = inf)
};

// [A_0, A_1]_{theta,r}(a) over dyadic t = 2^j. `norm0`, `norm1` are
// ||a||_{A_0}, ||a||_{A_1}, which give the envelope K(t) <= min(norm0, t norm1).
// For r = inf the supremum is exact: evaluation stops once the envelope falls
// below the best value found. For r < inf the omitted tails are below
// rel_tol relative to the result.
InterpResult interp_norm(const KFunction& K, double norm0, double norm1, double theta,
                         double r, double rel_tol = 1e-9);

// t -> t K(1/t), the K-functional of the reversed couple.
KFunction swap_couple(KFunction K);

// ---------------------------------------------------------------------------
// Jump couple

struct JumpCouple {
  double p = 2.0;
  double q = 2.0;
  double rho = 2.0;
  double theta = 0.5;

  double P() const { return theta * p; }      // Lorentz exponents of A_1
  double Q() const { return theta * q; }
  double R() const { return theta * rho; }    // variation exponent of A_1
  void validate() const;
};

// ||V^inf(f)||_{L^inf(X)}
double jump_norm0(const SampledProcess& f);
// ||V^{theta rho}(f)||_{L^{theta p, theta q}(X)}
double jump_norm1(const SampledProcess& f, const JumpCouple& c);

struct Splitting {
  SampledProcess f0;
  SampledProcess f1;
  double cert0 = 0.0;  // jump_norm0(f0)
  double cert1 = 0.0;  // jump_norm1(f1)
};

// Stopping-time splitting at level lambda: f1(x,t) is f at the last stopping
// time <= t, f0 = f - f1. lambda = inf gives f1(x,t) = f(x, min I).
Splitting k_splitting(const SampledProcess& f, double lambda, const JumpCouple& c);

enum class KMode { constructive, numeric, brute };

const char* to_string(KMode m);
KMode parse_kmode(const std::string& s);

struct KOptions {
  // s-grid for numeric / brute: geometric between s_floor * osc and osc.
  double grid_ratio_numeric = 1.1;
  double grid_ratio_brute = 1.01;
  double s_floor = 1e-6;
  int refine_iterations = 60;  // golden-section steps around the grid argmin (brute)
  int restarts = 5;            // block-descent restarts when R < 1 (brute)
  std::uint64_t seed = 1;
};

// Smallest V^R(h) over f - s <= h <= f for a scalar series. For R >= 1 the
// taut string through the tube is optimal; for R < 1 it is used as a start
// for block coordinate descent.
struct TubeSolution {
  double value = 0.0;
  std::vector<double> h;
};
TubeSolution tube_min_variation(std::span<const double> f, double s, double R);
// Shortest path through the tube lo <= h <= hi with free ends (minimiser of
// sum (h_{i+1} - h_i)^2), by a primal active-set method.
std::vector<double> taut_string(std::span<const double> lo, std::span<const double> hi);
// Block coordinate descent on contiguous index blocks, golden-section line
// search; starts from `start` (clamped into the tube).
TubeSolution tube_descent(std::span<const double> f, double s, double R,
                          std::vector<double> start, int max_sweeps = 200);

// K(t, f) for the jump couple as a profile over t.
//  constructive: min over lambda in breakpoints and lambda = inf of
//                cert0 + t cert1 of the stopping-time splitting (any B);
//  numeric:      level-set decomposition K(t) = min_s s + t L(g(s)) with
//                g_x(s) = min tube variation, on a coarse s-grid (scalar B);
//  brute:        the same on a fine grid with golden-section refinement
//                (scalar B).
// All modes return upper bounds with a witness splitting.
class JumpKFunctional {
 public:
  JumpKFunctional(SampledProcess f, JumpCouple couple, KMode mode, KOptions opt = {});

  double operator()(double t) const { return evaluate(t).value; }

  struct Value {
    double value = 0.0;
    double s = 0.0;       // numeric/brute: oscillation budget of f0
    double lambda = 0.0;  // constructive: stopping level (inf allowed)
  };
  Value evaluate(double t) const;
  Splitting splitting(double t) const;

  double norm0() const { return norm0_; }
  double norm1() const { return norm1_; }
  KMode mode() const { return mode_; }
  const JumpCouple& couple() const { return couple_; }
  const SampledProcess& process() const { return f_; }
  KFunction as_function() const;

 private:
  double lorentz_of_s(double s) const;

  SampledProcess f_;
  JumpCouple couple_;
  KMode mode_;
  KOptions opt_;
  double norm0_ = 0.0;
  double norm1_ = 0.0;
  // constructive
  std::vector<double> lambdas_, c0_, c1_;
  // numeric / brute
  std::vector<double> s_grid_, l_grid_;
};

struct EquivalenceResult {
  double J = 0.0;  // jump seminorm
  double I = 0.0;  // interpolation norm
  double ratio_IJ = 0.0;
  double ratio_JI = 0.0;
  int argmax_j = 0;
  std::optional<double> argmax_lambda;
};

EquivalenceResult jump_interp_equivalence(const SampledProcess& f, double p, double q,
                                          double rho, double theta,
                                          KMode mode = KMode::brute, KOptions opt = {});

// Forward chain of the equivalence at one lambda, using the stopping-time
// splitting at lambda / 4: lhs = ||lambda N_lambda^{1/rho}||_{L^{p,q}},
// rhs = 2^theta lambda^{1-theta} ||V^{theta rho}(f1)||^theta_{L^{theta p, theta q}}.
Check forward_chain_check(const SampledProcess& f, double lambda, const JumpCouple& c);

// ---------------------------------------------------------------------------
// Box couples

struct BoxCouple {
  std::size_t m = 1;
  double s = 2.0;      // exponent of the ell side
  double c_ell = 1.0;  // ell side norm: c_ell ||a||_s
  double c_box = 1.0;  // box side norm: c_box ||a||_inf
  void validate() const;
};

double ell_norm(const BoxCouple& c, std::span<const double> a);
double box_norm(const BoxCouple& c, std::span<const double> a);

// K(t, a; ell side, box side) = min_u c_ell ||(|a| - u/c_box)_+||_s + t u.
double box_k(const BoxCouple& c, std::span<const double> a, double t);

// K(t, f; L^rho(X; ell side), L^inf(X; box side)); f holds one m-tuple per atom.
double bochner_k(const BoxCouple& c, const std::vector<std::vector<double>>& f,
                 const AtomicMeasureSpace& space, double rho, double t);

struct PsiWeight {
  std::vector<double> psi;
  double rho = 1.0;
  double t = 0.0;
};

struct VectorKSup {
  double value = 0.0;
  PsiWeight psi;
  bool converged = true;
  int sweeps = 0;
};

struct VectorKOptions {
  int starts = 4;        // uniform start plus random starts
  int max_sweeps = 400;
  double tol = 1e-13;
  std::uint64_t seed = 1;
};

// sup over psi > 0 with ||psi||_{L^rho} = t of sum_x K(psi(x), f(x))^rho m(x),
// by pairwise budget-transfer ascent from the uniform psi plus random starts.
VectorKSup vector_k_sup(const BoxCouple& c, const std::vector<std::vector<double>>& f,
                        const AtomicMeasureSpace& space, double rho, double t,
                        VectorKOptions opt = {});

// One record: lhs = K(t)^rho, rhs = psi-sup, ratio = lhs / rhs.
Check vector_k_check(const BoxCouple& c, const std::vector<std::vector<double>>& f,
                     const AtomicMeasureSpace& space, double rho, double t,
                     VectorKOptions opt = {});

// [L^inf(X; box side), L^{theta p}(X; ell side)]_{theta,inf}(f).
double bochner_interp_norm(const BoxCouple& c, const std::vector<std::vector<double>>& f,
                           const AtomicMeasureSpace& space, double theta, double p);

// Partition bound: lhs = global norm, rhs = (sum_j norm on X_j ^p)^{1/p}.
Check partition_interp_bound(const BoxCouple& c, const std::vector<std::vector<double>>& f,
                             const AtomicMeasureSpace& space,
                             const std::vector<std::vector<std::size_t>>& partition,
                             double theta, double p);

}  // namespace jumpinterp
