#pragma once

// Band-limited sampling on Z (d = 1): the extension operator E (sinc^2
// interpolation), the restriction operator R (convolution with a Schwartz
// function Phi whose transform is a smooth cutoff), periodised multipliers,
// the discrete operators T_dis^q and the transference checks for jump norms.
//
// Multipliers are real and even, so every kernel is real. Fourier transforms
// use the convention F(g)(xi) = int g(x) e^{-2 pi i x xi} dx.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "jumpinterp/measure.hpp"
#include "jumpinterp/report.hpp"

namespace jumpinterp {

// ---------------------------------------------------------------------------
// Profiles

// prod_i (sin(pi x_i) / (pi x_i))^2
double psi(std::span<const double> x);
double psi1(double x);
// Fourier transform of psi1: (1 - |xi|)_+
double psi_hat1(double xi);
// exp(-1/x) / (exp(-1/x) + exp(-1/(1-x))) on (0,1), 0 left of 0, 1 right of 1
double smooth_step(double x);
// 1 on |xi| <= 1, 0 on |xi| >= 2, C^infinity in between; tensor product in d > 1
double phi_hat1(double xi);
double phi_hat(std::span<const double> xi);

struct KernelSpec {
  double radius = 40.0;       // Phi is truncated to |x| <= radius
  double tolerance = 1e-9;    // certified bound on Phi quadrature and tail
  std::size_t phi_nodes = 4096;
  double grid_h = 0.25;       // sample spacing of grid functions
  void validate() const;
  json to_json() const;
};

// Phi sampled at multiples of grid_h on |x| <= radius. Phi(x) = 2 int_0^2
// phi_hat1(xi) cos(2 pi x xi) d xi by the trapezoid rule, certified by
// comparing phi_nodes against phi_nodes / 2 nodes. Throws ConvergenceError
// naming the required node count when the difference exceeds the tolerance.
class PhiTable {
 public:
  explicit PhiTable(KernelSpec spec = {});
  // Phi(k * grid_h); 0 beyond the radius
  double at_grid(long k) const;
  // Phi(x) by the same quadrature (any x)
  double operator()(double x) const;
  double quadrature_error() const noexcept { return quad_err_; }
  long half_width() const noexcept { return half_; }
  const KernelSpec& spec() const noexcept { return spec_; }

 private:
  KernelSpec spec_;
  long half_ = 0;
  std::vector<double> table_;
  double quad_err_ = 0.0;
};

// ---------------------------------------------------------------------------
// Sequences and grid functions

// Finitely supported sequence on Z with values in R^m (m entries per site).
struct ZSequence {
  long first = 0;
  std::size_t m = 1;
  std::vector<double> values;

  static ZSequence scalar(long first, std::vector<double> v);
  std::size_t size() const { return values.size() / m; }
  long last() const { return first + static_cast<long>(size()) - 1; }
  double at(long n, std::size_t i = 0) const;
  // Per-site l^2 norm of the m-tuple, then l^p over sites.
  double lp(double p) const;
};

// Samples F((first + k) h), m entries each. `band` bounds the Fourier
// support: supp F^ in [-band, band].
struct GridFunction {
  double h = 0.25;
  long first = 0;
  std::size_t m = 1;
  double band = 1.0;
  std::vector<double> values;

  std::size_t size() const { return values.size() / m; }
  double x(std::size_t k) const { return static_cast<double>(first + static_cast<long>(k)) * h; }
  double at(long k, std::size_t i = 0) const;  // by grid index, 0 outside
  // Riemann sum of |F|^p (per-sample l^2 norm), p in (0, inf]
  double lp(double p) const;
};

// E f sampled on the grid over [first - window, last + window].
GridFunction extend(const ZSequence& f, const KernelSpec& spec, double window);
// R F at the integers n_first..n_last: h sum_k F(kh) Phi(n - kh). Exact up to
// the Phi truncation when band + 2 < 1/h (the integrand is then band-limited
// below the Nyquist rate of the grid).
ZSequence restrict(const GridFunction& F, const PhiTable& phi, long n_first, long n_last);

// ||E g||_{L^2}^2 = sum_{n,k} g(n) g(k) G(n - k) with G(0) = 2/3 and
// G(j) = 1/(pi^2 j^2): the exact Gram matrix of integer translates of psi1.
double extension_l2_norm(const ZSequence& g);

// R E f = f within 1e-6 (sup norm relative to max |f|), plus recorded
// l^p -> L^p bounds for E and L^p -> l^p bounds for R, p in {1, 2, 4, inf}.
std::vector<Check> sampling_identity_checks(const ZSequence& f, const PhiTable& phi,
                                            double identity_tol = 1e-6);

// ---------------------------------------------------------------------------
// Multipliers

// A finite family (m_t)_{t=0..members-1} of real even symbols on R.
//  dilated_cutoff: m_t(xi) = eta(2^t xi), eta = 1 on |xi| <= b/2, 0 on
//                  |xi| >= b, smooth_step transition in between;
//  table:          values at nodes 0 = xi_0 < ... < xi_k per member, linear
//                  in between, mirrored to xi < 0, 0 beyond xi_k.
class MultiplierFamily {
 public:
  static MultiplierFamily dilated_cutoff(double b = 1.0 / 6.0, std::size_t members = 6);
  static MultiplierFamily table(std::vector<double> nodes,
                                std::vector<std::vector<double>> values);
  static MultiplierFamily from_json(const json& j);
  json to_json() const;

  const std::string& kind() const noexcept { return kind_; }
  std::size_t members() const noexcept { return members_; }
  // half-width of the joint support
  double support() const noexcept { return support_; }
  double member_support(std::size_t t) const;
  double value(std::size_t t, double xi) const;
  // points in [0, member_support] where value(t, .) loses smoothness
  std::vector<double> breakpoints(std::size_t t) const;
  // m_t(xi / s) as a new family (s > 0)
  MultiplierFamily dilated(double s) const;

 private:
  std::string kind_;
  std::size_t members_ = 0;
  double support_ = 0.0;
  double b_ = 0.0;       // dilated_cutoff
  double scale_ = 1.0;   // evaluation at xi / scale_
  std::vector<double> nodes_;
  std::vector<std::vector<double>> values_;
};

// m_per^q(xi) = sum_l m(xi - l/q). The translates are disjoint when the
// support lies in [-1/(2q), 1/(2q)], so evaluation reduces xi by the nearest
// lattice point. Construction fails (InputError) on a support violation.
class PeriodicSymbol {
 public:
  PeriodicSymbol(MultiplierFamily family, int q);
  double operator()(std::size_t t, double xi) const;
  // Direct sum over |l| <= L (for cross-checking the reduction)
  double truncated_sum(std::size_t t, double xi, int L) const;
  int q() const noexcept { return q_; }
  const MultiplierFamily& family() const noexcept { return family_; }

 private:
  MultiplierFamily family_;
  int q_ = 1;
};

PeriodicSymbol periodize_multiplier(const MultiplierFamily& family, int q);

// A real even symbol family for kernel tabulation: value(t, xi) for xi >= 0,
// supported in [0, breaks[t].back()], smooth between consecutive breaks.
struct KernelSymbol {
  std::size_t members = 0;
  std::function<double(std::size_t, double)> value;
  std::vector<std::vector<double>> breaks;
};

// m_t
KernelSymbol kernel_symbol(const MultiplierFamily& family);
// m_t(xi) psi_hat1(xi)
KernelSymbol fejer_symbol(const MultiplierFamily& family);
// m~(xi/q) psi_hat1(xi) with m~(xi/q) = sum_{|l| <= 1} m_t((xi + l)/q)
KernelSymbol tilde_symbol(const MultiplierFamily& family, int q);

// F^{-1} of a KernelSymbol tabulated at multiples of `spacing` by
// Gauss-Legendre panels aligned with the breaks. The table extends until every
// member difference |K_t - K_0| (|K_0| for a single member) stays below
// tol * max |K| over the last quarter, and at least to `min_radius`.
class KernelTable {
 public:
  KernelTable(const KernelSymbol& symbol, double spacing, double tol = 1e-9,
              double min_radius = 0.0, double max_radius = 2e4);
  double operator()(std::size_t t, long k) const;  // K_t(k * spacing), 0 outside
  long half_width() const noexcept { return half_; }
  double spacing() const noexcept { return spacing_; }
  std::size_t members() const noexcept { return rows_.size(); }
  double max_abs() const noexcept { return max_; }
  double quadrature_error() const noexcept { return quad_err_; }
  bool capped() const noexcept { return capped_; }

 private:
  double spacing_ = 1.0;
  long half_ = 0;
  double max_ = 0.0;
  double quad_err_ = 0.0;
  bool capped_ = false;
  std::vector<std::vector<double>> rows_;  // rows_[t][k], k = 0..half_ (even in k)
};

// T_dis^q f(n) = sum_{y in qZ} f(n - y) q K_t(y) at every n within the kernel
// radius of the support of f; K is a KernelTable of kernel_symbol on the
// integers. Atoms are the integers (weight 1), the index set is the family.
SampledProcess apply_discrete(const KernelTable& K, const ZSequence& f, int q);
// Same values by the Fourier route: int_{-1/2}^{1/2} m_per^q(xi) f^(xi)
// e^{2 pi i n xi} d xi with Gauss-Legendre panels, at n = n_first..n_last.
std::vector<std::vector<double>> apply_discrete_fourier(const PeriodicSymbol& m,
                                                        const ZSequence& f, long n_first,
                                                        long n_last);

// T_dis f(q x + r) by the Fourier route against sum_y g(x - y) q K_t(q y) with
// g(x) = f(q x + r), for x within 16 of the support and each r in 0..q-1. K is
// a KernelTable of kernel_symbol(m.family()) on the integers. One check per r,
// error relative to ||f||_1 q max|K|.
std::vector<Check> fourier_kernel_checks(const KernelTable& K, const PeriodicSymbol& m,
                                         const ZSequence& f, double tol);

// sum_k g(k) L_t(x - k) on the grid x in h Z (h = L.spacing(), 1/h an
// integer). With L built from fejer_symbol this is T E g; atoms are the grid
// points, each of weight h.
SampledProcess apply_continuous(const KernelTable& L, const ZSequence& g);

// ---------------------------------------------------------------------------
// Transference verification

struct TransferOptions {
  double p = 2.0;
  double rho = 2.0;
  std::vector<int> qs{1, 2, 3};
  std::vector<double> dilations{1.0, 2.0, 3.0};  // continuous test inputs E g(x/s)
  std::size_t ensemble = 16;
  std::size_t support = 32;
  int climb_iterations = 12;
  double continuous_h = 0.25;
  double kernel_tol = 1e-9;
  double identity_tol = 1e-7;  // route agreements, relative to ||g||_1 q max|K|
  std::size_t chain_instances = 2;  // ensemble members run through the chain identities
  std::uint64_t seed = 1;
  KernelSpec spec{};
  json to_json() const;
};

struct TransferReport {
  std::vector<Check> checks;
  json summary = json::object();
  std::vector<std::string> notes;
};

// Lower estimates of ||T_dis^q||_{l^p -> J^p_rho} and ||T||_{L^p -> J^p_rho}
// by ensemble maximisation plus hill-climbing, their ratios, and the checks of
// the transference chain:
//   transfer:class_split             J(T f)^p <= sum_r J(T f on n = r mod q)^p
//   transfer:fourier_vs_kernel       T_dis f(qx + r) by both routes
//   transfer:restriction_conjugation [T^q]_dis g = R(T~^q E g)
//   transfer:modulated_bound         J(T~^q E g) against 3 ||T|| ||E g||_p,
//                                    recorded only (||T|| is a lower estimate)
TransferReport verify_jump_transfer(const MultiplierFamily& family, const TransferOptions& opt);

// Random test sequences: Gaussian, sparse spikes, modulated envelopes.
ZSequence random_test_sequence(std::size_t support, std::uint64_t seed, std::size_t index,
                               int modulation_q = 1);

}  // namespace jumpinterp
