// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Reference values come from exhaustive or closed-form computations in this
// file; the library is only used for the quantity under test.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "jumpinterp/core_seq.hpp"
#include "jumpinterp/interpolation.hpp"
#include "jumpinterp/markov.hpp"
#include "jumpinterp/martingale.hpp"
#include "jumpinterp/measure.hpp"
#include "jumpinterp/rng.hpp"
#include "jumpinterp/sampling.hpp"
#include "jumpinterp/suites.hpp"
#include "oracles.hpp"

using namespace jumpinterp;

namespace {

// Pinned tolerances
constexpr double kDistanceRelErr = 1e-15;       // C1: norm of B, a few ulp
constexpr double kVariationRelErr = 1e-12;      // C2
constexpr double kInequalitySlack = 1e-12;      // C3, C4, C6: relative floating-point slack
constexpr double kEquivGrowth = 0.25;           // C5: C_doubled <= (1 + g) C
constexpr double kMarkovNDoubling = 1e-2;       // C9: relative, horizon doubling (plus shrinking increments)
constexpr double kMarkovSizeDoubling = 1e-9;    // C9: relative, state-space doubling
constexpr double kIdentityTol = 1e-6;           // C11: R E f = f, sup norm relative to max |f|
constexpr double kRouteTol = 1e-7;              // C11: Fourier vs kernel route
constexpr double kTransferStability = 0.10;     // C12: |C_32 - C_16| <= tol * C_16
constexpr double kKVectorBound = 2.0;           // C13: K^rho / psi-sup <= C_rho
constexpr double kKVectorConsistency = 0.10;    // C13: halves agree within 10%
constexpr double kKVectorAgree = 1e-6;          // C13: library against closed forms

constexpr std::uint64_t kSeed = 7;

int failures = 0;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(int id, bool ok, const std::string& detail) {
  std::printf("C%-2d %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Independent distance and exhaustive search over subsequences

double dist(const TimeSeries& ts, std::size_t i, std::size_t j) {
  const double s = ts.norm().exponent();
  const auto a = ts.value(i), b = ts.value(j);
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = std::abs(a[k] - b[k]);
    acc = std::isinf(s) ? std::max(acc, d) : acc + std::pow(d, s);
  }
  return std::isinf(s) ? acc : std::pow(acc, 1.0 / s);
}

struct Subsequence {
  std::size_t jumps;
  double min_gap;
};

double worst_distance_error = 0.0;  // library norm against dist(), relative

// Every subsequence with its jump count and smallest consecutive gap. At an
// exact breakpoint the count depends on the last bit of each distance, so the
// search runs on the library's distance values; those are compared with
// dist() separately.
std::vector<Subsequence> all_subsequences(const TimeSeries& ts, std::vector<double>& d) {
  const std::size_t n = ts.size();
  d.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      d[i * n + j] = ts.distance(i, j);
      const double ref = dist(ts, i, j);
      if (ref > 0.0) worst_distance_error = std::max(worst_distance_error, std::abs(d[i * n + j] - ref) / ref);
    }
  }
  std::vector<Subsequence> out;
  out.reserve(1u << n);
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const auto pos = oracle::positions(mask, n);
    double g = kInf;
    for (std::size_t k = 0; k + 1 < pos.size(); ++k) g = std::min(g, d[pos[k] * n + pos[k + 1]]);
    out.push_back({pos.size() - 1, g});
  }
  return out;
}

std::size_t brute_count(const std::vector<Subsequence>& subs, double lambda) {
  std::size_t best = 0;
  for (const auto& s : subs)
    if (s.min_gap >= lambda) best = std::max(best, s.jumps);
  return best;
}

double brute_variation(const std::vector<double>& d, std::size_t n, double r) {
  double best = 0.0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const auto pos = oracle::positions(mask, n);
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < pos.size(); ++k) {
      const double g = d[pos[k] * n + pos[k + 1]];
      acc = std::isinf(r) ? std::max(acc, g) : acc + std::pow(g, r);
    }
    best = std::max(best, acc);
  }
  return std::isinf(r) ? best : std::pow(best, 1.0 / r);
}

// Ensemble of C1 and C2: 1000 scalar and 1000 three-dimensional series, n <= 12.
TimeSeries oracle_series(std::size_t i) {
  auto rng = instance_rng(kSeed, i, 101);
  const bool scalar = i < 1000;
  const std::size_t n = 1 + i % 12;
  const double norms[3] = {1.0, 2.0, kInf};
  return random_series(rng, n, scalar ? 1 : 3, scalar ? 2.0 : norms[i % 3]);
}

// ---------------------------------------------------------------------------
// C1, C2

void criterion_jump_oracle() {
  const auto t0 = Clock::now();
  std::size_t mismatches = 0, evaluations = 0, rule_below = 0, rule_above = 0;
  for (std::size_t i = 0; i < 2000; ++i) {
    const TimeSeries ts = oracle_series(i);
    std::vector<double> d;
    const auto subs = all_subsequences(ts, d);
    std::vector<double> gaps;
    for (double v : d)
      if (v > 0.0) gaps.push_back(v);
    std::sort(gaps.begin(), gaps.end());
    gaps.erase(std::unique(gaps.begin(), gaps.end()), gaps.end());
    std::vector<double> lambdas = gaps;
    for (std::size_t k = 0; k + 1 < gaps.size(); ++k) lambdas.push_back(0.5 * (gaps[k] + gaps[k + 1]));
    if (!gaps.empty()) lambdas.push_back(0.5 * gaps.front());
    const DistanceMatrix dm(ts);
    for (double lam : lambdas) {
      const std::size_t want = brute_count(subs, lam);
      ++evaluations;
      if (jump_count(ts, lam).count != want) ++mismatches;
      const std::size_t stops = stopping_positions(dm, lam).size();
      const std::size_t rule = stops == 0 ? 0 : stops - 1;
      if (rule < want) ++rule_below;
      if (rule > want) ++rule_above;
    }
  }
  const double secs = seconds_since(t0);
  report(1, mismatches == 0 && rule_above == 0 && worst_distance_error <= kDistanceRelErr && secs < 60.0,
         "N_lambda vs exhaustive: " + std::to_string(mismatches) + " mismatches in " +
             std::to_string(evaluations) + " evaluations, " + fmt(secs) + " s; norm of B within " +
             fmt(worst_distance_error) + " of the reference" +
             "; first-index stopping rule below the supremum in " + std::to_string(rule_below) +
             " evaluations (never above)");
}

void criterion_variation_oracle() {
  const auto t0 = Clock::now();
  const double rs[6] = {0.5, 1.0, 1.5, 2.0, 3.0, kInf};
  double worst = 0.0;
  for (std::size_t i = 0; i < 2000; ++i) {
    const TimeSeries ts = oracle_series(i);
    std::vector<double> d;
    all_subsequences(ts, d);
    for (double r : rs) {
      const double want = brute_variation(d, ts.size(), r);
      const double got = variation(ts, r).value;
      const double err = want == 0.0 ? std::abs(got) : std::abs(got - want) / want;
      worst = std::max(worst, err);
    }
  }
  const double secs = seconds_since(t0);
  report(2, worst <= kVariationRelErr && secs < 120.0,
         "V^r vs exhaustive: max relative error " + fmt(worst) + " (tol " + fmt(kVariationRelErr) +
             "), " + fmt(secs) + " s");
}

// ---------------------------------------------------------------------------
// C3, C4

void criterion_jump_variation() {
  std::size_t v3 = 0, v4 = 0, checks3 = 0, checks4 = 0;
  double worst3 = 0.0, worst4 = 0.0;
  const double rs[6] = {0.5, 1.0, 1.5, 2.0, 3.0, 4.5};
  for (std::size_t i = 0; i < 10000; ++i) {
    auto rng = instance_rng(kSeed, i, 102);
    const std::size_t n = 1 + i % 16;
    const std::size_t m = 1 + i % 3;
    const double s = (i % 5 == 0) ? kInf : 1.0 + static_cast<double>(i % 3);
    const TimeSeries ts = random_series(rng, n, m, s);
    const double r = rs[i % 6];
    const double V = variation(ts, r).value;
    const auto prof = jump_profile(ts);
    // lambda N_lambda^{1/r} is largest at the right end of each constant piece
    for (double lam : prof.breakpoints) {
      const double N = static_cast<double>(jump_count(ts, lam).count);
      const double lhs = std::pow(lam, r) * N;
      const double rhs = std::pow(V, r);
      ++checks3;
      if (rhs > 0.0) worst3 = std::max(worst3, lhs / rhs);
      if (lhs > rhs * (1.0 + kInequalitySlack)) ++v3;
    }
    if (r >= 1.0) {
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        double e = 0.0;
        const auto v = ts.value(j);
        for (double x : v) e = std::isinf(s) ? std::max(e, std::abs(x)) : e + std::pow(std::abs(x), s);
        e = std::isinf(s) ? e : std::pow(e, 1.0 / s);
        acc += std::pow(e, r);
      }
      const double rhs = 2.0 * std::pow(acc, 1.0 / r);
      ++checks4;
      if (rhs > 0.0) worst4 = std::max(worst4, V / rhs);
      if (V > rhs * (1.0 + kInequalitySlack)) ++v4;
    }
  }
  report(3, v3 == 0,
         "lambda N_lambda^{1/r} <= V^r: " + std::to_string(v3) + " violations in " +
             std::to_string(checks3) + " (lambda, instance) pairs over 10^4 instances, max ratio " +
             fmt(worst3));
  report(4, v4 == 0,
         "V^r <= 2 ||f||_{l^r}, r >= 1: " + std::to_string(v4) + " violations in " +
             std::to_string(checks4) + " instances, max ratio " + fmt(worst4));
}

// ---------------------------------------------------------------------------
// C5

Report equivalence_run(std::size_t size) {
  SuiteConfig cfg;
  cfg.suite = "interp-equivalence";
  cfg.seed = kSeed;
  cfg.trials = 200;
  cfg.size = size;
  cfg.tol = kEquivGrowth;
  return run_suite(cfg);
}

// Two doublings: <= 3 atoms / 6 indices -> 6 / 12 and 6 / 12 -> 12 / 24. The
// empirical maximum over a larger family can only approach the true constant
// from below, so C is required to saturate: every doubling grows C by at most
// kEquivGrowth and the second growth is no larger than the first.
void criterion_equivalence() {
  const auto t0 = Clock::now();
  const Report small = equivalence_run(3), large = equivalence_run(6);
  std::size_t bad = 0;
  for (const Report* r : {&small, &large})
    for (const auto& c : r->records)
      if (!c.holds) ++bad;
  std::string detail;
  double largest = 0.0;
  bool saturating = true;
  for (std::size_t k = 0; k < small.summary["sets"].size(); ++k) {
    const auto& a = small.summary["sets"][k];
    const auto& b = large.summary["sets"][k];
    const double g1 = a["C_doubled"].get<double>() / a["C"].get<double>() - 1.0;
    const double g2 = b["C_doubled"].get<double>() / b["C"].get<double>() - 1.0;
    largest = std::max({largest, g1, g2});
    if (g2 > g1) saturating = false;
    std::ostringstream os;
    os << "(" << a["p"].dump() << "," << a["q"].dump() << "," << a["rho"].dump() << ","
       << fmt(a["theta"].get<double>()) << "): C " << fmt(a["C"].get<double>()) << " -> "
       << fmt(a["C_doubled"].get<double>()) << " | " << fmt(b["C"].get<double>()) << " -> "
       << fmt(b["C_doubled"].get<double>()) << "; ";
    detail += os.str();
  }
  const double secs = seconds_since(t0);
  report(5, small.passed && large.passed && bad == 0 && saturating && secs < 600.0,
         detail + "largest growth per doubling " + fmt(100.0 * largest) + "% (tol " +
             fmt(100.0 * kEquivGrowth) + "%), second doubling smaller: " +
             (saturating ? "yes" : "no") + "; " + fmt(secs) + " s");
}

// ---------------------------------------------------------------------------
// C6, C7, C8

double norm_p(const std::vector<double>& g, const std::vector<double>& w, double p) {
  double acc = 0.0;
  for (std::size_t x = 0; x < g.size(); ++x) acc += std::pow(std::abs(g[x]), p) * w[x];
  return std::pow(acc, 1.0 / p);
}

// Certificates of the stopping-time splitting recomputed from its output.
std::size_t recheck_split(const FiniteMartingale& m, double lambda, double rho) {
  const LepingleSplit sp = lepingle_split(m, lambda, rho);
  std::size_t bad = 0;
  const std::size_t T = m.steps();
  for (std::size_t x = 0; x < m.atoms(); ++x) {
    const auto& f0 = sp.f0.series(x).flat_values();
    for (double v : f0)
      if (std::abs(v) > lambda * (1.0 + kInequalitySlack)) ++bad;
    const auto& f1 = sp.f1.series(x).flat_values();
    double v1 = 0.0;
    for (std::size_t t = 0; t + 1 < T; ++t) v1 += std::abs(f1[t + 1] - f1[t]);
    double s = 0.0;
    for (std::size_t k = 1; k < sp.stopped.levels; ++k)
      s += std::pow(std::abs(sp.stopped.frozen[k][x] - sp.stopped.frozen[k - 1][x]), rho);
    const double rhs = std::pow(lambda, 1.0 - rho) * s;
    if (v1 > rhs * (1.0 + kInequalitySlack) + 1e-12 * lambda) ++bad;
  }
  return bad;
}

void criterion_martingales() {
  const auto t0 = Clock::now();
  const double rho = 2.0;
  const StepLaw laws[3] = {StepLaw::sign, StepLaw::gaussian, StepLaw::mixed};
  std::size_t cert_bad = 0, recheck_bad = 0, rechecked = 0, lep_bad = 0, doob_bad = 0;
  double worst_lep = 0.0, worst_adv = 0.0, worst_doob[2] = {0.0, 0.0};
  auto one = [&](const FiniteMartingale& m, bool adv) {
    for (const auto& c : lepingle_certificates(m, rho))
      if (!c.holds) ++cert_bad;
    const auto& w = m.space().weights();
    double sup2 = 0.0;
    std::vector<double> fstar(m.atoms(), 0.0);
    for (std::size_t t = 0; t < m.steps(); ++t) {
      const auto ft = m.at(t);
      sup2 = std::max(sup2, norm_p(ft, w, 2.0));
      for (std::size_t x = 0; x < m.atoms(); ++x) fstar[x] = std::max(fstar[x], std::abs(ft[x]));
    }
    const double J = jump_seminorm(m.process(), 2.0, 2.0, rho).value;
    const double ratio = sup2 > 0.0 ? J / sup2 : 0.0;
    (adv ? worst_adv : worst_lep) = std::max(adv ? worst_adv : worst_lep, ratio);
    if (J > 3.0 * sup2 * (1.0 + kInequalitySlack)) ++lep_bad;
    const double ps[2] = {2.0, 4.0};
    for (int k = 0; k < 2; ++k) {
      const double p = ps[k];
      double sup = 0.0;
      for (std::size_t t = 0; t < m.steps(); ++t) sup = std::max(sup, norm_p(m.at(t), w, p));
      const double lhs = norm_p(fstar, w, p), rhs = p / (p - 1.0) * sup;
      if (rhs > 0.0) worst_doob[k] = std::max(worst_doob[k], lhs / rhs);
      if (lhs > rhs * (1.0 + kInequalitySlack)) ++doob_bad;
    }
    if (m.atoms() <= 32) {
      std::vector<double> lambdas;
      for (std::size_t x = 0; x < m.atoms(); ++x)
        for (double b : jump_breakpoints(m.process().series(x))) lambdas.push_back(b);
      std::sort(lambdas.begin(), lambdas.end());
      lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());
      for (double lam : lambdas) {
        recheck_bad += recheck_split(m, lam, rho);
        ++rechecked;
      }
    }
  };
  for (std::size_t i = 0; i < 500; ++i) {
    auto rng = instance_rng(kSeed, i, 103);
    one(dyadic_random_walk(1 + i % 12, BNorm(1, 2.0), rng, laws[i % 3]), false);
  }
  for (std::size_t a = 0; a < 8; ++a) {
    auto rng = instance_rng(kSeed, 500 + a, 103);
    auto objective = [&](const FiniteMartingale& m) {
      const double s = sup_lp(m, 2.0);
      return s > 0.0 ? jump_seminorm(m.process(), 2.0, 2.0, rho).value / s : 0.0;
    };
    one(adversarial_martingale(3 + a % 4, BNorm(1, 2.0), rng, objective, 150), true);
  }
  const double secs = seconds_since(t0);
  report(6, cert_bad == 0 && recheck_bad == 0,
         "splitting certificates over 508 martingales: " + std::to_string(cert_bad) +
             " violations; recomputed at " + std::to_string(rechecked) +
             " (martingale, lambda) pairs on <= 32 atoms: " + std::to_string(recheck_bad) +
             " violations");
  report(7, lep_bad == 0 && secs < 300.0,
         "J <= 3 sup ||f_t||_2: " + std::to_string(lep_bad) + " violations, max J/sup " +
             fmt(worst_lep) + " (random), " + fmt(worst_adv) + " (hill-climbed), " + fmt(secs) +
             " s");
  report(8, doob_bad == 0,
         "||f_*||_p <= p' sup ||f_t||_p: " + std::to_string(doob_bad) +
             " violations, max ratio " + fmt(worst_doob[0]) + " (p=2), " + fmt(worst_doob[1]) +
             " (p=4)");
}

// ---------------------------------------------------------------------------
// C9

void criterion_markov() {
  const std::size_t sizes[3] = {4, 8, 16};
  const std::size_t horizons[3] = {16, 32, 64};
  double best[3][3] = {};  // [size][horizon]
  bool finite = true;
  for (std::size_t si = 0; si < 3; ++si) {
    const std::size_t n = sizes[si];
    for (std::size_t i = 0; i < 500; ++i) {
      auto rng = instance_rng(kSeed, si * 1000 + i, 104);
      const DsMethod method = (i % 2) ? DsMethod::sinkhorn : DsMethod::birkhoff;
      const auto Q = random_doubly_stochastic(n, method, rng);
      std::normal_distribution<double> g;
      std::vector<std::vector<double>> f(n, std::vector<double>(1));
      for (auto& v : f) v[0] = g(rng);
      double nf = 0.0;
      for (std::size_t x = 0; x < n; ++x) nf += f[x][0] * f[x][0] * Q.weights()[x];
      nf = std::sqrt(nf);
      const MarkovReport rep = verify_markov_jump(Q, f, BNorm(1, 2.0), 2.0, 2.0, 64);
      for (const auto& h : rep.by_horizon) {
        for (std::size_t hi = 0; hi < 3; ++hi) {
          if (h.N != horizons[hi]) continue;
          const double r = h.J / nf;
          if (!std::isfinite(r)) finite = false;
          best[si][hi] = std::max(best[si][hi], r);
        }
      }
    }
  }
  // For one (Q, f) the jump norm cannot decrease in N (the index set grows), so
  // the maximum is required to saturate: each doubling adds at most
  // kMarkovNDoubling and the second increment is no larger than the first.
  bool n_ok = true, size_ok = true;
  double largest_increase = 0.0;
  for (std::size_t si = 0; si < 3; ++si) {
    const double inc1 = best[si][1] / best[si][0] - 1.0, inc2 = best[si][2] / best[si][1] - 1.0;
    largest_increase = std::max({largest_increase, inc1, inc2});
    if (inc1 > kMarkovNDoubling || inc2 > kMarkovNDoubling || inc2 > inc1 + 1e-12) n_ok = false;
  }
  for (std::size_t si = 0; si + 1 < 3; ++si)
    if (best[si + 1][2] > best[si][2] * (1.0 + kMarkovSizeDoubling)) size_ok = false;
  std::string table;
  for (std::size_t si = 0; si < 3; ++si) {
    table += "n=" + std::to_string(sizes[si]) + ":";
    for (std::size_t hi = 0; hi < 3; ++hi) table += " " + fmt(best[si][hi]);
    table += "; ";
  }
  report(9, finite && n_ok && size_ok,
         "max J/||f||_2 at N=16,32,64 by n, 500 pairs each: " + table +
             "N-doubling: largest relative increase " + fmt(largest_increase) + " (tol " +
             fmt(kMarkovNDoubling) + ", increments shrinking: " + (n_ok ? "yes" : "no") +
             "); n-doubling: " + (size_ok ? "no increase" : "INCREASE"));
}

// ---------------------------------------------------------------------------
// C10

double weak(const std::vector<double>& g, const std::vector<double>& w, double p) {
  return oracle::weak_norm(g, w, p);
}

void criterion_convexity() {
  std::size_t log_bad = 0, p_bad = 0, lib_disagree = 0;
  double worst_log = 0.0, worst_p[3] = {0.0, 0.0, 0.0};
  const double ps[3] = {0.25, 0.5, 0.75};
  for (std::size_t i = 0; i < 1000; ++i) {
    auto rng = instance_rng(kSeed, i, 105);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> gauss;
    const std::size_t atoms = 1 + i % 8, J = 1 + i % 6;
    std::vector<double> w(atoms);
    for (auto& v : w) v = std::exp(2.0 * u(rng) - 1.0);
    const auto space = AtomicMeasureSpace::with_weights(w);
    std::vector<std::vector<double>> g(J, std::vector<double>(atoms));
    for (auto& gj : g)
      for (auto& v : gj) v = (u(rng) < 0.3) ? 0.0 : std::abs(gauss(rng));
    std::vector<double> sum(atoms, 0.0);
    for (const auto& gj : g)
      for (std::size_t x = 0; x < atoms; ++x) sum[x] += gj[x];
    // log-convexity with a_j >= ||g_j||_{L^{1,inf}}
    std::vector<double> a(J);
    double A = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      a[j] = weak(g[j], w, 1.0) * (1.0 + 1e-12);  // any upper bound is admissible
      if (a[j] == 0.0) a[j] = 1e-3;
      if (j % 2 == 0) a[j] *= 1.0 + 3.0 * u(rng);
      A += a[j];
    }
    double rhs = 0.0;
    for (double aj : a) rhs += 2.0 * aj * (std::log(A / aj) + 2.0);
    const double lhs = weak(sum, w, 1.0);
    worst_log = std::max(worst_log, lhs / rhs);
    if (lhs > rhs) ++log_bad;
    const Check lib = check_l1inf_logconvex(g, a, space);
    if (!lib.holds || std::abs(lib.lhs - lhs) > 1e-12 * (1.0 + lhs) ||
        std::abs(lib.rhs - rhs) > 1e-12 * (1.0 + rhs))
      ++lib_disagree;
    // p-convexity
    for (int k = 0; k < 3; ++k) {
      const double p = ps[k], Cp = 1.0 + 2.0 / (1.0 - p);
      double s = 0.0;
      for (const auto& gj : g) s += std::pow(weak(gj, w, p), p);
      const double l = std::pow(weak(sum, w, p), p);
      if (s > 0.0) worst_p[k] = std::max(worst_p[k], l / s);
      if (l > Cp * s) ++p_bad;
      const Check pc = check_lpinf_pconvex(g, p, space);
      if (!pc.holds || std::abs(pc.lhs - l) > 1e-12 * (1.0 + l)) ++lib_disagree;
    }
  }
  report(10, log_bad == 0 && p_bad == 0 && lib_disagree == 0,
         "10^3 instances: log-convexity " + std::to_string(log_bad) + " violations (max lhs/rhs " +
             fmt(worst_log) + "); p-convexity " + std::to_string(p_bad) +
             " violations (max lhs/sum " + fmt(worst_p[0]) + ", " + fmt(worst_p[1]) + ", " +
             fmt(worst_p[2]) + " against C_p 3.67, 5, 9); library disagreements " +
             std::to_string(lib_disagree));
}

// ---------------------------------------------------------------------------
// C11

void criterion_sampling() {
  const auto t0 = Clock::now();
  const PhiTable phi;
  const auto family = MultiplierFamily::dilated_cutoff();
  const KernelTable K(kernel_symbol(family), 1.0, 1e-9);
  std::vector<PeriodicSymbol> symbols;
  for (int q : {1, 2, 3}) symbols.push_back(periodize_multiplier(family, q));
  double worst_id = 0.0, worst_route = 0.0;
  std::size_t route_bad = 0;
  for (std::size_t i = 0; i < 100; ++i) {
    const std::size_t support = 1 + i % 32;
    const ZSequence f = random_test_sequence(support, kSeed, i);
    const GridFunction F = extend(f, phi.spec(), phi.spec().radius + 4.0);
    const ZSequence back = restrict(F, phi, f.first, f.last());
    double top = 0.0, err = 0.0;
    for (long n = f.first; n <= f.last(); ++n) {
      for (std::size_t c = 0; c < f.m; ++c) {
        top = std::max(top, std::abs(f.at(n, c)));
        err = std::max(err, std::abs(back.at(n, c) - f.at(n, c)));
      }
    }
    if (top > 0.0) worst_id = std::max(worst_id, err / top);
    for (const auto& m : symbols) {
      for (const auto& c : fourier_kernel_checks(K, m, f, kRouteTol)) {
        worst_route = std::max(worst_route, c.lhs);
        if (!c.holds) ++route_bad;
      }
    }
  }
  const double secs = seconds_since(t0);
  report(11, worst_id <= kIdentityTol && route_bad == 0 && secs < 300.0,
         "R E f = f on 100 sequences: max relative error " + fmt(worst_id) + " (tol " +
             fmt(kIdentityTol) + "); Fourier vs kernel route for q = 1, 2, 3: " +
             std::to_string(route_bad) + " violations, max error " + fmt(worst_route) + " (tol " +
             fmt(kRouteTol) + "); " + fmt(secs) + " s");
}

// ---------------------------------------------------------------------------
// C12

struct TransferRun {
  double C = 0.0;
  bool holds = true;
  std::vector<double> per_q;
};

TransferRun transfer(std::size_t ensemble) {
  TransferOptions opt;
  opt.ensemble = ensemble;
  opt.seed = kSeed;
  const TransferReport rep = verify_jump_transfer(MultiplierFamily::dilated_cutoff(1.0 / 6.0, 6), opt);
  TransferRun out;
  for (const auto& c : rep.checks)
    if (!c.holds) out.holds = false;
  for (const auto& row : rep.summary["per_q"]) {
    out.per_q.push_back(row["ratio"].get<double>());
    out.C = std::max(out.C, row["ratio"].get<double>());
  }
  return out;
}

void criterion_transfer() {
  const auto t0 = Clock::now();
  const TransferRun a = transfer(16), b = transfer(32);
  const double drift = a.C > 0.0 ? std::abs(b.C - a.C) / a.C : kInf;
  std::string per;
  for (std::size_t k = 0; k < b.per_q.size(); ++k) per += " " + fmt(b.per_q[k]);
  report(12, a.holds && b.holds && std::isfinite(a.C) && a.C > 0.0 && drift <= kTransferStability,
         "discrete/continuous over q = 1, 2, 3 (ensemble 32):" + per + "; C = " + fmt(a.C) +
             " (ensemble 16), " + fmt(b.C) + " (ensemble 32), drift " + fmt(100.0 * drift) +
             "% (tol " + fmt(100.0 * kTransferStability) + "%); " + fmt(seconds_since(t0)) + " s");
}

// ---------------------------------------------------------------------------
// C13

// K(t, f; L^rho(c_ell |.|), L^inf(c_box |.|)) for scalar f: the optimal
// L^inf part truncates |f| at a level tau, so K = min_tau phi(tau), a convex
// function minimised on a grid and refined by golden section.
double brute_k(const std::vector<double>& f, const std::vector<double>& w, double c_ell,
               double c_box, double rho, double t) {
  double top = 0.0;
  for (double v : f) top = std::max(top, std::abs(v));
  auto phi = [&](double tau) {
    double acc = 0.0;
    for (std::size_t x = 0; x < f.size(); ++x)
      acc += std::pow(std::max(std::abs(f[x]) - tau, 0.0), rho) * w[x];
    return c_ell * std::pow(acc, 1.0 / rho) + t * c_box * tau;
  };
  constexpr int kGrid = 4000;
  int arg = 0;
  double best = kInf;
  for (int k = 0; k <= kGrid; ++k) {
    const double v = phi(top * k / kGrid);
    if (v < best) {
      best = v;
      arg = k;
    }
  }
  double a = top * std::max(arg - 1, 0) / kGrid, b = top * std::min(arg + 1, kGrid) / kGrid;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 200; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (phi(c) < phi(d)) b = d; else a = c;
  }
  return std::min(best, phi(0.5 * (a + b)));
}

// sup over psi with ||psi||_{L^rho} = t of sum_x min(c_ell, c_box psi(x))^rho |f(x)|^rho m(x):
// linear in v(x) = psi(x)^rho m(x) up to v(x) = (c_ell / c_box)^rho m(x), so the
// budget t^rho is poured into the atoms in decreasing order of |f(x)|.
double water_fill(const std::vector<double>& f, const std::vector<double>& w, double c_ell,
                  double c_box, double rho, double t) {
  std::vector<std::size_t> order(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) order[x] = x;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(f[a]) > std::abs(f[b]); });
  double budget = std::pow(t, rho), out = 0.0;
  for (std::size_t x : order) {
    const double cap = std::pow(c_ell / c_box, rho) * w[x];
    const double v = std::min(budget, cap);
    out += std::pow(c_box, rho) * std::pow(std::abs(f[x]), rho) * v;
    budget -= v;
  }
  return out;
}

void criterion_kvector() {
  const double rho = 2.0;
  const double ts[5] = {0.1, 0.5, 1.0, 2.0, 10.0};
  double C_half[2] = {0.0, 0.0}, C_min = kInf, lib_err = 0.0;
  for (std::size_t i = 0; i < 100; ++i) {
    auto rng = instance_rng(kSeed, i, 106);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::normal_distribution<double> gauss;
    const std::size_t n = 1 + i % 4;
    std::vector<double> w(n), f(n);
    for (auto& v : w) v = std::exp(3.0 * u(rng) - 1.5);
    for (auto& v : f) v = gauss(rng) * std::exp(2.0 * u(rng) - 1.0);
    const double c_ell = std::exp(2.0 * u(rng) - 1.0), c_box = std::exp(2.0 * u(rng) - 1.0);
    const auto space = AtomicMeasureSpace::with_weights(w);
    const BoxCouple c{1, 2.0, c_ell, c_box};
    std::vector<std::vector<double>> fv;
    for (double v : f) fv.push_back({v});
    for (double t : ts) {
      const double K = brute_k(f, w, c_ell, c_box, rho, t);
      const double S = water_fill(f, w, c_ell, c_box, rho, t);
      if (S <= 0.0) continue;
      const double ratio = std::pow(K, rho) / S;
      C_half[i < 50 ? 0 : 1] = std::max(C_half[i < 50 ? 0 : 1], ratio);
      C_min = std::min(C_min, ratio);
      lib_err = std::max(lib_err, std::abs(bochner_k(c, fv, space, rho, t) - K) / K);
      lib_err = std::max(lib_err, std::abs(vector_k_sup(c, fv, space, rho, t).value - S) / S);
    }
  }
  const double C = std::max(C_half[0], C_half[1]);
  const double spread = std::abs(C_half[0] - C_half[1]) / C;
  report(13, C <= kKVectorBound && C_min >= 1.0 - 1e-9 && spread <= kKVectorConsistency &&
                 lib_err <= kKVectorAgree,
         "K(t)^rho / psi-sup over 100 instances (<= 4 atoms, rho = 2): in [" + fmt(C_min) + ", " +
             fmt(C) + "], C_rho pinned at " + fmt(kKVectorBound) + "; halves " + fmt(C_half[0]) +
             " / " + fmt(C_half[1]) + " (spread " + fmt(100.0 * spread) + "%, tol " +
             fmt(100.0 * kKVectorConsistency) + "%); library vs closed forms " + fmt(lib_err));
}

}  // namespace

int main(int argc, char** argv) {
  // optional: run a subset, e.g. `acceptance 1 2 13`
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  auto want = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };
  const std::vector<std::pair<std::vector<int>, std::function<void()>>> steps{
      {{1}, criterion_jump_oracle},  {{2}, criterion_variation_oracle},
      {{3, 4}, criterion_jump_variation}, {{5}, criterion_equivalence},
      {{6, 7, 8}, criterion_martingales}, {{9}, criterion_markov},
      {{10}, criterion_convexity},   {{11}, criterion_sampling},
      {{12}, criterion_transfer},    {{13}, criterion_kvector}};
  int run = 0;
  for (const auto& [ids, fn] : steps) {
    if (std::none_of(ids.begin(), ids.end(), want)) continue;
    try {
      fn();
    } catch (const std::exception& e) {
      for (int id : ids) report(id, false, std::string("exception: ") + e.what());
    }
    run += static_cast<int>(ids.size());
  }
  std::printf("acceptance: %d of %d criteria passed\n", run - failures, run);
  return failures == 0 ? 0 : 1;
}
