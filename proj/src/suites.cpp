#include "jumpinterp/suites.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <utility>

#include "jumpinterp/error.hpp"
#include "jumpinterp/interpolation.hpp"
#include "jumpinterp/markov.hpp"
#include "jumpinterp/martingale.hpp"
#include "jumpinterp/rng.hpp"
#include "jumpinterp/sampling.hpp"

namespace jumpinterp {

namespace {

json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

std::optional<double> optional_number(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  const json& v = j[key];
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf") return kInf;
    throw ParseError(std::string("suite config: field '") + key + "' is not a number");
  }
  if (!v.is_number()) throw ParseError(std::string("suite config: field '") + key + "' is not a number");
  return v.get<double>();
}

std::optional<std::size_t> optional_count(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_number_unsigned())
    throw ParseError(std::string("suite config: field '") + key + "' must be a nonnegative integer");
  return j[key].get<std::size_t>();
}

std::size_t uniform_size(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

struct Context {
  const SuiteConfig& cfg;
  Report& rep;
  bool selected(std::size_t instance) const { return !cfg.instance || *cfg.instance == instance; }
  void add(Check c, std::size_t instance) {
    c.witness["instance"] = instance;
    if (!c.holds) rep.passed = false;
    rep.records.push_back(std::move(c));
  }
  // Checks on ensemble aggregates; skipped when replaying one instance.
  void add_aggregate(Check c) {
    if (cfg.instance) return;
    if (!c.holds) rep.passed = false;
    rep.records.push_back(std::move(c));
  }
};

std::size_t trials_or(const SuiteConfig& cfg, std::size_t d) {
  const std::size_t n = cfg.trials.value_or(d);
  if (n == 0) throw InputError("empty ensemble: trials must be positive");
  return n;
}

std::size_t size_or(const SuiteConfig& cfg, std::size_t d, std::size_t lo, std::size_t hi) {
  const std::size_t n = cfg.size.value_or(d);
  if (n < lo || n > hi)
    throw DomainError("size must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return n;
}

json series_json(const TimeSeries& ts) {
  return {{"values", ts.flat_values()},
          {"m", ts.dimension()},
          {"s", number(ts.norm().exponent())}};
}

json process_json(const SampledProcess& f) {
  json rows = json::array();
  for (const auto& ts : f.all_series()) rows.push_back(ts.flat_values());
  return {{"weights", f.space().weights()}, {"values", rows}, {"m", f.dimension()}};
}

const double kNorms[3] = {1.0, 2.0, kInf};

// ---------------------------------------------------------------------------
// Exhaustive search over subsequences

// best[k] = largest minimum consecutive gap over k-element subsequences
// (+inf for k = 1).
std::vector<double> brute_gaps(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  std::vector<double> best(n + 1, -1.0);
  if (n == 0) return best;
  best[1] = kInf;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    const int k = std::popcount(mask);
    if (k < 2) continue;
    double gap = kInf;
    int prev = -1;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask >> i & 1u)) continue;
      if (prev >= 0) gap = std::min(gap, d(static_cast<std::size_t>(prev), i));
      prev = static_cast<int>(i);
    }
    best[static_cast<std::size_t>(k)] = std::max(best[static_cast<std::size_t>(k)], gap);
  }
  return best;
}

std::size_t brute_count(const std::vector<double>& best, double lambda) {
  std::size_t out = 0;
  for (std::size_t k = 1; k < best.size(); ++k)
    if (best[k] >= lambda) out = std::max(out, k - 1);
  return out;
}

// sup over subsequences of sum d^r (r finite) or max d (r = inf)
double brute_variation(const DistanceMatrix& d, double r) {
  const std::size_t n = d.size();
  double best = 0.0;
  for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
    double acc = 0.0;
    int prev = -1;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask >> i & 1u)) continue;
      if (prev >= 0) {
        const double v = d(static_cast<std::size_t>(prev), i);
        acc = std::isinf(r) ? std::max(acc, v) : acc + std::pow(v, r);
      }
      prev = static_cast<int>(i);
    }
    best = std::max(best, acc);
  }
  return std::isinf(r) ? best : std::pow(best, 1.0 / r);
}

std::vector<double> test_lambdas(const DistanceMatrix& d) {
  std::vector<double> b = jump_breakpoints(d);
  std::vector<double> out = b;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) out.push_back(0.5 * (b[i] + b[i + 1]));
  if (!b.empty()) {
    out.push_back(0.5 * b.front());
    out.push_back(1.5 * b.back());
  } else {
    out.push_back(1.0);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Oracle ensemble: `trials` scalar then `trials` 3-dimensional series.
template <class F>
void oracle_ensemble(Context& ctx, std::size_t trials, std::size_t nmax, F&& body) {
  for (std::size_t dim : {std::size_t{1}, std::size_t{3}}) {
    for (std::size_t i = 0; i < trials; ++i) {
      const std::size_t idx = (dim == 1 ? 0 : trials) + i;
      if (!ctx.selected(idx)) continue;
      auto rng = instance_rng(ctx.cfg.seed, idx, 1);
      const std::size_t n = uniform_size(rng, 1, nmax);
      const double s = dim == 1 ? 2.0 : kNorms[i % 3];
      body(idx, random_series(rng, n, dim, s));
    }
  }
}

// ---------------------------------------------------------------------------
// Suites

void suite_jump_oracle(Context& ctx) {
  const std::size_t trials = trials_or(ctx.cfg, 1000);
  const std::size_t nmax = size_or(ctx.cfg, 12, 1, 20);
  std::size_t mismatches = 0, evaluations = 0, rule_short = 0, rule_series = 0;
  oracle_ensemble(ctx, trials, nmax, [&](std::size_t idx, const TimeSeries& ts) {
    const DistanceMatrix d(ts);
    const auto best = brute_gaps(d);
    const CountProfile prof = jump_profile(d);
    std::size_t bad = 0, shorter = 0;
    json first_bad, first_short;
    const auto lambdas = test_lambdas(d);
    for (double lam : lambdas) {
      const std::size_t brute = brute_count(best, lam);
      const JumpWitness w = jump_count(d, lam);
      bool ok = w.count == brute && prof.at(lam) == brute && w.times.size() == w.count + 1;
      // the witness chain itself must be admissible
      for (std::size_t k = 0; ok && k + 1 < w.times.size(); ++k)
        ok = w.times[k] < w.times[k + 1] && d(w.times[k], w.times[k + 1]) >= lam;
      if (!ok) {
        if (!bad) first_bad = {{"lambda", lam}, {"count", w.count}, {"profile", prof.at(lam)}, {"brute", brute}};
        ++bad;
      }
      // the stopping-time rule from the first index only bounds N_lambda below
      const std::size_t rule = stopping_positions(d, lam).size() - 1;
      if (rule > brute) {
        if (!bad) first_bad = {{"lambda", lam}, {"stopping_rule", rule}, {"brute", brute}};
        ++bad;
      }
      if (rule < brute) {
        if (!shorter) first_short = {{"lambda", lam}, {"stopping_rule", rule}, {"brute", brute}};
        ++shorter;
      }
    }
    mismatches += bad;
    evaluations += lambdas.size();
    rule_short += shorter;
    rule_series += shorter ? 1 : 0;
    Check c;
    c.name = "jump_oracle:count=brute";
    c.lhs = static_cast<double>(bad);
    c.rhs = static_cast<double>(lambdas.size());
    c.ratio = safe_ratio(c.lhs, c.rhs);
    c.holds = bad == 0;
    c.params = {{"n", ts.size()}, {"m", ts.dimension()}};
    if (bad) c.witness = {{"series", series_json(ts)}, {"first", first_bad}};
    if (shorter) c.witness["stopping_rule_below"] = first_short;
    ctx.add(std::move(c), idx);
  });
  ctx.rep.tolerance = 0.0;
  ctx.rep.summary = {{"mismatches", mismatches},
                     {"evaluations", evaluations},
                     {"stopping_rule_below_count", rule_short},
                     {"stopping_rule_below_series", rule_series}};
  ctx.rep.notes.push_back(
      "the greedy stopping-time rule started at the first index is a lower bound for N_lambda; "
      "stopping_rule_below_* count where it is strictly smaller");
}

void suite_variation_oracle(Context& ctx) {
  const std::size_t trials = trials_or(ctx.cfg, 1000);
  const std::size_t nmax = size_or(ctx.cfg, 12, 1, 20);
  const double tol = ctx.cfg.tol.value_or(1e-12);
  std::vector<double> rs{0.5, 1.0, 1.5, 2.0, 3.0, kInf};
  if (ctx.cfg.r) rs = {*ctx.cfg.r};
  double worst = 0.0;
  oracle_ensemble(ctx, trials, nmax, [&](std::size_t idx, const TimeSeries& ts) {
    const DistanceMatrix d(ts);
    for (double r : rs) {
      const VariationResult dp = variation(d, r);
      const double brute = brute_variation(d, r);
      double err = std::abs(dp.value - brute) / std::max(brute, std::numeric_limits<double>::min());
      if (brute == 0.0) err = dp.value;
      // the dynamic program's witness chain attains its value
      if (!std::isinf(r) && dp.witness.size() >= 2) {
        const double chain = std::pow(chain_power_sum(d, dp.witness, r), 1.0 / r);
        err = std::max(err, std::abs(chain - dp.value) / std::max(dp.value, 1e-300));
      }
      worst = std::max(worst, err);
      Check c;
      c.name = "variation_oracle:dp=brute";
      c.lhs = err;
      c.rhs = tol;
      c.ratio = safe_ratio(err, tol);
      c.holds = err <= tol;
      c.params = {{"n", ts.size()}, {"m", ts.dimension()}, {"r", number(r)}};
      if (!c.holds) c.witness = {{"series", series_json(ts)}, {"dp", dp.value}, {"brute", brute}};
      ctx.add(std::move(c), idx);
    }
  });
  ctx.rep.tolerance = tol;
  ctx.rep.summary = {{"max_relative_error", worst}};
}

void suite_jump_variation(Context& ctx) {
  const std::size_t trials = trials_or(ctx.cfg, 10000);
  const std::size_t nmax = size_or(ctx.cfg, 16, 1, 200);
  const double tol = ctx.cfg.tol.value_or(1e-12);
  const double rlist[5] = {0.5, 1.0, 1.5, 2.0, 3.0};
  double worst_a = 0.0, worst_b = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    if (!ctx.selected(i)) continue;
    auto rng = instance_rng(ctx.cfg.seed, i, 2);
    const std::size_t n = uniform_size(rng, 1, nmax);
    const std::size_t m = uniform_size(rng, 1, 3);
    const double s = kNorms[uniform_size(rng, 0, 2)];
    double r = ctx.cfg.r.value_or(i % 6 < 5 ? rlist[i % 6] : uniform(rng, 0.2, 6.0));
    if (!(r > 0.0) || std::isinf(r)) throw DomainError("jump-variation: r must lie in (0, inf)");
    const TimeSeries ts = random_series(rng, n, m, s);
    const DistanceMatrix d(ts);
    const double V = variation(d, r).value;

    Check a;
    a.name = "jump_variation:lambda_N<=V";
    a.rhs = V;
    auto lambdas = test_lambdas(d);
    lambdas.push_back(uniform(rng, 0.01, 3.0));
    for (double lam : lambdas) {
      const double lhs = lam * std::pow(static_cast<double>(jump_count(d, lam).count), 1.0 / r);
      if (lhs >= a.lhs) {
        a.lhs = lhs;
        a.witness = {{"lambda", lam}};
      }
    }
    a.ratio = safe_ratio(a.lhs, a.rhs);
    a.holds = a.lhs <= a.rhs * (1.0 + tol);
    a.params = {{"n", n}, {"m", m}, {"s", number(s)}, {"r", r}};
    if (!a.holds) a.witness["series"] = series_json(ts);
    worst_a = std::max(worst_a, a.ratio);
    ctx.add(std::move(a), i);

    if (r >= 1.0) {
      long double acc = 0.0L;
      for (std::size_t k = 0; k < n; ++k) acc += std::pow(ts.norm()(ts.value(k)), r);
      Check b;
      b.name = "jump_variation:V<=2l";
      b.lhs = V;
      b.rhs = 2.0 * std::pow(static_cast<double>(acc), 1.0 / r);
      b.ratio = safe_ratio(b.lhs, b.rhs);
      b.holds = b.lhs <= b.rhs * (1.0 + tol);
      b.params = {{"n", n}, {"m", m}, {"s", number(s)}, {"r", r}};
      if (!b.holds) b.witness["series"] = series_json(ts);
      worst_b = std::max(worst_b, b.ratio);
      ctx.add(std::move(b), i);
    }
  }
  ctx.rep.tolerance = tol;
  ctx.rep.summary = {{"max_ratio_lambda_N", worst_a}, {"max_ratio_V_2l", worst_b}};
}

struct EquivSet {
  double p, q, rho, theta;
};

void suite_interp_equivalence(Context& ctx) {
  const std::size_t trials = trials_or(ctx.cfg, 200);
  const std::size_t atoms = size_or(ctx.cfg, 3, 1, 16);
  const std::size_t indices = 2 * atoms;
  const double growth = ctx.cfg.tol.value_or(0.25);
  std::vector<EquivSet> sets{{2, 2, 2, 0.75}, {3, 3, 2, 2.0 / 3.0}, {2, kInf, 2, 0.75}};
  if (ctx.cfg.p || ctx.cfg.q || ctx.cfg.rho || ctx.cfg.theta)
    sets = {{ctx.cfg.p.value_or(2.0), ctx.cfg.q.value_or(2.0), ctx.cfg.rho.value_or(2.0),
             ctx.cfg.theta.value_or(0.75)}};
  json per_set = json::array();
  for (std::size_t si = 0; si < sets.size(); ++si) {
    const EquivSet& e = sets[si];
    JumpCouple{e.p, e.q, e.rho, e.theta}.validate();
    double C[2] = {0.0, 0.0};
    for (std::size_t scale = 0; scale < 2; ++scale) {
      for (std::size_t i = 0; i < trials; ++i) {
        const std::size_t idx = (2 * si + scale) * trials + i;
        if (!ctx.selected(idx)) continue;
        auto rng = instance_rng(ctx.cfg.seed, idx, 3);
        const std::size_t A = uniform_size(rng, 1, atoms << scale);
        const std::size_t T = uniform_size(rng, 2, indices << scale);
        const SampledProcess f = random_process(rng, A, T);
        const auto res = jump_interp_equivalence(f, e.p, e.q, e.rho, e.theta, KMode::brute);
        Check c;
        c.name = "equivalence:I/J";
        c.lhs = res.I;
        c.rhs = res.J;
        c.ratio = res.ratio_IJ;
        c.holds = std::isfinite(res.ratio_IJ) && std::isfinite(res.ratio_JI) && res.I > 0.0 &&
                  res.J > 0.0;
        c.params = {{"p", e.p}, {"q", number(e.q)}, {"rho", e.rho}, {"theta", e.theta},
                    {"atoms", A}, {"indices", T}, {"doubled", scale == 1}};
        c.witness = {{"J/I", res.ratio_JI}};
        if (!c.holds) c.witness["process"] = process_json(f);
        C[scale] = std::max({C[scale], res.ratio_IJ, res.ratio_JI});
        ctx.add(std::move(c), idx);
      }
    }
    Check g;
    g.name = "equivalence:C_growth";
    g.lhs = C[1];
    g.rhs = C[0];
    g.ratio = safe_ratio(C[1], C[0]);
    g.holds = std::isfinite(C[0]) && C[1] <= C[0] * (1.0 + growth);
    g.params = {{"p", e.p}, {"q", number(e.q)}, {"rho", e.rho}, {"theta", e.theta},
                {"growth_tolerance", growth}};
    ctx.add_aggregate(std::move(g));
    per_set.push_back({{"p", e.p}, {"q", number(e.q)}, {"rho", e.rho}, {"theta", e.theta},
                       {"C", C[0]}, {"C_doubled", C[1]}});
  }
  ctx.rep.tolerance = growth;
  ctx.rep.summary = {{"sets", per_set}};
}

void suite_variation_from_jumps(Context& ctx) {
  const std::size_t trials = trials_or(ctx.cfg, 200);
  const std::size_t indices = size_or(ctx.cfg, 12, 2, 200);
  struct Case {
    double p, rho, r;
  };
  std::vector<Case> cases{{1.5, 2, 3}, {2, 2, 3}, {3, 2, 3}, {2, 2, kInf}};
  if (ctx.cfg.p || ctx.cfg.rho || ctx.cfg.r)
    cases = {{ctx.cfg.p.value_or(2.0), ctx.cfg.rho.value_or(2.0), ctx.cfg.r.value_or(3.0)}};
  std::map<std::string, double> worst;
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const Case& cs = cases[ci];
    for (std::size_t i = 0; i < trials; ++i) {
      const std::size_t idx = ci * trials + i;
      if (!ctx.selected(idx)) continue;
      auto rng = instance_rng(ctx.cfg.seed, idx, 4);
      const std::size_t A = uniform_size(rng, 1, 6);
      const std::size_t T = uniform_size(rng, 2, indices);
      const std::size_t m = uniform_size(rng, 1, 2);
      const SampledProcess f = random_process(rng, A, T, m, 2.0);
      auto checks = variation_from_jumps_report(f, cs.p, cs.rho, cs.r);
      const NonnegProcess F = difference_process(f, std::isinf(cs.r) ? 2.0 * cs.rho : cs.r);
      for (auto& c : variation_from_jumps_report(F, cs.p, cs.rho, cs.r)) checks.push_back(c);
      for (auto& c : checks) {
        const std::string key = c.name + " p=" + c.params["p"].dump();
        worst[key] = std::max(worst[key], c.ratio);
        if (!c.holds) c.witness["process"] = process_json(f);
        ctx.add(std::move(c), idx);
      }
    }
  }
  json s = json::object();
  for (const auto& [k, v] : worst) s[k] = number(v);
  ctx.rep.summary = {{"max_ratio", s}};
}

void suite_convexity(Context& ctx) {
  const std::size_t trials = trials_or(ctx.cfg, 1000);
  const std::size_t atoms = size_or(ctx.cfg, 8, 1, 1000);
  std::vector<double> ps{0.25, 0.5, 0.75};
  if (ctx.cfg.p) ps = {*ctx.cfg.p};
  double worst_log = 0.0;
  std::map<double, double> worst_p;
  for (std::size_t i = 0; i < trials; ++i) {
    if (!ctx.selected(i)) continue;
    auto rng = instance_rng(ctx.cfg.seed, i, 5);
    const std::size_t n = uniform_size(rng, 1, atoms);
    std::vector<double> w(n);
    for (double& v : w) v = std::exp(uniform(rng, -2.0, 2.0));
    const auto space = AtomicMeasureSpace::with_weights(w);
    const std::size_t k = uniform_size(rng, 1, 6);
    std::vector<std::vector<double>> g(k, std::vector<double>(n));
    std::normal_distribution<double> gauss;
    std::bernoulli_distribution sparse(0.4);
    for (auto& row : g)
      for (double& v : row) v = sparse(rng) ? 0.0 : std::abs(gauss(rng)) * std::exp(uniform(rng, -3.0, 3.0));
    std::vector<double> a(k);
    for (std::size_t j = 0; j < k; ++j) {
      const double weak = lorentz_norm(g[j], space, 1.0, kInf);
      a[j] = (i % 2 ? weak : weak * (1.0 + uniform(rng, 0.0, 1.0))) +
             (weak == 0.0 ? 1e-3 : 0.0);
    }
    Check c = check_l1inf_logconvex(g, a, space);
    worst_log = std::max(worst_log, c.ratio);
    if (!c.holds) c.witness["instance_data"] = {{"g", g}, {"a", a}, {"weights", w}};
    ctx.add(std::move(c), i);
    for (double p : ps) {
      Check cp = check_lpinf_pconvex(g, p, space);
      worst_p[p] = std::max(worst_p[p], cp.ratio);
      if (!cp.holds) cp.witness["instance_data"] = {{"g", g}, {"weights", w}};
      ctx.add(std::move(cp), i);
    }
  }
  json s = {{"log_convex_max_ratio", worst_log}};
  for (const auto& [p, v] : worst_p) s["p_convex_max_ratio"][std::to_string(p)] = v;
  ctx.rep.summary = s;
}

void suite_lepingle(Context& ctx) {
  const std::size_t trials = trials_or(ctx.cfg, 500);
  const std::size_t depth_max = size_or(ctx.cfg, 12, 1, 14);
  const double p = ctx.cfg.p.value_or(2.0);
  const double rho = ctx.cfg.rho.value_or(2.0);
  const std::size_t adversarial = 8;
  const StepLaw laws[3] = {StepLaw::sign, StepLaw::gaussian, StepLaw::mixed};
  double worst = 0.0, worst_adv = 0.0, A = 0.0;
  auto run = [&](std::size_t idx, const FiniteMartingale& m, bool adv) {
    LepingleReport rep = verify_lepingle(m, p, rho);
    double ratio = safe_ratio(rep.J, rep.sup);
    (adv ? worst_adv : worst) = std::max(adv ? worst_adv : worst, ratio);
    A = std::max(A, rep.A_self);
    for (auto& c : lepingle_certificates(m, rho)) rep.checks.push_back(std::move(c));
    rep.checks.push_back(doob_check(m, 4.0));
    for (auto& c : rep.checks) {
      c.params["adversarial"] = adv;
      if (!c.holds) c.witness["martingale"] = process_json(m.process());
      ctx.add(std::move(c), idx);
    }
  };
  for (std::size_t i = 0; i < trials; ++i) {
    if (!ctx.selected(i)) continue;
    auto rng = instance_rng(ctx.cfg.seed, i, 6);
    const std::size_t depth = 1 + i % depth_max;
    run(i, dyadic_random_walk(depth, BNorm(1, 2.0), rng, laws[i % 3]), false);
  }
  for (std::size_t a = 0; a < adversarial; ++a) {
    const std::size_t idx = trials + a;
    if (!ctx.selected(idx)) continue;
    auto rng = instance_rng(ctx.cfg.seed, idx, 6);
    const std::size_t depth = 3 + a % 4;
    auto objective = [&](const FiniteMartingale& m) {
      const double s = sup_lp(m, p);
      return s > 0.0 ? jump_seminorm(m.process(), p, p, rho).value / s : 0.0;
    };
    run(idx, adversarial_martingale(depth, BNorm(1, 2.0), rng, objective, 150), true);
  }
  ctx.rep.tolerance = 1e-12;
  ctx.rep.summary = {{"max_J_over_sup", worst}, {"max_J_over_sup_adversarial", worst_adv},
                     {"max_A_self", A}};
}

void suite_markov(Context& ctx) {
  const std::size_t trials = trials_or(ctx.cfg, 500);
  const std::size_t nmax = size_or(ctx.cfg, 16, 4, 256);
  const double p = ctx.cfg.p.value_or(2.0);
  const double rho = ctx.cfg.rho.value_or(2.0);
  const double growth = ctx.cfg.tol.value_or(1e-9);
  const std::size_t N = 64;
  const std::vector<std::size_t> ns{nmax / 4, nmax / 2, nmax};
  std::map<std::pair<std::size_t, std::size_t>, double> table;  // (n, horizon) -> max ratio
  for (std::size_t ni = 0; ni < ns.size(); ++ni) {
    const std::size_t n = ns[ni];
    for (std::size_t i = 0; i < trials; ++i) {
      const std::size_t idx = ni * trials + i;
      if (!ctx.selected(idx)) continue;
      auto rng = instance_rng(ctx.cfg.seed, idx, 8);
      const DsMethod method = i % 2 ? DsMethod::sinkhorn : DsMethod::birkhoff;
      const auto Q = random_doubly_stochastic(n, method, rng);
      std::normal_distribution<double> gauss;
      std::vector<std::vector<double>> f(n, std::vector<double>(1));
      for (auto& v : f) v[0] = gauss(rng);
      MarkovReport rep = verify_markov_jump(Q, f, BNorm(1, 2.0), p, rho, N);
      for (const auto& h : rep.by_horizon) {
        double& cell = table[{n, h.N}];
        cell = std::max(cell, h.ratio);
      }
      for (auto& c : rep.checks) {
        c.params["n"] = n;
        c.params["method"] = to_string(method);
        if (!c.holds) c.witness["instance_data"] = {{"Q", Q.entries()}, {"f", f}};
        ctx.add(std::move(c), idx);
      }
    }
  }
  json rows = json::array();
  for (const auto& [key, v] : table) rows.push_back({{"n", key.first}, {"N", key.second}, {"max_ratio", v}});
  // Doubling: N -> 2N at the largest n and n -> 2n at the largest N.
  auto cell = [&](std::size_t n, std::size_t h) {
    auto it = table.find({n, h});
    return it == table.end() ? 0.0 : it->second;
  };
  auto doubling = [&](const char* what, double before, double after, json params) {
    Check c;
    c.name = std::string("markov:doubling_") + what;
    c.lhs = after;
    c.rhs = before;
    c.ratio = safe_ratio(after, before);
    c.holds = std::isfinite(after) && after <= before * (1.0 + growth);
    params["growth_tolerance"] = growth;
    c.params = std::move(params);
    ctx.add_aggregate(std::move(c));
  };
  for (std::size_t h : {N / 4, N / 2})
    doubling("N", cell(nmax, h), cell(nmax, 2 * h), {{"n", nmax}, {"N", h}});
  for (std::size_t ni = 0; ni + 1 < ns.size(); ++ni)
    doubling("n", cell(ns[ni], N), cell(ns[ni + 1], N), {{"n", ns[ni]}, {"N", N}});
  ctx.rep.tolerance = growth;
  ctx.rep.summary = {{"max_ratio", rows}};
}

void suite_sampling_identity(Context& ctx) {
  const std::size_t trials = trials_or(ctx.cfg, 100);
  const std::size_t support = size_or(ctx.cfg, 32, 1, 256);
  const double tol = ctx.cfg.tol.value_or(1e-6);
  const double route_tol = 1e-7;
  const MultiplierFamily family =
      ctx.cfg.family.is_null() ? MultiplierFamily::dilated_cutoff() : MultiplierFamily::from_json(ctx.cfg.family);
  const PhiTable phi{KernelSpec{}};
  double worst_id = 0.0, worst_route = 0.0;
  std::vector<ZSequence> seqs(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    if (!ctx.selected(i)) continue;
    seqs[i] = random_test_sequence(support, ctx.cfg.seed, i);
    for (auto& c : sampling_identity_checks(seqs[i], phi, tol)) {
      if (c.name == "sampling:RE=id") worst_id = std::max(worst_id, c.ratio);
      if (!c.holds) c.witness["sequence"] = {{"first", seqs[i].first}, {"values", seqs[i].values}};
      ctx.add(std::move(c), i);
    }
  }
  // Fourier route against kernel route
  const KernelTable K(kernel_symbol(family), 1.0);
  for (int q : {1, 2, 3}) {
    if (family.support() > 0.5 / q) continue;
    const PeriodicSymbol m(family, q);
    for (std::size_t i = 0; i < trials; ++i) {
      if (!ctx.selected(i)) continue;
      for (auto& c : fourier_kernel_checks(K, m, seqs[i], route_tol)) {
        worst_route = std::max(worst_route, c.ratio);
        ctx.add(std::move(c), i);
      }
    }
    // periodisation by reduction against the direct lattice sum
    double err = 0.0;
    for (std::size_t t = 0; t < family.members(); ++t)
      for (int k = -400; k <= 400; ++k) {
        const double xi = k / 800.0;
        err = std::max(err, std::abs(m(t, xi) - m.truncated_sum(t, xi, q + 2)));
      }
    Check c;
    c.name = "periodization:reduction=sum";
    c.lhs = err;
    c.rhs = 1e-15;
    c.ratio = safe_ratio(err, c.rhs);
    c.holds = err <= c.rhs;
    c.params = {{"q", q}};
    ctx.add_aggregate(std::move(c));
  }
  ctx.rep.tolerance = tol;
  ctx.rep.summary = {{"identity_max_relative_error", worst_id},
                     {"fourier_vs_kernel_max_relative_error", worst_route},
                     {"kernel_half_width", K.half_width()},
                     {"phi_quadrature_error", phi.quadrature_error()}};
}

void suite_jump_transfer(Context& ctx) {
  TransferOptions opt;
  opt.p = ctx.cfg.p.value_or(2.0);
  opt.rho = ctx.cfg.rho.value_or(2.0);
  opt.ensemble = trials_or(ctx.cfg, 16);
  opt.support = size_or(ctx.cfg, 32, 1, 256);
  if (ctx.cfg.tol) opt.identity_tol = *ctx.cfg.tol;
  opt.seed = ctx.cfg.seed;
  const MultiplierFamily family =
      ctx.cfg.family.is_null() ? MultiplierFamily::dilated_cutoff() : MultiplierFamily::from_json(ctx.cfg.family);
  TransferReport rep = verify_jump_transfer(family, opt);
  for (auto& c : rep.checks) ctx.add_aggregate(std::move(c));
  ctx.rep.tolerance = opt.identity_tol;
  ctx.rep.summary = rep.summary;
  ctx.rep.summary["options"] = opt.to_json();
  ctx.rep.summary["family"] = family.to_json();
  ctx.rep.notes = rep.notes;
  ctx.rep.notes.push_back("operator norms are ensemble lower estimates");
}

void suite_kvector(Context& ctx) {
  const std::size_t trials = trials_or(ctx.cfg, 100);
  const std::size_t atoms = size_or(ctx.cfg, 4, 1, 64);
  const double rho = ctx.cfg.rho.value_or(2.0);
  const double ts[5] = {0.1, 0.5, 1.0, 2.0, 10.0};
  double C = 0.0, C_half = 0.0;
  for (std::size_t i = 0; i < trials; ++i) {
    if (!ctx.selected(i)) continue;
    auto rng = instance_rng(ctx.cfg.seed, i, 9);
    const std::size_t n = uniform_size(rng, 1, atoms);
    std::vector<double> w(n);
    for (double& v : w) v = std::exp(uniform(rng, -1.5, 1.5));
    const auto space = AtomicMeasureSpace::with_weights(w);
    BoxCouple c;
    c.m = 1;
    c.s = 2.0;
    c.c_ell = std::exp(uniform(rng, -1.0, 1.0));
    c.c_box = std::exp(uniform(rng, -1.0, 1.0));
    std::normal_distribution<double> gauss;
    std::vector<std::vector<double>> f(n, std::vector<double>(1));
    for (auto& v : f) v[0] = gauss(rng) * std::exp(uniform(rng, -1.0, 1.0));
    VectorKOptions vo;
    vo.seed = ctx.cfg.seed + i;
    for (double t : ts) {
      Check k = vector_k_check(c, f, space, rho, t, vo);
      C = std::max(C, k.ratio);
      if (i < trials / 2) C_half = std::max(C_half, k.ratio);
      if (!k.holds) k.witness["instance_data"] = {{"f", f}, {"weights", w}, {"c_ell", c.c_ell}, {"c_box", c.c_box}};
      ctx.add(std::move(k), i);
    }
  }
  ctx.rep.summary = {{"C", C}, {"C_first_half", C_half}, {"rho", rho}};
}

void suite_class_split(Context& ctx) {
  const std::size_t trials = trials_or(ctx.cfg, 200);
  const std::size_t atoms = size_or(ctx.cfg, 8, 1, 64);
  struct Case {
    double theta, p;
  };
  std::vector<Case> cases{{0.75, 2.0}, {0.5, 3.0}, {0.5, 4.0}};
  if (ctx.cfg.theta || ctx.cfg.p) cases = {{ctx.cfg.theta.value_or(0.5), ctx.cfg.p.value_or(3.0)}};
  json per = json::array();
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    double worst = 0.0;
    for (std::size_t i = 0; i < trials; ++i) {
      const std::size_t idx = ci * trials + i;
      if (!ctx.selected(idx)) continue;
      auto rng = instance_rng(ctx.cfg.seed, idx, 10);
      const std::size_t n = uniform_size(rng, 1, atoms);
      std::vector<double> w(n);
      for (double& v : w) v = std::exp(uniform(rng, -1.5, 1.5));
      const auto space = AtomicMeasureSpace::with_weights(w);
      BoxCouple c;
      c.m = uniform_size(rng, 1, 3);
      c.s = kNorms[uniform_size(rng, 0, 2)];
      c.c_ell = std::exp(uniform(rng, -1.0, 1.0));
      c.c_box = std::exp(uniform(rng, -1.0, 1.0));
      std::normal_distribution<double> gauss;
      std::vector<std::vector<double>> f(n, std::vector<double>(c.m));
      for (auto& row : f)
        for (double& v : row) v = gauss(rng);
      const std::size_t parts = uniform_size(rng, 1, n);
      std::vector<std::vector<std::size_t>> partition(parts);
      for (std::size_t a = 0; a < n; ++a)
        partition[a < parts ? a : uniform_size(rng, 0, parts - 1)].push_back(a);
      for (auto& part : partition) std::sort(part.begin(), part.end());
      Check k = partition_interp_bound(c, f, space, partition, cases[ci].theta, cases[ci].p);
      worst = std::max(worst, k.ratio);
      if (!k.holds) k.witness["instance_data"] = {{"f", f}, {"weights", w}, {"partition", partition}};
      ctx.add(std::move(k), idx);
    }
    per.push_back({{"theta", cases[ci].theta}, {"p", cases[ci].p}, {"max_ratio", worst}});
  }
  ctx.rep.summary = {{"cases", per}};
}

using SuiteFn = void (*)(Context&);

const std::vector<std::pair<std::string, SuiteFn>>& registry() {
  static const std::vector<std::pair<std::string, SuiteFn>> r{
      {"jump-oracle", suite_jump_oracle},
      {"variation-oracle", suite_variation_oracle},
      {"jump-variation", suite_jump_variation},
      {"interp-equivalence", suite_interp_equivalence},
      {"variation-from-jumps", suite_variation_from_jumps},
      {"convexity", suite_convexity},
      {"lepingle", suite_lepingle},
      {"markov", suite_markov},
      {"sampling-identity", suite_sampling_identity},
      {"jump-transfer", suite_jump_transfer},
      {"kvector", suite_kvector},
      {"class-split", suite_class_split},
  };
  return r;
}

}  // namespace

json SuiteConfig::to_json() const {
  json j = {{"suite", suite}, {"seed", seed}};
  auto put = [&](const char* k, const std::optional<double>& v) {
    if (v) j[k] = number(*v);
  };
  put("p", p);
  put("q", q);
  put("rho", rho);
  put("theta", theta);
  put("r", r);
  put("tol", tol);
  if (trials) j["trials"] = *trials;
  if (size) j["size"] = *size;
  if (!family.is_null()) j["family"] = family;
  if (instance) j["instance"] = *instance;
  return j;
}

SuiteConfig SuiteConfig::from_json(const json& j) {
  if (!j.is_object()) throw ParseError("suite config: expected an object");
  if (!j.contains("suite") || !j["suite"].is_string()) throw ParseError("suite config: missing field 'suite'");
  SuiteConfig c;
  c.suite = j["suite"].get<std::string>();
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) throw ParseError("suite config: field 'seed' must be a nonnegative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  c.p = optional_number(j, "p");
  c.q = optional_number(j, "q");
  c.rho = optional_number(j, "rho");
  c.theta = optional_number(j, "theta");
  c.r = optional_number(j, "r");
  c.tol = optional_number(j, "tol");
  c.trials = optional_count(j, "trials");
  c.size = optional_count(j, "size");
  c.instance = optional_count(j, "instance");
  if (j.contains("family")) c.family = j["family"];
  return c;
}

std::vector<std::string> suite_names() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : registry()) out.push_back(name);
  return out;
}

Report run_suite(const SuiteConfig& config) {
  SuiteFn fn = nullptr;
  for (const auto& [name, f] : registry())
    if (name == config.suite) fn = f;
  if (!fn) throw InputError("unknown suite '" + config.suite + "'");
  if (config.tol && !(*config.tol >= 0.0)) throw DomainError("tol must be nonnegative");
  Report rep;
  rep.suite = config.suite;
  rep.params = config.to_json();
  rep.seed = config.seed;
  Context ctx{config, rep};
  fn(ctx);
  return rep;
}

TimeSeries random_series(std::mt19937_64& rng, std::size_t n, std::size_t m, double s) {
  if (n == 0 || m == 0) throw DomainError("random_series: empty series");
  std::normal_distribution<double> gauss;
  std::vector<double> v(n * m);
  switch (uniform_size(rng, 0, 3)) {
    case 0:
      for (double& x : v) x = gauss(rng);
      break;
    case 1:
      for (double& x : v) x = static_cast<double>(std::uniform_int_distribution<int>(-2, 2)(rng));
      break;
    case 2:
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < m; ++i)
          v[k * m + i] = (k ? v[(k - 1) * m + i] : 0.0) + gauss(rng);
      break;
    default: {
      std::bernoulli_distribution spike(0.3);
      for (double& x : v) x = spike(rng) ? 5.0 * gauss(rng) : 0.0;
    }
  }
  std::vector<double> labels(n);
  for (std::size_t k = 0; k < n; ++k) labels[k] = static_cast<double>(k);
  return TimeSeries(std::move(labels), std::move(v), BNorm(m, s));
}

SampledProcess random_process(std::mt19937_64& rng, std::size_t atoms, std::size_t indices,
                              std::size_t m, double s) {
  if (atoms == 0 || indices < 2) throw DomainError("random_process: needs atoms and two indices");
  std::vector<double> w(atoms);
  for (double& v : w) v = std::exp(uniform(rng, -1.0, 1.0));
  std::vector<TimeSeries> series;
  bool moving = false;
  for (std::size_t a = 0; a < atoms; ++a) {
    TimeSeries ts = random_series(rng, indices, m, s);
    for (std::size_t k = 1; k < indices && !moving; ++k) moving = ts.distance(0, k) > 0.0;
    series.push_back(std::move(ts));
  }
  if (!moving) {
    // force a jump at the last index of the first atom
    auto v = series.front().flat_values();
    v[v.size() - 1] += 1.0;
    series.front() = series.front().with_values(std::move(v));
  }
  return SampledProcess(AtomicMeasureSpace::with_weights(std::move(w)), std::move(series));
}

}  // namespace jumpinterp
