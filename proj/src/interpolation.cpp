#include "jumpinterp/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include "jumpinterp/error.hpp"
#include "jumpinterp/rng.hpp"

namespace jumpinterp {

namespace {

constexpr double kGolden = 0.6180339887498949;

// Golden-section minimisation of a unimodal function on [a, b].
template <class F>
std::pair<double, double> golden_min(F&& f, double a, double b, int iters) {
  double x1 = b - kGolden * (b - a), x2 = a + kGolden * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters && b - a > 0.0; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kGolden * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kGolden * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

// r-variation of a scalar sequence (same dynamic program as core-seq).
double scalar_variation(std::span<const double> h, double r) {
  const std::size_t n = h.size();
  if (n < 2) return 0.0;
  if (std::isinf(r)) {
    const auto [lo, hi] = std::minmax_element(h.begin(), h.end());
    return *hi - *lo;
  }
  double buf[64];
  std::vector<double> heap;
  double* best = buf;
  if (n > 64) {
    heap.resize(n);
    best = heap.data();
  }
  double top = 0.0;
  best[0] = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    double b = 0.0;
    for (std::size_t i = 0; i < j; ++i) {
      const double d = std::abs(h[j] - h[i]);
      if (d == 0.0) continue;
      b = std::max(b, best[i] + (r == 1.0 ? d : std::pow(d, r)));
    }
    best[j] = b;
    top = std::max(top, b);
  }
  return r == 1.0 ? top : std::pow(top, 1.0 / r);
}

void require_scalar(const SampledProcess& f, const char* what) {
  if (f.dimension() != 1) {
    throw DomainError(std::string(what) + ": numeric and brute modes need scalar B");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

InterpResult interp_norm(const KFunction& K, double norm0, double norm1, double theta,
                         double r, double rel_tol) {
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("interp_norm: theta must lie in (0, 1)");
  if (!(r > 0.0)) throw DomainError("interp_norm: r must be positive");
  InterpResult res;
  if (!(norm0 > 0.0) || !(norm1 > 0.0)) return res;
  const double cross = std::log2(norm0 / norm1);
  const int jstar = static_cast<int>(std::floor(cross));
  auto envelope = [&](int j) {
    return std::min(norm0 * std::exp2(-j * theta),
                    norm1 * std::exp2(j * (1.0 - theta)));
  };
  auto term = [&](int j) { return std::exp2(-j * theta) * K(std::exp2(static_cast<double>(j))); };
  constexpr int kMaxSteps = 4000;
  res.j_lo = res.j_hi = jstar;

  if (std::isinf(r)) {
    double best = -1.0;
    for (int j = jstar, k = 0; k < kMaxSteps; ++j, ++k) {
      if (k > 0 && envelope(j) <= best) break;
      const double v = term(j);
      res.j_hi = j;
      if (v > best) {
        best = v;
        res.argmax_j = j;
      }
    }
    for (int j = jstar - 1, k = 0; k < kMaxSteps; --j, ++k) {
      if (envelope(j) <= best) break;
      const double v = term(j);
      res.j_lo = j;
      if (v > best) {
        best = v;
        res.argmax_j = j;
      }
    }
    res.value = std::max(best, 0.0);
    return res;
  }

  long double acc = 0.0L;
  const double right_ratio = 1.0 - std::exp2(-theta * r);
  const double left_ratio = 1.0 - std::exp2(-(1.0 - theta) * r);
  double right_tail = 0.0, left_tail = 0.0;
  for (int j = jstar + 1, k = 0;; ++j, ++k) {
    // on j > log2(norm0/norm1) the envelope is norm0 2^{-j theta}
    right_tail = std::pow(envelope(j), r) / right_ratio;
    if (k > 0 && right_tail <= rel_tol * static_cast<double>(acc)) break;
    if (k >= kMaxSteps) break;
    acc += std::pow(term(j), r);
    res.j_hi = j;
  }
  for (int j = jstar, k = 0;; --j, ++k) {
    left_tail = std::pow(envelope(j), r) / left_ratio;
    if (k > 0 && left_tail <= rel_tol * static_cast<double>(acc)) break;
    if (k >= kMaxSteps) break;
    acc += std::pow(term(j), r);
    res.j_lo = j;
  }
  res.value = std::pow(static_cast<double>(acc), 1.0 / r);
  res.tail_bound = std::pow(right_tail + left_tail, 1.0 / r);
  return res;
}

KFunction swap_couple(KFunction K) {
  return [K = std::move(K)](double t) { return t > 0.0 ? t * K(1.0 / t) : 0.0; };
}

// ---------------------------------------------------------------------------

void JumpCouple::validate() const {
  if (!(p > 0.0) || std::isinf(p)) throw DomainError("jump couple: p must lie in (0, inf)");
  if (!(q > 0.0)) throw DomainError("jump couple: q must lie in (0, inf]");
  if (!(rho > 1.0) || std::isinf(rho)) throw DomainError("jump couple: rho must lie in (1, inf)");
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("jump couple: theta must lie in (0, 1)");
}

double jump_norm0(const SampledProcess& f) {
  double m = 0.0;
  for (const auto& ts : f.all_series()) m = std::max(m, variation(ts, kInf).value);
  return m;
}

double jump_norm1(const SampledProcess& f, const JumpCouple& c) {
  return lorentz_norm(atom_variations(f, c.R()), f.space(), c.P(), c.Q());
}

Splitting k_splitting(const SampledProcess& f, double lambda, const JumpCouple& c) {
  if (!(lambda > 0.0)) throw DomainError("k_splitting: lambda must be positive");
  std::vector<TimeSeries> s0, s1;
  for (const auto& ts : f.all_series()) {
    const std::size_t n = ts.size(), m = ts.dimension();
    std::vector<std::size_t> stops{0};
    if (!std::isinf(lambda)) stops = stopping_positions(DistanceMatrix(ts), lambda);
    std::vector<double> v0(n * m), v1(n * m);
    std::size_t k = 0;
    for (std::size_t t = 0; t < n; ++t) {
      while (k + 1 < stops.size() && stops[k + 1] <= t) ++k;
      const auto anchor = ts.value(stops[k]);
      const auto cur = ts.value(t);
      for (std::size_t d = 0; d < m; ++d) {
        v1[t * m + d] = anchor[d];
        v0[t * m + d] = cur[d] - anchor[d];
      }
    }
    s0.push_back(ts.with_values(std::move(v0)));
    s1.push_back(ts.with_values(std::move(v1)));
  }
  Splitting sp{SampledProcess(f.space(), std::move(s0)), SampledProcess(f.space(), std::move(s1)),
               0.0, 0.0};
  sp.cert0 = jump_norm0(sp.f0);
  sp.cert1 = jump_norm1(sp.f1, c);
  return sp;
}

const char* to_string(KMode m) {
  switch (m) {
    case KMode::constructive: return "constructive";
    case KMode::numeric: return "numeric";
    case KMode::brute: return "brute";
  }
  return "?";
}

KMode parse_kmode(const std::string& s) {
  if (s == "constructive") return KMode::constructive;
  if (s == "numeric") return KMode::numeric;
  if (s == "brute") return KMode::brute;
  throw InputError("unknown K mode '" + s + "' (constructive, numeric, brute)");
}

// ---------------------------------------------------------------------------
// Tube problems

std::vector<double> taut_string(std::span<const double> lo, std::span<const double> hi) {
  const std::size_t n = lo.size();
  if (hi.size() != n) throw InputError("taut_string: bound lengths differ");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lo[i] <= hi[i])) throw InputError("taut_string: empty tube", i);
  }
  if (n <= 1) return {hi.begin(), hi.end()};
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max({scale, std::abs(lo[i]), std::abs(hi[i])});
  const double eps = 1e-15 * (scale + 1e-300);

  enum State : unsigned char { kFree, kLow, kHigh };
  std::vector<double> x(hi.begin(), hi.end());
  std::vector<State> st(n, kHigh);
  std::vector<bool> pinned(n);
  for (std::size_t i = 0; i < n; ++i) pinned[i] = lo[i] == hi[i];
  std::vector<double> xhat(n), d(n);

  auto solve_equality = [&] {
    std::size_t prev = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (st[i] == kFree) continue;
      xhat[i] = x[i];
      if (prev == n) {
        for (std::size_t k = 0; k < i; ++k) xhat[k] = x[i];
      } else {
        for (std::size_t k = prev + 1; k < i; ++k) {
          const double w = static_cast<double>(k - prev) / static_cast<double>(i - prev);
          xhat[k] = x[prev] + w * (x[i] - x[prev]);
        }
      }
      prev = i;
    }
    if (prev == n) {
      const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
      std::fill(xhat.begin(), xhat.end(), mean);
    } else {
      for (std::size_t k = prev + 1; k < n; ++k) xhat[k] = x[prev];
    }
  };
  auto grad = [&](std::size_t i) {
    double g = 0.0;
    if (i > 0) g += x[i] - x[i - 1];
    if (i + 1 < n) g += x[i] - x[i + 1];
    return g;
  };

  bool optimal = false;
  for (std::size_t iter = 0; iter < 200 * n && !optimal; ++iter) {
    solve_equality();
    double dmax = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = xhat[i] - x[i];
      dmax = std::max(dmax, std::abs(d[i]));
    }
    if (dmax > eps) {
      double alpha = 1.0;
      std::size_t block = n;
      State bstate = kFree;
      for (std::size_t i = 0; i < n; ++i) {
        if (st[i] != kFree || d[i] == 0.0) continue;
        if (d[i] > 0.0 && x[i] + d[i] > hi[i]) {
          const double a = (hi[i] - x[i]) / d[i];
          if (a < alpha) { alpha = a; block = i; bstate = kHigh; }
        } else if (d[i] < 0.0 && x[i] + d[i] < lo[i]) {
          const double a = (lo[i] - x[i]) / d[i];
          if (a < alpha) { alpha = a; block = i; bstate = kLow; }
        }
      }
      for (std::size_t i = 0; i < n; ++i) {
        if (st[i] == kFree) x[i] = std::clamp(x[i] + alpha * d[i], lo[i], hi[i]);
      }
      if (block != n) {
        st[block] = bstate;
        x[block] = bstate == kHigh ? hi[block] : lo[block];
      }
      continue;
    }
    // stationary on the working set: release the worst multiplier
    double worst = 1e-13 * (scale + 1e-300);
    std::size_t release = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (st[i] == kFree || pinned[i]) continue;
      const double g = grad(i);
      const double viol = st[i] == kHigh ? g : -g;
      if (viol > worst) {
        worst = viol;
        release = i;
      }
    }
    if (release == n) optimal = true;
    else st[release] = kFree;
  }
  if (!optimal) {
    // projected Gauss-Seidel from the current point
    for (int sweep = 0; sweep < 200000; ++sweep) {
      double change = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double target;
        if (i == 0) target = x[1];
        else if (i + 1 == n) target = x[n - 2];
        else target = 0.5 * (x[i - 1] + x[i + 1]);
        const double nv = std::clamp(target, lo[i], hi[i]);
        change = std::max(change, std::abs(nv - x[i]));
        x[i] = nv;
      }
      if (change <= eps) break;
    }
  }
  return x;
}

TubeSolution tube_descent(std::span<const double> f, double s, double R,
                          std::vector<double> h, int max_sweeps) {
  const std::size_t n = f.size();
  if (h.size() != n) throw InputError("tube_descent: start has wrong length");
  for (std::size_t i = 0; i < n; ++i) h[i] = std::clamp(h[i], f[i] - s, f[i]);
  double cur = scalar_variation(h, R);
  std::vector<double> trial(n);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const double before = cur;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a; b < n; ++b) {
        double amin = -kInf, amax = kInf;
        for (std::size_t i = a; i <= b; ++i) {
          amin = std::max(amin, f[i] - s - h[i]);
          amax = std::min(amax, f[i] - h[i]);
        }
        if (!(amax > amin)) continue;
        auto obj = [&](double alpha) {
          std::copy(h.begin(), h.end(), trial.begin());
          for (std::size_t i = a; i <= b; ++i) trial[i] = h[i] + alpha;
          return scalar_variation(trial, R);
        };
        auto [alpha, val] = golden_min(obj, amin, amax, 40);
        for (double cand : {amin, amax}) {
          const double v = obj(cand);
          if (v < val) {
            val = v;
            alpha = cand;
          }
        }
        if (val < cur) {
          for (std::size_t i = a; i <= b; ++i) {
            h[i] = std::clamp(h[i] + alpha, f[i] - s, f[i]);
          }
          cur = scalar_variation(h, R);
        }
      }
    }
    if (!(cur < before * (1.0 - 1e-13))) break;
  }
  return {cur, std::move(h)};
}

TubeSolution tube_min_variation(std::span<const double> f, double s, double R) {
  if (!(s >= 0.0)) throw DomainError("tube_min_variation: s must be nonnegative");
  if (!(R > 0.0)) throw DomainError("tube_min_variation: R must be positive");
  const std::size_t n = f.size();
  if (n == 0) throw DomainError("tube_min_variation: empty series");
  const auto [mn, mx] = std::minmax_element(f.begin(), f.end());
  if (s >= *mx - *mn) return {0.0, std::vector<double>(n, *mn)};
  if (s == 0.0) return {scalar_variation(f, R), std::vector<double>(f.begin(), f.end())};
  std::vector<double> lo(n);
  for (std::size_t i = 0; i < n; ++i) lo[i] = f[i] - s;
  auto h = taut_string(lo, f);
  if (R >= 1.0) {
    const double v = scalar_variation(h, R);
    return {v, std::move(h)};
  }
  TubeSolution best = tube_descent(f, s, R, h);
  std::vector<double> mid(f.begin(), f.end());
  for (double& v : mid) v -= 0.5 * s;
  for (auto start : {std::vector<double>(f.begin(), f.end()), mid}) {
    auto cand = tube_descent(f, s, R, std::move(start));
    if (cand.value < best.value) best = std::move(cand);
  }
  return best;
}

// ---------------------------------------------------------------------------

namespace {

// Per-atom step function of lambda: value vals[k] on (b[k-1], b[k]] and
// at_inf above the last breakpoint.
struct AtomSteps {
  std::vector<double> b;
  std::vector<double> c0, c1;  // V^inf(f0), V^R(f1) at each breakpoint
  double c0_inf = 0.0, c1_inf = 0.0;
};

AtomSteps atom_steps(const TimeSeries& ts, double R) {
  AtomSteps a;
  const DistanceMatrix d(ts);
  a.b = jump_breakpoints(d);
  a.c0_inf = variation(d, kInf).value;
  a.c1_inf = 0.0;
  const std::size_t n = ts.size(), m = ts.dimension();
  std::vector<double> v0(n * m);
  for (double lambda : a.b) {
    const auto stops = stopping_positions(d, lambda);
    std::size_t k = 0;
    for (std::size_t t = 0; t < n; ++t) {
      while (k + 1 < stops.size() && stops[k + 1] <= t) ++k;
      const auto anchor = ts.value(stops[k]);
      const auto cur = ts.value(t);
      for (std::size_t e = 0; e < m; ++e) v0[t * m + e] = cur[e] - anchor[e];
    }
    // V^inf(f0) is the largest pairwise distance of f0's values
    double osc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        osc = std::max(osc, ts.norm().distance({v0.data() + i * m, m}, {v0.data() + j * m, m}));
      }
    }
    a.c0.push_back(osc);
    // f1 is constant between stopping times, so its variation is that of
    // the stopped values
    a.c1.push_back(variation(ts.restrict_to(stops), R).value);
  }
  return a;
}

}  // namespace

JumpKFunctional::JumpKFunctional(SampledProcess f, JumpCouple couple, KMode mode, KOptions opt)
    : f_(std::move(f)), couple_(couple), mode_(mode), opt_(opt) {
  couple_.validate();
  norm0_ = jump_norm0(f_);
  norm1_ = jump_norm1(f_, couple_);
  const std::size_t atoms = f_.atoms();

  if (mode_ == KMode::constructive) {
    std::vector<AtomSteps> steps;
    steps.reserve(atoms);
    std::vector<double> all;
    for (const auto& ts : f_.all_series()) {
      steps.push_back(atom_steps(ts, couple_.R()));
      all.insert(all.end(), steps.back().b.begin(), steps.back().b.end());
    }
    std::sort(all.begin(), all.end(), std::greater<>());
    all.erase(std::unique(all.begin(), all.end()), all.end());

    const double P = couple_.P(), Q = couple_.Q();
    const bool strong = Q == P;
    std::vector<double> cur0(atoms), cur1(atoms);
    std::multiset<double> maxes;
    long double psum = 0.0L;
    for (std::size_t x = 0; x < atoms; ++x) {
      cur0[x] = steps[x].c0_inf;
      cur1[x] = steps[x].c1_inf;
      maxes.insert(cur0[x]);
    }
    auto record = [&](double lambda) {
      lambdas_.push_back(lambda);
      c0_.push_back(*maxes.rbegin());
      if (strong) {
        c1_.push_back(std::pow(std::max(0.0, static_cast<double>(psum)), 1.0 / P));
      } else {
        c1_.push_back(lorentz_norm(cur1, f_.space(), P, Q));
      }
    };
    record(kInf);
    std::vector<std::size_t> ptr(atoms);
    for (std::size_t x = 0; x < atoms; ++x) ptr[x] = steps[x].b.size();
    // per-atom breakpoints visited in descending order
    std::vector<std::pair<double, std::size_t>> events;
    for (std::size_t x = 0; x < atoms; ++x) {
      for (double b : steps[x].b) events.emplace_back(b, x);
    }
    std::sort(events.begin(), events.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    std::size_t e = 0;
    for (double lambda : all) {
      for (; e < events.size() && events[e].first == lambda; ++e) {
        const std::size_t x = events[e].second;
        const std::size_t k = --ptr[x];
        maxes.erase(maxes.find(cur0[x]));
        cur0[x] = steps[x].c0[k];
        maxes.insert(cur0[x]);
        if (strong) {
          psum -= static_cast<long double>(std::pow(cur1[x], P)) * f_.space().weight(x);
        }
        cur1[x] = steps[x].c1[k];
        if (strong) {
          psum += static_cast<long double>(std::pow(cur1[x], P)) * f_.space().weight(x);
        }
      }
      record(lambda);
    }
    return;
  }

  require_scalar(f_, "JumpKFunctional");
  const double ratio = mode_ == KMode::brute ? opt_.grid_ratio_brute : opt_.grid_ratio_numeric;
  if (!(ratio > 1.0)) throw DomainError("JumpKFunctional: grid ratio must exceed 1");
  s_grid_.push_back(0.0);
  l_grid_.push_back(norm1_);
  if (norm0_ > 0.0) {
    const double lo = opt_.s_floor * norm0_;
    const int steps = static_cast<int>(std::ceil(std::log(norm0_ / lo) / std::log(ratio)));
    for (int k = 0; k <= steps; ++k) {
      const double s = k == steps ? norm0_ : lo * std::pow(ratio, k);
      s_grid_.push_back(s);
      l_grid_.push_back(lorentz_of_s(s));
    }
  }
}

double JumpKFunctional::lorentz_of_s(double s) const {
  std::vector<double> g(f_.atoms());
  for (std::size_t x = 0; x < f_.atoms(); ++x) {
    g[x] = tube_min_variation(f_.series(x).flat_values(), s, couple_.R()).value;
  }
  return lorentz_norm(g, f_.space(), couple_.P(), couple_.Q());
}

JumpKFunctional::Value JumpKFunctional::evaluate(double t) const {
  if (!(t >= 0.0)) throw DomainError("K-functional: t must be nonnegative");
  Value best;
  best.value = kInf;
  if (mode_ == KMode::constructive) {
    for (std::size_t k = 0; k < lambdas_.size(); ++k) {
      const double v = c0_[k] + t * c1_[k];
      if (v < best.value) {
        best.value = v;
        best.lambda = lambdas_[k];
      }
    }
    return best;
  }
  std::size_t arg = 0;
  for (std::size_t k = 0; k < s_grid_.size(); ++k) {
    const double v = s_grid_[k] + t * l_grid_[k];
    if (v < best.value) {
      best.value = v;
      best.s = s_grid_[k];
      arg = k;
    }
  }
  if (mode_ == KMode::brute && opt_.refine_iterations > 0 && s_grid_.size() > 2) {
    const double a = s_grid_[arg == 0 ? 0 : arg - 1];
    const double b = s_grid_[std::min(arg + 1, s_grid_.size() - 1)];
    auto [s, v] = golden_min([&](double s) { return s + t * lorentz_of_s(s); }, a, b,
                             opt_.refine_iterations);
    if (v < best.value) {
      best.value = v;
      best.s = s;
    }
  }
  return best;
}

Splitting JumpKFunctional::splitting(double t) const {
  const Value v = evaluate(t);
  if (mode_ == KMode::constructive) return k_splitting(f_, v.lambda, couple_);
  std::vector<TimeSeries> s0, s1;
  for (const auto& ts : f_.all_series()) {
    const auto& fv = ts.flat_values();
    auto h = tube_min_variation(fv, v.s, couple_.R()).h;
    std::vector<double> r0(fv.size());
    for (std::size_t i = 0; i < fv.size(); ++i) r0[i] = fv[i] - h[i];
    s0.push_back(ts.with_values(std::move(r0)));
    s1.push_back(ts.with_values(std::move(h)));
  }
  Splitting sp{SampledProcess(f_.space(), std::move(s0)), SampledProcess(f_.space(), std::move(s1)),
               0.0, 0.0};
  sp.cert0 = jump_norm0(sp.f0);
  sp.cert1 = jump_norm1(sp.f1, couple_);
  return sp;
}

KFunction JumpKFunctional::as_function() const {
  return [this](double t) { return evaluate(t).value; };
}

EquivalenceResult jump_interp_equivalence(const SampledProcess& f, double p, double q,
                                          double rho, double theta, KMode mode,
                                          KOptions opt) {
  const JumpCouple c{p, q, rho, theta};
  c.validate();
  EquivalenceResult res;
  const auto js = jump_seminorm(f, p, q, rho);
  res.J = js.value;
  res.argmax_lambda = js.argmax_lambda;
  const JumpKFunctional K(f, c, mode, opt);
  const auto in = interp_norm(K.as_function(), K.norm0(), K.norm1(), theta, kInf);
  res.I = in.value;
  res.argmax_j = in.argmax_j;
  res.ratio_IJ = safe_ratio(res.I, res.J);
  res.ratio_JI = safe_ratio(res.J, res.I);
  return res;
}

Check forward_chain_check(const SampledProcess& f, double lambda, const JumpCouple& c) {
  c.validate();
  const auto prof = jump_profile(f);
  std::vector<double> g(f.atoms());
  for (std::size_t x = 0; x < f.atoms(); ++x) {
    g[x] = lambda * std::pow(static_cast<double>(prof.atoms[x].at(lambda)), 1.0 / c.rho);
  }
  // V^inf(f0) <= lambda / 2, so every lambda-jump of f is a lambda/2-jump of f1
  const auto sp = k_splitting(f, lambda / 4.0, c);
  Check ck;
  ck.name = "equivalence:forward";
  ck.lhs = lorentz_norm(g, f.space(), c.p, c.q);
  ck.rhs = std::pow(2.0, c.theta) * std::pow(lambda, 1.0 - c.theta) * std::pow(sp.cert1, c.theta);
  ck.ratio = safe_ratio(ck.lhs, ck.rhs);
  ck.holds = ck.lhs <= ck.rhs * (1.0 + 1e-12);
  ck.params = {{"lambda", lambda}, {"p", c.p}, {"rho", c.rho}, {"theta", c.theta},
               {"q", std::isinf(c.q) ? json("inf") : json(c.q)}};
  return ck;
}

// ---------------------------------------------------------------------------
// Box couples

void BoxCouple::validate() const {
  if (m == 0) throw DomainError("box couple: dimension must be positive");
  if (!(s >= 1.0)) throw DomainError("box couple: exponent must lie in [1, inf]");
  if (!(c_ell > 0.0) || !(c_box > 0.0)) throw DomainError("box couple: scales must be positive");
}

double ell_norm(const BoxCouple& c, std::span<const double> a) {
  return c.c_ell * BNorm(c.m, c.s)(a);
}

double box_norm(const BoxCouple& c, std::span<const double> a) {
  double mx = 0.0;
  for (double v : a) mx = std::max(mx, std::abs(v));
  return c.c_box * mx;
}

namespace {

// distance in the ell side from a to the box of box-norm u
double box_distance(const BoxCouple& c, std::span<const double> a, double u) {
  double buf[32];
  std::vector<double> heap;
  double* r = buf;
  if (a.size() > 32) {
    heap.resize(a.size());
    r = heap.data();
  }
  const double half = u / c.c_box;
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = std::max(0.0, std::abs(a[i]) - half);
  return c.c_ell * BNorm(c.m, c.s)(std::span<const double>(r, a.size()));
}

// Minimise a convex function of u on [0, U], also trying the kinks.
template <class F>
double convex_min(F&& phi, double U, const std::vector<double>& kinks) {
  double best = std::min(phi(0.0), phi(U));
  for (double k : kinks) {
    if (k > 0.0 && k < U) best = std::min(best, phi(k));
  }
  if (U > 0.0) best = std::min(best, golden_min(phi, 0.0, U, 120).second);
  return best;
}

}  // namespace

double box_k(const BoxCouple& c, std::span<const double> a, double t) {
  if (a.size() != c.m) throw InputError("box_k: element has wrong dimension");
  if (!(t >= 0.0)) throw DomainError("box_k: t must be nonnegative");
  if (t == 0.0) return 0.0;
  const double U = box_norm(c, a);
  std::vector<double> kinks;
  for (double v : a) kinks.push_back(c.c_box * std::abs(v));
  return convex_min([&](double u) { return box_distance(c, a, u) + t * u; }, U, kinks);
}

double bochner_k(const BoxCouple& c, const std::vector<std::vector<double>>& f,
                 const AtomicMeasureSpace& space, double rho, double t) {
  c.validate();
  if (f.size() != space.size()) throw InputError("bochner_k: one element per atom required");
  if (!(rho >= 1.0) || std::isinf(rho)) throw DomainError("bochner_k: rho must lie in [1, inf)");
  if (!(t >= 0.0)) throw DomainError("bochner_k: t must be nonnegative");
  if (t == 0.0) return 0.0;
  double U = 0.0;
  std::vector<double> kinks;
  for (const auto& a : f) {
    if (a.size() != c.m) throw InputError("bochner_k: element has wrong dimension");
    U = std::max(U, box_norm(c, a));
    for (double v : a) kinks.push_back(c.c_box * std::abs(v));
  }
  auto phi = [&](double u) {
    long double acc = 0.0L;
    for (std::size_t x = 0; x < f.size(); ++x) {
      acc += static_cast<long double>(std::pow(box_distance(c, f[x], u), rho)) * space.weight(x);
    }
    return std::pow(static_cast<double>(acc), 1.0 / rho) + t * u;
  };
  return convex_min(phi, U, kinks);
}

VectorKSup vector_k_sup(const BoxCouple& c, const std::vector<std::vector<double>>& f,
                        const AtomicMeasureSpace& space, double rho, double t,
                        VectorKOptions opt) {
  c.validate();
  if (!(t > 0.0)) throw DomainError("vector_k_sup: t must be positive");
  if (!(rho >= 1.0) || std::isinf(rho)) throw DomainError("vector_k_sup: rho must lie in [1, inf)");
  const std::size_t n = space.size();
  if (f.size() != n || n == 0) throw InputError("vector_k_sup: one element per atom required");
  const double budget = std::pow(t, rho);

  // w_x = psi(x)^rho m(x) is atom x's share of the budget t^rho
  auto term = [&](std::size_t x, double w) {
    if (w <= 0.0) return 0.0;
    const double psi = std::pow(w / space.weight(x), 1.0 / rho);
    return space.weight(x) * std::pow(box_k(c, f[x], psi), rho);
  };
  auto total = [&](const std::vector<double>& w) {
    double acc = 0.0;
    for (std::size_t x = 0; x < n; ++x) acc += term(x, w[x]);
    return acc;
  };

  VectorKSup out;
  out.value = -1.0;
  auto rng = instance_rng(opt.seed, 0, 0x4b);
  std::exponential_distribution<double> expo(1.0);
  for (int start = 0; start < std::max(1, opt.starts); ++start) {
    std::vector<double> w(n);
    if (start == 0) {
      const double mass = space.total_mass();
      for (std::size_t x = 0; x < n; ++x) w[x] = budget * space.weight(x) / mass;
    } else {
      double sum = 0.0;
      for (double& v : w) sum += (v = expo(rng));
      for (double& v : w) v *= budget / sum;
    }
    double cur = total(w);
    int sweep = 0;
    bool converged = n == 1;
    for (; sweep < opt.max_sweeps && !converged; ++sweep) {
      const double before = cur;
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = x + 1; y < n; ++y) {
          const double pair = w[x] + w[y];
          if (!(pair > 0.0)) continue;
          const double base = cur - term(x, w[x]) - term(y, w[y]);
          auto neg = [&](double a) { return -(term(x, a) + term(y, pair - a)); };
          auto [a, v] = golden_min(neg, 0.0, pair, 80);
          for (double cand : {0.0, pair}) {
            const double vc = neg(cand);
            if (vc < v) {
              v = vc;
              a = cand;
            }
          }
          if (base - v > cur) {
            w[x] = a;
            w[y] = pair - a;
            cur = total(w);
          }
        }
      }
      converged = !(cur > before * (1.0 + opt.tol) + 1e-300);
    }
    // the supremum runs over strictly positive psi
    double sum = 0.0;
    for (double& v : w) sum += (v = std::max(v, 1e-12 * budget));
    for (double& v : w) v *= budget / sum;
    cur = total(w);
    if (cur > out.value) {
      out.value = cur;
      out.converged = converged;
      out.sweeps = sweep;
      out.psi.psi.resize(n);
      for (std::size_t x = 0; x < n; ++x) {
        out.psi.psi[x] = std::pow(w[x] / space.weight(x), 1.0 / rho);
      }
    }
  }
  out.psi.rho = rho;
  out.psi.t = t;
  return out;
}

Check vector_k_check(const BoxCouple& c, const std::vector<std::vector<double>>& f,
                     const AtomicMeasureSpace& space, double rho, double t,
                     VectorKOptions opt) {
  const double K = bochner_k(c, f, space, rho, t);
  const auto sup = vector_k_sup(c, f, space, rho, t, opt);
  Check ck;
  ck.name = "kvector";
  ck.lhs = std::pow(K, rho);
  ck.rhs = sup.value;
  ck.ratio = safe_ratio(ck.lhs, ck.rhs);
  // the sup never exceeds K^rho (Minkowski); the reverse constant is recorded
  ck.holds = ck.rhs <= ck.lhs * (1.0 + 1e-9) && std::isfinite(ck.ratio);
  ck.params = {{"rho", rho}, {"t", t}, {"atoms", space.size()}, {"m", c.m}, {"s", c.s}};
  ck.witness = {{"psi", sup.psi.psi}, {"converged", sup.converged}, {"sweeps", sup.sweeps}};
  return ck;
}

double bochner_interp_norm(const BoxCouple& c, const std::vector<std::vector<double>>& f,
                           const AtomicMeasureSpace& space, double theta, double p) {
  const double rho = theta * p;
  if (!(rho >= 1.0)) throw DomainError("bochner_interp_norm: needs 1 <= theta p");
  double n0 = 0.0;
  long double acc = 0.0L;
  for (std::size_t x = 0; x < f.size(); ++x) {
    n0 = std::max(n0, box_norm(c, f[x]));
    acc += static_cast<long double>(std::pow(ell_norm(c, f[x]), rho)) * space.weight(x);
  }
  const double n1 = std::pow(static_cast<double>(acc), 1.0 / rho);
  // K(t; L^inf(box), L^rho(ell)) = t K(1/t; L^rho(ell), L^inf(box))
  auto K = swap_couple([&](double t) { return bochner_k(c, f, space, rho, t); });
  return interp_norm(K, n0, n1, theta, kInf).value;
}

Check partition_interp_bound(const BoxCouple& c, const std::vector<std::vector<double>>& f,
                             const AtomicMeasureSpace& space,
                             const std::vector<std::vector<std::size_t>>& partition,
                             double theta, double p) {
  if (!(p > 1.0) || std::isinf(p)) throw DomainError("partition_interp_bound: p must lie in (1, inf)");
  if (!(theta > 0.0 && theta < 1.0)) throw DomainError("partition_interp_bound: theta must lie in (0, 1)");
  if (!(theta * p >= 1.0)) throw DomainError("partition_interp_bound: needs 1 <= theta p");
  std::vector<int> seen(space.size(), 0);
  for (std::size_t j = 0; j < partition.size(); ++j) {
    if (partition[j].empty()) throw InputError("partition_interp_bound: empty part", j);
    for (std::size_t a : partition[j]) {
      if (a >= space.size()) throw InputError("partition_interp_bound: atom out of range", j);
      if (seen[a]++) throw InputError("partition_interp_bound: parts overlap", j);
    }
  }
  for (std::size_t a = 0; a < seen.size(); ++a) {
    if (!seen[a]) throw InputError("partition_interp_bound: atom not covered", a);
  }
  Check ck;
  ck.name = "class_split";
  ck.lhs = bochner_interp_norm(c, f, space, theta, p);
  long double acc = 0.0L;
  json parts = json::array();
  for (const auto& part : partition) {
    std::vector<std::vector<double>> fp;
    for (std::size_t a : part) fp.push_back(f[a]);
    const double v = bochner_interp_norm(c, fp, space.restrict_to(part), theta, p);
    parts.push_back(v);
    acc += static_cast<long double>(std::pow(v, p));
  }
  ck.rhs = std::pow(static_cast<double>(acc), 1.0 / p);
  ck.ratio = safe_ratio(ck.lhs, ck.rhs);
  ck.holds = std::isfinite(ck.ratio);
  ck.params = {{"theta", theta}, {"p", p}, {"parts", partition.size()}, {"m", c.m}, {"s", c.s}};
  ck.witness = {{"part_norms", parts}};
  return ck;
}

}  // namespace jumpinterp
