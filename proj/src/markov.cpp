#include "jumpinterp/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jumpinterp/error.hpp"

namespace jumpinterp {

namespace {

constexpr double kStochasticTol = 1e-10;
constexpr double kContractTol = 1e-12;

std::vector<double> uniform_weights(std::size_t n) { return std::vector<double>(n, 1.0); }

}  // namespace

DoublyStochasticMatrix::DoublyStochasticMatrix(std::size_t n, std::vector<double> entries,
                                               std::vector<double> weights)
    : n_(n), a_(std::move(entries)), w_(weights.empty() ? uniform_weights(n) : std::move(weights)) {
  if (n_ == 0) throw InputError("DoublyStochasticMatrix: empty state space");
  if (a_.size() != n_ * n_) throw InputError("DoublyStochasticMatrix: need n*n entries");
  if (w_.size() != n_) throw InputError("DoublyStochasticMatrix: need one weight per state");
  for (std::size_t i = 0; i < n_; ++i)
    if (!(w_[i] > 0.0) || !std::isfinite(w_[i]))
      throw InputError("DoublyStochasticMatrix: weights must be positive", i);
  for (std::size_t k = 0; k < a_.size(); ++k)
    if (!(a_[k] >= 0.0) || !std::isfinite(a_[k]))
      throw InputError("DoublyStochasticMatrix: entries must be finite and nonnegative", k / n_);
  if (stochastic_defect() > kStochasticTol)
    throw InputError("DoublyStochasticMatrix: row or weighted column sums differ from 1");
}

DoublyStochasticMatrix DoublyStochasticMatrix::from_rows(
    const std::vector<std::vector<double>>& rows, std::vector<double> weights) {
  const std::size_t n = rows.size();
  std::vector<double> flat;
  flat.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i].size() != n) throw InputError("DoublyStochasticMatrix: matrix is not square", i);
    flat.insert(flat.end(), rows[i].begin(), rows[i].end());
  }
  return DoublyStochasticMatrix(n, std::move(flat), std::move(weights));
}

DoublyStochasticMatrix DoublyStochasticMatrix::identity(std::size_t n) {
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) a[i * n + i] = 1.0;
  return DoublyStochasticMatrix(n, std::move(a));
}

DoublyStochasticMatrix DoublyStochasticMatrix::permutation(std::span<const std::size_t> perm) {
  const std::size_t n = perm.size();
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (perm[i] >= n) throw InputError("permutation: index out of range", i);
    a[i * n + perm[i]] = 1.0;
  }
  return DoublyStochasticMatrix(n, std::move(a));
}

AtomicMeasureSpace DoublyStochasticMatrix::space() const {
  return AtomicMeasureSpace::with_weights(w_);
}

DoublyStochasticMatrix DoublyStochasticMatrix::adjoint() const {
  std::vector<double> b(n_ * n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) b[i * n_ + j] = w_[j] * a_[j * n_ + i] / w_[i];
  return DoublyStochasticMatrix(Unchecked{}, n_, std::move(b), w_);
}

DoublyStochasticMatrix DoublyStochasticMatrix::compose(const DoublyStochasticMatrix& other) const {
  if (other.n_ != n_) throw InputError("compose: sizes differ");
  std::vector<double> c(n_ * n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t k = 0; k < n_; ++k) {
      const double aik = a_[i * n_ + k];
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < n_; ++j) c[i * n_ + j] += aik * other.a_[k * n_ + j];
    }
  return DoublyStochasticMatrix(Unchecked{}, n_, std::move(c), w_);
}

std::vector<double> DoublyStochasticMatrix::apply(std::span<const double> g, std::size_t m) const {
  if (g.size() != n_ * m) throw InputError("apply: size mismatch");
  std::vector<double> out(n_ * m, 0.0);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) {
      const double a = a_[i * n_ + j];
      if (a == 0.0) continue;
      for (std::size_t k = 0; k < m; ++k) out[i * m + k] += a * g[j * m + k];
    }
  return out;
}

double DoublyStochasticMatrix::stochastic_defect() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double row = 0.0, col = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      row += a_[i * n_ + j];
      col += w_[j] * a_[j * n_ + i];
    }
    worst = std::max({worst, std::abs(row - 1.0), std::abs(col / w_[i] - 1.0)});
  }
  return worst;
}

DsMethod parse_ds_method(const std::string& s) {
  if (s == "birkhoff") return DsMethod::birkhoff;
  if (s == "sinkhorn") return DsMethod::sinkhorn;
  throw InputError("unknown doubly stochastic method: " + s);
}

const char* to_string(DsMethod m) { return m == DsMethod::birkhoff ? "birkhoff" : "sinkhorn"; }

DoublyStochasticMatrix sinkhorn(std::size_t n, std::vector<double> a, double tol, int max_iter) {
  if (n == 0 || a.size() != n * n) throw InputError("sinkhorn: need an n x n matrix");
  for (std::size_t k = 0; k < a.size(); ++k)
    if (!(a[k] >= 0.0) || !std::isfinite(a[k]))
      throw InputError("sinkhorn: entries must be finite and nonnegative", k / n);
  for (int it = 0; it < max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += a[i * n + j];
      if (!(s > 0.0)) throw ConvergenceError("sinkhorn: zero row");
      for (std::size_t j = 0; j < n; ++j) a[i * n + j] /= s;
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += a[i * n + j];
      if (!(s > 0.0)) throw ConvergenceError("sinkhorn: zero column");
      for (std::size_t i = 0; i < n; ++i) a[i * n + j] /= s;
    }
    // columns are exact now; stop once rows are too
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j) s += a[i * n + j];
      worst = std::max(worst, std::abs(s - 1.0));
    }
    if (worst <= tol) {
      // keep sweeping while the residual still shrinks: products of many
      // factors amplify it
      for (int extra = 0; extra < 200 && worst > 1e-15; ++extra) {
        std::vector<double> b = a;
        for (std::size_t i = 0; i < n; ++i) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += b[i * n + j];
          for (std::size_t j = 0; j < n; ++j) b[i * n + j] /= s;
        }
        for (std::size_t j = 0; j < n; ++j) {
          double s = 0.0;
          for (std::size_t i = 0; i < n; ++i) s += b[i * n + j];
          for (std::size_t i = 0; i < n; ++i) b[i * n + j] /= s;
        }
        double w = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += b[i * n + j];
          w = std::max(w, std::abs(s - 1.0));
        }
        if (!(w < worst)) break;
        worst = w;
        a = std::move(b);
      }
      return DoublyStochasticMatrix(n, std::move(a));
    }
  }
  throw ConvergenceError("sinkhorn: no convergence within " + std::to_string(max_iter) +
                         " iterations");
}

DoublyStochasticMatrix random_doubly_stochastic(std::size_t n, DsMethod method,
                                                std::mt19937_64& rng, std::size_t components) {
  if (n == 0) throw DomainError("random_doubly_stochastic: n must be positive");
  if (method == DsMethod::sinkhorn) {
    std::uniform_real_distribution<double> u(0.01, 1.0);
    std::vector<double> a(n * n);
    for (auto& v : a) v = u(rng);
    return sinkhorn(n, std::move(a));
  }
  const std::size_t k =
      components == 0 ? std::uniform_int_distribution<std::size_t>(1, n)(rng) : components;
  if (k > n) throw DomainError("random_doubly_stochastic: at most n permutations");
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> c(k);
  for (auto& v : c) v = ex(rng);
  const double total = std::accumulate(c.begin(), c.end(), 0.0);
  std::vector<double> a(n * n, 0.0);
  std::vector<std::size_t> perm(n);
  for (std::size_t r = 0; r < k; ++r) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < n; ++i) a[i * n + perm[i]] += c[r] / total;
  }
  return DoublyStochasticMatrix(n, std::move(a));
}

SampledProcess semigroup_orbit(const DoublyStochasticMatrix& Q,
                               const std::vector<std::vector<double>>& f, BNorm norm,
                               std::size_t N) {
  const std::size_t n = Q.size(), m = norm.dimension();
  if (f.size() != n) throw InputError("semigroup_orbit: need one value per state");
  std::vector<double> flat;
  flat.reserve(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    if (f[i].size() != m) throw InputError("semigroup_orbit: value has the wrong dimension", i);
    flat.insert(flat.end(), f[i].begin(), f[i].end());
  }
  const DoublyStochasticMatrix Qs = Q.adjoint();
  std::vector<std::vector<double>> rows(n, std::vector<double>((N + 1) * m));
  DoublyStochasticMatrix P(n, DoublyStochasticMatrix::identity(n).entries(), Q.weights());
  for (std::size_t k = 0; k <= N; ++k) {
    const auto g = k == 0 ? flat : P.apply(flat, m);
    for (std::size_t i = 0; i < n; ++i)
      std::copy_n(g.begin() + static_cast<std::ptrdiff_t>(i * m), m,
                  rows[i].begin() + static_cast<std::ptrdiff_t>(k * m));
    if (k < N) P = Qs.compose(P.compose(Q));
  }
  std::vector<double> labels(N + 1);
  std::iota(labels.begin(), labels.end(), 0.0);
  std::vector<TimeSeries> series;
  series.reserve(n);
  for (auto& r : rows) series.emplace_back(labels, std::move(r), norm);
  return SampledProcess(Q.space(), std::move(series));
}

SampledProcess semigroup_orbit(const DoublyStochasticMatrix& Q, std::span<const double> f,
                               std::size_t N) {
  std::vector<std::vector<double>> rows;
  rows.reserve(f.size());
  for (double v : f) rows.push_back({v});
  return semigroup_orbit(Q, rows, BNorm(1, 2.0), N);
}

SampledProcess orbit_prefix(const SampledProcess& orbit, std::size_t N) {
  if (N >= orbit.indices()) throw InputError("orbit_prefix: horizon beyond the orbit");
  std::vector<std::size_t> keep(N + 1);
  std::iota(keep.begin(), keep.end(), 0);
  std::vector<TimeSeries> series;
  series.reserve(orbit.atoms());
  for (const auto& s : orbit.all_series()) series.push_back(s.restrict_to(keep));
  return SampledProcess(orbit.space(), std::move(series));
}

std::vector<Check> contractivity_checks(const DoublyStochasticMatrix& Q,
                                        std::span<const double> g) {
  const auto space = Q.space();
  const double tol = kContractTol + 4.0 * Q.stochastic_defect();
  const auto qg = Q.apply(g);
  const auto qsg = Q.adjoint().apply(g);
  std::vector<Check> out;
  for (double p : {1.0, 2.0, kInf}) {
    const double base = lp_norm(g, space, p);
    for (int adj = 0; adj < 2; ++adj) {
      Check c;
      c.name = adj ? "contractivity:adjoint" : "contractivity";
      c.lhs = lp_norm(adj ? qsg : qg, space, p);
      c.rhs = base;
      c.ratio = safe_ratio(c.lhs, c.rhs);
      c.holds = c.lhs <= c.rhs * (1.0 + tol);
      c.params = {{"p", p}};
      out.push_back(c);
    }
  }
  std::vector<double> absg(g.begin(), g.end());
  for (auto& v : absg) v = std::abs(v);
  const auto qa = Q.apply(absg);
  Check pos;
  pos.name = "positivity";
  pos.lhs = -*std::min_element(qa.begin(), qa.end());
  pos.rhs = 0.0;
  pos.ratio = 0.0;
  pos.holds = pos.lhs <= 0.0;
  out.push_back(pos);
  return out;
}

std::vector<Check> orbit_contraction_checks(const SampledProcess& orbit, double tol) {
  std::vector<Check> out;
  std::vector<double> g(orbit.atoms());
  for (double p : {1.0, 2.0, kInf}) {
    std::vector<double> norms;
    for (std::size_t n = 0; n < orbit.indices(); ++n) {
      for (std::size_t x = 0; x < orbit.atoms(); ++x) {
        const auto& s = orbit.series(x);
        g[x] = s.norm()(s.value(n));
      }
      norms.push_back(lp_norm(g, orbit.space(), p));
    }
    Check c;
    c.name = "orbit_contractive";
    c.params = {{"p", p}};
    c.rhs = norms.front();
    std::size_t at = 0;
    for (std::size_t n = 0; n < norms.size(); ++n)
      if (norms[n] > c.lhs || n == 0) {
        c.lhs = norms[n];
        at = n;
      }
    c.ratio = safe_ratio(c.lhs, c.rhs);
    c.holds = c.lhs <= c.rhs * (1.0 + tol);
    c.witness = {{"n", at}};
    out.push_back(c);

    // recorded only: the orbit norm need not decrease step by step
    Check step;
    step.name = "orbit_stepwise";
    step.params = {{"p", p}};
    std::size_t increases = 0;
    for (std::size_t n = 1; n < norms.size(); ++n) {
      const double r = safe_ratio(norms[n], norms[n - 1]);
      if (norms[n] > norms[n - 1] * (1.0 + tol)) ++increases;
      if (n == 1 || r > step.ratio) {
        step.ratio = r;
        step.lhs = norms[n];
        step.rhs = norms[n - 1];
        step.witness = {{"n", n}};
      }
    }
    step.witness["increases"] = increases;
    step.holds = true;
    out.push_back(step);
  }
  return out;
}

json MarkovReport::summary() const {
  json h = json::array();
  for (const auto& r : by_horizon) h.push_back({{"N", r.N}, {"J", r.J}, {"ratio", r.ratio}});
  return {{"J", J}, {"norm_f", norm_f}, {"ratio", ratio}, {"by_horizon", h}};
}

MarkovReport verify_markov_jump(const DoublyStochasticMatrix& Q,
                                const std::vector<std::vector<double>>& f, BNorm norm,
                                double p, double rho, std::size_t N) {
  if (!(p > 1.0) || std::isinf(p)) throw DomainError("verify_markov_jump: p must lie in (1, inf)");
  if (!(rho >= 2.0) || std::isinf(rho))
    throw DomainError("verify_markov_jump: rho must lie in [2, inf)");
  const SampledProcess orbit = semigroup_orbit(Q, f, norm, N);
  MarkovReport r;
  std::vector<double> fn(Q.size());
  for (std::size_t i = 0; i < Q.size(); ++i) fn[i] = norm(f[i]);
  r.norm_f = lp_norm(fn, Q.space(), p);
  for (std::size_t h = N; h >= 1; h /= 2) {
    const double J = jump_seminorm(h == N ? orbit : orbit_prefix(orbit, h), p, p, rho).value;
    r.by_horizon.push_back({h, J, safe_ratio(J, r.norm_f)});
  }
  if (r.by_horizon.empty()) r.by_horizon.push_back({0, 0.0, 0.0});
  r.J = r.by_horizon.front().J;
  r.ratio = r.by_horizon.front().ratio;

  Check c;
  c.name = "markov:J/|f|";
  c.lhs = r.J;
  c.rhs = r.norm_f;
  c.ratio = r.ratio;
  c.holds = std::isfinite(r.ratio);
  c.params = {{"p", p}, {"rho", rho}, {"n", Q.size()}, {"N", N}};
  r.checks.push_back(c);
  for (auto& m : orbit_contraction_checks(orbit, kContractTol + 8.0 * static_cast<double>(N + 1) * Q.stochastic_defect())) r.checks.push_back(std::move(m));
  for (std::size_t k = 0; k < norm.dimension(); ++k) {
    std::vector<double> g(Q.size());
    for (std::size_t i = 0; i < Q.size(); ++i) g[i] = f[i][k];
    for (auto& m : contractivity_checks(Q, g)) r.checks.push_back(std::move(m));
  }
  return r;
}

}  // namespace jumpinterp
