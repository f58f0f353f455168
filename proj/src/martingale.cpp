#include "jumpinterp/martingale.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <utility>

#include "jumpinterp/error.hpp"
#include "jumpinterp/interpolation.hpp"

namespace jumpinterp {

namespace {

constexpr double kExactTol = 1e-12;

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double conjugate(double p) { return std::isinf(p) ? 1.0 : p / (p - 1.0); }

}  // namespace

// ---------------------------------------------------------------------------
// Filtration

std::size_t canonicalize(Partition& p) {
  std::map<std::size_t, std::size_t> relabel;
  for (auto& b : p) {
    auto [it, fresh] = relabel.try_emplace(b, relabel.size());
    b = it->second;
  }
  return relabel.size();
}

Filtration::Filtration(std::vector<Partition> labels) : parts_(std::move(labels)) {
  if (parts_.empty()) throw InputError("Filtration: no partitions");
  const std::size_t n = parts_.front().size();
  if (n == 0) throw InputError("Filtration: no atoms");
  counts_.reserve(parts_.size());
  for (std::size_t t = 0; t < parts_.size(); ++t) {
    if (parts_[t].size() != n) throw InputError("Filtration: partitions differ in size", t);
    counts_.push_back(canonicalize(parts_[t]));
  }
  // each block at t must lie inside one block at t-1
  for (std::size_t t = 1; t < parts_.size(); ++t) {
    std::vector<std::size_t> parent(counts_[t], n);
    for (std::size_t x = 0; x < n; ++x) {
      auto& up = parent[parts_[t][x]];
      if (up == n) up = parts_[t - 1][x];
      else if (up != parts_[t - 1][x])
        throw InputError("Filtration: partition does not refine its predecessor", t);
    }
  }
}

Filtration Filtration::from_blocks(
    std::size_t atoms, const std::vector<std::vector<std::vector<std::size_t>>>& blocks) {
  std::vector<Partition> labels;
  for (std::size_t t = 0; t < blocks.size(); ++t) {
    Partition p(atoms, atoms);
    for (std::size_t b = 0; b < blocks[t].size(); ++b) {
      for (std::size_t x : blocks[t][b]) {
        if (x >= atoms) throw InputError("Filtration: atom index out of range", t);
        if (p[x] != atoms) throw InputError("Filtration: atom listed in two blocks", t);
        p[x] = b;
      }
    }
    if (std::find(p.begin(), p.end(), atoms) != p.end())
      throw InputError("Filtration: blocks do not cover every atom", t);
    labels.push_back(std::move(p));
  }
  return Filtration(std::move(labels));
}

Filtration Filtration::dyadic(std::size_t depth) {
  if (depth > 24) throw DomainError("Filtration::dyadic: depth too large");
  const std::size_t n = std::size_t{1} << depth;
  std::vector<Partition> labels(depth + 1, Partition(n));
  for (std::size_t t = 0; t <= depth; ++t)
    for (std::size_t x = 0; x < n; ++x) labels[t][x] = x >> (depth - t);
  return Filtration(std::move(labels));
}

std::vector<std::vector<std::size_t>> Filtration::block_lists(std::size_t t) const {
  std::vector<std::vector<std::size_t>> out(counts_[t]);
  for (std::size_t x = 0; x < parts_[t].size(); ++x) out[parts_[t][x]].push_back(x);
  return out;
}

std::vector<double> conditional_expectation(std::span<const double> flat, std::size_t m,
                                            const Partition& partition,
                                            const AtomicMeasureSpace& space) {
  const std::size_t n = space.size();
  if (partition.size() != n || flat.size() != n * m)
    throw InputError("conditional_expectation: size mismatch");
  const std::size_t blocks =
      partition.empty() ? 0 : *std::max_element(partition.begin(), partition.end()) + 1;
  std::vector<double> mass(blocks, 0.0), sum(blocks * m, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    const std::size_t b = partition[x];
    mass[b] += space.weight(x);
    for (std::size_t i = 0; i < m; ++i) sum[b * m + i] += space.weight(x) * flat[x * m + i];
  }
  std::vector<double> out(n * m);
  for (std::size_t x = 0; x < n; ++x) {
    const std::size_t b = partition[x];
    for (std::size_t i = 0; i < m; ++i) out[x * m + i] = sum[b * m + i] / mass[b];
  }
  return out;
}

// ---------------------------------------------------------------------------
// FiniteMartingale

FiniteMartingale::FiniteMartingale(Filtration filtration, SampledProcess values)
    : filt_(std::move(filtration)), f_(std::move(values)) {
  if (filt_.atoms() != f_.atoms())
    throw InputError("FiniteMartingale: filtration and values disagree on the atoms");
  if (filt_.steps() != f_.indices())
    throw InputError("FiniteMartingale: filtration and values disagree on the index set");
  const std::size_t m = dimension();
  double scale = 0.0;
  for (const auto& s : f_.all_series()) scale = std::max(scale, max_abs(s.flat_values()));
  const double tol = kExactTol * scale;
  std::vector<double> prev = at(0);
  for (std::size_t t = 0; t < steps(); ++t) {
    std::vector<double> cur = t == 0 ? prev : at(t);
    auto mean = conditional_expectation(cur, m, filt_.partition(t), space());
    if (max_abs_diff(mean, cur) > tol)
      throw InputError("FiniteMartingale: values are not adapted to the filtration", t);
    if (t > 0) {
      auto back = conditional_expectation(cur, m, filt_.partition(t - 1), space());
      if (max_abs_diff(back, prev) > tol)
        throw InputError("FiniteMartingale: E[f_t | G_{t-1}] differs from f_{t-1}", t);
    }
    prev = std::move(cur);
  }
}

std::vector<double> FiniteMartingale::at(std::size_t t) const {
  const std::size_t m = dimension();
  std::vector<double> out(atoms() * m);
  for (std::size_t x = 0; x < atoms(); ++x) {
    auto v = f_.series(x).value(t);
    std::copy(v.begin(), v.end(), out.begin() + static_cast<std::ptrdiff_t>(x * m));
  }
  return out;
}

double FiniteMartingale::tower_defect() const {
  double scale = 0.0, defect = 0.0;
  std::vector<std::vector<double>> vals;
  for (std::size_t t = 0; t < steps(); ++t) {
    vals.push_back(at(t));
    scale = std::max(scale, max_abs(vals.back()));
  }
  for (std::size_t t = 0; t < steps(); ++t)
    for (std::size_t u = t + 1; u < steps(); ++u) {
      auto e = conditional_expectation(vals[u], dimension(), filt_.partition(t), space());
      defect = std::max(defect, max_abs_diff(e, vals[t]));
    }
  return scale > 0.0 ? defect / scale : defect;
}

FiniteMartingale make_martingale(const AtomicMeasureSpace& space, const Filtration& filtration,
                                 const std::vector<std::vector<double>>& terminal, BNorm norm) {
  const std::size_t n = space.size(), m = norm.dimension();
  if (terminal.size() != n) throw InputError("make_martingale: need one terminal value per atom");
  std::vector<double> flat;
  flat.reserve(n * m);
  for (std::size_t x = 0; x < n; ++x) {
    if (terminal[x].size() != m)
      throw InputError("make_martingale: terminal value has the wrong dimension", x);
    flat.insert(flat.end(), terminal[x].begin(), terminal[x].end());
  }
  const std::size_t T = filtration.steps();
  std::vector<std::vector<double>> rows(n, std::vector<double>(T * m));
  for (std::size_t t = 0; t < T; ++t) {
    auto e = conditional_expectation(flat, m, filtration.partition(t), space);
    for (std::size_t x = 0; x < n; ++x)
      std::copy_n(e.begin() + static_cast<std::ptrdiff_t>(x * m), m,
                  rows[x].begin() + static_cast<std::ptrdiff_t>(t * m));
  }
  std::vector<double> labels(T);
  std::iota(labels.begin(), labels.end(), 0.0);
  std::vector<TimeSeries> series;
  series.reserve(n);
  for (auto& r : rows) series.emplace_back(labels, std::move(r), norm);
  return FiniteMartingale(filtration, SampledProcess(space, std::move(series)));
}

// ---------------------------------------------------------------------------
// Square and maximal functions

std::vector<double> square_function(const FiniteMartingale& m, double rho) {
  if (!(rho > 0.0)) throw DomainError("square_function: rho must be positive");
  std::vector<double> out(m.atoms(), 0.0);
  for (std::size_t x = 0; x < m.atoms(); ++x) {
    const auto& s = m.process().series(x);
    double acc = 0.0;
    for (std::size_t t = 1; t < s.size(); ++t) {
      const double d = s.distance(t, t - 1);
      acc = std::isinf(rho) ? std::max(acc, d) : acc + std::pow(d, rho);
    }
    out[x] = std::isinf(rho) ? acc : std::pow(acc, 1.0 / rho);
  }
  return out;
}

std::vector<double> doob_max(const FiniteMartingale& m) {
  std::vector<double> out(m.atoms(), 0.0);
  for (std::size_t x = 0; x < m.atoms(); ++x) {
    const auto& s = m.process().series(x);
    for (std::size_t t = 0; t < s.size(); ++t) out[x] = std::max(out[x], s.norm()(s.value(t)));
  }
  return out;
}

double sup_lp(const FiniteMartingale& m, double p) {
  double best = 0.0;
  std::vector<double> g(m.atoms());
  for (std::size_t t = 0; t < m.steps(); ++t) {
    for (std::size_t x = 0; x < m.atoms(); ++x) {
      const auto& s = m.process().series(x);
      g[x] = s.norm()(s.value(t));
    }
    best = std::max(best, lp_norm(g, m.space(), p));
  }
  return best;
}

Check doob_check(const FiniteMartingale& m, double p) {
  if (!(p > 1.0)) throw DomainError("doob_check: p must lie in (1, inf]");
  Check c;
  c.name = "doob";
  c.lhs = lp_norm(doob_max(m), m.space(), p);
  c.rhs = conjugate(p) * sup_lp(m, p);
  c.ratio = safe_ratio(c.lhs, c.rhs);
  c.holds = c.lhs <= c.rhs * (1.0 + kExactTol);
  c.params = {{"p", p}};
  return c;
}

Check square_max_check(const FiniteMartingale& m, double p, double rho) {
  Check c;
  c.name = "square_max";
  c.lhs = lp_norm(square_function(m, rho), m.space(), p);
  c.rhs = lp_norm(doob_max(m), m.space(), p);
  c.ratio = safe_ratio(c.lhs, c.rhs);
  // A <= 1 is guaranteed for p = rho = 2 in Hilbert space (orthogonal increments)
  const bool hilbert = m.dimension() == 1 || m.process().norm().exponent() == 2.0;
  c.holds = !(hilbert && p == 2.0 && rho == 2.0) || c.lhs <= c.rhs * (1.0 + kExactTol);
  c.params = {{"p", p}, {"rho", rho}};
  return c;
}

// ---------------------------------------------------------------------------
// Stopping times

std::vector<std::vector<std::size_t>> jump_stopping_times(const FiniteMartingale& m,
                                                          double lambda) {
  if (!(lambda > 0.0)) throw DomainError("jump_stopping_times: lambda must be positive");
  std::vector<std::vector<std::size_t>> out(m.atoms());
  for (std::size_t x = 0; x < m.atoms(); ++x)
    out[x] = stopping_positions(DistanceMatrix(m.process().series(x)), lambda);
  return out;
}

std::size_t stopping_time_violations(const FiniteMartingale& m,
                                     const std::vector<std::vector<std::size_t>>& stops) {
  std::size_t levels = 0;
  for (const auto& s : stops) levels = std::max(levels, s.size());
  std::size_t bad = 0;
  for (std::size_t t = 0; t < m.steps(); ++t) {
    const auto& part = m.filtration().partition(t);
    for (std::size_t k = 0; k < levels; ++k) {
      // 0 = unseen, 1 = not stopped, 2 = stopped
      std::vector<int> seen(m.filtration().blocks(t), 0);
      bool ok = true;
      for (std::size_t x = 0; x < m.atoms() && ok; ++x) {
        const int v = (k < stops[x].size() && stops[x][k] <= t) ? 2 : 1;
        int& s = seen[part[x]];
        if (s == 0) s = v;
        else if (s != v) ok = false;
      }
      if (!ok) ++bad;
    }
  }
  return bad;
}

StoppedMartingale stop_at_jumps(const FiniteMartingale& m, double lambda) {
  StoppedMartingale s;
  s.lambda = lambda;
  s.stops = jump_stopping_times(m, lambda);
  s.m = m.dimension();
  std::size_t longest = 0;
  for (const auto& st : s.stops) longest = std::max(longest, st.size());
  s.levels = longest + 1;  // one extra level lets the standard version reach f_T
  const std::size_t n = m.atoms(), dim = s.m, T = m.steps() - 1;
  s.frozen.assign(s.levels, std::vector<double>(n * dim));
  s.standard.assign(s.levels, std::vector<double>(n * dim));
  s.sigma.assign(s.levels, Partition(n));
  for (std::size_t k = 0; k < s.levels; ++k) {
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> blocks;
    for (std::size_t x = 0; x < n; ++x) {
      const auto& st = s.stops[x];
      const std::size_t frozen = k < st.size() ? st[k] : st.back();
      const std::size_t capped = k < st.size() ? st[k] : T;
      const auto& ser = m.process().series(x);
      auto a = ser.value(frozen), b = ser.value(capped);
      std::copy(a.begin(), a.end(), s.frozen[k].begin() + static_cast<std::ptrdiff_t>(x * dim));
      std::copy(b.begin(), b.end(), s.standard[k].begin() + static_cast<std::ptrdiff_t>(x * dim));
      auto key = std::make_pair(capped, m.filtration().partition(capped)[x]);
      s.sigma[k][x] = blocks.try_emplace(key, blocks.size()).first->second;
    }
  }
  return s;
}

StoppedDefects stopped_martingale_defects(const FiniteMartingale& m, const StoppedMartingale& s) {
  StoppedDefects d;
  double scale = 0.0;
  for (const auto& v : s.standard) scale = std::max(scale, max_abs(v));
  for (const auto& v : s.frozen) scale = std::max(scale, max_abs(v));
  for (std::size_t k = 1; k < s.levels; ++k) {
    auto ep = conditional_expectation(s.frozen[k], s.m, s.sigma[k - 1], m.space());
    auto es = conditional_expectation(s.standard[k], s.m, s.sigma[k - 1], m.space());
    d.frozen = std::max(d.frozen, max_abs_diff(ep, s.frozen[k - 1]));
    d.standard = std::max(d.standard, max_abs_diff(es, s.standard[k - 1]));
  }
  if (scale > 0.0) {
    d.frozen /= scale;
    d.standard /= scale;
  }
  return d;
}

std::vector<double> stopped_square_function(const StoppedMartingale& s, bool frozen, double rho,
                                            const BNorm& norm) {
  const auto& g = frozen ? s.frozen : s.standard;
  const std::size_t n = g.empty() ? 0 : g.front().size() / s.m;
  std::vector<double> out(n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    double acc = 0.0;
    for (std::size_t k = 1; k < s.levels; ++k) {
      std::span<const double> a(g[k].data() + x * s.m, s.m), b(g[k - 1].data() + x * s.m, s.m);
      acc += std::pow(norm.distance(a, b), rho);
    }
    out[x] = std::pow(acc, 1.0 / rho);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Splitting and certificates

namespace {

struct AtomCert {
  double f0_sup = 0.0;   // max_t ||f0_t||
  double v1 = 0.0;       // V^1(f1)
  double s_pow = 0.0;    // S_rho(f~)^rho
};

AtomCert atom_certificate(const TimeSeries& ts, const DistanceMatrix& d,
                          const std::vector<std::size_t>& stops, double rho) {
  AtomCert c;
  std::size_t k = 0;
  for (std::size_t t = 0; t < d.size(); ++t) {
    while (k + 1 < stops.size() && stops[k + 1] <= t) ++k;
    c.f0_sup = std::max(c.f0_sup, d(t, stops[k]));
  }
  // f1 takes the values f(t_0), f(t_1), ... with repeats, which V^1 ignores
  c.v1 = variation(ts.restrict_to(stops), 1.0).value;
  for (std::size_t j = 1; j < stops.size(); ++j) c.s_pow += std::pow(d(stops[j], stops[j - 1]), rho);
  return c;
}

bool variation_cert_holds(double v1, double bound) {
  return v1 <= bound + kExactTol * std::max(bound, v1);
}

}  // namespace

LepingleSplit lepingle_split(const FiniteMartingale& m, double lambda, double rho) {
  if (!(lambda > 0.0)) throw DomainError("lepingle_split: lambda must be positive");
  if (!(rho >= 1.0) || std::isinf(rho)) throw DomainError("lepingle_split: rho must lie in [1, inf)");
  StoppedMartingale st = stop_at_jumps(m, lambda);
  const std::size_t n = m.atoms(), dim = m.dimension();
  std::vector<TimeSeries> one;
  one.reserve(n);
  double worst_sup = 0.0, worst_ratio = 0.0, worst_v1 = 0.0, worst_bound = 0.0;
  std::size_t worst_atom = 0, bad = 0;
  bool sup_ok = true;
  for (std::size_t x = 0; x < n; ++x) {
    const auto& ts = m.process().series(x);
    const auto& stops = st.stops[x];
    std::vector<double> flat(ts.size() * dim);
    std::size_t k = 0;
    for (std::size_t t = 0; t < ts.size(); ++t) {
      while (k + 1 < stops.size() && stops[k + 1] <= t) ++k;
      auto v = ts.value(stops[k]);
      std::copy(v.begin(), v.end(), flat.begin() + static_cast<std::ptrdiff_t>(t * dim));
    }
    one.push_back(ts.with_values(std::move(flat)));
    DistanceMatrix d(ts);
    AtomCert c = atom_certificate(ts, d, stops, rho);
    worst_sup = std::max(worst_sup, c.f0_sup);
    if (c.f0_sup > lambda * (1.0 + kExactTol)) sup_ok = false;
    const double bound = std::pow(lambda, 1.0 - rho) * c.s_pow;
    if (!variation_cert_holds(c.v1, bound)) ++bad;
    const double r = safe_ratio(c.v1, bound);
    if (x == 0 || r > worst_ratio) {
      worst_ratio = r;
      worst_v1 = c.v1;
      worst_bound = bound;
      worst_atom = x;
    }
  }
  SampledProcess f1(m.space(), std::move(one));
  SampledProcess f0 = m.process().minus(f1);

  LepingleSplit out{std::move(f0), std::move(f1), std::move(st), {}, {}};
  out.cert_sup.name = "lepingle_split:f0<=lambda";
  out.cert_sup.lhs = worst_sup;
  out.cert_sup.rhs = lambda;
  out.cert_sup.ratio = safe_ratio(worst_sup, lambda);
  out.cert_sup.holds = sup_ok;
  out.cert_sup.params = {{"lambda", lambda}, {"rho", rho}};
  out.cert_variation.name = "lepingle_split:V1<=S";
  out.cert_variation.lhs = worst_v1;
  out.cert_variation.rhs = worst_bound;
  out.cert_variation.ratio = worst_ratio;
  out.cert_variation.holds = bad == 0;
  out.cert_variation.params = {{"lambda", lambda}, {"rho", rho}};
  out.cert_variation.witness = {{"atom", worst_atom}, {"violations", bad}};
  return out;
}

namespace {

// Per atom: own breakpoints and the certificate data at each of them.
struct AtomSweep {
  std::vector<double> lambdas;
  std::vector<AtomCert> certs;
};

std::vector<AtomSweep> sweep_atoms(const FiniteMartingale& m, double rho) {
  std::vector<AtomSweep> out(m.atoms());
  for (std::size_t x = 0; x < m.atoms(); ++x) {
    const auto& ts = m.process().series(x);
    DistanceMatrix d(ts);
    out[x].lambdas = jump_breakpoints(d);
    for (double lam : out[x].lambdas)
      out[x].certs.push_back(atom_certificate(ts, d, stopping_positions(d, lam), rho));
  }
  return out;
}

}  // namespace

std::vector<Check> lepingle_certificates(const FiniteMartingale& m, double rho) {
  if (!(rho >= 1.0) || std::isinf(rho))
    throw DomainError("lepingle_certificates: rho must lie in [1, inf)");
  auto sweeps = sweep_atoms(m, rho);
  Check sup, var;
  sup.name = "lepingle_split:f0<=lambda";
  var.name = "lepingle_split:V1<=S";
  std::size_t bad_sup = 0, bad_var = 0, pairs = 0;
  bool first_sup = true, first_var = true;
  for (std::size_t x = 0; x < sweeps.size(); ++x) {
    for (std::size_t i = 0; i < sweeps[x].lambdas.size(); ++i) {
      const double lam = sweeps[x].lambdas[i];
      const AtomCert& c = sweeps[x].certs[i];
      ++pairs;
      if (c.f0_sup > lam * (1.0 + kExactTol)) ++bad_sup;
      const double rs = safe_ratio(c.f0_sup, lam);
      if (first_sup || rs > sup.ratio) {
        first_sup = false;
        sup.lhs = c.f0_sup;
        sup.rhs = lam;
        sup.ratio = rs;
        sup.witness = {{"atom", x}, {"lambda", lam}};
      }
      const double bound = std::pow(lam, 1.0 - rho) * c.s_pow;
      if (!variation_cert_holds(c.v1, bound)) ++bad_var;
      const double rv = safe_ratio(c.v1, bound);
      if (first_var || rv > var.ratio) {
        first_var = false;
        var.lhs = c.v1;
        var.rhs = bound;
        var.ratio = rv;
        var.witness = {{"atom", x}, {"lambda", lam}};
      }
    }
  }
  sup.holds = bad_sup == 0;
  var.holds = bad_var == 0;
  sup.witness["violations"] = bad_sup;
  var.witness["violations"] = bad_var;
  sup.params = var.params = {{"rho", rho}, {"pairs", pairs}};
  return {sup, var};
}

// ---------------------------------------------------------------------------
// Lepingle verification

json LepingleReport::summary() const {
  json j = {{"J", J}, {"sup", sup}, {"ratio", safe_ratio(J, sup)},
            {"A_emp", A_emp}, {"A_self", A_self}};
  j["middle"] = middle >= 0.0 ? json(middle) : json(nullptr);
  return j;
}

LepingleReport verify_lepingle(const FiniteMartingale& m, double p, double rho,
                               LepingleOptions opt) {
  if (!(p > 1.0) || std::isinf(p)) throw DomainError("verify_lepingle: p must lie in (1, inf)");
  if (!(rho >= 2.0) || std::isinf(rho)) throw DomainError("verify_lepingle: rho must lie in [2, inf)");
  LepingleReport r;
  const json params = {{"p", p}, {"rho", rho}, {"atoms", m.atoms()}, {"steps", m.steps()},
                       {"dimension", m.dimension()}};
  r.J = jump_seminorm(m.process(), p, p, rho).value;
  r.sup = sup_lp(m, p);

  Check ratio;
  ratio.name = "lepingle:J/sup";
  ratio.lhs = r.J;
  ratio.rhs = r.sup;
  ratio.ratio = safe_ratio(r.J, r.sup);
  ratio.holds = std::isfinite(ratio.ratio);
  ratio.params = params;
  r.checks.push_back(ratio);

  if (m.dimension() == 1 && p == 2.0 && rho == 2.0) {
    Check c;
    c.name = "lepingle:J<=3sup";
    c.lhs = r.J;
    c.rhs = 3.0 * r.sup;
    c.ratio = safe_ratio(c.lhs, c.rhs);
    c.holds = c.lhs <= c.rhs * (1.0 + kExactTol);
    c.params = params;
    r.checks.push_back(c);
  }

  // A_emp: largest ||S_rho f~^lambda||_p over lambda, swept over the union of
  // atom breakpoints in decreasing order.
  auto sweeps = sweep_atoms(m, rho);
  struct Event {
    double lambda;
    std::size_t atom;
    double value;  // S_rho(f~)^p at this atom for lambda in (previous, this]
  };
  std::vector<Event> events;
  for (std::size_t x = 0; x < sweeps.size(); ++x)
    for (std::size_t i = 0; i < sweeps[x].lambdas.size(); ++i)
      events.push_back({sweeps[x].lambdas[i], x, std::pow(sweeps[x].certs[i].s_pow, p / rho)});
  std::sort(events.begin(), events.end(),
            [](const Event& a, const Event& b) { return a.lambda > b.lambda; });
  std::vector<double> current(m.atoms(), 0.0);
  long double total = 0.0L;
  double best_s = 0.0, best_lambda = 0.0;
  for (std::size_t i = 0; i < events.size();) {
    const double lam = events[i].lambda;
    for (; i < events.size() && events[i].lambda == lam; ++i) {
      const auto& e = events[i];
      total += static_cast<long double>(m.space().weight(e.atom)) *
               (static_cast<long double>(e.value) - current[e.atom]);
      current[e.atom] = e.value;
    }
    const double s = std::pow(static_cast<double>(std::max(total, 0.0L)), 1.0 / p);
    if (s > best_s) {
      best_s = s;
      best_lambda = lam;
    }
  }
  r.A_emp = r.sup > 0.0 ? best_s / r.sup : 0.0;
  r.A_self = r.sup > 0.0 ? lp_norm(square_function(m, rho), m.space(), p) / r.sup : 0.0;

  if (opt.middle && m.atoms() <= opt.middle_max_atoms) {
    JumpCouple couple{p, p, rho, 1.0 / rho};
    JumpKFunctional K(m.process(), couple, KMode::constructive);
    r.middle = interp_norm(K.as_function(), K.norm0(), K.norm1(), couple.theta, kInf).value;
    Check c;
    c.name = "lepingle:middle<=3A*sup";
    c.lhs = r.middle;
    c.rhs = 3.0 * best_s;
    c.ratio = safe_ratio(c.lhs, c.rhs);
    c.holds = c.lhs <= c.rhs * (1.0 + 1e-9);
    c.params = params;
    c.witness = {{"lambda", best_lambda}, {"A_emp", r.A_emp}};
    r.checks.push_back(c);
  }

  if (opt.weak) {
    Check c;
    c.name = "lepingle:weak";
    c.lhs = jump_seminorm(m.process(), 1.0, kInf, rho).value;
    c.rhs = sup_lp(m, 1.0);
    c.ratio = safe_ratio(c.lhs, c.rhs);
    c.holds = std::isfinite(c.ratio);
    c.params = params;
    r.checks.push_back(c);
  }

  r.checks.push_back(doob_check(m, p));
  r.checks.push_back(square_max_check(m, p, rho));
  r.checks.back().params["A"] = r.checks.back().ratio;
  return r;
}

// ---------------------------------------------------------------------------
// Generators

namespace {

double draw_step(StepLaw law, std::mt19937_64& rng, double amplitude) {
  std::normal_distribution<double> gauss;
  std::bernoulli_distribution coin;
  switch (law) {
    case StepLaw::sign: return coin(rng) ? 1.0 : -1.0;
    case StepLaw::gaussian: return gauss(rng);
    case StepLaw::mixed: return amplitude * gauss(rng);
  }
  return 0.0;
}

}  // namespace

FiniteMartingale dyadic_random_walk(std::size_t depth, BNorm norm, std::mt19937_64& rng,
                                    StepLaw law) {
  if (depth == 0 || depth > 20) throw DomainError("dyadic_random_walk: depth must lie in [1, 20]");
  const std::size_t n = std::size_t{1} << depth, m = norm.dimension(), T = depth + 1;
  std::vector<std::vector<double>> rows(n, std::vector<double>(T * m, 0.0));
  std::uniform_real_distribution<double> logamp(std::log(0.05), std::log(20.0));
  for (std::size_t t = 1; t < T; ++t) {
    // mixed law: one amplitude per step so a few steps dominate
    const double amplitude = std::exp(logamp(rng));
    const std::size_t half = std::size_t{1} << (depth - t);
    for (std::size_t start = 0; start < n; start += 2 * half) {
      std::vector<double> v(m);
      for (auto& c : v) c = draw_step(law, rng, amplitude);
      for (std::size_t x = start; x < start + 2 * half; ++x) {
        const double sign = x < start + half ? 1.0 : -1.0;
        for (std::size_t i = 0; i < m; ++i)
          rows[x][t * m + i] = rows[x][(t - 1) * m + i] + sign * v[i];
      }
    }
  }
  std::vector<double> labels(T);
  std::iota(labels.begin(), labels.end(), 0.0);
  std::vector<TimeSeries> series;
  series.reserve(n);
  for (auto& r : rows) series.emplace_back(labels, std::move(r), norm);
  return FiniteMartingale(Filtration::dyadic(depth),
                          SampledProcess(AtomicMeasureSpace::uniform(n, 1.0 / static_cast<double>(n)),
                                         std::move(series)));
}

FiniteMartingale random_refinement(std::size_t atoms, std::size_t depth, BNorm norm,
                                   std::mt19937_64& rng) {
  if (atoms == 0) throw DomainError("random_refinement: need at least one atom");
  std::uniform_real_distribution<double> wdist(0.2, 1.0);
  std::vector<double> w(atoms);
  for (auto& v : w) v = wdist(rng);
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& v : w) v /= total;
  auto space = AtomicMeasureSpace::with_weights(std::move(w));

  std::vector<Partition> labels{Partition(atoms, 0)};
  std::bernoulli_distribution split(0.75);
  for (std::size_t t = 1; t <= depth; ++t) {
    const Partition& prev = labels.back();
    std::size_t blocks = *std::max_element(prev.begin(), prev.end()) + 1;
    std::vector<std::vector<std::size_t>> members(blocks);
    for (std::size_t x = 0; x < atoms; ++x) members[prev[x]].push_back(x);
    Partition next(atoms);
    std::size_t label = 0;
    for (auto& blk : members) {
      if (blk.size() >= 2 && split(rng)) {
        std::shuffle(blk.begin(), blk.end(), rng);
        const std::size_t parts = std::min<std::size_t>(blk.size(), std::uniform_int_distribution<std::size_t>(2, 3)(rng));
        // parts - 1 distinct cut points in 1..size-1
        std::vector<std::size_t> cuts(blk.size() - 1);
        std::iota(cuts.begin(), cuts.end(), 1);
        std::shuffle(cuts.begin(), cuts.end(), rng);
        cuts.resize(parts - 1);
        std::sort(cuts.begin(), cuts.end());
        std::size_t c = 0;
        for (std::size_t i = 0; i < blk.size(); ++i) {
          if (c < cuts.size() && i == cuts[c]) ++c;
          next[blk[i]] = label + c;
        }
        label += parts;
      } else {
        for (std::size_t x : blk) next[x] = label;
        ++label;
      }
    }
    labels.push_back(std::move(next));
  }
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> logamp(std::log(0.1), std::log(10.0));
  std::vector<std::vector<double>> terminal(atoms, std::vector<double>(norm.dimension()));
  for (auto& v : terminal) {
    const double a = std::exp(logamp(rng));
    for (auto& c : v) c = a * gauss(rng);
  }
  return make_martingale(space, Filtration(std::move(labels)), terminal, norm);
}

FiniteMartingale adversarial_martingale(std::size_t depth, BNorm norm, std::mt19937_64& rng,
                                        const std::function<double(const FiniteMartingale&)>& objective,
                                        int iterations) {
  FiniteMartingale start = dyadic_random_walk(depth, norm, rng, StepLaw::sign);
  const std::size_t n = start.atoms(), m = norm.dimension();
  const Filtration filt = start.filtration();
  std::vector<std::vector<double>> terminal(n);
  for (std::size_t x = 0; x < n; ++x) {
    auto v = start.process().series(x).value(start.steps() - 1);
    terminal[x].assign(v.begin(), v.end());
  }
  FiniteMartingale best = start;
  double best_score = objective(best);
  std::normal_distribution<double> gauss;
  std::uniform_int_distribution<std::size_t> atom(0, n - 1);
  std::uniform_int_distribution<std::size_t> level(0, depth);
  std::bernoulli_distribution single(0.5);
  for (int it = 0; it < iterations; ++it) {
    double scale = 1e-3;
    for (const auto& v : terminal) scale = std::max(scale, max_abs(v));
    auto trial = terminal;
    if (single(rng)) {
      auto& v = trial[atom(rng)];
      for (auto& c : v) c += 0.5 * scale * gauss(rng);
    } else {
      // move a whole dyadic block: few large jumps
      const std::size_t len = std::size_t{1} << level(rng);
      const std::size_t first = (atom(rng) / len) * len;
      std::vector<double> shift(m);
      for (auto& c : shift) c = scale * gauss(rng);
      for (std::size_t x = first; x < first + len; ++x)
        for (std::size_t i = 0; i < m; ++i) trial[x][i] += shift[i];
    }
    FiniteMartingale cand = make_martingale(start.space(), filt, trial, norm);
    const double score = objective(cand);
    if (score > best_score) {
      best_score = score;
      best = std::move(cand);
      terminal = std::move(trial);
    }
  }
  return best;
}

}  // namespace jumpinterp
