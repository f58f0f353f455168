#include "jumpinterp/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "jumpinterp/error.hpp"

namespace jumpinterp {

AtomicMeasureSpace::AtomicMeasureSpace(std::vector<std::string> ids,
                                       std::vector<double> weights)
    : ids_(std::move(ids)), weights_(std::move(weights)) {
  if (ids_.size() != weights_.size()) {
    throw InputError("AtomicMeasureSpace: ids and weights differ in length");
  }
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
      throw InputError("AtomicMeasureSpace: atom weights must be positive and finite", i);
    }
  }
}

AtomicMeasureSpace AtomicMeasureSpace::uniform(std::size_t n, double weight) {
  return with_weights(std::vector<double>(n, weight));
}

AtomicMeasureSpace AtomicMeasureSpace::with_weights(std::vector<double> weights) {
  std::vector<std::string> ids(weights.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = std::to_string(i);
  return AtomicMeasureSpace(std::move(ids), std::move(weights));
}

double AtomicMeasureSpace::total_mass() const {
  return std::accumulate(weights_.begin(), weights_.end(), 0.0);
}

AtomicMeasureSpace AtomicMeasureSpace::restrict_to(std::span<const std::size_t> atoms) const {
  std::vector<std::string> ids;
  std::vector<double> w;
  for (std::size_t a : atoms) {
    ids.push_back(ids_.at(a));
    w.push_back(weights_.at(a));
  }
  return AtomicMeasureSpace(std::move(ids), std::move(w));
}

SampledProcess::SampledProcess(AtomicMeasureSpace space, std::vector<TimeSeries> series)
    : space_(std::move(space)), series_(std::move(series)) {
  if (series_.size() != space_.size()) {
    throw InputError("SampledProcess: need one series per atom");
  }
  if (series_.empty()) throw InputError("SampledProcess: no atoms");
  if (series_.front().empty()) throw InputError("SampledProcess: empty index set");
  for (std::size_t x = 1; x < series_.size(); ++x) {
    if (series_[x].labels() != series_.front().labels()) {
      throw InputError("SampledProcess: atoms disagree on the index set", x);
    }
    if (!(series_[x].norm() == series_.front().norm())) {
      throw InputError("SampledProcess: atoms disagree on the norm of B", x);
    }
  }
}

SampledProcess SampledProcess::scalar(AtomicMeasureSpace space,
                                      const std::vector<std::vector<double>>& rows) {
  std::vector<TimeSeries> series;
  series.reserve(rows.size());
  for (const auto& r : rows) series.push_back(TimeSeries::scalar(r));
  return SampledProcess(std::move(space), std::move(series));
}

SampledProcess SampledProcess::restrict_atoms(std::span<const std::size_t> atoms) const {
  std::vector<TimeSeries> s;
  for (std::size_t a : atoms) s.push_back(series_.at(a));
  return SampledProcess(space_.restrict_to(atoms), std::move(s));
}

SampledProcess SampledProcess::scaled(double c) const {
  std::vector<TimeSeries> s;
  for (const auto& ts : series_) {
    auto v = ts.flat_values();
    for (double& e : v) e *= c;
    s.push_back(ts.with_values(std::move(v)));
  }
  return SampledProcess(space_, std::move(s));
}

namespace {

SampledProcess combine(const SampledProcess& a, const SampledProcess& b, double sign) {
  if (a.atoms() != b.atoms() || a.labels() != b.labels() ||
      a.dimension() != b.dimension()) {
    throw InputError("SampledProcess: shapes differ");
  }
  std::vector<TimeSeries> s;
  for (std::size_t x = 0; x < a.atoms(); ++x) {
    auto v = a.series(x).flat_values();
    const auto& w = b.series(x).flat_values();
    for (std::size_t k = 0; k < v.size(); ++k) v[k] += sign * w[k];
    s.push_back(a.series(x).with_values(std::move(v)));
  }
  return SampledProcess(a.space(), std::move(s));
}

void check_pq(double p, double q) {
  if (!(p > 0.0) || std::isinf(p)) throw DomainError("Lorentz exponent p must lie in (0, inf)");
  if (!(q > 0.0)) throw DomainError("Lorentz exponent q must lie in (0, inf]");
}

// Lorentz quasinorm of a function whose decreasing rearrangement takes value
// levels[j] (strictly decreasing, positive) on [mass[j-1], mass[j]).
double lorentz_from_levels(std::span<const double> levels, std::span<const double> mass,
                           double p, double q) {
  if (levels.empty()) return 0.0;
  if (std::isinf(q)) {
    double best = 0.0;
    for (std::size_t j = 0; j < levels.size(); ++j) {
      best = std::max(best, levels[j] * std::pow(mass[j], 1.0 / p));
    }
    return best;
  }
  const double e = q / p;
  long double acc = 0.0L;
  double prev = 0.0;
  for (std::size_t j = 0; j < levels.size(); ++j) {
    const double cur = std::pow(mass[j], e);
    acc += static_cast<long double>(std::pow(levels[j], q)) * (cur - prev);
    prev = cur;
  }
  return std::pow(static_cast<double>(acc) * (p / q), 1.0 / q);
}

}  // namespace

SampledProcess SampledProcess::plus(const SampledProcess& other) const {
  return combine(*this, other, 1.0);
}
SampledProcess SampledProcess::minus(const SampledProcess& other) const {
  return combine(*this, other, -1.0);
}

NonnegProcess::NonnegProcess(AtomicMeasureSpace space, std::vector<std::vector<double>> values)
    : space_(std::move(space)), values_(std::move(values)) {
  if (values_.size() != space_.size()) throw InputError("NonnegProcess: need one row per atom");
  for (std::size_t x = 0; x < values_.size(); ++x) {
    for (double v : values_[x]) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw InputError("NonnegProcess: entries must be finite and nonnegative", x);
      }
    }
  }
}

JumpProfile jump_profile(const SampledProcess& f) {
  JumpProfile prof;
  prof.atoms.reserve(f.atoms());
  for (const auto& ts : f.all_series()) prof.atoms.push_back(jump_profile(ts));
  return prof;
}

JumpProfile count_profile(const NonnegProcess& F) {
  JumpProfile prof;
  for (std::size_t x = 0; x < F.atoms(); ++x) {
    std::vector<double> v;
    for (double e : F.row(x)) {
      if (e > 0.0) v.push_back(e);
    }
    std::sort(v.begin(), v.end());
    CountProfile cp;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i > 0 && v[i] == v[i - 1]) continue;
      cp.breakpoints.push_back(v[i]);
      cp.counts.push_back(v.size() - i);
    }
    prof.atoms.push_back(std::move(cp));
  }
  return prof;
}

double lorentz_norm(std::span<const double> g, const AtomicMeasureSpace& space, double p,
                    double q) {
  check_pq(p, q);
  if (g.size() != space.size()) throw InputError("lorentz_norm: size mismatch");
  std::vector<std::size_t> order(g.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return std::abs(g[a]) > std::abs(g[b]); });
  std::vector<double> levels, mass;
  double m = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double v = std::abs(g[order[k]]);
    if (v == 0.0) break;
    m += space.weight(order[k]);
    if (!levels.empty() && levels.back() == v) {
      mass.back() = m;
    } else {
      levels.push_back(v);
      mass.push_back(m);
    }
  }
  return lorentz_from_levels(levels, mass, p, q);
}

double weak_norm_by_levels(std::span<const double> g, const AtomicMeasureSpace& space,
                           double p) {
  check_pq(p, kInf);
  if (g.size() != space.size()) throw InputError("weak_norm_by_levels: size mismatch");
  // For lambda just below a value v the superlevel set {|g| > lambda} is
  // {|g| >= v}; between values the product lambda * m(...)^{1/p} increases.
  double best = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double v = std::abs(g[i]);
    if (v == 0.0) continue;
    double m = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (std::abs(g[j]) >= v) m += space.weight(j);
    }
    best = std::max(best, v * std::pow(m, 1.0 / p));
  }
  return best;
}

double lp_norm(std::span<const double> g, const AtomicMeasureSpace& space, double p) {
  if (g.size() != space.size()) throw InputError("lp_norm: size mismatch");
  if (!(p > 0.0)) throw DomainError("lp_norm: p must be positive");
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : g) m = std::max(m, std::abs(v));
    return m;
  }
  long double acc = 0.0L;
  for (std::size_t i = 0; i < g.size(); ++i) {
    acc += static_cast<long double>(std::pow(std::abs(g[i]), p)) * space.weight(i);
  }
  return std::pow(static_cast<double>(acc), 1.0 / p);
}

JumpSeminorm profile_seminorm(const JumpProfile& profile, const AtomicMeasureSpace& space,
                              double p, double q, double rho) {
  check_pq(p, q);
  if (!(rho > 0.0) || std::isinf(rho)) throw DomainError("jump seminorm: rho must lie in (0, inf)");
  if (profile.atoms.size() != space.size()) throw InputError("jump seminorm: size mismatch");

  struct Event {
    double lambda;
    std::size_t atom;
    std::size_t count;
  };
  std::vector<Event> events;
  std::size_t max_count = 0;
  for (std::size_t x = 0; x < profile.atoms.size(); ++x) {
    const auto& cp = profile.atoms[x];
    for (std::size_t k = 0; k < cp.breakpoints.size(); ++k) {
      events.push_back({cp.breakpoints[k], x, cp.counts[k]});
      max_count = std::max(max_count, cp.counts[k]);
    }
  }
  JumpSeminorm out;
  if (events.empty()) return out;
  std::sort(events.begin(), events.end(),
            [](const Event& a, const Event& b) { return a.lambda > b.lambda; });

  // Sweep lambda downwards. On (b_next, b] every N_lambda(x) is constant, so
  // lambda * (const) is maximised at the right endpoint b.
  std::vector<std::size_t> current(space.size(), 0);
  std::vector<long double> hist_mass(max_count + 1, 0.0L);
  std::vector<std::size_t> hist_atoms(max_count + 1, 0);
  hist_atoms[0] = space.size();
  std::vector<double> powers(max_count + 1);
  for (std::size_t c = 0; c <= max_count; ++c) {
    powers[c] = std::pow(static_cast<double>(c), 1.0 / rho);
  }
  std::vector<double> levels, mass;
  levels.reserve(max_count);
  mass.reserve(max_count);

  std::size_t e = 0;
  while (e < events.size()) {
    const double lambda = events[e].lambda;
    for (; e < events.size() && events[e].lambda == lambda; ++e) {
      const auto& ev = events[e];
      const std::size_t old = current[ev.atom];
      const double w = space.weight(ev.atom);
      hist_mass[old] -= w;
      --hist_atoms[old];
      hist_mass[ev.count] += w;
      ++hist_atoms[ev.count];
      current[ev.atom] = ev.count;
    }
    levels.clear();
    mass.clear();
    long double cum = 0.0L;
    for (std::size_t c = max_count; c >= 1; --c) {
      if (hist_atoms[c] == 0) continue;
      cum += hist_mass[c];
      levels.push_back(lambda * powers[c]);
      mass.push_back(static_cast<double>(cum));
    }
    const double val = lorentz_from_levels(levels, mass, p, q);
    if (val > out.value) {
      out.value = val;
      out.argmax_lambda = lambda;
    }
  }
  return out;
}

JumpSeminorm jump_seminorm(const SampledProcess& f, double p, double q, double rho) {
  if (!(rho > 1.0) || std::isinf(rho)) throw DomainError("jump_seminorm: rho must lie in (1, inf)");
  return profile_seminorm(jump_profile(f), f.space(), p, q, rho);
}

JumpSeminorm nonneg_jump_seminorm(const NonnegProcess& F, double p, double q, double rho) {
  return profile_seminorm(count_profile(F), F.space(), p, q, rho);
}

std::vector<double> atom_variations(const SampledProcess& f, double r) {
  std::vector<double> out;
  out.reserve(f.atoms());
  for (const auto& ts : f.all_series()) out.push_back(variation(ts, r).value);
  return out;
}

std::vector<double> atom_sequence_norms(const NonnegProcess& F, double r) {
  std::vector<double> out;
  for (std::size_t x = 0; x < F.atoms(); ++x) {
    const auto& row = F.row(x);
    if (std::isinf(r)) {
      double m = 0.0;
      for (double v : row) m = std::max(m, v);
      out.push_back(m);
    } else {
      double acc = 0.0;
      for (double v : row) acc += std::pow(v, r);
      out.push_back(std::pow(acc, 1.0 / r));
    }
  }
  return out;
}

NonnegProcess difference_process(const SampledProcess& f, double r) {
  std::vector<std::vector<double>> rows;
  for (const auto& ts : f.all_series()) {
    const DistanceMatrix d(ts);
    const auto chain = variation(d, r).witness;
    std::vector<double> row;
    for (std::size_t j = 1; j < chain.size(); ++j) row.push_back(d(chain[j - 1], chain[j]));
    rows.push_back(std::move(row));
  }
  return NonnegProcess(f.space(), std::move(rows));
}

Check check_l1inf_logconvex(const std::vector<std::vector<double>>& g,
                            const std::vector<double>& a, const AtomicMeasureSpace& space) {
  if (g.size() != a.size() || g.empty()) {
    throw InputError("check_l1inf_logconvex: need one bound a_j per function g_j");
  }
  std::vector<double> sum(space.size(), 0.0);
  double a_total = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (!(a[j] > 0.0)) throw InputError("check_l1inf_logconvex: a_j must be positive", j);
    const double nj = lorentz_norm(g[j], space, 1.0, kInf);
    if (nj > a[j]) {
      throw InputError("check_l1inf_logconvex: ||g_j||_{L^{1,inf}} exceeds a_j", j);
    }
    for (std::size_t x = 0; x < space.size(); ++x) sum[x] += g[j][x];
    a_total += a[j];
  }
  Check c;
  c.name = "l1inf_logconvex";
  c.lhs = lorentz_norm(sum, space, 1.0, kInf);
  for (double aj : a) c.rhs += aj * (std::log(a_total / aj) + 2.0);
  c.rhs *= 2.0;
  c.ratio = safe_ratio(c.lhs, c.rhs);
  c.holds = c.lhs <= c.rhs;
  c.params = {{"summands", g.size()}, {"atoms", space.size()}};
  return c;
}

Check check_lpinf_pconvex(const std::vector<std::vector<double>>& g, double p,
                          const AtomicMeasureSpace& space) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("check_lpinf_pconvex: p must lie in (0, 1)");
  if (g.empty()) throw InputError("check_lpinf_pconvex: no summands");
  std::vector<double> sum(space.size(), 0.0);
  double rhs = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (g[j].size() != space.size()) throw InputError("check_lpinf_pconvex: size mismatch", j);
    for (std::size_t x = 0; x < space.size(); ++x) {
      if (!(g[j][x] >= 0.0)) throw InputError("check_lpinf_pconvex: g_j must be nonnegative", j);
      sum[x] += g[j][x];
    }
    rhs += std::pow(lorentz_norm(g[j], space, p, kInf), p);
  }
  const double constant = 1.0 + 2.0 / (1.0 - p);
  Check c;
  c.name = "lpinf_pconvex";
  c.lhs = std::pow(lorentz_norm(sum, space, p, kInf), p);
  c.rhs = rhs;
  c.ratio = safe_ratio(c.lhs, c.rhs);
  c.holds = c.lhs <= constant * c.rhs;
  c.params = {{"p", p}, {"constant", constant}, {"summands", g.size()}};
  return c;
}

namespace {

std::vector<Check> variation_cases(double lhs, const JumpProfile& prof,
                                   const AtomicMeasureSpace& space, double p, double rho,
                                   double r, const char* tag) {
  if (!(rho > 0.0)) throw DomainError("variation_from_jumps_report: rho must be positive");
  if (!(r > rho)) throw DomainError("variation_from_jumps_report: defined for r > rho only");
  const double kappa = std::isinf(r) ? 1.0 : r / (r - rho);
  const json params = {{"p", p}, {"rho", rho}, {"r", std::isinf(r) ? json("inf") : json(r)}};
  auto make = [&](const std::string& which, double coef, double jump) {
    Check c;
    c.name = std::string(tag) + ":" + which;
    c.lhs = lhs;
    c.rhs = coef * jump;
    c.ratio = safe_ratio(c.lhs, c.rhs);
    c.holds = std::isfinite(c.ratio);
    c.params = params;
    c.witness = {{"coefficient", coef}, {"jump_seminorm", jump}};
    return c;
  };
  const double j_weak = profile_seminorm(prof, space, p, kInf, rho).value;
  std::vector<Check> out;
  if (p < rho) {
    out.push_back(make("p<rho", std::pow(kappa, 1.0 / p), j_weak));
  } else if (p == rho) {
    out.push_back(make("p=rho,weak", std::pow(kappa * (1.0 + std::log(kappa)), 1.0 / rho),
                       j_weak));
    const double j_strong = profile_seminorm(prof, space, p, p, rho).value;
    out.push_back(make("p=rho,strong", std::pow(kappa, 1.0 / rho), j_strong));
  } else {
    out.push_back(make("p>rho", std::pow(kappa, 1.0 / rho), j_weak));
  }
  return out;
}

}  // namespace

std::vector<Check> variation_from_jumps_report(const SampledProcess& f, double p,
                                               double rho, double r) {
  if (!(r > rho)) throw DomainError("variation_from_jumps_report: defined for r > rho only");
  const double lhs = lorentz_norm(atom_variations(f, r), f.space(), p, kInf);
  return variation_cases(lhs, jump_profile(f), f.space(), p, rho, r, "variation_from_jumps");
}

std::vector<Check> variation_from_jumps_report(const NonnegProcess& F, double p, double rho,
                                               double r) {
  if (!(r > rho)) throw DomainError("variation_from_jumps_report: defined for r > rho only");
  const double lhs = lorentz_norm(atom_sequence_norms(F, r), F.space(), p, kInf);
  return variation_cases(lhs, count_profile(F), F.space(), p, rho, r, "sequence_from_counts");
}

}  // namespace jumpinterp
