#include "jumpinterp/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "jumpinterp/error.hpp"
#include "jumpinterp/rng.hpp"

namespace jumpinterp {

namespace {

constexpr double kPi = std::numbers::pi;

// Reciprocal of a grid spacing that must divide 1.
long reciprocal_spacing(double h, const char* what) {
  if (!(h > 0.0)) throw DomainError(std::string(what) + ": spacing must be positive");
  const double inv = 1.0 / h;
  const long k = std::lround(inv);
  if (k < 1 || std::abs(inv - static_cast<double>(k)) > 1e-9 * inv)
    throw InputError(std::string(what) + ": 1/h must be an integer");
  return k;
}

struct Nodes {
  std::vector<double> x;
  std::vector<double> w;
};

// Gauss-Legendre (20 points per panel) over [breaks.front(), breaks.back()],
// panels aligned with the breaks, `density` panels per unit length (at least
// one per interval). Intervals flagged in `skip` are left out.
Nodes gl_panels(const std::vector<double>& breaks, double density,
                const std::vector<bool>& skip = {}) {
  using GL = boost::math::quadrature::gauss<double, 20>;
  const auto& ab = GL::abscissa();
  const auto& wt = GL::weights();
  std::vector<double> rx, rw;
  for (std::size_t i = 0; i < ab.size(); ++i) {
    rx.push_back(ab[i]);
    rw.push_back(wt[i]);
    if (ab[i] != 0.0) {
      rx.push_back(-ab[i]);
      rw.push_back(wt[i]);
    }
  }
  Nodes out;
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    const double lo = breaks[b], hi = breaks[b + 1];
    if (!(hi > lo) || (!skip.empty() && skip[b])) continue;
    const auto count =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(density * (hi - lo))));
    const double len = (hi - lo) / static_cast<double>(count);
    for (std::size_t c = 0; c < count; ++c) {
      const double mid = lo + (static_cast<double>(c) + 0.5) * len;
      for (std::size_t i = 0; i < rx.size(); ++i) {
        out.x.push_back(mid + 0.5 * len * rx[i]);
        out.w.push_back(0.5 * len * rw[i]);
      }
    }
  }
  return out;
}

std::vector<double> sorted_unique(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end(),
                      [](double a, double b) { return std::abs(a - b) <= 1e-15; }),
          v.end());
  return v;
}

double lp_of(const std::vector<double>& site_norms, double weight, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : site_norms) m = std::max(m, v);
    return m;
  }
  long double s = 0.0L;
  for (double v : site_norms) s += std::pow(static_cast<long double>(v), p);
  return static_cast<double>(std::pow(s * weight, 1.0L / p));
}

}  // namespace

// ---------------------------------------------------------------------------
// Profiles

double psi1(double x) {
  if (x == 0.0) return 1.0;
  const double s = std::sin(kPi * x) / (kPi * x);
  return s * s;
}

double psi(std::span<const double> x) {
  double r = 1.0;
  for (double v : x) r *= psi1(v);
  return r;
}

double psi_hat1(double xi) { return std::max(0.0, 1.0 - std::abs(xi)); }

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  return a / (a + b);
}

double phi_hat1(double xi) {
  const double a = std::abs(xi);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  return 1.0 - smooth_step(a - 1.0);
}

double phi_hat(std::span<const double> xi) {
  double r = 1.0;
  for (double v : xi) r *= phi_hat1(v);
  return r;
}

void KernelSpec::validate() const {
  if (!(radius > 0.0)) throw DomainError("kernel radius must be positive");
  if (!(tolerance > 0.0)) throw DomainError("kernel tolerance must be positive");
  if (phi_nodes < 16 || phi_nodes % 2 != 0)
    throw DomainError("phi_nodes must be an even number >= 16");
  const long inv = reciprocal_spacing(grid_h, "grid_h");
  // Phi has band 2 and E f has band 1: the product must stay below Nyquist.
  if (static_cast<double>(inv) <= 3.0) throw InputError("grid_h must be < 1/3");
}

json KernelSpec::to_json() const {
  return {{"radius", radius},
          {"tolerance", tolerance},
          {"phi_nodes", phi_nodes},
          {"grid_h", grid_h}};
}

// ---------------------------------------------------------------------------
// Phi

namespace {

// Phi(x) = 2 int_0^2 phi_hat1 cos(2 pi x xi) by the trapezoid rule on M panels.
// The integrand vanishes to all orders at xi = 2 and is even at 0, so the
// rule converges spectrally.
double phi_trapezoid(double x, std::size_t M) {
  const double d = 2.0 / static_cast<double>(M);
  long double s = 0.5L;  // phi_hat1(0) = 1, half weight
  for (std::size_t i = 1; i < M; ++i) {
    const double xi = d * static_cast<double>(i);
    const double v = phi_hat1(xi);
    if (v == 0.0) break;
    s += v * std::cos(2.0 * kPi * x * xi);
  }
  return static_cast<double>(2.0L * d * s);
}

}  // namespace

PhiTable::PhiTable(KernelSpec spec) : spec_(spec) {
  spec_.validate();
  const long inv = reciprocal_spacing(spec_.grid_h, "grid_h");
  half_ = static_cast<long>(std::floor(spec_.radius * static_cast<double>(inv) + 1e-9));
  table_.resize(static_cast<std::size_t>(half_) + 1);
  double err = 0.0;
  for (long k = 0; k <= half_; ++k) {
    const double x = static_cast<double>(k) / static_cast<double>(inv);
    const double v = phi_trapezoid(x, spec_.phi_nodes);
    const double c = phi_trapezoid(x, spec_.phi_nodes / 2);
    err = std::max(err, std::abs(v - c));
    table_[static_cast<std::size_t>(k)] = v;
  }
  quad_err_ = err;
  if (quad_err_ > spec_.tolerance) {
    std::ostringstream os;
    os << "Phi quadrature difference " << quad_err_ << " exceeds tolerance "
       << spec_.tolerance << "; use phi_nodes >= " << 2 * spec_.phi_nodes;
    throw ConvergenceError(os.str());
  }
  // Tail mass beyond the radius: h sum_{R < |x| <= 3R} |Phi|.
  long double tail = 0.0L;
  for (long k = half_ + 1; k <= 3 * half_; ++k)
    tail += std::abs(phi_trapezoid(static_cast<double>(k) / static_cast<double>(inv),
                                   spec_.phi_nodes));
  const double tail_mass = static_cast<double>(2.0L * tail) / static_cast<double>(inv);
  if (tail_mass > spec_.tolerance) {
    std::ostringstream os;
    os << "Phi tail mass " << tail_mass << " beyond radius " << spec_.radius
       << " exceeds tolerance " << spec_.tolerance << "; increase the radius";
    throw ConvergenceError(os.str());
  }
}

double PhiTable::at_grid(long k) const {
  const long a = k < 0 ? -k : k;
  if (a > half_) return 0.0;
  return table_[static_cast<std::size_t>(a)];
}

double PhiTable::operator()(double x) const { return phi_trapezoid(x, spec_.phi_nodes); }

// ---------------------------------------------------------------------------
// Sequences and grid functions

ZSequence ZSequence::scalar(long first, std::vector<double> v) {
  ZSequence z;
  z.first = first;
  z.m = 1;
  z.values = std::move(v);
  return z;
}

double ZSequence::at(long n, std::size_t i) const {
  if (n < first || n > last()) return 0.0;
  return values[static_cast<std::size_t>(n - first) * m + i];
}

namespace {

std::vector<double> site_norms(const std::vector<double>& values, std::size_t m) {
  std::vector<double> out(values.size() / m);
  for (std::size_t k = 0; k < out.size(); ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += values[k * m + i] * values[k * m + i];
    out[k] = std::sqrt(s);
  }
  return out;
}

}  // namespace

double ZSequence::lp(double p) const {
  if (!(p > 0.0)) throw DomainError("p must be positive");
  return lp_of(site_norms(values, m), 1.0, p);
}

double GridFunction::at(long k, std::size_t i) const {
  if (k < first || k >= first + static_cast<long>(size())) return 0.0;
  return values[static_cast<std::size_t>(k - first) * m + i];
}

double GridFunction::lp(double p) const {
  if (!(p > 0.0)) throw DomainError("p must be positive");
  return lp_of(site_norms(values, m), h, p);
}

GridFunction extend(const ZSequence& f, const KernelSpec& spec, double window) {
  spec.validate();
  if (f.size() == 0) throw DomainError("extend: empty sequence");
  const long inv = reciprocal_spacing(spec.grid_h, "grid_h");
  GridFunction F;
  F.h = spec.grid_h;
  F.m = f.m;
  F.band = 1.0;
  const long w = static_cast<long>(std::ceil(window * static_cast<double>(inv)));
  F.first = f.first * inv - w;
  const long last = f.last() * inv + w;
  const auto count = static_cast<std::size_t>(last - F.first + 1);
  F.values.assign(count * f.m, 0.0);
  for (std::size_t k = 0; k < count; ++k) {
    const double x = F.x(k);
    for (long n = f.first; n <= f.last(); ++n) {
      const double wgt = psi1(x - static_cast<double>(n));
      if (wgt == 0.0) continue;
      for (std::size_t i = 0; i < f.m; ++i) F.values[k * f.m + i] += f.at(n, i) * wgt;
    }
  }
  return F;
}

ZSequence restrict(const GridFunction& F, const PhiTable& phi, long n_first, long n_last) {
  const long inv = reciprocal_spacing(F.h, "grid spacing");
  if (std::abs(F.h - phi.spec().grid_h) > 1e-15)
    throw InputError("restrict: grid spacing differs from the Phi table");
  if (!(F.band + 2.0 < static_cast<double>(inv)))
    throw InputError("restrict: band + 2 must stay below 1/h");
  if (n_last < n_first) throw DomainError("restrict: empty index range");
  ZSequence out;
  out.first = n_first;
  out.m = F.m;
  out.values.assign(static_cast<std::size_t>(n_last - n_first + 1) * F.m, 0.0);
  const long H = phi.half_width();
  const long lo = F.first, hi = F.first + static_cast<long>(F.size()) - 1;
  for (long n = n_first; n <= n_last; ++n) {
    const long c = n * inv;
    std::vector<long double> acc(F.m, 0.0L);
    for (long k = std::max(lo, c - H); k <= std::min(hi, c + H); ++k) {
      const double w = phi.at_grid(c - k);
      for (std::size_t i = 0; i < F.m; ++i) acc[i] += w * F.at(k, i);
    }
    for (std::size_t i = 0; i < F.m; ++i)
      out.values[static_cast<std::size_t>(n - n_first) * F.m + i] =
          static_cast<double>(acc[i] * F.h);
  }
  return out;
}

double extension_l2_norm(const ZSequence& g) {
  long double s = 0.0L;
  const auto n = static_cast<long>(g.size());
  for (long a = 0; a < n; ++a)
    for (long b = 0; b < n; ++b) {
      const long j = a - b;
      const double G = j == 0 ? 2.0 / 3.0 : 1.0 / (kPi * kPi * static_cast<double>(j * j));
      double dot = 0.0;
      for (std::size_t i = 0; i < g.m; ++i)
        dot += g.values[static_cast<std::size_t>(a) * g.m + i] *
               g.values[static_cast<std::size_t>(b) * g.m + i];
      s += dot * G;
    }
  return static_cast<double>(std::sqrt(std::max(0.0L, s)));
}

std::vector<Check> sampling_identity_checks(const ZSequence& f, const PhiTable& phi,
                                            double identity_tol) {
  const KernelSpec& spec = phi.spec();
  const GridFunction F = extend(f, spec, spec.radius + 2.0);
  const long pad = 4;
  const ZSequence RF = restrict(F, phi, f.first - pad, f.last() + pad);
  double err = 0.0, scale = 0.0;
  for (long n = f.first - pad; n <= f.last() + pad; ++n)
    for (std::size_t i = 0; i < f.m; ++i) {
      err = std::max(err, std::abs(RF.at(n, i) - f.at(n, i)));
      scale = std::max(scale, std::abs(f.at(n, i)));
    }
  std::vector<Check> out;
  Check id;
  id.name = "sampling:RE=id";
  id.lhs = err;
  id.rhs = scale;
  id.ratio = safe_ratio(err, scale);
  id.holds = err <= identity_tol * scale;
  id.params = {{"tolerance", identity_tol},
               {"support", f.size()},
               {"phi_quadrature_error", phi.quadrature_error()}};
  out.push_back(id);

  // l^p -> L^p for E and L^p -> l^p for R (recorded; the window truncates the
  // sinc^2 tails, so the L^1 norm is slightly underestimated).
  for (double p : {1.0, 2.0, 4.0, std::numeric_limits<double>::infinity()}) {
    const double fp = f.lp(p);
    const double Fp = p == 2.0 ? extension_l2_norm(f) : F.lp(p);
    Check e;
    e.name = "sampling:extend_bound";
    e.lhs = Fp;
    e.rhs = fp;
    e.ratio = safe_ratio(Fp, fp);
    e.holds = std::isfinite(e.ratio);
    e.params = {{"p", std::isinf(p) ? json("inf") : json(p)}};
    out.push_back(e);
    Check r;
    r.name = "sampling:restrict_bound";
    r.lhs = RF.lp(p);
    r.rhs = Fp;
    r.ratio = safe_ratio(r.lhs, Fp);
    r.holds = std::isfinite(r.ratio);
    r.params = e.params;
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Multipliers

MultiplierFamily MultiplierFamily::dilated_cutoff(double b, std::size_t members) {
  if (!(b > 0.0)) throw DomainError("dilated_cutoff: b must be positive");
  if (members == 0) throw DomainError("dilated_cutoff: at least one member");
  if (members > 40) throw DomainError("dilated_cutoff: at most 40 members");
  MultiplierFamily m;
  m.kind_ = "dilated_cutoff";
  m.members_ = members;
  m.b_ = b;
  m.support_ = b;
  return m;
}

MultiplierFamily MultiplierFamily::table(std::vector<double> nodes,
                                         std::vector<std::vector<double>> values) {
  if (nodes.size() < 2) throw InputError("table multiplier: at least two nodes");
  if (nodes.front() != 0.0) throw InputError("table multiplier: first node must be 0");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i] > nodes[i - 1]))
      throw InputError("table multiplier: nodes must increase", i);
  if (values.empty()) throw InputError("table multiplier: no members");
  for (std::size_t t = 0; t < values.size(); ++t) {
    if (values[t].size() != nodes.size())
      throw InputError("table multiplier: member length differs from nodes", t);
    for (double v : values[t])
      if (!std::isfinite(v)) throw InputError("table multiplier: non-finite value", t);
  }
  MultiplierFamily m;
  m.kind_ = "table";
  m.members_ = values.size();
  m.support_ = nodes.back();
  m.nodes_ = std::move(nodes);
  m.values_ = std::move(values);
  return m;
}

MultiplierFamily MultiplierFamily::from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const json params = j.value("params", json::object());
    MultiplierFamily m;
    if (kind == "dilated_cutoff") {
      m = dilated_cutoff(params.value("b", 1.0 / 6.0),
                         params.value("members", std::size_t{6}));
    } else if (kind == "table") {
      m = table(params.at("nodes").get<std::vector<double>>(),
                params.at("values").get<std::vector<std::vector<double>>>());
    } else {
      throw ParseError("multiplier: unknown kind '" + kind + "'");
    }
    const double scale = params.value("scale", 1.0);
    return scale == 1.0 ? m : m.dilated(scale);
  } catch (const json::exception& e) {
    throw ParseError(std::string("multiplier: ") + e.what());
  }
}

json MultiplierFamily::to_json() const {
  json params;
  if (kind_ == "dilated_cutoff") {
    params = {{"b", b_}, {"members", members_}};
  } else {
    params = {{"nodes", nodes_}, {"values", values_}};
  }
  if (scale_ != 1.0) params["scale"] = scale_;
  return {{"kind", kind_}, {"params", params}};
}

double MultiplierFamily::member_support(std::size_t t) const {
  if (t >= members_) throw DomainError("multiplier member out of range");
  if (kind_ == "dilated_cutoff") return scale_ * b_ / std::ldexp(1.0, static_cast<int>(t));
  return support_;
}

double MultiplierFamily::value(std::size_t t, double xi) const {
  if (t >= members_) throw DomainError("multiplier member out of range");
  const double a = std::abs(xi) / scale_;
  if (kind_ == "dilated_cutoff") {
    const double x = a * std::ldexp(1.0, static_cast<int>(t));
    if (x <= 0.5 * b_) return 1.0;
    if (x >= b_) return 0.0;
    return 1.0 - smooth_step((x - 0.5 * b_) / (0.5 * b_));
  }
  if (a >= nodes_.back()) return a == nodes_.back() ? values_[t].back() : 0.0;
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), a);
  const auto i = static_cast<std::size_t>(it - nodes_.begin());
  const double x0 = nodes_[i - 1], x1 = nodes_[i];
  const double u = (a - x0) / (x1 - x0);
  return (1.0 - u) * values_[t][i - 1] + u * values_[t][i];
}

std::vector<double> MultiplierFamily::breakpoints(std::size_t t) const {
  const double S = member_support(t);
  if (kind_ == "dilated_cutoff") return {0.0, 0.5 * S, S};
  std::vector<double> out;
  out.reserve(nodes_.size());
  for (double v : nodes_) out.push_back(v * scale_);
  return out;
}

MultiplierFamily MultiplierFamily::dilated(double s) const {
  if (!(s > 0.0)) throw DomainError("dilation must be positive");
  MultiplierFamily m = *this;
  m.scale_ *= s;
  m.support_ *= s;
  return m;
}

PeriodicSymbol::PeriodicSymbol(MultiplierFamily family, int q)
    : family_(std::move(family)), q_(q) {
  if (q < 1) throw DomainError("period q must be >= 1");
  const double limit = 1.0 / (2.0 * q);
  if (family_.support() > limit * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "multiplier support " << family_.support() << " exceeds 1/(2q) = " << limit
       << " for q = " << q;
    throw InputError(os.str());
  }
}

double PeriodicSymbol::operator()(std::size_t t, double xi) const {
  const double l = std::nearbyint(xi * q_);
  return family_.value(t, xi - l / q_);
}

double PeriodicSymbol::truncated_sum(std::size_t t, double xi, int L) const {
  double s = 0.0;
  for (int l = -L; l <= L; ++l) s += family_.value(t, xi - static_cast<double>(l) / q_);
  return s;
}

PeriodicSymbol periodize_multiplier(const MultiplierFamily& family, int q) {
  return PeriodicSymbol(family, q);
}

// ---------------------------------------------------------------------------
// Kernel symbols and tables

KernelSymbol kernel_symbol(const MultiplierFamily& family) {
  KernelSymbol s;
  s.members = family.members();
  s.value = [family](std::size_t t, double xi) { return family.value(t, xi); };
  for (std::size_t t = 0; t < s.members; ++t) s.breaks.push_back(family.breakpoints(t));
  return s;
}

KernelSymbol fejer_symbol(const MultiplierFamily& family) {
  KernelSymbol s;
  s.members = family.members();
  s.value = [family](std::size_t t, double xi) { return family.value(t, xi) * psi_hat1(xi); };
  for (std::size_t t = 0; t < s.members; ++t) {
    std::vector<double> b;
    for (double v : family.breakpoints(t))
      if (v < 1.0) b.push_back(v);
    b.push_back(std::min(1.0, family.member_support(t)));
    s.breaks.push_back(sorted_unique(std::move(b)));
  }
  return s;
}

KernelSymbol tilde_symbol(const MultiplierFamily& family, int q) {
  if (q < 1) throw DomainError("period q must be >= 1");
  KernelSymbol s;
  s.members = family.members();
  const double qd = q;
  s.value = [family, qd](std::size_t t, double xi) {
    if (xi >= 1.0) return 0.0;
    double v = 0.0;
    for (int l = -1; l <= 1; ++l) v += family.value(t, (xi + l) / qd);
    return v * psi_hat1(xi);
  };
  for (std::size_t t = 0; t < s.members; ++t) {
    // m((xi + l)/q) changes smoothness at q * (+-b - l)
    std::vector<double> b{0.0, 1.0};
    for (double v : family.breakpoints(t))
      for (int l = -1; l <= 1; ++l)
        for (double sign : {-1.0, 1.0}) {
          const double x = qd * sign * v - l;
          if (x > 0.0 && x < 1.0) b.push_back(x);
        }
    s.breaks.push_back(sorted_unique(std::move(b)));
  }
  return s;
}

namespace {

// 2 sum_i w_i m(xi_i) cos(2 pi k spacing xi_i) for k = start..start+count-1
// by phase rotation, re-anchored every 1024 steps.
std::vector<double> cosine_rows(const Nodes& nodes, const std::vector<double>& amp,
                                double spacing, std::size_t start, std::size_t count) {
  const std::size_t n = nodes.x.size();
  std::vector<double> zr(n, 1.0), zi(n, 0.0), sr(n), si(n);
  for (std::size_t i = 0; i < n; ++i) {
    sr[i] = std::cos(2.0 * kPi * spacing * nodes.x[i]);
    si[i] = std::sin(2.0 * kPi * spacing * nodes.x[i]);
  }
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) {
    if (k % 1024 == 0 && k + start > 0)
      for (std::size_t i = 0; i < n; ++i) {
        const double ph = 2.0 * kPi * spacing * static_cast<double>(k + start) * nodes.x[i];
        zr[i] = std::cos(ph);
        zi[i] = std::sin(ph);
      }
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
      for (std::size_t j = 0; j < 4; ++j) acc[j] += amp[i + j] * zr[i + j];
    for (; i < n; ++i) acc[0] += amp[i] * zr[i];
    for (std::size_t j = 0; j < n; ++j) {
      const double r = zr[j] * sr[j] - zi[j] * si[j];
      zi[j] = zr[j] * si[j] + zi[j] * sr[j];
      zr[j] = r;
    }
    out[k] = 2.0 * ((acc[0] + acc[1]) + (acc[2] + acc[3]));
  }
  return out;
}

double cosine_at(const Nodes& nodes, const std::vector<double>& amp, double x) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < nodes.x.size(); ++i)
    s += amp[i] * std::cos(2.0 * kPi * x * nodes.x[i]);
  return static_cast<double>(2.0L * s);
}

}  // namespace

namespace {

struct Tabulation {
  std::vector<std::vector<double>> rows;
  double max_abs = 0.0;
  double quad_err = 0.0;
};

// Rows k = start..start+count-1 at spacing `spacing` for every member, with
// panels fine enough for two oscillations per panel at the last row.
// max_abs always includes row 0.
Tabulation tabulate(const KernelSymbol& symbol, const std::vector<std::vector<bool>>& skip,
                    double spacing, std::size_t start, std::size_t count, bool certify) {
  Tabulation tab;
  const double reach = spacing * static_cast<double>(start + count);
  for (std::size_t t = 0; t < symbol.members; ++t) {
    const auto& br = symbol.breaks[t];
    const double density = std::max(8.0 / (br.back() - br.front()), 0.5 * reach);
    const Nodes nodes = gl_panels(br, density, skip[t]);
    std::vector<double> amp(nodes.x.size());
    for (std::size_t i = 0; i < amp.size(); ++i) amp[i] = nodes.w[i] * symbol.value(t, nodes.x[i]);
    tab.rows.push_back(cosine_rows(nodes, amp, spacing, start, count));
    if (start > 0) {
      double k0 = 0.0;
      for (double a : amp) k0 += a;
      tab.max_abs = std::max(tab.max_abs, std::abs(2.0 * k0));
    }
    if (!certify) continue;
    const Nodes fine = gl_panels(br, 2.0 * density, skip[t]);
    std::vector<double> famp(fine.x.size());
    for (std::size_t i = 0; i < famp.size(); ++i) famp[i] = fine.w[i] * symbol.value(t, fine.x[i]);
    for (std::size_t k : {std::size_t{0}, count / 3, count / 2, count - 1})
      tab.quad_err = std::max(tab.quad_err,
                              std::abs(tab.rows[t][k] -
                                       cosine_at(fine, famp, static_cast<double>(k + start) * spacing)));
  }
  for (const auto& r : tab.rows)
    for (double v : r) tab.max_abs = std::max(tab.max_abs, std::abs(v));
  return tab;
}

// Last row whose member differences (|K_0| for one member) exceed thresh.
std::size_t last_significant(const std::vector<std::vector<double>>& rows, double thresh) {
  std::size_t last = 0;
  for (std::size_t k = 0; k < rows[0].size(); ++k) {
    double d = 0.0;
    if (rows.size() == 1) {
      d = std::abs(rows[0][k]);
    } else {
      for (std::size_t t = 1; t < rows.size(); ++t)
        d = std::max(d, std::abs(rows[t][k] - rows[0][k]));
    }
    if (d > thresh) last = k;
  }
  return last;
}

}  // namespace

KernelTable::KernelTable(const KernelSymbol& symbol, double spacing, double tol,
                         double min_radius, double max_radius)
    : spacing_(spacing) {
  if (symbol.members == 0 || symbol.breaks.size() != symbol.members)
    throw DomainError("kernel symbol: no members");
  if (!(spacing > 0.0)) throw DomainError("kernel spacing must be positive");
  if (!(tol > 0.0)) throw DomainError("kernel tolerance must be positive");
  max_radius = std::max(max_radius, min_radius);

  // Intervals on which a member vanishes identically carry no nodes.
  double top = 0.0;
  std::vector<std::vector<bool>> skip(symbol.members);
  for (std::size_t t = 0; t < symbol.members; ++t) {
    const auto& br = symbol.breaks[t];
    if (br.size() < 2 || !(br.back() > br.front()))
      throw InputError("kernel symbol: empty support", t);
    top = std::max(top, br.back());
    for (std::size_t b = 0; b + 1 < br.size(); ++b) {
      bool zero = true;
      for (int j = 0; j <= 16 && zero; ++j)
        zero = symbol.value(t, br[b] + (br[b + 1] - br[b]) * j / 16.0) == 0.0;
      skip[t].push_back(zero);
    }
  }

  // Locate the window on a coarse row grid (a multiple of the spacing that
  // still samples the fastest oscillation five times per period).
  const double stride = std::max(1.0, std::floor(0.2 / (top * spacing)));
  const double coarse = stride * spacing;
  // Only rows in [R/2, R] are inspected: a quiet upper half ends the search.
  double R = std::min(max_radius, std::max(64.0 * spacing, std::max(64.0, min_radius)));
  double reach = 0.0;
  for (;;) {
    const auto start = static_cast<std::size_t>(std::floor(0.5 * R / coarse));
    const auto count = static_cast<std::size_t>(std::ceil(R / coarse)) + 1 - start;
    const Tabulation tab = tabulate(symbol, skip, coarse, start, count, false);
    const std::size_t last = last_significant(tab.rows, tol * tab.max_abs);
    const bool quiet = last == 0;
    reach = static_cast<double>(start + last) * coarse;
    if (R >= max_radius) break;
    if (quiet) {
      reach = 0.5 * R;
      break;
    }
    if (reach < 0.75 * R) break;
    R = std::min(max_radius, 1.5 * R);
  }

  // Full table with a margin beyond the located window.
  R = std::min(max_radius, std::max(min_radius, 1.15 * reach + 4.0 * coarse));
  for (;;) {
    const auto count = static_cast<std::size_t>(std::ceil(R / spacing)) + 1;
    Tabulation tab = tabulate(symbol, skip, spacing, 0, count, true);
    const std::size_t last = last_significant(tab.rows, tol * tab.max_abs);
    const bool settled = static_cast<double>(last) < 0.95 * static_cast<double>(count - 1);
    if (settled || R >= max_radius) {
      capped_ = !settled;
      const auto min_k = static_cast<std::size_t>(std::ceil(min_radius / spacing));
      const std::size_t keep = std::min(count - 1, std::max(last + 1, min_k));
      rows_ = std::move(tab.rows);
      for (auto& r : rows_) r.resize(keep + 1);
      half_ = static_cast<long>(keep);
      max_ = tab.max_abs;
      quad_err_ = tab.quad_err;
      return;
    }
    R = std::min(max_radius, 1.5 * R);
  }
}

double KernelTable::operator()(std::size_t t, long k) const {
  const long a = k < 0 ? -k : k;
  if (a > half_) return 0.0;
  return rows_[t][static_cast<std::size_t>(a)];
}

// ---------------------------------------------------------------------------
// Operators

SampledProcess apply_discrete(const KernelTable& K, const ZSequence& f, int q) {
  if (q < 1) throw DomainError("period q must be >= 1");
  if (std::abs(K.spacing() - 1.0) > 1e-15)
    throw InputError("apply_discrete: kernel must be tabulated on the integers");
  if (f.size() == 0) throw DomainError("apply_discrete: empty sequence");
  const long H = K.half_width();
  const long lo = f.first - H, hi = f.last() + H;
  const std::size_t T = K.members();
  const auto atoms = static_cast<std::size_t>(hi - lo + 1);
  std::vector<double> labels(T);
  for (std::size_t t = 0; t < T; ++t) labels[t] = static_cast<double>(t);
  const BNorm norm(f.m, 2.0);
  std::vector<TimeSeries> series;
  series.reserve(atoms);
  std::vector<double> flat(T * f.m);
  for (long n = lo; n <= hi; ++n) {
    std::fill(flat.begin(), flat.end(), 0.0);
    // y = n - j must lie in qZ
    long j0 = f.first + (((n - f.first) % q) + q) % q;
    for (long j = j0; j <= f.last(); j += q) {
      const long y = n - j;
      if (y > H || y < -H) continue;
      for (std::size_t t = 0; t < T; ++t) {
        const double k = q * K(t, y);
        for (std::size_t i = 0; i < f.m; ++i) flat[t * f.m + i] += f.at(j, i) * k;
      }
    }
    series.emplace_back(labels, flat, norm);
  }
  return SampledProcess(AtomicMeasureSpace::uniform(atoms, 1.0), std::move(series));
}

std::vector<std::vector<double>> apply_discrete_fourier(const PeriodicSymbol& m,
                                                        const ZSequence& f, long n_first,
                                                        long n_last) {
  if (f.m != 1) throw InputError("apply_discrete_fourier: scalar sequences only");
  if (n_last < n_first) throw DomainError("apply_discrete_fourier: empty range");
  const MultiplierFamily& fam = m.family();
  const int q = m.q();
  const std::size_t T = fam.members();
  const long reach = std::max({std::abs(n_first), std::abs(n_last)}) +
                     std::max(std::abs(f.first), std::abs(f.last()));
  std::vector<std::vector<double>> out(T,
                                       std::vector<double>(static_cast<std::size_t>(n_last - n_first + 1), 0.0));
  for (std::size_t t = 0; t < T; ++t) {
    const double S = fam.member_support(t);
    std::vector<double> br;
    for (double v : fam.breakpoints(t)) {
      br.push_back(v);
      br.push_back(-v);
    }
    br = sorted_unique(std::move(br));
    // one oscillation of e^{2 pi i n xi} per panel at the farthest n
    const Nodes nodes = gl_panels(br, std::max(4.0 / S, static_cast<double>(reach)));
    for (int l = 0; l < q; ++l) {
      const double c = static_cast<double>(l) / q;
      for (std::size_t i = 0; i < nodes.x.size(); ++i) {
        const double xi = c + nodes.x[i];
        // m_per(xi) = m_t(eta) on this piece; evaluate through the periodic
        // symbol so the lattice reduction is exercised.
        const double mv = m(t, xi);
        if (mv == 0.0) continue;
        std::complex<double> Fh = 0.0;
        for (long k = f.first; k <= f.last(); ++k)
          Fh += f.at(k) * std::polar(1.0, -2.0 * kPi * static_cast<double>(k) * xi);
        const std::complex<double> a = nodes.w[i] * mv * Fh;
        for (long n = n_first; n <= n_last; ++n)
          out[t][static_cast<std::size_t>(n - n_first)] +=
              (a * std::polar(1.0, 2.0 * kPi * static_cast<double>(n) * xi)).real();
      }
    }
  }
  return out;
}

SampledProcess apply_continuous(const KernelTable& L, const ZSequence& g) {
  const long inv = reciprocal_spacing(L.spacing(), "apply_continuous");
  if (g.size() == 0) throw DomainError("apply_continuous: empty sequence");
  const long H = L.half_width();
  const long lo = g.first * inv - H, hi = g.last() * inv + H;
  const std::size_t T = L.members();
  const auto atoms = static_cast<std::size_t>(hi - lo + 1);
  std::vector<double> labels(T);
  for (std::size_t t = 0; t < T; ++t) labels[t] = static_cast<double>(t);
  const BNorm norm(g.m, 2.0);
  std::vector<TimeSeries> series;
  series.reserve(atoms);
  std::vector<double> flat(T * g.m);
  for (long x = lo; x <= hi; ++x) {
    std::fill(flat.begin(), flat.end(), 0.0);
    for (long j = g.first; j <= g.last(); ++j) {
      const long d = x - j * inv;
      if (d > H || d < -H) continue;
      for (std::size_t t = 0; t < T; ++t) {
        const double k = L(t, d);
        for (std::size_t i = 0; i < g.m; ++i) flat[t * g.m + i] += g.at(j, i) * k;
      }
    }
    series.emplace_back(labels, flat, norm);
  }
  return SampledProcess(AtomicMeasureSpace::uniform(atoms, L.spacing()), std::move(series));
}

// ---------------------------------------------------------------------------
// Test sequences

ZSequence random_test_sequence(std::size_t support, std::uint64_t seed, std::size_t index,
                               int modulation_q) {
  if (support == 0) throw DomainError("test sequence support must be positive");
  if (modulation_q < 1) throw DomainError("modulation q must be >= 1");
  auto rng = instance_rng(seed, index, 7);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const std::size_t len =
      1 + std::uniform_int_distribution<std::size_t>(0, support - 1)(rng);
  std::vector<double> v(len, 0.0);
  switch (index % 4) {
    case 0:
      for (double& x : v) x = gauss(rng);
      break;
    case 1: {
      const std::size_t spikes = 1 + std::min<std::size_t>(len - 1, 3);
      for (std::size_t s = 0; s < spikes; ++s)
        v[std::uniform_int_distribution<std::size_t>(0, len - 1)(rng)] += gauss(rng) * 3.0;
      break;
    }
    case 2: {
      const double c = unif(rng) * static_cast<double>(len - 1);
      const double w = 1.0 + unif(rng) * static_cast<double>(len) / 2.0;
      const int l = std::uniform_int_distribution<int>(0, modulation_q - 1)(rng);
      const double phase = unif(rng) * 2.0 * kPi;
      for (std::size_t n = 0; n < len; ++n) {
        const double u = (static_cast<double>(n) - c) / w;
        v[n] = std::exp(-u * u) *
               std::cos(2.0 * kPi * static_cast<double>(n) * l / modulation_q + phase);
      }
      break;
    }
    default: {
      double s = 0.0;
      for (double& x : v) {
        s += gauss(rng);
        x = s;
      }
      break;
    }
  }
  if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) v[0] = 1.0;
  return ZSequence::scalar(0, std::move(v));
}

// ---------------------------------------------------------------------------
// Transference

json TransferOptions::to_json() const {
  return {{"p", p},
          {"rho", rho},
          {"qs", qs},
          {"dilations", dilations},
          {"ensemble", ensemble},
          {"support", support},
          {"climb_iterations", climb_iterations},
          {"continuous_h", continuous_h},
          {"kernel_tol", kernel_tol},
          {"identity_tol", identity_tol},
          {"chain_instances", chain_instances},
          {"seed", seed},
          {"kernel", spec.to_json()}};
}

namespace {

double jump_of(const SampledProcess& f, double p, double rho) {
  return jump_seminorm(f, p, p, rho).value;
}

// ||E g(./s)||_{L^p} = s^{1/p} ||E g||_{L^p}
double extension_norm(const ZSequence& g, const KernelSpec& spec, double p, double s) {
  const double base = p == 2.0 ? extension_l2_norm(g) : extend(g, spec, spec.radius).lp(p);
  return std::isinf(p) ? base : base * std::pow(s, 1.0 / p);
}

// [T^q]_dis g(x) = sum_y g(x - y) q K_t(q y) at x = x_first..x_last
std::vector<std::vector<double>> dilated_kernel_route(const KernelTable& K, const ZSequence& g,
                                                      int q, long x_first, long x_last) {
  std::vector<std::vector<double>> out(
      K.members(), std::vector<double>(static_cast<std::size_t>(x_last - x_first + 1), 0.0));
  for (long x = x_first; x <= x_last; ++x)
    for (long j = g.first; j <= g.last(); ++j)
      for (std::size_t t = 0; t < K.members(); ++t)
        out[t][static_cast<std::size_t>(x - x_first)] += g.at(j) * q * K(t, static_cast<long>(q) * (x - j));
  return out;
}

// delta_q tau_r f (x) = f(q x + r)
ZSequence residue_sequence(const ZSequence& f, int q, int r) {
  const long g0 = static_cast<long>(std::floor(static_cast<double>(f.first - r) / q));
  const long g1 = static_cast<long>(std::ceil(static_cast<double>(f.last() - r) / q));
  std::vector<double> gv;
  for (long x = g0; x <= g1; ++x) gv.push_back(f.at(q * x + r));
  return ZSequence::scalar(g0, std::move(gv));
}

Check worst_of(std::string name, const std::vector<Check>& cs) {
  Check w;
  w.name = std::move(name);
  std::size_t failures = 0;
  for (const auto& c : cs) {
    if (!c.holds) ++failures;
    if (c.ratio >= w.ratio || (!c.holds && w.holds)) {
      const bool holds = w.holds && c.holds;
      const std::string nm = w.name;
      w = c;
      w.name = nm;
      w.holds = holds;
    } else if (!c.holds) {
      w.holds = false;
    }
  }
  w.witness["instances"] = cs.size();
  w.witness["failures"] = failures;
  return w;
}

}  // namespace

std::vector<Check> fourier_kernel_checks(const KernelTable& K, const PeriodicSymbol& m,
                                         const ZSequence& f, double tol) {
  if (f.m != 1) throw InputError("fourier_kernel_checks: scalar sequences only");
  const int q = m.q();
  const long xr = 16;
  const long x0 = static_cast<long>(std::floor(static_cast<double>(f.first) / q)) - xr;
  const long x1 = static_cast<long>(std::ceil(static_cast<double>(f.last()) / q)) + xr;
  const auto fr = apply_discrete_fourier(m, f, q * x0, q * x1);
  const double scale = f.lp(1.0) * K.max_abs() * q;
  std::vector<Check> out;
  for (int r = 0; r < q; ++r) {
    // sum_y g(x - y) q K(q y) with g = delta_q tau_r f evaluates T_dis f(q x + r)
    const ZSequence g = residue_sequence(f, q, r);
    const auto kr = dilated_kernel_route(K, g, q, x0, x1 - 1);
    double err = 0.0;
    for (std::size_t t = 0; t < K.members(); ++t)
      for (long x = x0; x < x1; ++x)
        err = std::max(err, std::abs(fr[t][static_cast<std::size_t>(q * x + r - q * x0)] -
                                     kr[t][static_cast<std::size_t>(x - x0)]));
    Check c;
    c.name = "transfer:fourier_vs_kernel";
    c.lhs = err;
    c.rhs = scale;
    c.ratio = safe_ratio(err, scale);
    c.holds = err <= tol * scale;
    c.params = {{"q", q}, {"r", r}, {"tolerance", tol}};
    out.push_back(c);
  }
  return out;
}

TransferReport verify_jump_transfer(const MultiplierFamily& family, const TransferOptions& opt) {
  if (!(opt.p > 1.0) || std::isinf(opt.p)) throw DomainError("transfer: p must lie in (1, inf)");
  if (!(opt.rho > 1.0)) throw DomainError("transfer: rho must exceed 1");
  if (opt.qs.empty() || opt.dilations.empty() || opt.ensemble == 0)
    throw DomainError("transfer: empty q list, dilation list or ensemble");
  opt.spec.validate();
  int qmax = 1;
  for (int q : opt.qs) {
    if (q < 1) throw DomainError("transfer: q must be >= 1");
    qmax = std::max(qmax, q);
  }
  PeriodicSymbol check_support(family, qmax);  // throws on a support violation
  for (double s : opt.dilations)
    if (!(s > 0.0) || family.support() * s >= 1.0)
      throw InputError("transfer: dilated support must stay inside (-1, 1)");

  TransferReport rep;
  const double p = opt.p, rho = opt.rho;
  const KernelTable K(kernel_symbol(family), 1.0, opt.kernel_tol);
  std::vector<KernelTable> L;
  for (double s : opt.dilations)
    L.emplace_back(fejer_symbol(family.dilated(s)), opt.continuous_h, opt.kernel_tol);
  if (K.capped()) rep.notes.push_back("discrete kernel window reached its cap");
  for (const auto& l : L)
    if (l.capped()) rep.notes.push_back("continuous kernel window reached its cap");

  auto disc_ratio = [&](const ZSequence& g, int q) {
    return safe_ratio(jump_of(apply_discrete(K, g, q), p, rho), g.lp(p));
  };
  auto cont_ratio = [&](const ZSequence& g, std::size_t si) {
    return safe_ratio(jump_of(apply_continuous(L[si], g), p, rho),
                      extension_norm(g, opt.spec, p, opt.dilations[si]));
  };

  std::vector<ZSequence> ensemble;
  for (std::size_t i = 0; i < opt.ensemble; ++i)
    ensemble.push_back(random_test_sequence(opt.support, opt.seed, i,
                                            opt.qs[i % opt.qs.size()]));

  // Discrete estimates per q and the congruence-class split of the jump norm.
  std::vector<double> disc(opt.qs.size(), 0.0);
  std::vector<ZSequence> disc_best(opt.qs.size(), ensemble.front());
  std::vector<Check> class_checks;
  for (std::size_t qi = 0; qi < opt.qs.size(); ++qi) {
    const int q = opt.qs[qi];
    for (const auto& g : ensemble) {
      const SampledProcess Tf = apply_discrete(K, g, q);
      const double J = jump_of(Tf, p, rho);
      const double r = safe_ratio(J, g.lp(p));
      if (r > disc[qi]) {
        disc[qi] = r;
        disc_best[qi] = g;
      }
      // J(Tf)^p <= sum_r J(Tf restricted to n = r mod q)^p
      long double parts = 0.0L;
      const long lo = g.first - K.half_width();
      for (int cls = 0; cls < q; ++cls) {
        std::vector<std::size_t> atoms;
        for (std::size_t a = 0; a < Tf.atoms(); ++a)
          if ((((lo + static_cast<long>(a)) % q) + q) % q == cls) atoms.push_back(a);
        parts += std::pow(static_cast<long double>(jump_of(Tf.restrict_atoms(atoms), p, rho)), p);
      }
      Check c;
      c.lhs = std::pow(J, p);
      c.rhs = static_cast<double>(parts);
      c.ratio = safe_ratio(c.lhs, c.rhs);
      c.holds = c.lhs <= c.rhs * (1.0 + 1e-12) + 1e-300;
      c.params = {{"q", q}};
      class_checks.push_back(c);
    }
  }
  for (std::size_t qi = 0; qi < opt.qs.size(); ++qi) {
    std::vector<Check> mine;
    for (const auto& c : class_checks)
      if (c.params.at("q") == opt.qs[qi]) mine.push_back(c);
    Check w = worst_of("transfer:class_split", mine);
    w.params = {{"q", opt.qs[qi]}};
    rep.checks.push_back(w);
  }

  // Continuous estimate over all dilations.
  double cont = 0.0;
  ZSequence cont_best = ensemble.front();
  std::size_t cont_s = 0;
  for (const auto& g : ensemble)
    for (std::size_t si = 0; si < L.size(); ++si) {
      const double r = cont_ratio(g, si);
      if (r > cont) {
        cont = r;
        cont_best = g;
        cont_s = si;
      }
    }

  // Hill-climbing from the best ensemble members.
  auto perturb = [&](ZSequence g, std::mt19937_64& rng, int q) {
    std::normal_distribution<double> gauss;
    double amp = 0.0;
    for (double v : g.values) amp = std::max(amp, std::abs(v));
    std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
    if (rng() % 2 == 0) {
      g.values[pick(rng)] += 0.3 * amp * gauss(rng);
    } else {
      const double phase = gauss(rng);
      const int l = static_cast<int>(rng() % static_cast<std::uint64_t>(q));
      for (std::size_t n = 0; n < g.size(); ++n)
        g.values[n] += 0.1 * amp * gauss(rng) *
                       std::cos(2.0 * kPi * static_cast<double>(n) * l / q + phase);
    }
    return g;
  };
  for (std::size_t qi = 0; qi < opt.qs.size(); ++qi) {
    auto rng = instance_rng(opt.seed, qi, 11);
    for (int it = 0; it < opt.climb_iterations; ++it) {
      ZSequence g = perturb(disc_best[qi], rng, opt.qs[qi]);
      if (g.lp(p) == 0.0) continue;
      const double r = disc_ratio(g, opt.qs[qi]);
      if (r > disc[qi]) {
        disc[qi] = r;
        disc_best[qi] = std::move(g);
      }
    }
  }
  {
    auto rng = instance_rng(opt.seed, opt.qs.size(), 11);
    for (int it = 0; it < opt.climb_iterations; ++it) {
      ZSequence g = perturb(cont_best, rng, 1);
      if (g.lp(p) == 0.0) continue;
      const double r = cont_ratio(g, cont_s);
      if (r > cont) {
        cont = r;
        cont_best = std::move(g);
      }
    }
  }

  double C = 0.0;
  json per_q = json::array();
  for (std::size_t qi = 0; qi < opt.qs.size(); ++qi) {
    Check c;
    c.name = "transfer:disc/cont";
    c.lhs = disc[qi];
    c.rhs = cont;
    c.ratio = safe_ratio(disc[qi], cont);
    c.holds = std::isfinite(c.ratio);
    c.params = {{"q", opt.qs[qi]}};
    c.witness = {{"sequence", disc_best[qi].values}};
    rep.checks.push_back(c);
    C = std::max(C, c.ratio);
    per_q.push_back({{"q", opt.qs[qi]}, {"discrete", disc[qi]}, {"ratio", c.ratio}});
  }

  // Chain identities on the first ensemble members.
  const PhiTable phi(opt.spec);
  const std::size_t chain = std::min(opt.chain_instances, ensemble.size());
  double fourier_err = 0.0, conj_err = 0.0;
  std::vector<Check> fourier_checks, conj_checks, bound_checks;
  for (std::size_t qi = 0; qi < opt.qs.size(); ++qi) {
    const int q = opt.qs[qi];
    const PeriodicSymbol mper(family, q);
    const KernelTable Lt(tilde_symbol(family, q), opt.spec.grid_h, opt.kernel_tol,
                         opt.spec.radius + static_cast<double>(opt.support) + 4.0);
    for (std::size_t ci = 0; ci < chain; ++ci) {
      const ZSequence& f = ensemble[ci];
      for (const Check& c : fourier_kernel_checks(K, mper, f, opt.identity_tol)) {
        fourier_checks.push_back(c);
        fourier_err = std::max(fourier_err, c.ratio);
      }
      for (int r = 0; r < q; ++r) {
        {
          const ZSequence g = residue_sequence(f, q, r);
          // R conjugation: [T^q]_dis g = R(T~^q E g)
          const long xr2 = 8;
          const long y0 = g.first - xr2, y1 = g.last() + xr2;
          const auto direct = dilated_kernel_route(K, g, q, y0, y1);
          const SampledProcess TE = apply_continuous(Lt, g);
          const long inv = reciprocal_spacing(opt.spec.grid_h, "grid_h");
          const long first_grid = g.first * inv - Lt.half_width();
          double cerr = 0.0;
          for (std::size_t t = 0; t < K.members(); ++t) {
            GridFunction F;
            F.h = opt.spec.grid_h;
            F.first = first_grid;
            F.band = 1.0;
            F.values.resize(TE.atoms());
            for (std::size_t a = 0; a < TE.atoms(); ++a) F.values[a] = TE.series(a).value(t)[0];
            const ZSequence RF = restrict(F, phi, y0, y1);
            for (long y = y0; y <= y1; ++y)
              cerr = std::max(cerr, std::abs(RF.at(y) - direct[t][static_cast<std::size_t>(y - y0)]));
          }
          const double cscale = g.lp(1.0) * K.max_abs() * q;
          Check cc;
          cc.lhs = cerr;
          cc.rhs = cscale;
          cc.ratio = safe_ratio(cerr, cscale);
          cc.holds = cerr <= opt.identity_tol * cscale;
          cc.params = {{"q", q}, {"r", r}};
          conj_checks.push_back(cc);
          conj_err = std::max(conj_err, cc.ratio);

          // J(T~^q E g) against 3 ||T|| ||E g||_p (recorded)
          Check b;
          b.lhs = jump_of(TE, p, rho);
          b.rhs = 3.0 * cont * extension_norm(g, opt.spec, p, 1.0);
          b.ratio = safe_ratio(b.lhs, b.rhs);
          b.holds = std::isfinite(b.ratio);
          b.params = {{"q", q}, {"r", r}};
          bound_checks.push_back(b);
        }
      }
    }
  }
  if (!fourier_checks.empty()) {
    rep.checks.push_back(worst_of("transfer:fourier_vs_kernel", fourier_checks));
    rep.checks.back().params["tolerance"] = opt.identity_tol;
    rep.checks.push_back(worst_of("transfer:restriction_conjugation", conj_checks));
    rep.checks.back().params["tolerance"] = opt.identity_tol;
    Check b = worst_of("transfer:modulated_bound", bound_checks);
    b.holds = true;
    rep.checks.push_back(b);
  }

  rep.summary = {{"continuous", cont},
                 {"continuous_dilation", opt.dilations[cont_s]},
                 {"per_q", per_q},
                 {"C", C},
                 {"fourier_vs_kernel", fourier_err},
                 {"restriction_conjugation", conj_err},
                 {"kernel_half_width", K.half_width()},
                 {"kernel_quadrature_error", K.quadrature_error()},
                 {"phi_quadrature_error", phi.quadrature_error()}};
  return rep;
}

}  // namespace jumpinterp
