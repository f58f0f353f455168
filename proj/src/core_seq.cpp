#include "jumpinterp/core_seq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "jumpinterp/error.hpp"

namespace jumpinterp {

BNorm::BNorm(std::size_t dimension, double exponent) : dim_(dimension), s_(exponent) {
  if (dimension == 0) throw DomainError("BNorm: dimension must be positive");
  if (!(exponent >= 1.0)) throw DomainError("BNorm: exponent must lie in [1, inf]");
}

double BNorm::operator()(std::span<const double> v) const {
  if (dim_ == 1) return std::abs(v[0]);
  if (std::isinf(s_)) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }
  if (s_ == 2.0) {
    // hypot-style scaling keeps tiny and huge entries exact enough
    double scale = 0.0;
    for (double x : v) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) return 0.0;
    double acc = 0.0;
    for (double x : v) acc += (x / scale) * (x / scale);
    return scale * std::sqrt(acc);
  }
  if (s_ == 1.0) {
    double acc = 0.0;
    for (double x : v) acc += std::abs(x);
    return acc;
  }
  double scale = 0.0;
  for (double x : v) scale = std::max(scale, std::abs(x));
  if (scale == 0.0) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += std::pow(std::abs(x) / scale, s_);
  return scale * std::pow(acc, 1.0 / s_);
}

double BNorm::distance(std::span<const double> a, std::span<const double> b) const {
  if (dim_ == 1) return std::abs(a[0] - b[0]);
  double buf[16];
  std::vector<double> heap;
  double* diff = buf;
  if (dim_ > 16) {
    heap.resize(dim_);
    diff = heap.data();
  }
  for (std::size_t k = 0; k < dim_; ++k) diff[k] = a[k] - b[k];
  return (*this)(std::span<const double>(diff, dim_));
}

TimeSeries::TimeSeries(std::vector<double> labels, std::vector<double> flat_values,
                       BNorm norm)
    : labels_(std::move(labels)), values_(std::move(flat_values)), norm_(norm) {
  if (values_.size() != labels_.size() * norm_.dimension()) {
    throw InputError("TimeSeries: expected " +
                     std::to_string(labels_.size() * norm_.dimension()) +
                     " values, got " + std::to_string(values_.size()));
  }
  for (std::size_t i = 1; i < labels_.size(); ++i) {
    if (!(labels_[i - 1] < labels_[i])) {
      throw InputError("TimeSeries: labels must be strictly increasing", i);
    }
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      throw InputError("TimeSeries: non-finite value", k / norm_.dimension());
    }
  }
}

TimeSeries TimeSeries::scalar(std::vector<double> values) {
  std::vector<double> labels(values.size());
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<double>(i);
  return TimeSeries(std::move(labels), std::move(values), BNorm(1, 2.0));
}

TimeSeries TimeSeries::from_rows(const std::vector<std::vector<double>>& rows,
                                 BNorm norm) {
  std::vector<double> labels(rows.size());
  std::vector<double> flat;
  flat.reserve(rows.size() * norm.dimension());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != norm.dimension()) {
      throw InputError("TimeSeries: row has wrong dimension", i);
    }
    labels[i] = static_cast<double>(i);
    flat.insert(flat.end(), rows[i].begin(), rows[i].end());
  }
  return TimeSeries(std::move(labels), std::move(flat), norm);
}

TimeSeries TimeSeries::with_values(std::vector<double> flat_values) const {
  return TimeSeries(labels_, std::move(flat_values), norm_);
}

TimeSeries TimeSeries::restrict_to(std::span<const std::size_t> positions) const {
  std::vector<double> labels;
  std::vector<double> flat;
  labels.reserve(positions.size());
  flat.reserve(positions.size() * dimension());
  for (std::size_t p : positions) {
    labels.push_back(labels_.at(p));
    auto v = value(p);
    flat.insert(flat.end(), v.begin(), v.end());
  }
  return TimeSeries(std::move(labels), std::move(flat), norm_);
}

DistanceMatrix::DistanceMatrix(const TimeSeries& ts) : n_(ts.size()), d_(n_ * n_, 0.0) {
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double v = ts.distance(i, j);
      d_[i * n_ + j] = v;
      d_[j * n_ + i] = v;
    }
  }
}

std::vector<std::size_t> stopping_positions(const DistanceMatrix& d, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("stopping_positions: lambda must be positive");
  if (d.size() == 0) throw DomainError("stopping_positions: empty series");
  std::vector<std::size_t> stops{0};
  std::size_t cur = 0;
  for (std::size_t t = 1; t < d.size(); ++t) {
    if (d(cur, t) >= lambda) {
      stops.push_back(t);
      cur = t;
    }
  }
  return stops;
}

JumpWitness jump_count(const DistanceMatrix& d, double lambda) {
  if (!(lambda > 0.0)) throw DomainError("jump_count: lambda must be positive");
  const std::size_t n = d.size();
  if (n == 0) throw DomainError("jump_count: empty series");
  // len[j]: most jumps of size >= lambda along a chain ending at j
  std::vector<std::size_t> len(n, 0), parent(n, n);
  std::size_t end = 0;
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      if (d(i, j) >= lambda && len[i] + 1 > len[j]) {
        len[j] = len[i] + 1;
        parent[j] = i;
      }
    }
    if (len[j] > len[end]) end = j;
  }
  JumpWitness w;
  w.count = len[end];
  for (std::size_t k = end; k != n; k = parent[k]) w.times.push_back(k);
  std::reverse(w.times.begin(), w.times.end());
  return w;
}

JumpWitness jump_count(const TimeSeries& ts, double lambda) {
  if (ts.empty()) throw DomainError("jump_count: empty series");
  if (!(lambda > 0.0)) throw DomainError("jump_count: lambda must be positive");
  return jump_count(DistanceMatrix(ts), lambda);
}

std::vector<double> jump_breakpoints(const DistanceMatrix& d) {
  std::vector<double> out;
  out.reserve(d.size() * (d.size() - 1) / 2);
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (std::size_t j = i + 1; j < d.size(); ++j) {
      if (d(i, j) > 0.0) out.push_back(d(i, j));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<double> jump_breakpoints(const TimeSeries& ts) {
  if (ts.empty()) throw DomainError("jump_breakpoints: empty series");
  return jump_breakpoints(DistanceMatrix(ts));
}

std::size_t CountProfile::at(double lambda) const {
  auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), lambda);
  if (it == breakpoints.end()) return 0;
  return counts[static_cast<std::size_t>(it - breakpoints.begin())];
}

CountProfile jump_profile(const DistanceMatrix& d) {
  const std::size_t n = d.size();
  CountProfile prof;
  prof.breakpoints = jump_breakpoints(d);
  // top[k]: largest smallest-jump over chains with k jumps, so that
  // N_lambda = max{k : top[k] >= lambda}; nonincreasing in k.
  std::vector<double> top{std::numeric_limits<double>::infinity()};
  std::vector<double> prev(n, std::numeric_limits<double>::infinity()), cur(n);
  for (std::size_t k = 1; k < n; ++k) {
    double best = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double b = 0.0;
      for (std::size_t i = 0; i < j; ++i) b = std::max(b, std::min(prev[i], d(i, j)));
      cur[j] = b;
      best = std::max(best, b);
    }
    if (!(best > 0.0)) break;
    top.push_back(best);
    std::swap(prev, cur);
  }
  prof.counts.reserve(prof.breakpoints.size());
  for (double b : prof.breakpoints) {
    std::size_t k = top.size() - 1;
    while (top[k] < b) --k;
    prof.counts.push_back(k);
  }
  return prof;
}

CountProfile jump_profile(const TimeSeries& ts) {
  if (ts.empty()) throw DomainError("jump_profile: empty series");
  return jump_profile(DistanceMatrix(ts));
}

VariationResult variation(const DistanceMatrix& d, double r) {
  if (d.size() == 0) throw DomainError("variation: empty series");
  if (!(r > 0.0)) throw DomainError("variation: r must be positive");
  const std::size_t n = d.size();
  VariationResult res;
  if (n == 1) {
    res.witness = {0};
    return res;
  }
  if (std::isinf(r)) {
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (d(i, j) > res.value) {
          res.value = d(i, j);
          bi = i;
          bj = j;
        }
      }
    }
    res.witness = (res.value > 0.0) ? std::vector<std::size_t>{bi, bj}
                                    : std::vector<std::size_t>{0};
    return res;
  }
  // best[j]: largest sum of r-th powers over chains ending at j.
  std::vector<double> best(n, 0.0);
  std::vector<std::size_t> prev(n, n);
  for (std::size_t j = 1; j < n; ++j) {
    for (std::size_t i = 0; i < j; ++i) {
      const double dij = d(i, j);
      if (dij == 0.0) continue;
      const double cand = best[i] + (r == 1.0 ? dij : std::pow(dij, r));
      if (cand > best[j]) {
        best[j] = cand;
        prev[j] = i;
      }
    }
  }
  const auto end = static_cast<std::size_t>(
      std::max_element(best.begin(), best.end()) - best.begin());
  for (std::size_t k = end; k != n; k = prev[k]) res.witness.push_back(k);
  std::reverse(res.witness.begin(), res.witness.end());
  res.value = (r == 1.0) ? best[end] : std::pow(best[end], 1.0 / r);
  return res;
}

VariationResult variation(const TimeSeries& ts, double r) {
  if (ts.empty()) throw DomainError("variation: empty series");
  return variation(DistanceMatrix(ts), r);
}

double chain_power_sum(const DistanceMatrix& d, std::span<const std::size_t> chain,
                       double r) {
  double acc = 0.0;
  for (std::size_t k = 1; k < chain.size(); ++k) acc += std::pow(d(chain[k - 1], chain[k]), r);
  return acc;
}

}  // namespace jumpinterp
