#pragma once

// Jump counts and r-variation of a single B-valued sequence, B = (R^m, l^s).

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace jumpinterp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// The l^s norm on real m-tuples. s = kInf selects the sup norm.
class BNorm {
 public:
  BNorm() = default;
  BNorm(std::size_t dimension, double exponent);

  std::size_t dimension() const noexcept { return dim_; }
  double exponent() const noexcept { return s_; }

  double operator()(std::span<const double> v) const;
  double distance(std::span<const double> a, std::span<const double> b) const;

  friend bool operator==(const BNorm&, const BNorm&) = default;

 private:
  std::size_t dim_ = 1;
  double s_ = 2.0;
};

// f : I -> B on a finite, strictly increasing label set. Values are stored
// row-major, one m-tuple per label.
class TimeSeries {
 public:
  TimeSeries() = default;
  TimeSeries(std::vector<double> labels, std::vector<double> flat_values,
             BNorm norm);

  // Scalar series labelled 0, 1, ..., n-1.
  static TimeSeries scalar(std::vector<double> values);
  // Labels 0..n-1, one m-tuple per row.
  static TimeSeries from_rows(const std::vector<std::vector<double>>& rows,
                              BNorm norm);

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  std::size_t dimension() const noexcept { return norm_.dimension(); }
  const BNorm& norm() const noexcept { return norm_; }
  const std::vector<double>& labels() const noexcept { return labels_; }
  const std::vector<double>& flat_values() const noexcept { return values_; }

  std::span<const double> value(std::size_t i) const {
    return {values_.data() + i * norm_.dimension(), norm_.dimension()};
  }
  double distance(std::size_t i, std::size_t j) const {
    return norm_.distance(value(i), value(j));
  }

  // Same labels and norm, entries replaced.
  TimeSeries with_values(std::vector<double> flat_values) const;
  // Subsequence at the given (increasing) positions.
  TimeSeries restrict_to(std::span<const std::size_t> positions) const;

 private:
  std::vector<double> labels_;
  std::vector<double> values_;
  BNorm norm_;
};

// Symmetric matrix of ||f(t_i) - f(t_j)||_B.
class DistanceMatrix {
 public:
  explicit DistanceMatrix(const TimeSeries& ts);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return d_[i * n_ + j]; }

 private:
  std::size_t n_;
  std::vector<double> d_;
};

// Certificate for N_lambda: positions t_0 < ... < t_J with consecutive
// differences >= lambda. count == times.size() - 1 (or 0 when empty).
struct JumpWitness {
  std::size_t count = 0;
  std::vector<std::size_t> times;
};

// N_lambda: the largest J with positions t_0 < ... < t_J whose consecutive
// differences are >= lambda, by a longest-chain dynamic program (O(n^2)).
JumpWitness jump_count(const TimeSeries& ts, double lambda);
JumpWitness jump_count(const DistanceMatrix& d, double lambda);

// Stopping positions of the greedy rule: t_0 = first position, t_{k+1} = first
// position after t_k whose distance from t_k is >= lambda. Their count can be
// smaller than N_lambda ([0, 1, -1] at lambda = 2 gives 0 against 1).
std::vector<std::size_t> stopping_positions(const DistanceMatrix& d, double lambda);

// Sorted distinct nonzero pairwise distances. lambda -> N_lambda is constant
// on every half-open interval (b_i, b_{i+1}] between consecutive values and
// vanishes above the largest.
std::vector<double> jump_breakpoints(const TimeSeries& ts);
std::vector<double> jump_breakpoints(const DistanceMatrix& d);

// Step function lambda -> count, stored at its breakpoints: count(lambda) is
// counts[k] for the smallest breakpoints[k] >= lambda and 0 above the last.
struct CountProfile {
  std::vector<double> breakpoints;
  std::vector<std::size_t> counts;

  std::size_t at(double lambda) const;
};

// All counts at once from the largest smallest-jump of chains with k jumps,
// for every k (O(n^3)).
CountProfile jump_profile(const TimeSeries& ts);
CountProfile jump_profile(const DistanceMatrix& d);

struct VariationResult {
  double value = 0.0;
  std::vector<std::size_t> witness;  // attaining increasing positions
};

// r-variation for r in (0, inf]. For finite r an O(n^2) dynamic program over
// the last chosen position; r = kInf gives the largest pairwise distance.
VariationResult variation(const TimeSeries& ts, double r);
VariationResult variation(const DistanceMatrix& d, double r);

// Sum over consecutive witness links of ||f(t_{j+1}) - f(t_j)||^r (r finite).
double chain_power_sum(const DistanceMatrix& d, std::span<const std::size_t> chain,
                       double r);

}  // namespace jumpinterp
