#pragma once

#include <limits>
#include <vector>

namespace fcalc {

struct Interval {
  double lo, hi;
};

// Finite union of closed intervals, kept sorted and merged. Endpoints may be
// infinite for factors such as polynomials or pole kernels.
class IntervalSet {
 public:
  IntervalSet() = default;
  explicit IntervalSet(std::vector<Interval> parts);
  static IntervalSet whole_line();
  static IntervalSet single(double lo, double hi);

  const std::vector<Interval>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  bool bounded() const;
  bool contains(double x) const;
  double distance(double x) const;

  /// Convex hull; only meaningful when non-empty.
  Interval hull() const;
  double measure() const;

  IntervalSet unite(const IntervalSet& other) const;
  IntervalSet intersect(const IntervalSet& other) const;
  IntervalSet inflate(double margin) const;

 private:
  void normalize();
  std::vector<Interval> parts_;
};

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace fcalc
