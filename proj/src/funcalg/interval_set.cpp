#include "fcalc/funcalg/interval_set.hpp"

#include <algorithm>
#include <cmath>

namespace fcalc {

IntervalSet::IntervalSet(std::vector<Interval> parts) : parts_(std::move(parts)) {
  normalize();
}

IntervalSet IntervalSet::whole_line() { return IntervalSet({{-kInf, kInf}}); }

IntervalSet IntervalSet::single(double lo, double hi) { return IntervalSet({{lo, hi}}); }

void IntervalSet::normalize() {
  std::erase_if(parts_, [](const Interval& iv) { return !(iv.lo <= iv.hi); });
  std::sort(parts_.begin(), parts_.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto& iv : parts_) {
    if (!merged.empty() && iv.lo <= merged.back().hi)
      merged.back().hi = std::max(merged.back().hi, iv.hi);
    else
      merged.push_back(iv);
  }
  parts_ = std::move(merged);
}

bool IntervalSet::bounded() const {
  return !parts_.empty() && std::isfinite(parts_.front().lo) &&
         std::isfinite(parts_.back().hi);
}

bool IntervalSet::contains(double x) const {
  for (const auto& iv : parts_)
    if (x >= iv.lo && x <= iv.hi) return true;
  return false;
}

double IntervalSet::distance(double x) const {
  double d = kInf;
  for (const auto& iv : parts_) {
    if (x >= iv.lo && x <= iv.hi) return 0.0;
    d = std::min(d, x < iv.lo ? iv.lo - x : x - iv.hi);
  }
  return d;
}

Interval IntervalSet::hull() const {
  if (parts_.empty()) return {0.0, 0.0};
  return {parts_.front().lo, parts_.back().hi};
}

double IntervalSet::measure() const {
  double m = 0.0;
  for (const auto& iv : parts_) m += iv.hi - iv.lo;
  return m;
}

IntervalSet IntervalSet::unite(const IntervalSet& other) const {
  auto all = parts_;
  all.insert(all.end(), other.parts_.begin(), other.parts_.end());
  return IntervalSet(std::move(all));
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
  std::vector<Interval> out;
  for (const auto& a : parts_)
    for (const auto& b : other.parts_) {
      const double lo = std::max(a.lo, b.lo), hi = std::min(a.hi, b.hi);
      if (lo <= hi) out.push_back({lo, hi});
    }
  return IntervalSet(std::move(out));
}

IntervalSet IntervalSet::inflate(double margin) const {
  auto grown = parts_;
  for (auto& iv : grown) {
    iv.lo -= margin;
    iv.hi += margin;
  }
  return IntervalSet(std::move(grown));
}

}  // namespace fcalc
