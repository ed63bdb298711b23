#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fintime {

enum class TimeSetKind { FiniteSet, SampledInterval };

// Ordered pair of distinct times from the same time set.
struct TimePair {
  double t;
  double s;
};

// Compact time domain: either an explicit finite point set or a uniform
// sampling of a closed interval.  Points are strictly increasing.
class TimeSet {
public:
  static TimeSet finite(std::vector<double> points);
  static TimeSet interval(double t_min, double t_max, std::size_t samples);

  TimeSetKind kind() const { return kind_; }
  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double t_min() const { return points_.front(); }
  double t_max() const { return points_.back(); }
  double span() const { return t_max() - t_min(); }

  // A sampled interval stands for the full continuum, so it has limit points
  // and instantaneous rates exist; a finite set does not.
  bool has_limit_points() const { return kind_ == TimeSetKind::SampledInterval; }

  bool contains(double t) const;
  std::size_t index_of(double t) const;  // throws TimeNotInSet

  bool operator==(const TimeSet&) const = default;

private:
  TimeSet(TimeSetKind kind, std::vector<double> points)
      : kind_(kind), points_(std::move(points)) {}

  TimeSetKind kind_;
  std::vector<double> points_;
};

// All ordered pairs (t, s) with t != s; size n*(n-1).
std::vector<TimePair> unequal_pairs(const TimeSet& ts);

// Hausdorff distance between the two point sets.
double hausdorff_distance(const TimeSet& a, const TimeSet& b);

}  // namespace fintime
