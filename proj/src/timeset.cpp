#include "fintime/timeset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fintime/errors.hpp"

namespace fintime {

namespace {

// Lookup tolerance: grid points are stored exactly, but callers may hand in
// times recomputed through arithmetic that rounds in the last place.
double lookup_tol(const TimeSet& ts) {
  double scale = std::max({1.0, std::abs(ts.t_min()), std::abs(ts.t_max())});
  return 1e-12 * scale;
}

}  // namespace

TimeSet TimeSet::finite(std::vector<double> points) {
  if (points.empty()) {
    throw InvalidTimeSet("finite time set needs at least one point");
  }
  for (double p : points) {
    if (!std::isfinite(p)) {
      throw InvalidTimeSet("finite time set contains a non-finite point");
    }
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return TimeSet(TimeSetKind::FiniteSet, std::move(points));
}

TimeSet TimeSet::interval(double t_min, double t_max, std::size_t samples) {
  if (!std::isfinite(t_min) || !std::isfinite(t_max) || !(t_min < t_max)) {
    throw InvalidTimeSet("interval requires finite t_min < t_max");
  }
  if (samples < 2) {
    throw InvalidTimeSet("interval sampling needs at least two points");
  }
  std::vector<double> pts(samples);
  const double h = (t_max - t_min) / static_cast<double>(samples - 1);
  for (std::size_t i = 0; i < samples; ++i) {
    pts[i] = t_min + static_cast<double>(i) * h;
  }
  pts.back() = t_max;  // guard against accumulated rounding
  return TimeSet(TimeSetKind::SampledInterval, std::move(pts));
}

bool TimeSet::contains(double t) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), t);
  const double tol = lookup_tol(*this);
  if (it != points_.end() && std::abs(*it - t) <= tol) return true;
  if (it != points_.begin() && std::abs(*(it - 1) - t) <= tol) return true;
  return false;
}

std::size_t TimeSet::index_of(double t) const {
  auto it = std::lower_bound(points_.begin(), points_.end(), t);
  const double tol = lookup_tol(*this);
  if (it != points_.end() && std::abs(*it - t) <= tol) {
    return static_cast<std::size_t>(it - points_.begin());
  }
  if (it != points_.begin() && std::abs(*(it - 1) - t) <= tol) {
    return static_cast<std::size_t>(it - points_.begin()) - 1;
  }
  throw TimeNotInSet("time " + std::to_string(t) + " is not a grid point");
}

std::vector<TimePair> unequal_pairs(const TimeSet& ts) {
  const auto& p = ts.points();
  std::vector<TimePair> out;
  out.reserve(p.size() * (p.size() - 1));
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (i == j) continue;
      out.push_back({p[i], p[j]});
    }
  }
  return out;
}

double hausdorff_distance(const TimeSet& a, const TimeSet& b) {
  auto directed = [](const std::vector<double>& from, const std::vector<double>& to) {
    double worst = 0.0;
    for (double x : from) {
      auto it = std::lower_bound(to.begin(), to.end(), x);
      double best = std::numeric_limits<double>::infinity();
      if (it != to.end()) best = std::min(best, std::abs(*it - x));
      if (it != to.begin()) best = std::min(best, std::abs(*(it - 1) - x));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(a.points(), b.points()), directed(b.points(), a.points()));
}

}  // namespace fintime
