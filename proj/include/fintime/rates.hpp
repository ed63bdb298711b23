#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fintime/geometry.hpp"
#include "fintime/process.hpp"
#include "fintime/timeset.hpp"

namespace fintime {

// Values below this are treated as a collapsed trajectory, not a number
// whose logarithm is meaningful.
inline constexpr double kNormFloor = 1e-300;

// Extremal rate with enough provenance to reproduce it: either a time pair
// (logarithmic difference quotient) or a single time (instantaneous rate).
// `approximate` marks finite-difference diagonal candidates from trajectory
// data, where no exact instantaneous rate exists.
struct RateResult {
  double value = 0.0;
  Eigen::VectorXd witness_direction;
  std::optional<TimePair> witness_pair;
  std::optional<double> witness_time;
  bool approximate = false;
};

struct DirectionRates {
  RateResult lower;
  RateResult upper;
};

struct SubspaceRates {
  RateResult lgr;
  RateResult ugr;
};

// (ln values[t] - ln values[s]) / (t - s) for grid times t != s.
double log_diff_quotient(const TimeSet& ts, std::span<const double> values,
                         const TimePair& pair);

// Derivative of t -> ln |Phi(t, t_min) x| at a grid time; needs an interval
// time set (finite sets have no limit points, hence no derivatives).
double instantaneous_rate(const LinearProcess& P, const NormSpec& nm,
                          const Eigen::VectorXd& x, double t);

// Same quantity at arbitrary times inside the solved range, through the
// dense representation; used by refinement and witness reproduction.
double rate_at(const LinearProcess& P, const NormSpec& nm, const Eigen::VectorXd& x,
               double t);

// Infimum and supremum of the logarithmic difference quotient of
// t -> |Phi(t, t_min) x| over the closure of the unequal-pair relation.
// On intervals the diagonal contributes instantaneous rates, locally refined
// in time between grid points.
DirectionRates direction_rates(const LinearProcess& P, const NormSpec& nm,
                               const Eigen::VectorXd& x);

// Trajectory-difference analogue: rates of t -> |phi(t,x) - phi(t,reference)|.
// Diagonal candidates come from second-order finite differences and are
// flagged approximate.
DirectionRates direction_rates_nonlinear(const NonlinearProcess& phi, const NormSpec& nm,
                                         const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& reference);

// Lower/upper growth rates of a subspace: extremize direction rates over the
// unit sphere of X (grid plus local refinement).  dim 0 returns (+inf, -inf)
// by convention.
SubspaceRates subspace_growth_rates(const LinearProcess& P, const NormSpec& nm,
                                    const Subspace& X, std::size_t resolution);

namespace detail {

// Candidate pool over a positive norm table: all pairwise quotients, plus
// second-order finite-difference diagonal candidates on interval sets.
DirectionRates rates_from_norm_table(const TimeSet& ts, const std::vector<double>& values,
                                     const Eigen::VectorXd& direction, bool fd_diagonal);

// Golden-section maximum of f on [a, b]; deterministic iteration count.
std::pair<double, double> golden_max(const std::function<double(double)>& f, double a,
                                     double b, int iters = 48);

// Local maximization of a direction objective on the unit sphere of R^k,
// starting from a grid optimum; shrinking pattern search, deterministic.
std::pair<Eigen::VectorXd, double> refine_direction_max(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const Eigen::VectorXd& start, double start_value, double initial_radius);

}  // namespace detail
}  // namespace fintime
