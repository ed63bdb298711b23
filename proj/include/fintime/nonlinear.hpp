#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "fintime/geometry.hpp"
#include "fintime/process.hpp"
#include "fintime/rates.hpp"
#include "fintime/timeset.hpp"

namespace fintime {

// Dead zone around zero for sign classification: strict inequalities in the
// definitions need a margin under floating point.
inline constexpr double kMarginTol = 1e-6;

enum class DirectionLabel { Stable, Unstable, Neither };
enum class PointLabel { Attracted, Repelled, Neither };

struct DirectionClassification {
  Eigen::VectorXd direction;  // unit in the classifying norm
  DirectionLabel label = DirectionLabel::Neither;
  double lgr = 0.0;
  double ugr = 0.0;
};

// Label a single direction of the linear process: Stable when ugr < -tol,
// Unstable when lgr > tol, Neither inside the dead zone.
DirectionClassification classify_direction(const LinearProcess& P, const NormSpec& nm,
                                           const Eigen::VectorXd& x);

struct ConeClassification {
  std::vector<DirectionClassification> directions;  // grid order
  std::optional<std::size_t> best_stable;           // largest -ugr margin
  std::optional<std::size_t> best_unstable;         // largest lgr margin
  // For planar systems the stable/unstable sets must be open angular
  // intervals (single cyclic runs on the projective circle); true for n != 2.
  bool stable_contiguous = true;
  bool unstable_contiguous = true;
};

ConeClassification cone_sweep(const LinearProcess& P, const NormSpec& nm,
                              std::size_t resolution,
                              std::uint64_t seed = detail::kDefaultSeed);

struct PointClassification {
  Eigen::VectorXd point;
  PointLabel label = PointLabel::Neither;
  double mu_lower = 0.0;
  double mu_upper = 0.0;
  bool approximate = false;  // rates include finite-difference candidates
};

// Attraction/repulsion of x relative to the trajectory through `reference`,
// from the rates of the trajectory difference.
PointClassification domain_membership(const NonlinearProcess& phi, const NormSpec& nm,
                                      const Eigen::VectorXd& reference,
                                      const Eigen::VectorXd& x);

struct DomainClassification {
  std::vector<PointClassification> points;  // input order
};

DomainClassification domain_sweep(const NonlinearProcess& phi, const NormSpec& nm,
                                  const Eigen::VectorXd& reference,
                                  const std::vector<Eigen::VectorXd>& points);

// Largest radius r <= r_max such that every tested point of X's two unit
// rays below r is attracted to (repelled from, for unstable X) the zero
// trajectory.  Ray bisection assumes radial monotonicity; a 16-point
// verification pass afterwards downgrades the radius if that assumption
// fails.  X must classify Stable or Unstable under the linearization.
double cone_radius_eta(const NonlinearProcess& phi, const LinearProcess& P,
                       const NormSpec& nm, const Subspace& X, double r_max,
                       double bisection_tol);

// Worst deviation between nonlinear and linearized growth rates over a
// sampled ball of radius eta (8 radial shells x direction grid); a
// lower-bound estimate of the true supremum.  Both sides use the same
// difference-quotient estimators so discretization bias cancels.
double nonlinearity_measure(const NonlinearProcess& phi, const LinearProcess& P,
                            const NormSpec& nm, double eta, std::size_t samples,
                            std::uint64_t seed = detail::kDefaultSeed);

enum class AttractionVerdict { Attractive, Repulsive, HyperbolicSaddle, NotHyperbolic };

struct AttractionOptions {
  NormSpec norm = NormSpec::euclidean();
  std::size_t resolution = 64;
  double step = 0.0;                 // forwarded to the solvers
  std::size_t boundary_samples = 16; // sphere directions (both signs probed)
  std::uint64_t seed = detail::kDefaultSeed;
};

struct AttractionReport {
  AttractionVerdict verdict = AttractionVerdict::NotHyperbolic;
  Eigen::Index emd_k = -1;               // rank of the dichotomy, when hyperbolic
  double neighborhood_radius = 0.0;      // certified ball radius (attr./rep. only)
};

// Linearize along the trajectory through x0, read the dichotomy verdict off
// the linearization, and for the attractive/repulsive cases bisect the
// largest ball around x0 whose sampled boundary is uniformly attracted
// (repelled).  Integration blowup counts as failure to attract.
AttractionReport linearized_attraction_test(const SystemSpec& sys, const TimeSet& ts,
                                            const Eigen::VectorXd& x0,
                                            double search_radius,
                                            const AttractionOptions& opts = {});

struct FiberProbe {
  Eigen::VectorXd direction;  // unit fiber direction at time t
  double radius = 0.0;        // largest probe radius that lands in the domain
  bool positive = false;
};

struct FiberReport {
  double t = 0.0;
  std::vector<FiberProbe> probes;
  bool all_positive = true;
};

// Time-t fiber of the extended stable cone: push each direction forward
// through the linearization, probe radii r_probe * 2^-j (j = 0..12), and
// test whether the backward nonlinear flow of the probe point lies in the
// domain of attraction of zero.  Reports positivity per direction.
FiberReport extension_fiber_check(const NonlinearProcess& phi, const LinearProcess& P,
                                  const NormSpec& nm, double t,
                                  const std::vector<Eigen::VectorXd>& directions,
                                  double r_probe);

}  // namespace fintime
