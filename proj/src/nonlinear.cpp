#include "fintime/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "fintime/detail/parallel.hpp"
#include "fintime/errors.hpp"
#include "fintime/spectral.hpp"

namespace fintime {

namespace {

// Membership of a single cyclic run (or empty/full set) on the projective
// circle; antipodal wraparound joins the last half-circle cell to the first.
bool cyclic_contiguous(const std::vector<bool>& member) {
  const std::size_t n = member.size();
  if (n == 0) return true;
  int transitions = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (member[i] != member[(i + 1) % n]) ++transitions;
  }
  return transitions <= 2;
}

}  // namespace

DirectionClassification classify_direction(const LinearProcess& P, const NormSpec& nm,
                                           const Eigen::VectorXd& x) {
  const DirectionRates r = direction_rates(P, nm, x);
  DirectionClassification out;
  out.direction = r.lower.witness_direction;
  out.lgr = r.lower.value;
  out.ugr = r.upper.value;
  if (out.ugr < -kMarginTol) {
    out.label = DirectionLabel::Stable;
  } else if (out.lgr > kMarginTol) {
    out.label = DirectionLabel::Unstable;
  }
  return out;
}

ConeClassification cone_sweep(const LinearProcess& P, const NormSpec& nm,
                              std::size_t resolution, std::uint64_t seed) {
  const Eigen::Index n = P.dimension();
  const auto grid = sphere_grid(nm, Subspace::full(n), resolution, seed);

  ConeClassification out;
  out.directions.resize(grid.size());
  detail::parallel_for(grid.size(), [&](std::size_t i) {
    out.directions[i] = classify_direction(P, nm, grid[i]);
  });

  for (std::size_t i = 0; i < out.directions.size(); ++i) {
    const auto& d = out.directions[i];
    if (d.label == DirectionLabel::Stable) {
      if (!out.best_stable || -d.ugr > -out.directions[*out.best_stable].ugr) {
        out.best_stable = i;
      }
    } else if (d.label == DirectionLabel::Unstable) {
      if (!out.best_unstable || d.lgr > out.directions[*out.best_unstable].lgr) {
        out.best_unstable = i;
      }
    }
  }

  if (n == 2) {
    std::vector<bool> stable(grid.size()), unstable(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      stable[i] = out.directions[i].label == DirectionLabel::Stable;
      unstable[i] = out.directions[i].label == DirectionLabel::Unstable;
    }
    out.stable_contiguous = cyclic_contiguous(stable);
    out.unstable_contiguous = cyclic_contiguous(unstable);
  }
  return out;
}

PointClassification domain_membership(const NonlinearProcess& phi, const NormSpec& nm,
                                      const Eigen::VectorXd& reference,
                                      const Eigen::VectorXd& x) {
  const DirectionRates r = direction_rates_nonlinear(phi, nm, x, reference);
  PointClassification out;
  out.point = x;
  out.mu_lower = r.lower.value;
  out.mu_upper = r.upper.value;
  out.approximate = r.lower.approximate || r.upper.approximate;
  if (out.mu_upper < -kMarginTol) {
    out.label = PointLabel::Attracted;
  } else if (out.mu_lower > kMarginTol) {
    out.label = PointLabel::Repelled;
  }
  return out;
}

DomainClassification domain_sweep(const NonlinearProcess& phi, const NormSpec& nm,
                                  const Eigen::VectorXd& reference,
                                  const std::vector<Eigen::VectorXd>& points) {
  DomainClassification out;
  out.points.resize(points.size());
  detail::parallel_for(points.size(), [&](std::size_t i) {
    out.points[i] = domain_membership(phi, nm, reference, points[i]);
  });
  return out;
}

namespace {

// Membership of r*d in the attracted (repelled) set around zero, with the
// degenerate outcomes folded into the verdict: a collision with the zero
// trajectory is ultimate attraction; finite-time escape is repulsion.
bool ray_member(const NonlinearProcess& phi, const NormSpec& nm,
                const Eigen::VectorXd& d, double r, PointLabel target) {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d.size());
  try {
    return domain_membership(phi, nm, zero, r * d).label == target;
  } catch (const TrajectoryCollision&) {
    return target == PointLabel::Attracted;
  } catch (const IntegrationBlowup&) {
    return target == PointLabel::Repelled;
  }
}

double ray_radius(const NonlinearProcess& phi, const NormSpec& nm,
                  const Eigen::VectorXd& d, double r_max, double tol,
                  PointLabel target) {
  const double r_floor = r_max / 1024.0;
  if (!ray_member(phi, nm, d, r_floor, target)) return 0.0;
  if (ray_member(phi, nm, d, r_max, target)) return r_max;

  double lo = r_floor;
  double hi = r_max;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (ray_member(phi, nm, d, mid, target)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  // Bisection assumed membership is radially monotone; re-test a ladder of
  // radii below the answer and keep only the all-passing prefix.
  for (int j = 1; j <= 16; ++j) {
    const double r = lo * static_cast<double>(j) / 16.0;
    if (!ray_member(phi, nm, d, r, target)) {
      return lo * static_cast<double>(j - 1) / 16.0;
    }
  }
  return lo;
}

}  // namespace

double cone_radius_eta(const NonlinearProcess& phi, const LinearProcess& P,
                       const NormSpec& nm, const Subspace& X, double r_max,
                       double bisection_tol) {
  if (X.dim() != 1) {
    throw DimensionMismatch("cone radius is defined for one-dimensional subspaces");
  }
  const Eigen::VectorXd d = X.frame().col(0) / nm.eval(X.frame().col(0));
  const DirectionClassification cls = classify_direction(P, nm, d);
  if (cls.label == DirectionLabel::Neither) {
    throw InvalidDirectionClass(
        "direction is neither stable nor unstable under the linearization");
  }
  const PointLabel target = (cls.label == DirectionLabel::Stable)
                                ? PointLabel::Attracted
                                : PointLabel::Repelled;
  const double plus = ray_radius(phi, nm, d, r_max, bisection_tol, target);
  const double minus = ray_radius(phi, nm, -d, r_max, bisection_tol, target);
  return std::min(plus, minus);
}

double nonlinearity_measure(const NonlinearProcess& phi, const LinearProcess& P,
                            const NormSpec& nm, double eta, std::size_t samples,
                            std::uint64_t seed) {
  if (eta < 0.0) throw Error("nonlinearity_measure: radius must be nonnegative");
  if (eta == 0.0) return 0.0;

  const Eigen::Index n = P.dimension();
  const TimeSet& ts = P.timeset();
  const bool fd = ts.has_limit_points();
  const auto dirs = sphere_grid(nm, Subspace::full(n), samples, seed);

  constexpr int kShells = 8;
  std::vector<Eigen::VectorXd> points;
  points.reserve(dirs.size() * kShells * 2);
  for (const auto& d : dirs) {
    for (int s = 1; s <= kShells; ++s) {
      // The grid is sign-canonical but the flow need not be odd, so probe
      // both rays of every sampled line.
      points.push_back((eta * s / kShells) * d);
      points.push_back(-(eta * s / kShells) * d);
    }
  }

  std::vector<double> devs(points.size());
  detail::parallel_for(points.size(), [&](std::size_t i) {
    const Eigen::VectorXd& x0 = points[i];
    const DirectionRates nl = direction_rates_nonlinear(phi, nm, x0,
                                                        Eigen::VectorXd::Zero(n));
    // Linear side through the same estimator: exact propagation of x0, then
    // the identical difference-quotient machinery, so grid bias cancels.
    std::vector<double> vals(ts.size());
    for (std::size_t k = 0; k < ts.size(); ++k) vals[k] = nm.eval(P.fundamental(k) * x0);
    const DirectionRates lin = detail::rates_from_norm_table(ts, vals, x0, fd);
    devs[i] = std::max(std::abs(nl.lower.value - lin.lower.value),
                       std::abs(nl.upper.value - lin.upper.value));
  });
  double m = 0.0;
  for (double v : devs) m = std::max(m, v);
  return m;
}

AttractionReport linearized_attraction_test(const SystemSpec& sys, const TimeSet& ts,
                                            const Eigen::VectorXd& x0,
                                            double search_radius,
                                            const AttractionOptions& opts) {
  SolveOptions sopts;
  sopts.step = opts.step;
  const LinearProcess P = linearize(sys, ts, x0, sopts);
  const EmdResult emd = emd_check(P, opts.norm, opts.resolution, opts.seed);

  AttractionReport out;
  if (!emd.hyperbolic) return out;
  out.emd_k = emd.k;
  if (emd.attractive) {
    out.verdict = AttractionVerdict::Attractive;
  } else if (emd.repulsive) {
    out.verdict = AttractionVerdict::Repulsive;
  } else {
    out.verdict = AttractionVerdict::HyperbolicSaddle;
    return out;  // no full neighborhood is claimed for a saddle
  }

  const PointLabel target = emd.attractive ? PointLabel::Attracted : PointLabel::Repelled;
  const NonlinearProcess phi(sys, ts, sopts);
  const auto dirs = sphere_grid(opts.norm, Subspace::full(P.dimension()),
                                opts.boundary_samples, opts.seed);

  auto boundary_ok = [&](double r) {
    // The grid is antipodally identified; probe both signs of each direction.
    for (const auto& d : dirs) {
      for (double sign : {1.0, -1.0}) {
        try {
          if (domain_membership(phi, opts.norm, x0, x0 + sign * r * d).label != target) {
            return false;
          }
        } catch (const TrajectoryCollision&) {
          if (target != PointLabel::Attracted) return false;
        } catch (const IntegrationBlowup&) {
          if (target != PointLabel::Repelled) return false;
        }
      }
    }
    return true;
  };

  const double r_floor = search_radius / 1024.0;
  if (!boundary_ok(r_floor)) return out;  // verdict stands, no radius certified
  if (boundary_ok(search_radius)) {
    out.neighborhood_radius = search_radius;
    return out;
  }
  double lo = r_floor;
  double hi = search_radius;
  for (int iter = 0; iter < 24 && hi - lo > 1e-9 * search_radius; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (boundary_ok(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  out.neighborhood_radius = lo;
  return out;
}

FiberReport extension_fiber_check(const NonlinearProcess& phi, const LinearProcess& P,
                                  const NormSpec& nm, double t,
                                  const std::vector<Eigen::VectorXd>& directions,
                                  double r_probe) {
  const TimeSet& ts = phi.timeset();
  (void)ts.index_of(t);  // t must be a grid time
  const double t_min = ts.t_min();
  const Eigen::MatrixXd F = P.evaluate(t, t_min);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(P.dimension());

  FiberReport out;
  out.t = t;
  out.probes.resize(directions.size());
  detail::parallel_for(directions.size(), [&](std::size_t i) {
    FiberProbe probe;
    Eigen::VectorXd y = F * directions[i];
    const double len = nm.eval(y);
    if (len < kNormFloor) throw NonpositiveNorm("fiber direction collapsed");
    y /= len;
    probe.direction = y;
    for (int j = 0; j <= 12; ++j) {
      const double r = r_probe * std::pow(2.0, -j);
      try {
        const Eigen::VectorXd back = phi.evaluate(t_min, t, r * y);
        if (domain_membership(phi, nm, zero, back).label == PointLabel::Attracted) {
          probe.radius = r;
          probe.positive = true;
          break;
        }
      } catch (const TrajectoryCollision&) {
        probe.radius = r;
        probe.positive = true;
        break;
      } catch (const IntegrationBlowup&) {
        // escape during the backward flow: this radius is out of range
      }
    }
    out.probes[i] = probe;
  });
  for (const auto& p : out.probes) out.all_positive = out.all_positive && p.positive;
  return out;
}

}  // namespace fintime
