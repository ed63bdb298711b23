#include "fintime/spectral.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fintime/detail/parallel.hpp"
#include "fintime/errors.hpp"

namespace fintime {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kComplementaritySv = 1e-8;

Subspace complement_of_line(const Eigen::VectorXd& normal) {
  const Eigen::Index n = normal.size();
  Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(normal);
  Eigen::MatrixXd q = qr.matrixQ();
  return Subspace::from_frame(q.rightCols(n - 1));
}

double grid_spacing(Eigen::Index param_dim, std::size_t resolution) {
  if (param_dim <= 2) return M_PI / static_cast<double>(resolution);
  return 2.0 * std::sqrt(2.0 * M_PI / static_cast<double>(resolution));
}

// Deterministic multistart ascent over orthonormal frames (heuristic regime).
std::pair<Subspace, double> refine_frame_max(
    const std::function<double(const Subspace&)>& objective,
    const std::vector<Subspace>& starts, std::uint64_t seed) {
  Subspace best = starts.front();
  double best_value = objective(best);
  for (std::size_t i = 1; i < starts.size(); ++i) {
    const double v = objective(starts[i]);
    if (v > best_value) {
      best_value = v;
      best = starts[i];
    }
  }

  const Eigen::Index n = best.ambient_dim();
  const Eigen::Index k = best.dim();
  double rho = 0.3;
  for (int level = 0; level < 3; ++level) {
    for (int iter = 0; iter < 6; ++iter) {
      bool improved = false;
      for (int p = 0; p < 4; ++p) {
        detail::SplitMix64 rng(seed ^ (static_cast<std::uint64_t>(level) << 24) ^
                               (static_cast<std::uint64_t>(iter) << 16) ^
                               (static_cast<std::uint64_t>(p) << 8) ^
                               static_cast<std::uint64_t>(k));
        Eigen::MatrixXd g(n, k);
        for (Eigen::Index r = 0; r < n; ++r) {
          for (Eigen::Index c = 0; c < k; ++c) g(r, c) = rng.gaussian();
        }
        Eigen::MatrixXd cand_cols = best.frame() + rho * g;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(cand_cols);
        if (svd.singularValues()(k - 1) < 1e-8) continue;
        const Subspace cand = Subspace::from_frame(cand_cols);
        const double v = objective(cand);
        if (v > best_value) {
          best_value = v;
          best = cand;
          improved = true;
        }
      }
      if (!improved) break;
    }
    rho /= 8.0;
  }
  return {best, best_value};
}

}  // namespace

ExtremalRates extremal_growth_rates(const LinearProcess& P, const NormSpec& nm,
                                    std::size_t resolution, std::uint64_t seed) {
  const Eigen::Index n = P.dimension();
  ExtremalRates R;
  R.n = n;
  R.elgr.assign(static_cast<std::size_t>(n) + 1, 0.0);
  R.eugr.assign(static_cast<std::size_t>(n) + 1, 0.0);
  R.elgr[0] = kInf;
  R.eugr[0] = -kInf;
  R.argmax_subspace.reserve(static_cast<std::size_t>(n) + 1);
  R.argmin_subspace.reserve(static_cast<std::size_t>(n) + 1);
  R.argmax_subspace.push_back(Subspace::zero(n));
  R.argmin_subspace.push_back(Subspace::zero(n));
  R.elgr_runners_up.assign(static_cast<std::size_t>(n) + 1, {});
  R.eugr_runners_up.assign(static_cast<std::size_t>(n) + 1, {});

  for (Eigen::Index k = 1; k <= n; ++k) {
    if (!grassmann_grid_certified(k, n)) R.certified = false;

    const auto grid = grassmann_grid(k, n, resolution, seed);
    std::vector<SubspaceRates> rates(grid.size());
    detail::parallel_for(grid.size(), [&](std::size_t i) {
      rates[i] = subspace_growth_rates(P, nm, grid[i], resolution);
    });

    std::vector<std::size_t> by_lgr(grid.size());
    std::iota(by_lgr.begin(), by_lgr.end(), 0);
    std::vector<std::size_t> by_ugr = by_lgr;
    std::stable_sort(by_lgr.begin(), by_lgr.end(), [&](std::size_t a, std::size_t b) {
      return rates[a].lgr.value > rates[b].lgr.value;
    });
    std::stable_sort(by_ugr.begin(), by_ugr.end(), [&](std::size_t a, std::size_t b) {
      return rates[a].ugr.value < rates[b].ugr.value;
    });

    Subspace best_max = grid[by_lgr.front()];
    double val_max = rates[by_lgr.front()].lgr.value;
    Subspace best_min = grid[by_ugr.front()];
    double val_min = rates[by_ugr.front()].ugr.value;

    for (std::size_t i = 0; i < std::min<std::size_t>(8, grid.size()); ++i) {
      R.elgr_runners_up[static_cast<std::size_t>(k)].push_back(grid[by_lgr[i]]);
      R.eugr_runners_up[static_cast<std::size_t>(k)].push_back(grid[by_ugr[i]]);
    }

    if (k < n && grid.size() > 1) {
      if (k == 1) {
        // Lines are directions; refine on the ambient sphere.
        const double spacing = grid_spacing(n, resolution);
        auto lift = [](const Eigen::VectorXd& d) { return Subspace::line(d); };
        {
          auto obj = [&](const Eigen::VectorXd& d) {
            return subspace_growth_rates(P, nm, lift(d), resolution).lgr.value;
          };
          auto [d, v] = detail::refine_direction_max(obj, best_max.frame().col(0),
                                                     val_max, spacing);
          if (v > val_max) {
            val_max = v;
            best_max = lift(d);
          }
        }
        {
          auto obj = [&](const Eigen::VectorXd& d) {
            return -subspace_growth_rates(P, nm, lift(d), resolution).ugr.value;
          };
          auto [d, v] = detail::refine_direction_max(obj, best_min.frame().col(0),
                                                     -val_min, spacing);
          if (-v < val_min) {
            val_min = -v;
            best_min = lift(d);
          }
        }
      } else if (n == 3 && k == 2) {
        // Planes in R^3 are complements of their normals; refine the normal.
        const double spacing = grid_spacing(3, resolution);
        auto normal_of = [](const Subspace& plane) {
          Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(plane.frame());
          Eigen::MatrixXd q = qr.matrixQ();
          return Eigen::VectorXd(q.col(2));
        };
        {
          auto obj = [&](const Eigen::VectorXd& d) {
            return subspace_growth_rates(P, nm, complement_of_line(d), resolution).lgr.value;
          };
          auto [d, v] = detail::refine_direction_max(obj, normal_of(best_max), val_max,
                                                     spacing);
          if (v > val_max) {
            val_max = v;
            best_max = complement_of_line(d);
          }
        }
        {
          auto obj = [&](const Eigen::VectorXd& d) {
            return -subspace_growth_rates(P, nm, complement_of_line(d), resolution).ugr.value;
          };
          auto [d, v] = detail::refine_direction_max(obj, normal_of(best_min), -val_min,
                                                     spacing);
          if (-v < val_min) {
            val_min = -v;
            best_min = complement_of_line(d);
          }
        }
      } else {
        // Heuristic frame ascent from the best grid candidates.
        std::vector<Subspace> starts;
        for (std::size_t i = 0; i < std::min<std::size_t>(4, grid.size()); ++i) {
          starts.push_back(grid[by_lgr[i]]);
        }
        {
          auto obj = [&](const Subspace& X) {
            return subspace_growth_rates(P, nm, X, resolution).lgr.value;
          };
          auto [X, v] = refine_frame_max(obj, starts, seed ^ 0xA1ULL);
          if (v > val_max) {
            val_max = v;
            best_max = X;
          }
        }
        starts.clear();
        for (std::size_t i = 0; i < std::min<std::size_t>(4, grid.size()); ++i) {
          starts.push_back(grid[by_ugr[i]]);
        }
        {
          auto obj = [&](const Subspace& X) {
            return -subspace_growth_rates(P, nm, X, resolution).ugr.value;
          };
          auto [X, v] = refine_frame_max(obj, starts, seed ^ 0xB2ULL);
          if (-v < val_min) {
            val_min = -v;
            best_min = X;
          }
        }
      }
    }

    R.elgr[static_cast<std::size_t>(k)] = val_max;
    R.eugr[static_cast<std::size_t>(k)] = val_min;
    R.argmax_subspace.push_back(best_max);
    R.argmin_subspace.push_back(best_min);
  }
  return R;
}

double ordering_chain_violation(const ExtremalRates& R) {
  // Chain: eugr_0 < elgr_n <= eugr_1 <= elgr_{n-1} <= ... <= eugr_n < elgr_0.
  const Eigen::Index n = R.n;
  std::vector<double> chain;
  chain.push_back(R.eugr[0]);
  for (Eigen::Index k = 0; k < n; ++k) {
    chain.push_back(R.elgr[static_cast<std::size_t>(n - k)]);
    chain.push_back(R.eugr[static_cast<std::size_t>(k + 1)]);
  }
  chain.push_back(R.elgr[0]);
  double worst = -kInf;
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    worst = std::max(worst, chain[i] - chain[i + 1]);
  }
  return worst;
}

namespace {

bool complementary(const Subspace& a, const Subspace& b) {
  const Eigen::Index n = a.ambient_dim();
  if (a.dim() + b.dim() != n) return false;
  if (a.dim() == 0 || b.dim() == 0) return true;
  Eigen::MatrixXd joint(n, n);
  joint.leftCols(a.dim()) = a.frame();
  joint.rightCols(b.dim()) = b.frame();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(joint);
  return svd.singularValues()(n - 1) > kComplementaritySv;
}

}  // namespace

EmdResult emd_from_extremal(const ExtremalRates& R) {
  const Eigen::Index n = R.n;
  EmdResult out;
  for (Eigen::Index k = 0; k <= n; ++k) {
    const double lo = R.eugr[static_cast<std::size_t>(k)];
    const double hi = R.elgr[static_cast<std::size_t>(n - k)];
    if (!(lo < -kMergeTolerance && hi > kMergeTolerance)) continue;

    out.hyperbolic = true;
    out.k = k;
    out.attractive = (k == n);
    out.repulsive = (k == 0);

    Subspace image = (k == 0) ? Subspace::zero(n) : R.argmin_subspace[static_cast<std::size_t>(k)];
    Subspace kernel =
        (k == n) ? Subspace::zero(n) : R.argmax_subspace[static_cast<std::size_t>(n - k)];
    if (!complementary(image, kernel)) {
      // Walk the runner-up candidates until a transversal pair appears.
      bool found = false;
      const auto& imgs = R.eugr_runners_up[static_cast<std::size_t>(k)];
      const auto& kers = R.elgr_runners_up[static_cast<std::size_t>(n - k)];
      for (std::size_t a = 0; a < imgs.size() + 1 && !found; ++a) {
        const Subspace& ia = (a == 0) ? image : imgs[a - 1];
        for (std::size_t b = 0; b < kers.size() + 1 && !found; ++b) {
          const Subspace& kb = (b == 0) ? kernel : kers[b - 1];
          if (complementary(ia, kb)) {
            image = ia;
            kernel = kb;
            found = true;
          }
        }
      }
      if (!found) {
        throw ComplementarityFailure(
            "no transversal pair of extremal subspaces found for k = " +
            std::to_string(k));
      }
    }
    out.image = image;
    out.kernel = kernel;
    return out;
  }
  return out;
}

EmdResult emd_check(const LinearProcess& P, const NormSpec& nm, std::size_t resolution,
                    std::uint64_t seed) {
  return emd_from_extremal(extremal_growth_rates(P, nm, resolution, seed));
}

SpectrumResult assemble_spectrum(const ExtremalRates& R) {
  const Eigen::Index n = R.n;
  SpectrumResult S;
  S.extremal = R;
  S.certified = R.certified;

  auto build = [&](double tol) {
    std::vector<Eigen::Index> idx{0};
    for (Eigen::Index j = 1; j < n; ++j) {
      if (R.elgr[static_cast<std::size_t>(n - j)] - R.eugr[static_cast<std::size_t>(j)] > tol) {
        idx.push_back(j);
      }
    }
    idx.push_back(n);
    std::vector<SpectralInterval> intervals;
    for (std::size_t a = 0; a + 1 < idx.size(); ++a) {
      const double lo = R.elgr[static_cast<std::size_t>(n - idx[a])];
      const double hi = R.eugr[static_cast<std::size_t>(idx[a + 1])];
      intervals.push_back({lo, std::max(lo, hi)});
    }
    return std::make_pair(idx, intervals);
  };

  auto [idx, intervals] = build(kMergeTolerance);
  S.intervals = intervals;
  S.raw_intervals = build(0.0).second;

  for (std::size_t a = 0; a < idx.size(); ++a) {
    ResolventGap gap;
    gap.rank = idx[a];
    gap.lo = R.eugr[static_cast<std::size_t>(idx[a])];
    gap.hi = R.elgr[static_cast<std::size_t>(n - idx[a])];
    S.resolvent_gaps.push_back(gap);
  }

  EmdResult emd = emd_from_extremal(R);
  S.hyperbolic = emd.hyperbolic;
  if (emd.hyperbolic) {
    S.emd_k = emd.k;
    S.emd_image = emd.image;
    S.emd_kernel = emd.kernel;
    double dist = kInf;
    for (const auto& iv : S.intervals) {
      if (0.0 >= iv.lo && 0.0 <= iv.hi) dist = 0.0;
      dist = std::min(dist, std::min(std::abs(iv.lo), std::abs(iv.hi)));
    }
    S.radius = dist;
  }
  return S;
}

SpectrumResult compute_spectrum(const LinearProcess& P, const NormSpec& nm,
                                std::size_t resolution, std::uint64_t seed) {
  return assemble_spectrum(extremal_growth_rates(P, nm, resolution, seed));
}

double hyperbolicity_radius(const SpectrumResult& S) {
  if (!S.hyperbolic || !S.radius) {
    throw NotHyperbolic("spectrum touches zero; no hyperbolicity radius");
  }
  return *S.radius;
}

DistanceEstimate semimetric_dtilde(const LinearProcess& P, const LinearProcess& Q,
                                   const NormSpec& nm, std::size_t resolution) {
  if (P.dimension() != Q.dimension()) {
    throw DimensionMismatch("processes have different dimensions");
  }
  if (!(P.timeset() == Q.timeset())) {
    throw DimensionMismatch("processes live on different time sets");
  }
  const Eigen::Index n = P.dimension();

  auto line_diff = [&](const Eigen::VectorXd& d) {
    const DirectionRates a = direction_rates(P, nm, d);
    const DirectionRates b = direction_rates(Q, nm, d);
    return std::max(std::abs(a.lower.value - b.lower.value),
                    std::abs(a.upper.value - b.upper.value));
  };

  const auto lines = grassmann_grid(1, n, resolution);
  std::vector<double> vals(lines.size());
  detail::parallel_for(lines.size(), [&](std::size_t i) {
    vals[i] = line_diff(lines[i].frame().col(0));
  });
  std::size_t ibest = 0;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (vals[i] > vals[ibest]) ibest = i;
  }
  double best = vals[ibest];
  if (n >= 2 && lines.size() > 1) {
    auto [d, v] = detail::refine_direction_max(line_diff, lines[ibest].frame().col(0), best,
                                               grid_spacing(n, resolution));
    best = std::max(best, v);
    (void)d;
  }
  return {best, resolution};
}

DistanceEstimate metric_d(const LinearProcess& P, const LinearProcess& Q,
                          const NormSpec& nm, std::size_t resolution) {
  const DistanceEstimate dt = semimetric_dtilde(P, Q, nm, resolution);
  const Eigen::Index n = P.dimension();
  // Trajectory part: sup over the unit sphere is the weighted operator norm
  // of the table difference, exact via SVD at every grid point.
  const Eigen::MatrixXd W = nm.sqrt_weight(n);
  const Eigen::MatrixXd Winv = nm.inv_sqrt_weight(n);
  double traj = 0.0;
  for (std::size_t i = 0; i < P.timeset().size(); ++i) {
    const Eigen::MatrixXd diff = W * (P.fundamental(i) - Q.fundamental(i)) * Winv;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(diff);
    traj = std::max(traj, svd.singularValues()(0));
  }
  return {std::max(dt.value, traj), resolution};
}

double robustness_certificate(const LinearProcess& P, const NormSpec& nm,
                              const SpectrumResult& S) {
  (void)P;
  (void)nm;
  if (!S.hyperbolic || !S.emd_k) {
    throw NotHyperbolic("robustness bound needs a hyperbolic spectrum");
  }
  const Eigen::Index k = *S.emd_k;
  const Eigen::Index n = S.extremal.n;
  return std::min(-S.extremal.eugr[static_cast<std::size_t>(k)],
                  S.extremal.elgr[static_cast<std::size_t>(n - k)]);
}

double stability_radius(const LinearProcess& P, const NormSpec& nm,
                        std::size_t resolution) {
  const SubspaceRates full =
      subspace_growth_rates(P, nm, Subspace::full(P.dimension()), resolution);
  if (!(full.ugr.value < -kMergeTolerance)) {
    throw NotAttractive("process is not uniformly attractive");
  }
  return -full.ugr.value;
}

std::vector<SpectrumResult> spectrum_timeset_sweep(const LinearProcess& P,
                                                   const NormSpec& nm,
                                                   const std::vector<TimeSet>& subsets,
                                                   std::size_t resolution) {
  std::vector<SpectrumResult> out;
  out.reserve(subsets.size());
  for (const auto& J : subsets) {
    out.push_back(compute_spectrum(restrict_to(P, J), nm, resolution));
  }
  return out;
}

}  // namespace fintime
