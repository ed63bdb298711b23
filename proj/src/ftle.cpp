#include "fintime/ftle.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>

#include "fintime/detail/parallel.hpp"
#include "fintime/errors.hpp"

namespace fintime {

SpectrumResult two_point_spectrum(const Eigen::MatrixXd& M, double T, const NormSpec& nm) {
  if (M.rows() != M.cols() || M.rows() == 0) {
    throw DimensionMismatch("two-point map must be square and nonempty");
  }
  if (!(T > 0.0)) throw Error("two-point span must be positive");
  const Eigen::Index n = M.rows();

  const Eigen::MatrixXd B = nm.sqrt_weight(n) * M * nm.inv_sqrt_weight(n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeFullV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  if (sigma(n - 1) <= sigma(0) * 1e-14 || sigma(n - 1) == 0.0) {
    throw NotInvertible("two-point map is numerically singular");
  }

  ExtremalRates R;
  R.n = n;
  R.elgr.assign(static_cast<std::size_t>(n) + 1, 0.0);
  R.eugr.assign(static_cast<std::size_t>(n) + 1, 0.0);
  R.elgr[0] = std::numeric_limits<double>::infinity();
  R.eugr[0] = -std::numeric_limits<double>::infinity();
  R.argmax_subspace.push_back(Subspace::zero(n));
  R.argmin_subspace.push_back(Subspace::zero(n));
  R.elgr_runners_up.assign(static_cast<std::size_t>(n) + 1, {});
  R.eugr_runners_up.assign(static_cast<std::size_t>(n) + 1, {});

  // Right singular vectors live in the congruence coordinates; pull them
  // back through G^{-1/2} before spanning subspaces of the original space.
  const Eigen::MatrixXd V = nm.inv_sqrt_weight(n) * svd.matrixV();
  for (Eigen::Index k = 1; k <= n; ++k) {
    R.elgr[static_cast<std::size_t>(k)] = std::log(sigma(k - 1)) / T;
    R.eugr[static_cast<std::size_t>(k)] = std::log(sigma(n - k)) / T;
    R.argmax_subspace.push_back(Subspace::from_frame(V.leftCols(k)));
    R.argmin_subspace.push_back(Subspace::from_frame(V.rightCols(k)));
  }
  return assemble_spectrum(R);
}

OracleReport two_point_oracle_check(const LinearProcess& P, const NormSpec& nm,
                                    std::size_t resolution, std::uint64_t seed) {
  const TimeSet& ts = P.timeset();
  if (ts.kind() != TimeSetKind::FiniteSet || ts.size() != 2) {
    throw InvalidTimeSet("oracle check needs a two-point time set");
  }
  const double T = ts.t_max() - ts.t_min();
  const SpectrumResult oracle = two_point_spectrum(P.fundamental(1), T, nm);
  const ExtremalRates sweep = extremal_growth_rates(P, nm, resolution, seed);

  OracleReport rep;
  const Eigen::Index n = P.dimension();
  rep.elgr_deviation.assign(static_cast<std::size_t>(n) + 1, 0.0);
  rep.eugr_deviation.assign(static_cast<std::size_t>(n) + 1, 0.0);
  for (Eigen::Index k = 1; k <= n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    rep.elgr_deviation[i] = std::abs(sweep.elgr[i] - oracle.extremal.elgr[i]);
    rep.eugr_deviation[i] = std::abs(sweep.eugr[i] - oracle.extremal.eugr[i]);
    rep.max_deviation =
        std::max({rep.max_deviation, rep.elgr_deviation[i], rep.eugr_deviation[i]});
  }
  return rep;
}

Eigen::MatrixXd flow_map_gradient(const SystemSpec& sys, double t0, double T,
                                  const Eigen::VectorXd& x, const SolveOptions& opts) {
  if (!(T > 0.0)) throw Error("flow map span must be positive");
  const TimeSet span = TimeSet::interval(t0, t0 + T, 2);
  return linearize(sys, span, x, opts).fundamental(1);
}

FtleField ftle_field(const SystemSpec& sys, double t0, double T, const FtleGridSpec& grid,
                     const SolveOptions& opts, bool keep_exponents) {
  if (sys.dimension != 2) throw DimensionMismatch("FTLE fields are planar");
  if (grid.nx < 1 || grid.ny < 1) throw Error("FTLE grid must be nonempty");

  FtleField field;
  field.grid = grid;
  field.t0 = t0;
  field.T = T;
  const std::size_t total = static_cast<std::size_t>(grid.nx) * static_cast<std::size_t>(grid.ny);
  field.values.assign(total, 0.0);
  if (keep_exponents) field.exponents.emplace(total);

  const double dx = grid.nx > 1 ? (grid.x_max - grid.x_min) / double(grid.nx - 1) : 0.0;
  const double dy = grid.ny > 1 ? (grid.y_max - grid.y_min) / double(grid.ny - 1) : 0.0;

  std::vector<char> blown(total, 0);
  detail::parallel_for(total, [&](std::size_t idx) {
    const Eigen::Index iy = static_cast<Eigen::Index>(idx) / grid.nx;
    const Eigen::Index ix = static_cast<Eigen::Index>(idx) % grid.nx;
    Eigen::Vector2d p(grid.x_min + ix * dx, grid.y_min + iy * dy);
    try {
      const Eigen::MatrixXd J = flow_map_gradient(sys, t0, T, p, opts);
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
      field.values[idx] = std::log(svd.singularValues()(0)) / T;
      if (field.exponents) {
        auto& list = (*field.exponents)[idx];
        for (Eigen::Index k = 0; k < svd.singularValues().size(); ++k) {
          list.push_back(std::log(svd.singularValues()(k)) / T);
        }
      }
    } catch (const IntegrationBlowup&) {
      field.values[idx] = std::numeric_limits<double>::quiet_NaN();
      blown[idx] = 1;
    } catch (const IllConditionedProcess&) {
      // same fate as a blowup: the cell left the resolvable regime
      field.values[idx] = std::numeric_limits<double>::quiet_NaN();
      blown[idx] = 1;
    }
  });
  for (char b : blown) field.blowup_count += (b != 0);
  return field;
}

}  // namespace fintime
