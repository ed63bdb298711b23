#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "fintime/geometry.hpp"
#include "fintime/process.hpp"
#include "fintime/spectral.hpp"

namespace fintime {

// Spectrum of the two-point process x -> Mx over a time span T, computed
// exactly from singular values (of G^{1/2} M G^{-1/2} for weighted norms):
// elgr_k = ln(sigma_k)/T, eugr_k = ln(sigma_{n-k+1})/T with sigma descending,
// extremal subspaces spanned by right singular vectors.  This is the closed
// form the Grassmannian sweep is audited against.
SpectrumResult two_point_spectrum(const Eigen::MatrixXd& M, double T, const NormSpec& nm);

struct OracleReport {
  double max_deviation = 0.0;
  std::vector<double> elgr_deviation;  // indexed by k, entry 0 unused
  std::vector<double> eugr_deviation;
};

// Audit of the sweep optimizer on a two-point process against the singular
// value closed form, per k and in the worst case.
OracleReport two_point_oracle_check(const LinearProcess& P, const NormSpec& nm,
                                    std::size_t resolution,
                                    std::uint64_t seed = detail::kDefaultSeed);

// Gradient of the flow map x -> phi(t0+T, t0, x): the fundamental matrix of
// the variational equation along the trajectory of x.
Eigen::MatrixXd flow_map_gradient(const SystemSpec& sys, double t0, double T,
                                  const Eigen::VectorXd& x,
                                  const SolveOptions& opts = {});

struct FtleGridSpec {
  double x_min = 0.0, x_max = 1.0;
  double y_min = 0.0, y_max = 1.0;
  Eigen::Index nx = 2, ny = 2;
};

struct FtleField {
  FtleGridSpec grid;
  double t0 = 0.0, T = 1.0;
  std::vector<double> values;  // row-major, y outer; NaN marks blown-up cells
  std::size_t blowup_count = 0;
  std::optional<std::vector<std::vector<double>>> exponents;  // full lists, optional
};

// Largest finite-time Lyapunov exponent ln(sigma_max)/T of the flow map
// gradient on a rectangular grid of initial conditions (planar systems).
// Cells whose integration blows up hold NaN and are counted, not fatal.
FtleField ftle_field(const SystemSpec& sys, double t0, double T,
                     const FtleGridSpec& grid, const SolveOptions& opts = {},
                     bool keep_exponents = false);

}  // namespace fintime
