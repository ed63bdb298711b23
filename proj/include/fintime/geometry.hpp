#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "fintime/detail/rng.hpp"

namespace fintime {

enum class NormKind { Euclidean, WeightedInner };

// Norm used for trajectory measurements.  Euclidean, or |x| = sqrt(x'Gx)
// for a symmetric positive definite G.  Differentiable away from zero.
class NormSpec {
public:
  static NormSpec euclidean();
  static NormSpec weighted(const Eigen::MatrixXd& G);

  NormKind kind() const { return kind_; }
  const Eigen::MatrixXd& weight() const { return G_; }
  // 0 for the (dimension-agnostic) Euclidean norm.
  Eigen::Index dimension() const { return G_.rows(); }

  double eval(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;  // Gx/|x|

  // Symmetric square root and its inverse; identity passthrough for Euclidean.
  Eigen::MatrixXd sqrt_weight(Eigen::Index n) const;
  Eigen::MatrixXd inv_sqrt_weight(Eigen::Index n) const;

private:
  NormSpec(NormKind kind, Eigen::MatrixXd G, Eigen::MatrixXd sqrt, Eigen::MatrixXd inv_sqrt)
      : kind_(kind), G_(std::move(G)), sqrt_(std::move(sqrt)), inv_sqrt_(std::move(inv_sqrt)) {}

  NormKind kind_;
  Eigen::MatrixXd G_;
  Eigen::MatrixXd sqrt_;
  Eigen::MatrixXd inv_sqrt_;
};

double norm_eval(const NormSpec& nm, const Eigen::VectorXd& x);
Eigen::VectorXd norm_gradient(const NormSpec& nm, const Eigen::VectorXd& x);

// Linear subspace of R^n held as an n-by-k frame with Euclidean-orthonormal
// columns.  k = 0 is the zero subspace, k = n the full space.
class Subspace {
public:
  static Subspace zero(Eigen::Index n);
  static Subspace full(Eigen::Index n);
  static Subspace from_frame(const Eigen::MatrixXd& columns);
  static Subspace from_vectors(const std::vector<Eigen::VectorXd>& vs);
  // Single line through x (x != 0).
  static Subspace line(const Eigen::VectorXd& x);

  Eigen::Index dim() const { return frame_.cols(); }
  Eigen::Index ambient_dim() const { return frame_.rows(); }
  const Eigen::MatrixXd& frame() const { return frame_; }

  Eigen::MatrixXd projector() const { return frame_ * frame_.transpose(); }

private:
  explicit Subspace(Eigen::MatrixXd frame) : frame_(std::move(frame)) {}
  Eigen::MatrixXd frame_;
};

// Operator-norm distance of orthogonal projectors; requires equal dimensions.
double gap_distance(const Subspace& a, const Subspace& b);

// Unit vectors (in nm) inside X, antipodally identified, deterministic:
// one sign-canonical representative for dim 1, a uniform half-circle angle
// grid for dim 2, a Fibonacci half-sphere for dim 3, seeded low-discrepancy
// directions beyond that.
std::vector<Eigen::VectorXd> sphere_grid(const NormSpec& nm, const Subspace& X,
                                         std::size_t resolution,
                                         std::uint64_t seed = detail::kDefaultSeed);

// Sample of the Grassmannian of k-planes in R^n.  Exhaustive parameterized
// grids for n <= 3 (and the trivial k = n case); seeded quasi-random frames
// otherwise -- check grassmann_grid_certified before trusting extrema.
std::vector<Subspace> grassmann_grid(Eigen::Index k, Eigen::Index n,
                                     std::size_t resolution,
                                     std::uint64_t seed = detail::kDefaultSeed);
bool grassmann_grid_certified(Eigen::Index k, Eigen::Index n);

}  // namespace fintime
