#include "fintime/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "fintime/errors.hpp"

namespace fintime {

namespace {

constexpr double kRankTol = 1e-10;           // relative singular value cutoff
constexpr double kGoldenAngle = 2.3999632297286533;  // pi * (3 - sqrt 5)

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& cols) {
  // Modified Gram-Schmidt keeps the leading directions aligned with the
  // input columns (an SVD basis would not).
  Eigen::MatrixXd q = cols;
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    for (Eigen::Index i = 0; i < j; ++i) {
      q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
    }
    const double len = q.col(j).norm();
    if (len < kRankTol) {
      throw DegenerateFrame("frame column " + std::to_string(j) +
                            " is numerically dependent on the previous ones");
    }
    q.col(j) /= len;
  }
  return q;
}

}  // namespace

NormSpec NormSpec::euclidean() {
  return NormSpec(NormKind::Euclidean, Eigen::MatrixXd(), Eigen::MatrixXd(),
                  Eigen::MatrixXd());
}

NormSpec NormSpec::weighted(const Eigen::MatrixXd& G) {
  if (G.rows() != G.cols() || G.rows() == 0) {
    throw InvalidNorm("weight matrix must be square and non-empty");
  }
  const double scale = G.cwiseAbs().maxCoeff();
  if (!((G - G.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, scale))) {
    throw InvalidNorm("weight matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0) {
    throw InvalidNorm("weight matrix is not positive definite");
  }
  const Eigen::VectorXd lam = es.eigenvalues();
  Eigen::MatrixXd sqrt = es.eigenvectors() * lam.cwiseSqrt().asDiagonal() *
                         es.eigenvectors().transpose();
  Eigen::MatrixXd inv_sqrt = es.eigenvectors() *
                             lam.cwiseSqrt().cwiseInverse().asDiagonal() *
                             es.eigenvectors().transpose();
  return NormSpec(NormKind::WeightedInner, G, std::move(sqrt), std::move(inv_sqrt));
}

double NormSpec::eval(const Eigen::VectorXd& x) const {
  if (kind_ == NormKind::Euclidean) return x.norm();
  if (x.size() != G_.rows()) {
    throw DimensionMismatch("vector size does not match norm weight");
  }
  return std::sqrt(x.dot(G_ * x));
}

Eigen::VectorXd NormSpec::gradient(const Eigen::VectorXd& x) const {
  const double len = eval(x);
  if (len == 0.0) {
    throw NormNotDifferentiableAtZero("norm gradient requested at the origin");
  }
  if (kind_ == NormKind::Euclidean) return x / len;
  return (G_ * x) / len;
}

Eigen::MatrixXd NormSpec::sqrt_weight(Eigen::Index n) const {
  if (kind_ == NormKind::Euclidean) return Eigen::MatrixXd::Identity(n, n);
  return sqrt_;
}

Eigen::MatrixXd NormSpec::inv_sqrt_weight(Eigen::Index n) const {
  if (kind_ == NormKind::Euclidean) return Eigen::MatrixXd::Identity(n, n);
  return inv_sqrt_;
}

double norm_eval(const NormSpec& nm, const Eigen::VectorXd& x) { return nm.eval(x); }

Eigen::VectorXd norm_gradient(const NormSpec& nm, const Eigen::VectorXd& x) {
  return nm.gradient(x);
}

Subspace Subspace::zero(Eigen::Index n) { return Subspace(Eigen::MatrixXd(n, 0)); }

Subspace Subspace::full(Eigen::Index n) {
  return Subspace(Eigen::MatrixXd::Identity(n, n));
}

Subspace Subspace::from_frame(const Eigen::MatrixXd& columns) {
  if (columns.cols() == 0) return zero(columns.rows());
  if (columns.cols() > columns.rows()) {
    throw DimensionMismatch("more frame columns than ambient dimensions");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(columns);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) < kRankTol * sv(0)) {
    throw DegenerateFrame("frame is rank deficient");
  }
  return Subspace(orthonormalize(columns));
}

Subspace Subspace::from_vectors(const std::vector<Eigen::VectorXd>& vs) {
  if (vs.empty()) throw DegenerateFrame("empty vector list");
  Eigen::MatrixXd cols(vs.front().size(), static_cast<Eigen::Index>(vs.size()));
  for (Eigen::Index j = 0; j < cols.cols(); ++j) {
    if (vs[static_cast<std::size_t>(j)].size() != cols.rows()) {
      throw DimensionMismatch("vectors of unequal length");
    }
    cols.col(j) = vs[static_cast<std::size_t>(j)];
  }
  return from_frame(cols);
}

Subspace Subspace::line(const Eigen::VectorXd& x) {
  if (x.norm() == 0.0) throw DegenerateFrame("zero vector spans no line");
  return from_frame(x);
}

double gap_distance(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim()) {
    throw DimensionMismatch("subspaces live in different ambient spaces");
  }
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("gap distance requires equal subspace dimensions");
  }
  if (a.dim() == 0) return 0.0;
  Eigen::MatrixXd diff = a.projector() - b.projector();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(diff);
  return svd.singularValues()(0);
}

namespace {

// Directions on the unit sphere of R^k, antipodally identified.
std::vector<Eigen::VectorXd> parameter_directions(Eigen::Index k, std::size_t resolution,
                                                  std::uint64_t seed) {
  std::vector<Eigen::VectorXd> dirs;
  if (k == 1) {
    Eigen::VectorXd d(1);
    d << 1.0;
    dirs.push_back(d);
    return dirs;
  }
  if (k == 2) {
    dirs.reserve(resolution);
    for (std::size_t i = 0; i < resolution; ++i) {
      const double th = M_PI * static_cast<double>(i) / static_cast<double>(resolution);
      Eigen::VectorXd d(2);
      d << std::cos(th), std::sin(th);
      dirs.push_back(d);
    }
    return dirs;
  }
  if (k == 3) {
    // Fibonacci spiral on the upper half sphere.
    dirs.reserve(resolution);
    for (std::size_t i = 0; i < resolution; ++i) {
      const double z = (static_cast<double>(i) + 0.5) / static_cast<double>(resolution);
      const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = kGoldenAngle * static_cast<double>(i);
      Eigen::VectorXd d(3);
      d << rho * std::cos(phi), rho * std::sin(phi), z;
      dirs.push_back(d);
    }
    return dirs;
  }
  // Higher dimensions: seeded gaussian directions plus the coordinate axes.
  detail::SplitMix64 rng(seed ^ (0x9e37ULL * static_cast<std::uint64_t>(k)));
  dirs.reserve(resolution);
  for (Eigen::Index a = 0; a < k && dirs.size() < resolution; ++a) {
    dirs.push_back(Eigen::VectorXd::Unit(k, a));
  }
  while (dirs.size() < resolution) {
    Eigen::VectorXd d(k);
    for (Eigen::Index j = 0; j < k; ++j) d(j) = rng.gaussian();
    const double len = d.norm();
    if (len < 1e-8) continue;
    d /= len;
    // Canonical hemisphere: flip so the largest-magnitude entry is positive.
    Eigen::Index imax;
    d.cwiseAbs().maxCoeff(&imax);
    if (d(imax) < 0) d = -d;
    dirs.push_back(d);
  }
  return dirs;
}

}  // namespace

std::vector<Eigen::VectorXd> sphere_grid(const NormSpec& nm, const Subspace& X,
                                         std::size_t resolution, std::uint64_t seed) {
  if (resolution == 0) resolution = 1;
  const Eigen::Index k = X.dim();
  std::vector<Eigen::VectorXd> out;
  if (k == 0) return out;

  auto lift = [&](const Eigen::VectorXd& d) {
    Eigen::VectorXd v = X.frame() * d;
    // Sign canonicalization under antipodal identification.
    Eigen::Index imax;
    v.cwiseAbs().maxCoeff(&imax);
    if (v(imax) < 0) v = -v;
    return Eigen::VectorXd(v / nm.eval(v));
  };

  for (const auto& d : parameter_directions(k, resolution, seed)) {
    out.push_back(lift(d));
  }
  return out;
}

bool grassmann_grid_certified(Eigen::Index k, Eigen::Index n) {
  if (k == 0 || k == n) return true;
  return n <= 3;
}

std::vector<Subspace> grassmann_grid(Eigen::Index k, Eigen::Index n,
                                     std::size_t resolution, std::uint64_t seed) {
  if (k > n || k < 0) {
    throw DimensionMismatch("requested k-planes with k outside [0, n]");
  }
  std::vector<Subspace> out;
  if (k == 0) {
    out.push_back(Subspace::zero(n));
    return out;
  }
  if (k == n) {
    out.push_back(Subspace::full(n));
    return out;
  }
  if (resolution == 0) resolution = 1;

  const NormSpec eu = NormSpec::euclidean();
  if (n <= 3 && k == 1) {
    for (const auto& v : sphere_grid(eu, Subspace::full(n), resolution, seed)) {
      out.push_back(Subspace::line(v));
    }
    return out;
  }
  if (n == 3 && k == 2) {
    // Planes are orthogonal complements of their unit normals.
    for (const auto& normal : sphere_grid(eu, Subspace::full(3), resolution, seed)) {
      Eigen::FullPivHouseholderQR<Eigen::MatrixXd> qr(normal);
      Eigen::MatrixXd q = qr.matrixQ();
      out.push_back(Subspace::from_frame(q.rightCols(2)));
    }
    return out;
  }

  // Heuristic regime: coordinate frames first, then seeded random frames.
  detail::SplitMix64 rng(seed ^ 0xfeedULL ^ (static_cast<std::uint64_t>(n) << 8) ^
                         static_cast<std::uint64_t>(k));
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  // A few axis-aligned combinations for coverage of the obvious candidates.
  std::vector<Eigen::Index> combo(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j) combo[static_cast<std::size_t>(j)] = j;
  auto next_combo = [&]() {
    Eigen::Index i = k - 1;
    while (i >= 0 && combo[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return false;
    ++combo[static_cast<std::size_t>(i)];
    for (Eigen::Index j = i + 1; j < k; ++j) {
      combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
    }
    return true;
  };
  do {
    Eigen::MatrixXd cols(n, k);
    for (Eigen::Index j = 0; j < k; ++j) {
      cols.col(j) = id.col(combo[static_cast<std::size_t>(j)]);
    }
    out.push_back(Subspace::from_frame(cols));
    if (out.size() >= resolution) return out;
  } while (next_combo());

  while (out.size() < resolution) {
    Eigen::MatrixXd cols(n, k);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < k; ++j) cols(i, j) = rng.gaussian();
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cols);
    if (svd.singularValues()(k - 1) < 1e-6) continue;
    out.push_back(Subspace::from_frame(cols));
  }
  return out;
}

}  // namespace fintime
