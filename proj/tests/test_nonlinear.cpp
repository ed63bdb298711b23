#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "fintime/errors.hpp"
#include "fintime/nonlinear.hpp"
#include "fintime/process.hpp"
#include "fintime/spectral.hpp"
#include "fintime/systems.hpp"

using namespace fintime;
using Eigen::Matrix2d;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

namespace {

const NormSpec kEuclid = NormSpec::euclidean();

LinearProcess saddle_lin(std::size_t samples = 65) {
  // diag(-1, 1): the linearization of the quadratic saddle at the origin
  return solve_linear(SystemSpec::linear_constant(Vector2d(-1.0, 1.0).asDiagonal()),
                      TimeSet::interval(0.0, 1.0, samples));
}

VectorXd scalar(double v) {
  VectorXd x(1);
  x << v;
  return x;
}

double wrapped_angle(const VectorXd& d) {
  double th = std::atan2(d(1), d(0));
  if (th < 0) th += std::numbers::pi;
  if (th >= std::numbers::pi) th -= std::numbers::pi;
  return th;
}

}  // namespace

TEST_CASE("single directions classify by their rate signs") {
  const LinearProcess P = saddle_lin();

  const DirectionClassification s = classify_direction(P, kEuclid, Vector2d(1, 0));
  CHECK(s.label == DirectionLabel::Stable);
  CHECK(s.ugr == doctest::Approx(-1.0).epsilon(1e-9));

  const DirectionClassification u = classify_direction(P, kEuclid, Vector2d(0, 1));
  CHECK(u.label == DirectionLabel::Unstable);
  CHECK(u.lgr == doctest::Approx(1.0).epsilon(1e-9));

  // decays first, grows later: inside neither cone
  const DirectionClassification n = classify_direction(P, kEuclid, Vector2d(1, 0.5));
  CHECK(n.label == DirectionLabel::Neither);
  CHECK(n.lgr < 0);
  CHECK(n.ugr > 0);
}

TEST_CASE("cone sweep boundaries sit within one grid cell of the exact cones") {
  const std::size_t res = 512;
  const double cell = std::numbers::pi / static_cast<double>(res);
  const ConeClassification cones = cone_sweep(saddle_lin(129), kEuclid, res);
  REQUIRE(cones.directions.size() == res);
  CHECK(cones.stable_contiguous);
  CHECK(cones.unstable_contiguous);
  REQUIRE(cones.best_stable.has_value());
  REQUIRE(cones.best_unstable.has_value());

  // stable cone: |tan t| < e^{-2}; unstable cone: |tan t| > 1
  const double stable_edge = std::atan(std::exp(-2.0));
  double max_stable = 0.0, min_unstable = std::numbers::pi;
  for (const auto& d : cones.directions) {
    const double th = wrapped_angle(d.direction);
    if (th > std::numbers::pi / 2) continue;  // first quadrant suffices (symmetry)
    if (d.label == DirectionLabel::Stable) max_stable = std::max(max_stable, th);
    if (d.label == DirectionLabel::Unstable) min_unstable = std::min(min_unstable, th);
  }
  CHECK(std::abs(max_stable - stable_edge) <= cell + 1e-9);
  CHECK(std::abs(min_unstable - std::numbers::pi / 4) <= cell + 1e-9);

  // the best representatives live deep inside their cones
  CHECK(cones.directions[*cones.best_stable].ugr ==
        doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(cones.directions[*cones.best_unstable].lgr ==
        doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("rotations have empty cones") {
  const LinearProcess R =
      solve_linear(make_system("rotation"), TimeSet::interval(0.0, 1.0, 65));
  const ConeClassification cones = cone_sweep(R, kEuclid, 64);
  for (const auto& d : cones.directions) CHECK(d.label == DirectionLabel::Neither);
  CHECK_FALSE(cones.best_stable.has_value());
  CHECK_FALSE(cones.best_unstable.has_value());
  CHECK(cones.stable_contiguous);
  CHECK(cones.unstable_contiguous);
}

TEST_CASE("dichotomy subspaces land inside their cones") {
  const LinearProcess P =
      solve_linear(make_system("diag"), TimeSet::interval(0.0, 1.0, 65));
  const EmdResult emd = emd_check(P, kEuclid, 64);
  REQUIRE(emd.hyperbolic);
  const DirectionClassification img =
      classify_direction(P, kEuclid, emd.image->frame().col(0));
  const DirectionClassification ker =
      classify_direction(P, kEuclid, emd.kernel->frame().col(0));
  CHECK(img.label == DirectionLabel::Stable);
  CHECK(ker.label == DirectionLabel::Unstable);
}

TEST_CASE("domain membership around the cubic contraction origin") {
  const SystemSpec sys = make_system("cubic_contraction");
  const TimeSet ts = TimeSet::interval(0.0, 1.0, 201);
  const NonlinearProcess phi(sys, ts);
  const VectorXd zero = scalar(0.0);

  const PointClassification in = domain_membership(phi, kEuclid, zero, scalar(0.5));
  CHECK(in.label == PointLabel::Attracted);
  CHECK(in.mu_upper == doctest::Approx(-0.75).epsilon(3e-4));
  CHECK(in.approximate);

  // the equilibrium at 1 keeps a constant distance: neither verdict
  const PointClassification eq = domain_membership(phi, kEuclid, zero, scalar(1.0));
  CHECK(eq.label == PointLabel::Neither);
  CHECK(std::abs(eq.mu_lower) < 1e-6);
  CHECK(std::abs(eq.mu_upper) < 1e-6);

  // outside the unit ball the distance grows; smallest rate at the start
  const PointClassification out = domain_membership(phi, kEuclid, zero, scalar(1.05));
  CHECK(out.label == PointLabel::Repelled);
  CHECK(out.mu_lower == doctest::Approx(1.05 * 1.05 - 1.0).epsilon(3e-3));

  const DomainClassification sweep =
      domain_sweep(phi, kEuclid, zero, {scalar(0.5), scalar(1.0), scalar(1.05)});
  REQUIRE(sweep.points.size() == 3);
  CHECK(sweep.points[0].label == PointLabel::Attracted);
  CHECK(sweep.points[1].label == PointLabel::Neither);
  CHECK(sweep.points[2].label == PointLabel::Repelled);
}

TEST_CASE("attraction is tangential along the stable axis of the saddle") {
  const SystemSpec sys = make_system("saddle_quadratic");
  const NonlinearProcess phi(sys, TimeSet::interval(0.0, 1.0, 101));
  const Vector2d zero2(0.0, 0.0);
  for (double h : {1e-2, 1e-3}) {
    const PointClassification p = domain_membership(phi, kEuclid, zero2, Vector2d(h, 0));
    CHECK(p.label == PointLabel::Attracted);
    CHECK(p.mu_upper == doctest::Approx(-1.0).epsilon(0.05));
  }
}

TEST_CASE("cone radius of the cubic contraction finds the unit ball") {
  const SystemSpec sys = make_system("cubic_contraction");
  const TimeSet ts = TimeSet::interval(0.0, 1.0, 65);
  const NonlinearProcess phi(sys, ts);
  const LinearProcess P = linearize(sys, ts, scalar(0.0));

  const double eta =
      cone_radius_eta(phi, P, kEuclid, Subspace::line(scalar(1.0)), 2.0, 1e-4);
  CHECK(eta == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("cone radius saturates at the cap for globally linear systems") {
  const SystemSpec lin = SystemSpec::nonlinear(
      2,
      [](double, const VectorXd& v) { return VectorXd(Vector2d(-v(0), 2.0 * v(1))); },
      [](double, const VectorXd&) {
        return MatrixXd(Matrix2d(Vector2d(-1.0, 2.0).asDiagonal()));
      });
  const TimeSet ts = TimeSet::interval(0.0, 1.0, 65);
  const NonlinearProcess phi(lin, ts);
  const LinearProcess P = linearize(lin, ts, Vector2d(0, 0));

  const double eta =
      cone_radius_eta(phi, P, kEuclid, Subspace::line(Vector2d(1, 0)), 5.0, 1e-4);
  CHECK(eta == doctest::Approx(5.0));

  // misuse: planes and undecided directions are rejected
  CHECK_THROWS_AS(cone_radius_eta(phi, P, kEuclid, Subspace::full(2), 1.0, 1e-4),
                  DimensionMismatch);
  const LinearProcess R =
      solve_linear(make_system("rotation"), TimeSet::interval(0.0, 1.0, 65));
  const NonlinearProcess phir(
      SystemSpec::nonlinear(
          2, [](double, const VectorXd& v) { return VectorXd(Vector2d(-v(1), v(0))); },
          [](double, const VectorXd&) {
            MatrixXd J(2, 2);
            J << 0, -1, 1, 0;
            return J;
          }),
      TimeSet::interval(0.0, 1.0, 65));
  CHECK_THROWS_AS(cone_radius_eta(phir, R, kEuclid, Subspace::line(Vector2d(1, 0)),
                                  1.0, 1e-4),
                  InvalidDirectionClass);
}

TEST_CASE("stable directions of the quadratic saddle keep positive cone radii") {
  const SystemSpec sys = make_system("saddle_quadratic");
  const TimeSet ts = TimeSet::interval(0.0, 1.0, 65);
  const NonlinearProcess phi(sys, ts);
  const LinearProcess P = linearize(sys, ts, Vector2d(0, 0));

  const double eta =
      cone_radius_eta(phi, P, kEuclid, Subspace::line(Vector2d(1, 0)), 1.0, 1e-3);
  CHECK(eta > 0.0);
}

TEST_CASE("nonlinearity measure vanishes for linear dynamics") {
  const SystemSpec lin = SystemSpec::nonlinear(
      2,
      [](double, const VectorXd& v) { return VectorXd(Vector2d(-v(0), -2.0 * v(1))); },
      [](double, const VectorXd&) {
        return MatrixXd(Matrix2d(Vector2d(-1.0, -2.0).asDiagonal()));
      });
  const TimeSet ts = TimeSet::interval(0.0, 1.0, 101);
  const NonlinearProcess phi(lin, ts);
  const LinearProcess P = linearize(lin, ts, Vector2d(0, 0));
  CHECK(nonlinearity_measure(phi, P, kEuclid, 0.1, 16) < 1e-8);
  CHECK(nonlinearity_measure(phi, P, kEuclid, 0.5, 16) < 1e-8);
  CHECK(nonlinearity_measure(phi, P, kEuclid, 0.0, 16) == 0.0);
}

TEST_CASE("nonlinearity measure of the cubic is the squared radius") {
  const SystemSpec sys = make_system("cubic_contraction");
  const TimeSet ts = TimeSet::interval(0.0, 1.0, 201);
  const NonlinearProcess phi(sys, ts);
  const LinearProcess P = linearize(sys, ts, scalar(0.0));

  for (double eta : {0.1, 0.2, 0.3}) {
    const double m = nonlinearity_measure(phi, P, kEuclid, eta, 8);
    CHECK(m == doctest::Approx(eta * eta).epsilon(0.03));
  }

  // quadratic law in the log-log plot
  const std::vector<double> etas = {0.025, 0.05, 0.1, 0.2};
  std::vector<double> ms;
  for (double e : etas) ms.push_back(nonlinearity_measure(phi, P, kEuclid, e, 8));
  for (std::size_t i = 0; i + 1 < ms.size(); ++i) CHECK(ms[i] <= ms[i + 1] + 1e-9);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < etas.size(); ++i) {
    const double lx = std::log(etas[i]), ly = std::log(ms[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(etas.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope >= 1.9);
  CHECK(slope <= 2.1);
}

TEST_CASE("quadratic saddle deviations scale with the first power of the radius") {
  // The second-order Taylor term feeds the rates directly, so the measured
  // law is first order -- amplified where trajectories swing past the
  // origin, but still linear in the radius.
  const SystemSpec sys = make_system("saddle_quadratic");
  const TimeSet ts = TimeSet::interval(0.0, 1.0, 201);
  const NonlinearProcess phi(sys, ts);
  const LinearProcess P = linearize(sys, ts, Vector2d(0, 0));

  const std::vector<double> etas = {0.025, 0.05, 0.1, 0.2};
  std::vector<double> ms;
  for (double e : etas) ms.push_back(nonlinearity_measure(phi, P, kEuclid, e, 32));
  for (std::size_t i = 0; i + 1 < ms.size(); ++i) CHECK(ms[i] <= ms[i + 1] + 1e-9);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < etas.size(); ++i) {
    const double lx = std::log(etas[i]), ly = std::log(ms[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(etas.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope >= 0.9);
  CHECK(slope <= 1.1);
}

TEST_CASE("attraction verdicts from the linearization") {
  const TimeSet ts = TimeSet::interval(0.0, 1.0, 65);

  const AttractionReport cubic = linearized_attraction_test(
      make_system("cubic_contraction"), ts, scalar(0.0), 1.5);
  CHECK(cubic.verdict == AttractionVerdict::Attractive);
  CHECK(cubic.emd_k == 1);
  CHECK(cubic.neighborhood_radius >= 0.9);
  CHECK(cubic.neighborhood_radius <= 1.0 + 1e-6);

  const SystemSpec expanding = SystemSpec::nonlinear(
      1,
      [](double, const VectorXd& x) { return VectorXd(x - x.array().cube().matrix()); },
      [](double, const VectorXd& x) {
        MatrixXd J(1, 1);
        J << 1.0 - 3.0 * x(0) * x(0);
        return J;
      });
  const AttractionReport rep = linearized_attraction_test(expanding, ts, scalar(0.0), 1.5);
  CHECK(rep.verdict == AttractionVerdict::Repulsive);
  CHECK(rep.emd_k == 0);
  CHECK(rep.neighborhood_radius > 0.0);

  const AttractionReport saddle = linearized_attraction_test(
      make_system("saddle_quadratic"), ts, Vector2d(0, 0), 1.0);
  CHECK(saddle.verdict == AttractionVerdict::HyperbolicSaddle);
  CHECK(saddle.emd_k == 1);
  CHECK(saddle.neighborhood_radius == 0.0);

  const SystemSpec neutral = SystemSpec::nonlinear(
      2, [](double, const VectorXd& v) { return VectorXd(Vector2d(-v(1), v(0))); },
      [](double, const VectorXd&) {
        MatrixXd J(2, 2);
        J << 0, -1, 1, 0;
        return J;
      });
  const AttractionReport rot = linearized_attraction_test(neutral, ts, Vector2d(0, 0), 1.0);
  CHECK(rot.verdict == AttractionVerdict::NotHyperbolic);
}

TEST_CASE("fiber extension of the stable cone stays positive along the flow") {
  const SystemSpec sys = make_system("saddle_quadratic");
  const TimeSet ts = TimeSet::interval(0.0, 1.0, 65);
  const NonlinearProcess phi(sys, ts);
  const LinearProcess P = linearize(sys, ts, Vector2d(0, 0));

  const FiberReport base =
      extension_fiber_check(phi, P, kEuclid, 0.0, {Vector2d(1, 0)}, 0.05);
  CHECK(base.all_positive);
  REQUIRE(base.probes.size() == 1);
  CHECK(base.probes[0].positive);
  CHECK(base.probes[0].radius > 0.0);

  const FiberReport mid =
      extension_fiber_check(phi, P, kEuclid, 0.5, {Vector2d(1, 0)}, 0.05);
  CHECK(mid.all_positive);

  CHECK_THROWS_AS(extension_fiber_check(phi, P, kEuclid, 0.123, {Vector2d(1, 0)}, 0.05),
                  TimeNotInSet);
}

TEST_CASE("fiber probes of a linear stable flow succeed at the full radius") {
  const SystemSpec lin = SystemSpec::nonlinear(
      2,
      [](double, const VectorXd& v) { return VectorXd(Vector2d(-v(0), -0.5 * v(1))); },
      [](double, const VectorXd&) {
        return MatrixXd(Matrix2d(Vector2d(-1.0, -0.5).asDiagonal()));
      });
  const TimeSet ts = TimeSet::interval(0.0, 1.0, 65);
  const NonlinearProcess phi(lin, ts);
  const LinearProcess P = linearize(lin, ts, Vector2d(0, 0));
  const FiberReport r = extension_fiber_check(phi, P, kEuclid, 0.5,
                                              {Vector2d(1, 0), Vector2d(0, 1)}, 0.25);
  CHECK(r.all_positive);
  for (const auto& probe : r.probes) {
    CHECK(probe.positive);
    CHECK(probe.radius == doctest::Approx(0.25));
  }
}
