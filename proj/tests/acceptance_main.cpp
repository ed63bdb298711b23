// Release gate: every acceptance criterion in one binary.  Each criterion
// prints exactly one PASS/FAIL line; the exit code is the failure count.
// Criteria are computed honestly -- a FAIL line means the implementation
// really does not meet the stated bound, not that the harness broke.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fintime/detail/parallel.hpp"
#include "fintime/detail/rng.hpp"
#include "fintime/ftle.hpp"
#include "fintime/geometry.hpp"
#include "fintime/nonlinear.hpp"
#include "fintime/process.hpp"
#include "fintime/rates.hpp"
#include "fintime/scenario.hpp"
#include "fintime/spectral.hpp"
#include "fintime/systems.hpp"
#include "fintime/timeset.hpp"

namespace fs = std::filesystem;
using namespace fintime;

namespace {

int g_failures = 0;
std::vector<std::pair<int, std::string>> g_lines;

// Criterion 4 aggregates over every extremal-rate computation in this
// binary, so every spectrum call below funnels through these helpers.
double g_worst_chain = -std::numeric_limits<double>::infinity();
std::size_t g_chain_checks = 0;

void track_chain(const ExtremalRates& R) {
  g_worst_chain = std::max(g_worst_chain, ordering_chain_violation(R));
  ++g_chain_checks;
}

SpectrumResult spectrum_tracked(const LinearProcess& P, const NormSpec& nm,
                                std::size_t resolution,
                                std::uint64_t seed = detail::kDefaultSeed) {
  SpectrumResult S = compute_spectrum(P, nm, resolution, seed);
  track_chain(S.extremal);
  return S;
}

void report(int id, const char* name, bool ok, const std::string& detail) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "[%s] %02d %s%s%s", ok ? "PASS" : "FAIL", id, name,
                detail.empty() ? "" : " -- ", detail.c_str());
  g_lines.emplace_back(id, buf);
  if (!ok) ++g_failures;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

SystemSpec diag_system() { return make_system("diag"); }

TimeSet unit_interval(std::size_t samples = 129) {
  return TimeSet::interval(0.0, 1.0, samples);
}

// Distance from a point to a union of closed intervals.
double dist_to_intervals(double x, const std::vector<SpectralInterval>& s) {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& iv : s) {
    double di = x < iv.lo ? iv.lo - x : (x > iv.hi ? x - iv.hi : 0.0);
    d = std::min(d, di);
  }
  return d;
}

// Hausdorff distance between two unions of closed intervals.  The directed
// supremum is attained at an endpoint of A or at a gap midpoint of B that
// falls inside A, so only those candidates are checked.
double hausdorff_intervals(const std::vector<SpectralInterval>& A,
                           const std::vector<SpectralInterval>& B) {
  auto directed = [](const std::vector<SpectralInterval>& from,
                     const std::vector<SpectralInterval>& to) {
    double worst = 0.0;
    auto consider = [&](double x) { worst = std::max(worst, dist_to_intervals(x, to)); };
    for (const auto& iv : from) {
      consider(iv.lo);
      consider(iv.hi);
    }
    for (std::size_t i = 0; i + 1 < to.size(); ++i) {
      double mid = 0.5 * (to[i].hi + to[i + 1].lo);
      for (const auto& iv : from)
        if (mid >= iv.lo && mid <= iv.hi) consider(mid);
    }
    return worst;
  };
  return std::max(directed(A, B), directed(B, A));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

void criterion_1_and_5_and_7() {
  const NormSpec nm = NormSpec::euclidean();
  const LinearProcess P = solve_linear(diag_system(), unit_interval());

  // 1: spectrum endpoints of diag(-1,2) at resolution 128, under 5 seconds.
  const auto t0 = std::chrono::steady_clock::now();
  const SpectrumResult S = spectrum_tracked(P, nm, 128);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok1 = S.intervals.size() == 2 && secs < 5.0;
  double worst_ep = std::numeric_limits<double>::infinity();
  if (S.intervals.size() == 2) {
    worst_ep = std::max(std::max(std::abs(S.intervals[0].lo + 1.0), std::abs(S.intervals[0].hi + 1.0)),
                        std::max(std::abs(S.intervals[1].lo - 2.0), std::abs(S.intervals[1].hi - 2.0)));
    ok1 = ok1 && worst_ep <= 1e-4;
  }
  report(1, "spectrum of diag(-1,2) is {-1} u {2} within 1e-4 in under 5 s", ok1,
         "endpoint err " + fmt(worst_ep) + ", " + fmt(secs) + " s");

  // 5: hyperbolicity radius 1, critical under shifts of the family.
  {
    bool ok = S.hyperbolic && S.radius && std::abs(*S.radius - 1.0) <= 1e-4;
    std::string detail = "radius " + (S.radius ? fmt(*S.radius) : std::string("none"));
    for (double g : {0.999, -0.999}) {
      EmdResult e = emd_check(shift(P, g), nm, 128);
      ok = ok && e.hyperbolic && e.k == 1;
      detail += ", shift " + fmt(g) + (e.hyperbolic ? " k=" + std::to_string(e.k) : " not hyp");
    }
    // Past the radius toward the nearest interval ({-1}, so gamma = -1.001)
    // the rank-1 dichotomy must be gone.
    EmdResult e = emd_check(shift(P, -1.001), nm, 128);
    ok = ok && !(e.hyperbolic && e.k == 1);
    detail += ", shift -1.001 " + (e.hyperbolic ? "k=" + std::to_string(e.k) : std::string("not hyp"));
    report(5, "hyperbolicity radius of diag(-1,2) is critical at 1", ok, detail);
  }

  // 7: spectra of uniform finite subsets nest into the interval spectrum and
  // their Hausdorff distance to it decreases with refinement.
  {
    bool ok = true;
    std::string detail = "d_H:";
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t m : {2u, 5u, 9u, 17u}) {
      std::vector<double> pts(m);
      for (std::size_t i = 0; i < m; ++i) pts[i] = double(i) / double(m - 1);
      const SpectrumResult Sm = spectrum_tracked(restrict_to(P, TimeSet::finite(pts)), nm, 128);
      for (const auto& iv : Sm.intervals) {
        ok = ok && dist_to_intervals(iv.lo, S.intervals) <= 1e-4 &&
             dist_to_intervals(iv.hi, S.intervals) <= 1e-4;
      }
      const double dh = hausdorff_intervals(Sm.intervals, S.intervals);
      ok = ok && dh <= prev + 1e-6;
      prev = dh;
      detail += " " + fmt(dh);
    }
    report(7, "finite-subset spectra nest and converge to the interval spectrum", ok, detail);
  }
}

void criterion_2() {
  const NormSpec nm = NormSpec::euclidean();
  detail::SplitMix64 rng(0x51a3ULL);
  auto random_invertible = [&](Eigen::Index n) {
    for (;;) {
      Eigen::MatrixXd M(n, n);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) M(i, j) = rng.gaussian();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
      const auto& sv = svd.singularValues();
      if (sv(n - 1) > 0.05 && sv(0) / sv(n - 1) < 50.0) return M;
    }
  };
  auto worst_over = [&](Eigen::Index n, int count, std::size_t res) {
    double worst = 0.0;
    for (int c = 0; c < count; ++c) {
      const Eigen::MatrixXd M = random_invertible(n);
      const LinearProcess P = LinearProcess::from_matrix_table(
          TimeSet::finite({0.0, 1.0}), {Eigen::MatrixXd::Identity(n, n), M});
      const OracleReport rep = two_point_oracle_check(P, nm, res, rng.next());
      worst = std::max(worst, rep.max_deviation);
    }
    return worst;
  };
  const double w2 = worst_over(2, 50, 128);
  const double w3 = worst_over(3, 20, 256);
  report(2, "grassmann sweep matches singular-value closed form on random maps",
         w2 < 1e-3 && w3 < 5e-3,
         "worst 2x2 " + fmt(w2) + " (<1e-3), worst 3x3 " + fmt(w3) + " (<5e-3)");
}

void criterion_3() {
  const NormSpec nm = NormSpec::euclidean();
  const TimeSet ts = TimeSet::interval(0.0, 1.0, 65);
  detail::SplitMix64 rng(0xb5c0ULL);
  bool ok = true;
  double worst_ep = 0.0, worst_d = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    double c[12];
    for (double& v : c) v = rng.gaussian();
    SystemSpec sys = SystemSpec::linear_time_varying(2, [c](double t) {
      Eigen::MatrixXd A(2, 2);
      A << c[0] + c[1] * std::sin(c[2] * t + c[3]), c[4] + c[5] * std::cos(c[6] * t),
          c[7] + c[8] * std::sin(c[9] * t), c[10] + c[11] * std::cos(t);
      return A;
    });
    const LinearProcess P = solve_linear(sys, ts);
    const SpectrumResult S = spectrum_tracked(P, nm, 96);
    for (double gamma : {-1.0, 0.5, 2.0}) {
      const LinearProcess Pg = shift(P, gamma);
      const SpectrumResult Sg = spectrum_tracked(Pg, nm, 96);
      if (Sg.intervals.size() != S.intervals.size()) {
        ok = false;
        continue;
      }
      for (std::size_t i = 0; i < S.intervals.size(); ++i) {
        worst_ep = std::max(worst_ep, std::abs(Sg.intervals[i].lo - (S.intervals[i].lo - gamma)));
        worst_ep = std::max(worst_ep, std::abs(Sg.intervals[i].hi - (S.intervals[i].hi - gamma)));
      }
      worst_d = std::max(worst_d,
                         std::abs(semimetric_dtilde(P, Pg, nm, 64).value - std::abs(gamma)));
    }
  }
  ok = ok && worst_ep <= 1e-5 && worst_d <= 1e-9;
  report(3, "shifted families move the spectrum by -gamma at distance |gamma|", ok,
         "worst endpoint err " + fmt(worst_ep) + " (<=1e-5), worst dtilde err " +
             fmt(worst_d) + " (<=1e-9)");
}

void criterion_6() {
  const NormSpec nm = NormSpec::euclidean();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
  A(0, 0) = -1.0;
  A(1, 1) = -2.0;
  const TimeSet ts = unit_interval();
  const LinearProcess P = solve_linear(SystemSpec::linear_constant(A), ts);
  const double sr = stability_radius(P, nm, 128);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(2, 2);
  const EmdResult over = emd_check(solve_linear(SystemSpec::linear_constant(A + 1.01 * I), ts), nm, 128);
  const EmdResult under = emd_check(solve_linear(SystemSpec::linear_constant(A + 0.99 * I), ts), nm, 128);
  const bool ok = std::abs(sr - 1.0) <= 1e-4 && !over.attractive && under.attractive;
  report(6, "stability radius of diag(-1,-2) is 1 and is sharp under +cI", ok,
         "radius " + fmt(sr) + ", +1.01I attractive=" + (over.attractive ? "yes" : "no") +
             ", +0.99I attractive=" + (under.attractive ? "yes" : "no"));
}

void criterion_8() {
  const NormSpec nm = NormSpec::euclidean();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
  A(0, 0) = -1.0;
  A(1, 1) = 1.0;
  const LinearProcess P = solve_linear(SystemSpec::linear_constant(A), unit_interval());
  const std::size_t res = 512;
  const ConeClassification cc = cone_sweep(P, nm, res);
  double max_stable = -1.0, min_unstable = std::numeric_limits<double>::infinity();
  for (const auto& d : cc.directions) {
    const double phi = std::atan2(std::abs(d.direction(1)), std::abs(d.direction(0)));
    if (d.label == DirectionLabel::Stable) max_stable = std::max(max_stable, phi);
    if (d.label == DirectionLabel::Unstable) min_unstable = std::min(min_unstable, phi);
  }
  const double cell = M_PI / double(res) + 1e-9;
  const double theta_s = std::atan(std::exp(-2.0));
  const double theta_u = M_PI / 4.0;
  const bool ok = cc.stable_contiguous && cc.unstable_contiguous &&
                  std::abs(max_stable - theta_s) <= cell &&
                  std::abs(min_unstable - theta_u) <= cell;
  report(8, "cone boundaries of diag(-1,1) sit at |tan t|=e^-2 and |tan t|=1", ok,
         "stable edge off by " + fmt(std::abs(max_stable - theta_s)) + ", unstable by " +
             fmt(std::abs(min_unstable - theta_u)) + " (cell " + fmt(M_PI / double(res)) + ")");
}

void criterion_9() {
  const NormSpec nm = NormSpec::euclidean();
  // Scalar cubic contraction: the whole unit ball is the domain, so the cone
  // radius along the only direction is exactly 1.
  {
    const TimeSet ts = unit_interval();
    const NonlinearProcess phi(make_system("cubic_contraction"), ts);
    const LinearProcess L = linearize(make_system("cubic_contraction"), ts, Eigen::VectorXd::Zero(1));
    const Subspace X = Subspace::from_vectors({Eigen::VectorXd::Ones(1)});
    const double eta = cone_radius_eta(phi, L, nm, X, 2.0, 1e-4);
    const bool ok1 = std::abs(eta - 1.0) <= 1e-3;

    // Planar saddle: every uniformly contracted direction admits a positive
    // radius.
    const TimeSet ts2 = TimeSet::interval(0.0, 1.0, 65);
    const NonlinearProcess phi2(make_system("saddle_quadratic"), ts2);
    const LinearProcess L2 =
        linearize(make_system("saddle_quadratic"), ts2, Eigen::VectorXd::Zero(2));
    double min_eta = std::numeric_limits<double>::infinity();
    int tested = 0;
    for (int i = 0; i < 64; ++i) {
      const double th = M_PI * double(i) / 64.0;
      Eigen::VectorXd d(2);
      d << std::cos(th), std::sin(th);
      if (direction_rates(L2, nm, d).upper.value >= -0.05) continue;
      ++tested;
      const Subspace X2 = Subspace::from_vectors({d});
      min_eta = std::min(min_eta, cone_radius_eta(phi2, L2, nm, X2, 1.0, 1e-3));
    }
    const bool ok2 = tested > 0 && min_eta > 0.0;
    report(9, "cone radii: exactly 1 for the cubic, positive on contracted saddle rays",
           ok1 && ok2,
           "cubic eta " + fmt(eta) + ", saddle min eta " + fmt(min_eta) + " over " +
               std::to_string(tested) + " rays");
  }
}

void criterion_10() {
  const NormSpec nm = NormSpec::euclidean();
  auto loglog_slope = [](const std::vector<double>& etas, const std::vector<double>& ms) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(etas.size());
    for (std::size_t i = 0; i < etas.size(); ++i) {
      const double x = std::log(etas[i]), y = std::log(ms[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
  };

  const TimeSet ts = unit_interval();
  const NonlinearProcess cubic(make_system("cubic_contraction"), ts);
  const LinearProcess Lc = linearize(make_system("cubic_contraction"), ts, Eigen::VectorXd::Zero(1));
  bool quad_ok = true;
  std::string detail;
  for (double eta : {0.1, 0.2, 0.3}) {
    const double m = nonlinearity_measure(cubic, Lc, nm, eta, 8);
    quad_ok = quad_ok && std::abs(m - eta * eta) <= 0.03 * eta * eta;
  }
  const std::vector<double> fit_etas = {0.025, 0.05, 0.1, 0.2};
  std::vector<double> mc, msaddle;
  for (double eta : fit_etas) mc.push_back(nonlinearity_measure(cubic, Lc, nm, eta, 8));
  const double slope_c = loglog_slope(fit_etas, mc);
  quad_ok = quad_ok && slope_c >= 1.9 && slope_c <= 2.1;

  const TimeSet ts2 = TimeSet::interval(0.0, 1.0, 65);
  const NonlinearProcess saddle(make_system("saddle_quadratic"), ts2);
  const LinearProcess Ls = linearize(make_system("saddle_quadratic"), ts2, Eigen::VectorXd::Zero(2));
  for (double eta : fit_etas) msaddle.push_back(nonlinearity_measure(saddle, Ls, nm, eta, 32));
  const double slope_s = loglog_slope(fit_etas, msaddle);
  const bool saddle_ok = slope_s >= 1.7;

  report(10, "nonlinearity measure scales quadratically for cubic and saddle", quad_ok && saddle_ok,
         "cubic slope " + fmt(slope_c) + " (want [1.9,2.1]), saddle slope " + fmt(slope_s) +
             " (want >=1.7; measured law is first order for this even nonlinearity)");
}

void criterion_11() {
  const TimeSet ts = unit_interval();
  auto scalar_sys = [](double sign) {
    return SystemSpec::nonlinear(
        1,
        [sign](double, const Eigen::VectorXd& x) {
          Eigen::VectorXd v(1);
          v(0) = sign * (x(0) - x(0) * x(0) * x(0));
          return v;
        },
        [sign](double, const Eigen::VectorXd& x) {
          Eigen::MatrixXd J(1, 1);
          J(0, 0) = sign * (1.0 - 3.0 * x(0) * x(0));
          return J;
        });
  };
  const AttractionReport attr =
      linearized_attraction_test(scalar_sys(-1.0), ts, Eigen::VectorXd::Zero(1), 1.5);
  const AttractionReport rep =
      linearized_attraction_test(scalar_sys(1.0), ts, Eigen::VectorXd::Zero(1), 0.8);
  const bool ok = attr.verdict == AttractionVerdict::Attractive &&
                  attr.neighborhood_radius >= 0.9 &&
                  rep.verdict == AttractionVerdict::Repulsive && rep.neighborhood_radius > 0.0;
  report(11, "attraction test certifies balls around hyperbolic equilibria", ok,
         "-x+x^3 radius " + fmt(attr.neighborhood_radius) + " (>=0.9), x-x^3 radius " +
             fmt(rep.neighborhood_radius) + " (>0)");
}

void criterion_12() {
  bool ok = true;
  std::string detail;
  const TimeSet ts = TimeSet::interval(0.0, 1.0, 33);
  for (const std::string& name : {"saddle_quadratic", "cubic_contraction"}) {
    const SystemSpec sys = make_system(name);
    Eigen::VectorXd x0(sys.dimension);
    if (sys.dimension == 2)
      x0 << 0.2, -0.1;
    else
      x0 << 0.3;
    const LinearProcess L = linearize(sys, ts, x0);
    const Eigen::MatrixXd M = L.evaluate(1.0, 0.0);
    Eigen::MatrixXd fd(sys.dimension, sys.dimension);
    const double h = 1e-4;
    for (Eigen::Index j = 0; j < sys.dimension; ++j) {
      Eigen::VectorXd xp = x0, xm = x0;
      xp(j) += h;
      xm(j) -= h;
      fd.col(j) = (solve_nonlinear(sys, ts, xp).back() - solve_nonlinear(sys, ts, xm).back()) / (2 * h);
    }
    const double rel = (M - fd).norm() / fd.norm();
    ok = ok && rel < 1e-4;
    detail += name + " rel err " + fmt(rel) + "; ";
  }

  // Integrator order on a nonautonomous oscillator against a fine reference.
  SystemSpec osc = SystemSpec::linear_time_varying(2, [](double t) {
    Eigen::MatrixXd A(2, 2);
    A << 0.0, 1.0, -(1.0 + t), 0.0;
    return A;
  });
  const TimeSet two = TimeSet::finite({0.0, 1.0});
  SolveOptions fine;
  fine.step = 1.0 / 512.0;
  const Eigen::MatrixXd ref = solve_linear(osc, two, fine).fundamental(1);
  std::vector<double> hs, errs;
  for (double step : {1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0}) {
    SolveOptions o;
    o.step = step;
    hs.push_back(std::log(step));
    errs.push_back(std::log((solve_linear(osc, two, o).fundamental(1) - ref).norm()));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < hs.size(); ++i) {
    sx += hs[i];
    sy += errs[i];
    sxx += hs[i] * hs[i];
    sxy += hs[i] * errs[i];
  }
  const double order = (3 * sxy - sx * sy) / (3 * sxx - sx * sx);
  ok = ok && order >= 3.5;
  report(12, "linearization matches finite differences; integrator is 4th order", ok,
         detail + "order fit " + fmt(order) + " (>=3.5)");
}

void criterion_13() {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
  A(0, 0) = -1.0;
  A(1, 1) = 1.0;
  FtleGridSpec box;
  box.x_min = -0.5;
  box.x_max = 0.5;
  box.y_min = -0.5;
  box.y_max = 0.5;
  box.nx = 6;
  box.ny = 5;
  auto span = [](const FtleField& f) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (double v : f.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return std::pair<double, double>(lo, hi);
  };
  const FtleField saddle = ftle_field(SystemSpec::linear_constant(A), 0.0, 1.0, box);
  const auto [slo, shi] = span(saddle);
  const FtleField rot = ftle_field(make_system("rotation"), 0.0, 1.0, box);
  const auto [rlo, rhi] = span(rot);

  FtleGridSpec tiny;
  tiny.x_min = -1e-3;
  tiny.x_max = 1e-3;
  tiny.y_min = -1e-3;
  tiny.y_max = 1e-3;
  tiny.nx = 4;
  tiny.ny = 4;
  const FtleField near_zero = ftle_field(make_system("saddle_quadratic"), 0.0, 1.0, tiny);
  const auto [nlo, nhi] = span(near_zero);

  const bool ok = (shi - slo) < 1e-8 && std::abs(shi - 1.0) < 1e-6 && (rhi - rlo) < 1e-8 &&
                  std::abs(rhi) < 1e-8 && std::abs(nlo - 1.0) < 1e-2 && std::abs(nhi - 1.0) < 1e-2;
  report(13, "exponent fields: saddle constant 1, rotation constant 0, quadratic near 1", ok,
         "saddle spread " + fmt(shi - slo) + ", rotation max " + fmt(std::abs(rhi)) +
             ", quadratic range [" + fmt(nlo) + "," + fmt(nhi) + "]");
}

void criterion_14() {
  const ScenarioConfig cfg = parse_scenario(R"({
    "system": "cubic_contraction",
    "timeset": {"kind": "interval", "t_min": 0, "t_max": 1, "samples": 65},
    "analyses": [{"type": "spectrum", "linearize_at": [0.0]},
                 {"type": "m_curve", "etas": [0.1, 0.2], "samples": 8}]
  })");
  const fs::path base = fs::temp_directory_path() / "fintime_acceptance_det";
  std::vector<std::string> blobs[3];
  const char* files[] = {"result_0_spectrum.json", "result_0_spectrum.svg",
                         "result_1_m_curve.json", "result_1_m_curve.csv"};
  const unsigned threads[3] = {1, 4, 1};
  bool all_ok_runs = true;
  for (int r = 0; r < 3; ++r) {
    const fs::path dir = base / ("run" + std::to_string(r));
    fs::remove_all(dir);
    set_max_threads(threads[r]);
    const RunReport rep = run_scenario(cfg, dir.string());
    all_ok_runs = all_ok_runs && rep.all_ok;
    for (const char* f : files) blobs[r].push_back(slurp(dir / f));
  }
  set_max_threads(0);
  bool identical = true;
  for (std::size_t i = 0; i < 4; ++i) {
    identical = identical && !blobs[0][i].empty() && blobs[0][i] == blobs[1][i] &&
                blobs[0][i] == blobs[2][i];
  }
  fs::remove_all(base);
  report(14, "scenario reruns are byte-identical across thread counts", all_ok_runs && identical,
         identical ? "4 documents stable over threads {1,4,1}" : "documents diverged");
}

}  // namespace

int main() {
  std::printf("acceptance gate\n---------------\n");
  criterion_1_and_5_and_7();
  criterion_2();
  criterion_3();
  criterion_6();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  criterion_13();
  criterion_14();
  // Criterion 4 sums up every extremal computation the runs above performed.
  report(4, "ordering chain holds on every computed set of extremal rates",
         g_chain_checks > 0 && g_worst_chain <= 1e-6,
         "worst violation " + fmt(g_worst_chain) + " over " + std::to_string(g_chain_checks) +
             " computations");
  std::sort(g_lines.begin(), g_lines.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (const auto& [id, line] : g_lines) std::printf("%s\n", line.c_str());
  std::printf("---------------\n%d of 14 criteria failed\n", g_failures);
  return g_failures;
}
