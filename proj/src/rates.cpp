#include "fintime/rates.hpp"

#include <algorithm>
#include <cmath>

#include "fintime/detail/parallel.hpp"
#include "fintime/errors.hpp"

namespace fintime {

namespace {

double positive_log(double v, const char* what) {
  if (!(v > 0.0) || v < kNormFloor) {
    throw NonpositiveNorm(std::string(what) + " fell below the positive floor");
  }
  return std::log(v);
}

Eigen::VectorXd unit_direction(const NormSpec& nm, const Eigen::VectorXd& x) {
  const double len = nm.eval(x);
  if (!(len > 0.0) || len < kNormFloor) {
    throw NonpositiveNorm("direction has no positive length");
  }
  return x / len;
}

struct Candidate {
  double value;
  std::optional<TimePair> pair;
  std::optional<double> time;
  bool approximate = false;
};

RateResult to_result(const Candidate& c, const Eigen::VectorXd& dir) {
  RateResult r;
  r.value = c.value;
  r.witness_direction = dir;
  r.witness_pair = c.pair;
  r.witness_time = c.time;
  r.approximate = c.approximate;
  return r;
}

}  // namespace

double log_diff_quotient(const TimeSet& ts, std::span<const double> values,
                         const TimePair& pair) {
  if (values.size() != ts.size()) {
    throw DimensionMismatch("value table size does not match time set");
  }
  const std::size_t it = ts.index_of(pair.t);
  const std::size_t is = ts.index_of(pair.s);
  if (it == is) {
    throw InvalidTimeSet("time pair must have distinct components");
  }
  const double lt = positive_log(values[it], "table value");
  const double ls = positive_log(values[is], "table value");
  return (lt - ls) / (pair.t - pair.s);
}

double instantaneous_rate(const LinearProcess& P, const NormSpec& nm,
                          const Eigen::VectorXd& x, double t) {
  if (!P.has_instantaneous()) {
    throw RequiresIntervalTimeSet("instantaneous rates need a sampled interval");
  }
  const std::size_t i = P.timeset().index_of(t);
  const Eigen::VectorXd xh = unit_direction(nm, x);
  const Eigen::VectorXd y = P.fundamental(i) * xh;
  const Eigen::VectorXd ydot = P.fundamental_dot(i) * xh;
  const double v = nm.eval(y);
  if (v < kNormFloor) throw NonpositiveNorm("trajectory norm vanished");
  return nm.gradient(y).dot(ydot) / v;
}

double rate_at(const LinearProcess& P, const NormSpec& nm, const Eigen::VectorXd& x,
               double t) {
  const Eigen::VectorXd xh = unit_direction(nm, x);
  Eigen::MatrixXd F, Fdot;
  P.eval_dense(t, F, &Fdot);
  const Eigen::VectorXd y = F * xh;
  const Eigen::VectorXd ydot = Fdot * xh;
  const double v = nm.eval(y);
  if (v < kNormFloor) throw NonpositiveNorm("trajectory norm vanished");
  return nm.gradient(y).dot(ydot) / v;
}

namespace detail {

DirectionRates rates_from_norm_table(const TimeSet& ts, const std::vector<double>& values,
                                     const Eigen::VectorXd& direction, bool fd_diagonal) {
  const auto& tp = ts.points();
  const std::size_t m = tp.size();
  std::vector<double> L(m);
  for (std::size_t i = 0; i < m; ++i) L[i] = positive_log(values[i], "trajectory norm");

  Candidate lo{std::numeric_limits<double>::infinity(), {}, {}, false};
  Candidate hi{-std::numeric_limits<double>::infinity(), {}, {}, false};
  auto offer = [&](const Candidate& c) {
    if (c.value < lo.value) lo = c;
    if (c.value > hi.value) hi = c;
  };

  // The quotient is symmetric in (t, s); scanning i < j covers every pair.
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double q = (L[j] - L[i]) / (tp[j] - tp[i]);
      offer({q, TimePair{tp[j], tp[i]}, {}, false});
    }
  }

  if (fd_diagonal && ts.has_limit_points() && m >= 3) {
    const double h = tp[1] - tp[0];
    offer({(-3.0 * L[0] + 4.0 * L[1] - L[2]) / (2.0 * h), {}, tp[0], true});
    for (std::size_t i = 1; i + 1 < m; ++i) {
      offer({(L[i + 1] - L[i - 1]) / (tp[i + 1] - tp[i - 1]), {}, tp[i], true});
    }
    offer({(3.0 * L[m - 1] - 4.0 * L[m - 2] + L[m - 3]) / (2.0 * h), {}, tp[m - 1], true});
  }

  DirectionRates out;
  out.lower = to_result(lo, direction);
  out.upper = to_result(hi, direction);
  return out;
}

std::pair<double, double> golden_max(const std::function<double(double)>& f, double a,
                                     double b, int iters) {
  constexpr double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    }
  }
  return (f1 >= f2) ? std::make_pair(x1, f1) : std::make_pair(x2, f2);
}

std::pair<Eigen::VectorXd, double> refine_direction_max(
    const std::function<double(const Eigen::VectorXd&)>& objective,
    const Eigen::VectorXd& start, double start_value, double initial_radius) {
  const Eigen::Index k = start.size();
  if (k <= 1) return {start, start_value};

  Eigen::VectorXd best = start;
  double best_value = start_value;

  if (k == 2) {
    const double th0 = std::atan2(start(1), start(0));
    auto g = [&](double th) {
      Eigen::VectorXd d(2);
      d << std::cos(th), std::sin(th);
      return objective(d);
    };
    auto [th, val] = golden_max(g, th0 - initial_radius, th0 + initial_radius);
    if (val > best_value) {
      best_value = val;
      best.resize(2);
      best << std::cos(th), std::sin(th);
    }
    return {best, best_value};
  }

  // Pattern search in the tangent space, three shrink levels.
  double rho = initial_radius;
  for (int level = 0; level < 3; ++level) {
    for (int iter = 0; iter < 4; ++iter) {
      // Tangent basis by Householder completion of `best`.
      Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(k, k);
      Eigen::Index imax;
      best.cwiseAbs().maxCoeff(&imax);
      basis.col(imax) = best;
      basis.col(imax).swap(basis.col(0));
      Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis);
      Eigen::MatrixXd Q = qr.householderQ();
      if (Q.col(0).dot(best) < 0) Q = -Q;

      bool improved = false;
      const double c = std::cos(rho);
      const double s = std::sin(rho);
      for (Eigen::Index j = 1; j < k; ++j) {
        for (double sign : {1.0, -1.0}) {
          Eigen::VectorXd cand = c * best + (sign * s) * Q.col(j);
          cand.normalize();
          const double val = objective(cand);
          if (val > best_value) {
            best_value = val;
            best = cand;
            improved = true;
          }
        }
      }
      if (!improved) break;
    }
    rho /= 8.0;
  }
  return {best, best_value};
}

}  // namespace detail

namespace {

// Instantaneous candidates at grid times with local time refinement between
// neighbouring grid points (continuous evaluation, golden section).
void add_instantaneous(const LinearProcess& P, const NormSpec& nm,
                       const Eigen::VectorXd& xh, DirectionRates& io) {
  const auto& tp = P.timeset().points();
  const std::size_t m = tp.size();

  std::vector<double> inst(m);
  for (std::size_t i = 0; i < m; ++i) {
    const Eigen::VectorXd y = P.fundamental(i) * xh;
    const Eigen::VectorXd ydot = P.fundamental_dot(i) * xh;
    const double v = nm.eval(y);
    if (v < kNormFloor) throw NonpositiveNorm("trajectory norm vanished");
    inst[i] = nm.gradient(y).dot(ydot) / v;
  }

  std::size_t imax = 0, imin = 0;
  for (std::size_t i = 1; i < m; ++i) {
    if (inst[i] > inst[imax]) imax = i;
    if (inst[i] < inst[imin]) imin = i;
  }

  auto consider = [&](double t, double r) {
    if (r > io.upper.value) {
      io.upper.value = r;
      io.upper.witness_pair.reset();
      io.upper.witness_time = t;
      io.upper.approximate = false;
    }
    if (r < io.lower.value) {
      io.lower.value = r;
      io.lower.witness_pair.reset();
      io.lower.witness_time = t;
      io.lower.approximate = false;
    }
  };

  for (std::size_t i = 0; i < m; ++i) consider(tp[i], inst[i]);

  if (P.has_dense()) {
    auto refine = [&](std::size_t ctr, double orientation) {
      const double a = tp[ctr == 0 ? 0 : ctr - 1];
      const double b = tp[std::min(ctr + 1, m - 1)];
      auto f = [&](double t) { return orientation * rate_at(P, nm, xh, t); };
      auto [t, val] = detail::golden_max(f, a, b);
      consider(t, orientation * val);
    };
    refine(imax, 1.0);
    refine(imin, -1.0);
  }
}

}  // namespace

DirectionRates direction_rates(const LinearProcess& P, const NormSpec& nm,
                               const Eigen::VectorXd& x) {
  if (x.size() != P.dimension()) {
    throw DimensionMismatch("direction dimension does not match process");
  }
  const Eigen::VectorXd xh = unit_direction(nm, x);
  const TimeSet& ts = P.timeset();
  std::vector<double> v(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) v[i] = nm.eval(P.fundamental(i) * xh);

  DirectionRates out = detail::rates_from_norm_table(ts, v, xh, /*fd_diagonal=*/false);
  if (P.has_instantaneous()) add_instantaneous(P, nm, xh, out);
  return out;
}

DirectionRates direction_rates_nonlinear(const NonlinearProcess& phi, const NormSpec& nm,
                                         const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& reference) {
  if (x.size() != phi.dimension() || reference.size() != phi.dimension()) {
    throw DimensionMismatch("state dimension does not match process");
  }
  const auto tx = phi.trajectory(x);
  const auto tr = phi.trajectory(reference);
  const TimeSet& ts = phi.timeset();
  std::vector<double> v(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    v[i] = nm.eval((*tx)[i] - (*tr)[i]);
    if (v[i] < kNormFloor) {
      throw TrajectoryCollision("trajectories collided at t = " +
                                std::to_string(ts.points()[i]));
    }
  }
  return detail::rates_from_norm_table(ts, v, x, /*fd_diagonal=*/ts.has_limit_points());
}

SubspaceRates subspace_growth_rates(const LinearProcess& P, const NormSpec& nm,
                                    const Subspace& X, std::size_t resolution) {
  if (X.ambient_dim() != P.dimension()) {
    throw DimensionMismatch("subspace ambient dimension does not match process");
  }
  SubspaceRates out;
  if (X.dim() == 0) {
    out.lgr.value = std::numeric_limits<double>::infinity();
    out.ugr.value = -std::numeric_limits<double>::infinity();
    return out;
  }

  const auto dirs = sphere_grid(nm, X, resolution);
  std::vector<DirectionRates> rates(dirs.size());
  detail::parallel_for(dirs.size(), [&](std::size_t i) {
    rates[i] = direction_rates(P, nm, dirs[i]);
  });

  std::size_t ilo = 0, ihi = 0;
  for (std::size_t i = 1; i < dirs.size(); ++i) {
    if (rates[i].lower.value < rates[ilo].lower.value) ilo = i;
    if (rates[i].upper.value > rates[ihi].upper.value) ihi = i;
  }
  out.lgr = rates[ilo].lower;
  out.ugr = rates[ihi].upper;

  if (X.dim() >= 2 && dirs.size() >= 2) {
    // Local refinement in frame coordinates; rates are antipodally symmetric.
    const double spacing = (X.dim() == 2)
                               ? M_PI / static_cast<double>(resolution)
                               : 2.0 * std::sqrt(2.0 * M_PI / static_cast<double>(resolution));
    auto lift = [&](const Eigen::VectorXd& d) {
      Eigen::VectorXd v = X.frame() * d;
      return Eigen::VectorXd(v / nm.eval(v));
    };
    auto coords = [&](const Eigen::VectorXd& v) {
      Eigen::VectorXd d = X.frame().transpose() * v;
      d.normalize();
      return d;
    };

    {
      auto obj = [&](const Eigen::VectorXd& d) {
        return -direction_rates(P, nm, lift(d)).lower.value;
      };
      auto [d, negval] = detail::refine_direction_max(obj, coords(out.lgr.witness_direction),
                                                      -out.lgr.value, spacing);
      if (-negval < out.lgr.value) out.lgr = direction_rates(P, nm, lift(d)).lower;
    }
    {
      auto obj = [&](const Eigen::VectorXd& d) {
        return direction_rates(P, nm, lift(d)).upper.value;
      };
      auto [d, val] = detail::refine_direction_max(obj, coords(out.ugr.witness_direction),
                                                   out.ugr.value, spacing);
      if (val > out.ugr.value) out.ugr = direction_rates(P, nm, lift(d)).upper;
    }
  }
  return out;
}

}  // namespace fintime
