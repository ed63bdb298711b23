#include "fintime/process.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "fintime/errors.hpp"

namespace fintime {

namespace {

constexpr double kBlowupGuard = 1e154;

void check_state(const Eigen::VectorXd& y, double t) {
  if (!y.allFinite() || y.cwiseAbs().maxCoeff() > kBlowupGuard) {
    throw IntegrationBlowup("state blew up near t = " + std::to_string(t));
  }
}

Eigen::VectorXd rk4_step(
    const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& deriv,
    double t, const Eigen::VectorXd& y, double h) {
  const Eigen::VectorXd k1 = deriv(t, y);
  const Eigen::VectorXd k2 = deriv(t + 0.5 * h, y + (0.5 * h) * k1);
  const Eigen::VectorXd k3 = deriv(t + 0.5 * h, y + (0.5 * h) * k2);
  const Eigen::VectorXd k4 = deriv(t + h, y + h * k3);
  return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

double default_step(const TimeSet& ts, const SolveOptions& opts) {
  if (opts.step > 0.0) return opts.step;
  const double span = ts.span();
  return (span > 0.0 ? span : 1.0) / 2048.0;
}

Eigen::MatrixXd unvec(const Eigen::VectorXd& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), rows, cols);
}

Eigen::VectorXd vec(const Eigen::MatrixXd& m) {
  return Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
}

// Dense table of RK4 nodes over [breakpoints.front(), breakpoints.back()]
// with every breakpoint forced as a node.  Off-node evaluation re-steps from
// the nearest node on the left, so accuracy matches the base integration.
class DenseTableEvaluator final : public DenseEvaluator {
public:
  DenseTableEvaluator(std::vector<double> times, std::vector<Eigen::VectorXd> states,
                      std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> deriv,
                      std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> extract_F,
                      std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)> extract_Fdot,
                      double base_step)
      : times_(std::move(times)),
        states_(std::move(states)),
        deriv_(std::move(deriv)),
        extract_F_(std::move(extract_F)),
        extract_Fdot_(std::move(extract_Fdot)),
        base_step_(base_step) {}

  void eval(double t, Eigen::MatrixXd& F, Eigen::MatrixXd* F_dot) const override {
    const double lo = times_.front();
    const double hi = times_.back();
    const double tol = 1e-12 * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
    if (t < lo - tol || t > hi + tol) {
      throw TimeNotInSet("dense evaluation outside solved range");
    }
    t = std::clamp(t, lo, hi);
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t idx = (it == times_.begin()) ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
    Eigen::VectorXd y = states_[idx];
    const double dt = t - times_[idx];
    if (std::abs(dt) > tol) {
      const int nsub = std::max(1, static_cast<int>(std::ceil(std::abs(dt) / base_step_)));
      const double h = dt / nsub;
      double cur = times_[idx];
      for (int i = 0; i < nsub; ++i) {
        y = rk4_step(deriv_, cur, y, h);
        cur += h;
        check_state(y, cur);
      }
    }
    F = extract_F_(y);
    if (F_dot) *F_dot = extract_Fdot_(t, y);
  }

  double range_min() const override { return times_.front(); }
  double range_max() const override { return times_.back(); }

private:
  std::vector<double> times_;
  std::vector<Eigen::VectorXd> states_;
  std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> deriv_;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> extract_F_;
  std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)> extract_Fdot_;
  double base_step_;
};

// Exact evaluator for constant A with a trustworthy eigenbasis.
class ClosedFormConstantEvaluator final : public DenseEvaluator {
public:
  ClosedFormConstantEvaluator(Eigen::MatrixXd A, Eigen::MatrixXcd V, Eigen::VectorXcd lam,
                              Eigen::MatrixXcd Vinv, double t0, double t1)
      : A_(std::move(A)), V_(std::move(V)), lam_(std::move(lam)), Vinv_(std::move(Vinv)),
        t0_(t0), t1_(t1) {}

  void eval(double t, Eigen::MatrixXd& F, Eigen::MatrixXd* F_dot) const override {
    const Eigen::VectorXcd e = ((t - t0_) * lam_.array()).exp();
    F = (V_ * e.asDiagonal() * Vinv_).real();
    if (F_dot) *F_dot = A_ * F;
  }

  double range_min() const override { return t0_; }
  double range_max() const override { return t1_; }

private:
  Eigen::MatrixXd A_;
  Eigen::MatrixXcd V_;
  Eigen::VectorXcd lam_;
  Eigen::MatrixXcd Vinv_;
  double t0_, t1_;
};

class ShiftedEvaluator final : public DenseEvaluator {
public:
  ShiftedEvaluator(std::shared_ptr<const DenseEvaluator> inner, double gamma, double t0)
      : inner_(std::move(inner)), gamma_(gamma), t0_(t0) {}

  void eval(double t, Eigen::MatrixXd& F, Eigen::MatrixXd* F_dot) const override {
    const double w = std::exp(-gamma_ * (t - t0_));
    if (F_dot) {
      Eigen::MatrixXd dot;
      inner_->eval(t, F, &dot);
      *F_dot = w * (dot - gamma_ * F);
    } else {
      inner_->eval(t, F, nullptr);
    }
    F *= w;
  }

  double range_min() const override { return inner_->range_min(); }
  double range_max() const override { return inner_->range_max(); }

private:
  std::shared_ptr<const DenseEvaluator> inner_;
  double gamma_;
  double t0_;
};

class RebasedEvaluator final : public DenseEvaluator {
public:
  RebasedEvaluator(std::shared_ptr<const DenseEvaluator> inner, Eigen::MatrixXd right)
      : inner_(std::move(inner)), right_(std::move(right)) {}

  void eval(double t, Eigen::MatrixXd& F, Eigen::MatrixXd* F_dot) const override {
    inner_->eval(t, F, F_dot);
    F = F * right_;
    if (F_dot) *F_dot = (*F_dot) * right_;
  }

  double range_min() const override { return inner_->range_min(); }
  double range_max() const override { return inner_->range_max(); }

private:
  std::shared_ptr<const DenseEvaluator> inner_;
  Eigen::MatrixXd right_;
};

void check_condition(const std::vector<Eigen::MatrixXd>& F, double bound) {
  for (const auto& m : F) {
    if (!m.allFinite()) {
      throw IntegrationBlowup("fundamental matrix contains non-finite entries");
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    if (smin <= 0.0 || sv(0) / smin > bound) {
      throw IllConditionedProcess("fundamental matrix condition number exceeds " +
                                  std::to_string(bound));
    }
  }
}

struct PathResult {
  std::vector<double> node_times;
  std::vector<Eigen::VectorXd> node_states;
  std::vector<Eigen::VectorXd> at_breakpoints;
};

// Forward integration across ascending breakpoints, every breakpoint a node.
PathResult rk4_path(const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& deriv,
                    const std::vector<double>& breakpoints, const Eigen::VectorXd& y0,
                    double step) {
  PathResult out;
  Eigen::VectorXd y = y0;
  out.node_times.push_back(breakpoints.front());
  out.node_states.push_back(y);
  out.at_breakpoints.push_back(y);
  for (std::size_t b = 0; b + 1 < breakpoints.size(); ++b) {
    const double a = breakpoints[b];
    const double c = breakpoints[b + 1];
    const int nsub = std::max(1, static_cast<int>(std::ceil((c - a) / step - 1e-9)));
    const double h = (c - a) / nsub;
    double t = a;
    for (int i = 0; i < nsub; ++i) {
      y = rk4_step(deriv, t, y, h);
      t = (i + 1 == nsub) ? c : a + (i + 1) * h;
      check_state(y, t);
      out.node_times.push_back(t);
      out.node_states.push_back(y);
    }
    out.at_breakpoints.push_back(y);
  }
  return out;
}

}  // namespace

SystemSpec SystemSpec::linear_constant(const Eigen::MatrixXd& A, std::string name) {
  if (A.rows() != A.cols() || A.rows() == 0) {
    throw DimensionMismatch("system matrix must be square and non-empty");
  }
  SystemSpec s;
  s.kind = Kind::LinearConstant;
  s.dimension = A.rows();
  s.A = A;
  s.name = std::move(name);
  return s;
}

SystemSpec SystemSpec::linear_time_varying(Eigen::Index n,
                                           std::function<Eigen::MatrixXd(double)> A_of_t,
                                           std::string name) {
  if (n <= 0 || !A_of_t) {
    throw DimensionMismatch("time-varying system needs n > 0 and a coefficient map");
  }
  SystemSpec s;
  s.kind = Kind::LinearTimeVarying;
  s.dimension = n;
  s.A_of_t = std::move(A_of_t);
  s.name = std::move(name);
  return s;
}

SystemSpec SystemSpec::linear_polynomial(std::vector<Eigen::MatrixXd> coeffs, std::string name) {
  if (coeffs.empty()) {
    throw DimensionMismatch("polynomial coefficients must be non-empty");
  }
  const Eigen::Index n = coeffs.front().rows();
  for (const auto& c : coeffs) {
    if (c.rows() != n || c.cols() != n) {
      throw DimensionMismatch("polynomial coefficients must share one square shape");
    }
  }
  if (coeffs.size() == 1) return linear_constant(coeffs.front(), std::move(name));
  auto table = std::make_shared<std::vector<Eigen::MatrixXd>>(std::move(coeffs));
  return linear_time_varying(
      n,
      [table](double t) {
        Eigen::MatrixXd A = table->back();
        for (std::size_t i = table->size() - 1; i-- > 0;) {
          A = t * A + (*table)[i];
        }
        return A;
      },
      std::move(name));
}

SystemSpec SystemSpec::nonlinear(
    Eigen::Index n, std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> f,
    std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)> jac, std::string name) {
  if (n <= 0 || !f) {
    throw DimensionMismatch("nonlinear system needs n > 0 and a vector field");
  }
  SystemSpec s;
  s.kind = Kind::Nonlinear;
  s.dimension = n;
  s.f = std::move(f);
  s.jacobian = std::move(jac);
  s.name = std::move(name);
  return s;
}

Eigen::MatrixXd SystemSpec::system_matrix(double t) const {
  switch (kind) {
    case Kind::LinearConstant:
      return A;
    case Kind::LinearTimeVarying:
      return A_of_t(t);
    case Kind::Nonlinear:
      break;
  }
  throw Error("nonlinear system has no coefficient matrix");
}

LinearProcess::LinearProcess(TimeSet ts, std::vector<Eigen::MatrixXd> F,
                             std::vector<Eigen::MatrixXd> F_dot,
                             std::shared_ptr<const DenseEvaluator> dense,
                             double condition_bound)
    : ts_(std::move(ts)),
      F_(std::move(F)),
      F_dot_(std::move(F_dot)),
      dense_(std::move(dense)),
      condition_bound_(condition_bound) {
  if (F_.size() != ts_.size()) {
    throw DimensionMismatch("fundamental table size does not match time set");
  }
  if (!F_dot_.empty() && F_dot_.size() != ts_.size()) {
    throw DimensionMismatch("derivative table size does not match time set");
  }
  check_condition(F_, condition_bound_);
}

LinearProcess LinearProcess::from_matrix_table(const TimeSet& ts,
                                               std::vector<Eigen::MatrixXd> table,
                                               double condition_bound) {
  if (table.empty() || table.front().rows() != table.front().cols()) {
    throw DimensionMismatch("transition table needs square matrices");
  }
  const Eigen::Index n = table.front().rows();
  if (!table.front().isApprox(Eigen::MatrixXd::Identity(n, n), 1e-12)) {
    throw DimensionMismatch("transition table must start at the identity");
  }
  return LinearProcess(ts, std::move(table), {}, nullptr, condition_bound);
}

const Eigen::MatrixXd& LinearProcess::fundamental_dot(std::size_t i) const {
  if (F_dot_.empty()) {
    throw RequiresIntervalTimeSet("derivative data exists only on sampled intervals");
  }
  return F_dot_[i];
}

Eigen::MatrixXd LinearProcess::evaluate(double t, double s) const {
  const std::size_t it = ts_.index_of(t);
  const std::size_t is = ts_.index_of(s);
  if (is == 0) return F_[it];
  // Phi(t,s) = F(t) F(s)^{-1}; transpose twice so a single LU solve does it.
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(F_[is].transpose());
  return lu.solve(F_[it].transpose()).transpose();
}

void LinearProcess::eval_dense(double t, Eigen::MatrixXd& F, Eigen::MatrixXd* F_dot) const {
  if (!dense_) {
    throw RequiresIntervalTimeSet("process has no dense-time representation");
  }
  dense_->eval(t, F, F_dot);
}

LinearProcess solve_linear(const SystemSpec& sys, const TimeSet& ts, const SolveOptions& opts) {
  if (!sys.is_linear()) {
    throw Error("solve_linear requires a linear system");
  }
  const Eigen::Index n = sys.dimension;
  const double step = default_step(ts, opts);
  const auto& grid = ts.points();

  std::shared_ptr<const DenseEvaluator> dense;
  std::vector<Eigen::MatrixXd> F;

  if (sys.kind == SystemSpec::Kind::LinearConstant) {
    // Exact exponential whenever the eigenbasis is trustworthy.
    Eigen::EigenSolver<Eigen::MatrixXd> es(sys.A);
    if (es.info() == Eigen::Success) {
      const Eigen::MatrixXcd V = es.eigenvectors();
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(V);
      const auto& sv = svd.singularValues();
      if (sv(sv.size() - 1) > 1e-8 * sv(0)) {
        const Eigen::MatrixXcd Vinv =
            V.partialPivLu().solve(Eigen::MatrixXcd::Identity(n, n));
        const Eigen::MatrixXd recon =
            (V * es.eigenvalues().asDiagonal() * Vinv).real();
        if ((recon - sys.A).cwiseAbs().maxCoeff() <=
            1e-10 * (1.0 + sys.A.cwiseAbs().maxCoeff())) {
          dense = std::make_shared<ClosedFormConstantEvaluator>(
              sys.A, V, es.eigenvalues(), Vinv, ts.t_min(), ts.t_max());
        }
      }
    }
  }

  if (dense) {
    F.reserve(grid.size());
    Eigen::MatrixXd Fi;
    for (double t : grid) {
      dense->eval(t, Fi, nullptr);
      F.push_back(Fi);
    }
  } else {
    auto deriv = [&sys, n](double t, const Eigen::VectorXd& y) {
      const Eigen::MatrixXd A = sys.system_matrix(t);
      return Eigen::VectorXd(vec(A * unvec(y, n, n)));
    };
    PathResult path = rk4_path(deriv, grid, vec(Eigen::MatrixXd::Identity(n, n)), step);
    F.reserve(grid.size());
    for (const auto& y : path.at_breakpoints) F.push_back(unvec(y, n, n));
    auto extract_F = [n](const Eigen::VectorXd& y) { return unvec(y, n, n); };
    auto extract_Fdot = [sys, n](double t, const Eigen::VectorXd& y) {
      return Eigen::MatrixXd(sys.system_matrix(t) * unvec(y, n, n));
    };
    dense = std::make_shared<DenseTableEvaluator>(std::move(path.node_times),
                                                  std::move(path.node_states), deriv,
                                                  extract_F, extract_Fdot, step);
  }

  std::vector<Eigen::MatrixXd> F_dot;
  if (ts.has_limit_points()) {
    F_dot.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      F_dot.push_back(sys.system_matrix(grid[i]) * F[i]);
    }
  }
  return LinearProcess(ts, std::move(F), std::move(F_dot), std::move(dense),
                       opts.condition_bound);
}

LinearProcess linearize(const SystemSpec& sys, const TimeSet& ts, const Eigen::VectorXd& x0,
                        const SolveOptions& opts) {
  if (sys.is_linear()) return solve_linear(sys, ts, opts);
  if (!sys.jacobian) {
    throw Error("linearization needs the system jacobian");
  }
  if (x0.size() != sys.dimension) {
    throw DimensionMismatch("initial state has the wrong dimension");
  }
  const Eigen::Index n = sys.dimension;
  const double step = default_step(ts, opts);
  const auto& grid = ts.points();

  // Augmented state [x; vec(Y)]: trajectory and variational flow together.
  auto deriv = [&sys, n](double t, const Eigen::VectorXd& y) {
    const Eigen::VectorXd x = y.head(n);
    const Eigen::MatrixXd Y = unvec(y.tail(n * n), n, n);
    Eigen::VectorXd out(n + n * n);
    out.head(n) = sys.f(t, x);
    out.tail(n * n) = vec(sys.jacobian(t, x) * Y);
    return out;
  };
  Eigen::VectorXd y0(n + n * n);
  y0.head(n) = x0;
  y0.tail(n * n) = vec(Eigen::MatrixXd::Identity(n, n));

  PathResult path = rk4_path(deriv, grid, y0, step);
  std::vector<Eigen::MatrixXd> F;
  F.reserve(grid.size());
  for (const auto& y : path.at_breakpoints) F.push_back(unvec(y.tail(n * n), n, n));

  std::vector<Eigen::MatrixXd> F_dot;
  if (ts.has_limit_points()) {
    F_dot.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Eigen::VectorXd x = path.at_breakpoints[i].head(n);
      F_dot.push_back(sys.jacobian(grid[i], x) * F[i]);
    }
  }

  auto extract_F = [n](const Eigen::VectorXd& y) { return unvec(y.tail(n * n), n, n); };
  auto extract_Fdot = [sys, n](double t, const Eigen::VectorXd& y) {
    return Eigen::MatrixXd(sys.jacobian(t, y.head(n)) * unvec(y.tail(n * n), n, n));
  };
  auto dense = std::make_shared<DenseTableEvaluator>(std::move(path.node_times),
                                                     std::move(path.node_states), deriv,
                                                     extract_F, extract_Fdot, step);
  return LinearProcess(ts, std::move(F), std::move(F_dot), std::move(dense),
                       opts.condition_bound);
}

LinearProcess shift(const LinearProcess& P, double gamma) {
  const TimeSet& ts = P.timeset();
  const double t0 = ts.t_min();
  std::vector<Eigen::MatrixXd> F;
  std::vector<Eigen::MatrixXd> F_dot;
  F.reserve(ts.size());
  const bool inst = P.has_instantaneous();
  if (inst) F_dot.reserve(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double w = std::exp(-gamma * (ts.points()[i] - t0));
    F.push_back(w * P.fundamental(i));
    if (inst) {
      F_dot.push_back(w * (P.fundamental_dot(i) - gamma * P.fundamental(i)));
    }
  }
  std::shared_ptr<const DenseEvaluator> dense;
  if (P.has_dense()) {
    // Wrap rather than re-integrate so shifted rate sweeps see identical
    // arithmetic up to the exponential weight.
    dense = std::make_shared<ShiftedEvaluator>(P.dense_handle(), gamma, t0);
  }
  return LinearProcess(ts, std::move(F), std::move(F_dot), std::move(dense),
                       P.condition_bound());
}

LinearProcess restrict_to(const LinearProcess& P, const TimeSet& subset) {
  const TimeSet& full = P.timeset();
  std::vector<std::size_t> idx;
  idx.reserve(subset.size());
  for (double t : subset.points()) idx.push_back(full.index_of(t));

  // Rebase to the subset's first point: F_sub(t) = Phi(t, t_sub0).
  const Eigen::MatrixXd& base = P.fundamental(idx.front());
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(base.transpose());
  auto rebase = [&lu](const Eigen::MatrixXd& m) {
    return Eigen::MatrixXd(lu.solve(m.transpose()).transpose());
  };

  std::vector<Eigen::MatrixXd> F;
  std::vector<Eigen::MatrixXd> F_dot;
  F.reserve(idx.size());
  const bool inst = subset.has_limit_points();
  if (inst && !P.has_instantaneous()) {
    throw RequiresIntervalTimeSet("interval restriction of a process without derivatives");
  }
  for (std::size_t i : idx) {
    F.push_back(rebase(P.fundamental(i)));
    if (inst) F_dot.push_back(rebase(P.fundamental_dot(i)));
  }

  std::shared_ptr<const DenseEvaluator> dense;
  if (P.has_dense()) {
    const Eigen::Index n = P.dimension();
    const Eigen::MatrixXd right =
        base.partialPivLu().solve(Eigen::MatrixXd::Identity(n, n));
    dense = std::make_shared<RebasedEvaluator>(P.dense_handle(), right);
  }
  return LinearProcess(subset, std::move(F), std::move(F_dot), std::move(dense),
                       P.condition_bound());
}

std::vector<Eigen::VectorXd> solve_nonlinear(const SystemSpec& sys, const TimeSet& ts,
                                             const Eigen::VectorXd& x0,
                                             const SolveOptions& opts) {
  if (sys.kind != SystemSpec::Kind::Nonlinear) {
    throw Error("solve_nonlinear requires a nonlinear system");
  }
  if (x0.size() != sys.dimension) {
    throw DimensionMismatch("initial state has the wrong dimension");
  }
  const double step = default_step(ts, opts);
  PathResult path = rk4_path(sys.f, ts.points(), x0, step);
  return std::move(path.at_breakpoints);
}

NonlinearProcess::NonlinearProcess(SystemSpec sys, TimeSet ts, const SolveOptions& opts)
    : sys_(std::move(sys)), ts_(std::move(ts)), step_(default_step(ts_, opts)) {
  if (sys_.kind != SystemSpec::Kind::Nonlinear) {
    throw Error("NonlinearProcess requires a nonlinear system");
  }
}

std::shared_ptr<const std::vector<Eigen::VectorXd>> NonlinearProcess::trajectory(
    const Eigen::VectorXd& x0) const {
  std::vector<double> key(x0.data(), x0.data() + x0.size());
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  SolveOptions opts;
  opts.step = step_;
  auto table = std::make_shared<const std::vector<Eigen::VectorXd>>(
      solve_nonlinear(sys_, ts_, x0, opts));
  std::lock_guard<std::mutex> lock(cache_mutex_);
  return cache_.emplace(std::move(key), std::move(table)).first->second;
}

Eigen::VectorXd NonlinearProcess::evaluate(double t, double s, const Eigen::VectorXd& x) const {
  if (x.size() != sys_.dimension) {
    throw DimensionMismatch("state has the wrong dimension");
  }
  return detail::rk4_span(sys_.f, s, t, x, step_);
}

Eigen::VectorXd conjugacy_map(const NonlinearProcess& phi, const LinearProcess& P, double t,
                              const Eigen::VectorXd& x) {
  const TimeSet& ts = P.timeset();
  ts.index_of(t);  // grid membership check
  const Eigen::VectorXd pulled = P.evaluate(ts.t_min(), t) * x;
  return phi.evaluate(t, ts.t_min(), pulled);
}

namespace detail {

Eigen::VectorXd rk4_span(
    const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& deriv, double ta,
    double tb, Eigen::VectorXd y, double step) {
  const double len = tb - ta;
  if (len == 0.0) return y;
  const int nsub = std::max(1, static_cast<int>(std::ceil(std::abs(len) / step - 1e-9)));
  const double h = len / nsub;
  double t = ta;
  for (int i = 0; i < nsub; ++i) {
    y = rk4_step(deriv, t, y, h);
    t = (i + 1 == nsub) ? tb : ta + (i + 1) * h;
    check_state(y, t);
  }
  return y;
}

}  // namespace detail
}  // namespace fintime
