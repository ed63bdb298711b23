#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "fintime/timeset.hpp"

namespace fintime {

// Right-hand side description.  Linear kinds drive the fundamental-matrix
// solver; the nonlinear kind needs f and (for linearization) its jacobian.
struct SystemSpec {
  enum class Kind { LinearConstant, LinearTimeVarying, Nonlinear };

  Kind kind = Kind::LinearConstant;
  Eigen::Index dimension = 0;
  std::string name = "custom";

  Eigen::MatrixXd A;                                        // LinearConstant
  std::function<Eigen::MatrixXd(double)> A_of_t;            // LinearTimeVarying
  std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> f;         // Nonlinear
  std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)> jacobian;  // Nonlinear

  static SystemSpec linear_constant(const Eigen::MatrixXd& A, std::string name = "custom");
  static SystemSpec linear_time_varying(Eigen::Index n,
                                        std::function<Eigen::MatrixXd(double)> A_of_t,
                                        std::string name = "custom");
  // A(t) = coeffs[0] + coeffs[1] t + ... ; convenient literal form.
  static SystemSpec linear_polynomial(std::vector<Eigen::MatrixXd> coeffs,
                                      std::string name = "custom");
  static SystemSpec nonlinear(Eigen::Index n,
                              std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> f,
                              std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&)> jac,
                              std::string name = "custom");

  bool is_linear() const { return kind != Kind::Nonlinear; }
  Eigen::MatrixXd system_matrix(double t) const;  // linear kinds only
};

struct SolveOptions {
  double step = 0.0;                // <= 0 selects span/2048
  double condition_bound = 1e12;    // fundamental-matrix condition cap
};

// Evaluates the fundamental solution (and its derivative) at arbitrary times
// inside the solved range; backs witness-time refinement between grid points.
class DenseEvaluator {
public:
  virtual ~DenseEvaluator() = default;
  virtual void eval(double t, Eigen::MatrixXd& F, Eigen::MatrixXd* F_dot) const = 0;
  virtual double range_min() const = 0;
  virtual double range_max() const = 0;
};

// Linear process on a time set: the table Phi(t_i, t_min) at every grid
// point, plus d/dt Phi at grid points when the set has limit points.
class LinearProcess {
public:
  LinearProcess(TimeSet ts, std::vector<Eigen::MatrixXd> F,
                std::vector<Eigen::MatrixXd> F_dot,
                std::shared_ptr<const DenseEvaluator> dense,
                double condition_bound = 1e12);

  // Build directly from a transition table (finite sets, oracles, tests).
  // table[i] = Phi(t_i, t_min); table[0] must be the identity.
  static LinearProcess from_matrix_table(const TimeSet& ts,
                                         std::vector<Eigen::MatrixXd> table,
                                         double condition_bound = 1e12);

  const TimeSet& timeset() const { return ts_; }
  Eigen::Index dimension() const { return F_.front().rows(); }
  bool has_instantaneous() const { return !F_dot_.empty(); }
  bool has_dense() const { return dense_ != nullptr; }
  double condition_bound() const { return condition_bound_; }

  const Eigen::MatrixXd& fundamental(std::size_t i) const { return F_[i]; }
  const Eigen::MatrixXd& fundamental_dot(std::size_t i) const;

  // Phi(t, s) for grid times, via linear solves (never an explicit inverse).
  Eigen::MatrixXd evaluate(double t, double s) const;

  // Off-grid evaluation inside [t_min, t_max]; requires a dense representation.
  void eval_dense(double t, Eigen::MatrixXd& F, Eigen::MatrixXd* F_dot) const;

  std::shared_ptr<const DenseEvaluator> dense_handle() const { return dense_; }

private:
  TimeSet ts_;
  std::vector<Eigen::MatrixXd> F_;
  std::vector<Eigen::MatrixXd> F_dot_;
  std::shared_ptr<const DenseEvaluator> dense_;
  double condition_bound_;
};

// Solves the fundamental matrix of a linear system over the time set.
// Constant-coefficient systems with a well-conditioned eigenbasis use the
// exact matrix exponential; everything else runs fixed-step RK4 with grid
// points forced as nodes.
LinearProcess solve_linear(const SystemSpec& sys, const TimeSet& ts,
                           const SolveOptions& opts = {});

// Variational equation along the trajectory through x0: the linearization
// of the flow.  Linear systems simply delegate to solve_linear.
LinearProcess linearize(const SystemSpec& sys, const TimeSet& ts,
                        const Eigen::VectorXd& x0, const SolveOptions& opts = {});

// Exponentially weighted family: Phi_gamma(t,s) = exp(-gamma (t-s)) Phi(t,s).
LinearProcess shift(const LinearProcess& P, double gamma);

// Restriction to a subset of the grid, rebased so the subset's first point
// carries the identity.  Subset points must be grid points of P.
LinearProcess restrict_to(const LinearProcess& P, const TimeSet& subset);

// Trajectory table of a nonlinear system at the grid points.
std::vector<Eigen::VectorXd> solve_nonlinear(const SystemSpec& sys, const TimeSet& ts,
                                             const Eigen::VectorXd& x0,
                                             const SolveOptions& opts = {});

// Nonlinear process: the flow of the system over the time set, with cached
// trajectories keyed by initial state.
class NonlinearProcess {
public:
  NonlinearProcess(SystemSpec sys, TimeSet ts, const SolveOptions& opts = {});

  const TimeSet& timeset() const { return ts_; }
  const SystemSpec& system() const { return sys_; }
  Eigen::Index dimension() const { return sys_.dimension; }
  double step() const { return step_; }

  // phi(t_i, t_min, x0) at every grid point; cached per x0.
  std::shared_ptr<const std::vector<Eigen::VectorXd>> trajectory(
      const Eigen::VectorXd& x0) const;

  // phi(t, s, x): integrates between arbitrary times (either direction).
  Eigen::VectorXd evaluate(double t, double s, const Eigen::VectorXd& x) const;

private:
  SystemSpec sys_;
  TimeSet ts_;
  double step_;
  mutable std::map<std::vector<double>, std::shared_ptr<const std::vector<Eigen::VectorXd>>>
      cache_;
  mutable std::mutex cache_mutex_;
};

// Conjugacy candidate H(t, x) = phi(t, t_min, Phi(t_min, t) x) for grid t.
Eigen::VectorXd conjugacy_map(const NonlinearProcess& phi, const LinearProcess& P,
                              double t, const Eigen::VectorXd& x);

namespace detail {

// Fixed-step classical RK4 from ta to tb (either direction); throws
// IntegrationBlowup on non-finite or astronomically large states.
Eigen::VectorXd rk4_span(
    const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& deriv,
    double ta, double tb, Eigen::VectorXd y, double step);

}  // namespace detail
}  // namespace fintime
