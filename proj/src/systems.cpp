#include "fintime/systems.hpp"

#include "fintime/errors.hpp"

namespace fintime {

SystemSpec make_system(const std::string& name) {
  if (name == "diag") {
    Eigen::MatrixXd A(2, 2);
    A << -1.0, 0.0, 0.0, 2.0;
    return SystemSpec::linear_constant(A, name);
  }
  if (name == "rotation") {
    Eigen::MatrixXd A(2, 2);
    A << 0.0, -1.0, 1.0, 0.0;
    return SystemSpec::linear_constant(A, name);
  }
  if (name == "saddle_quadratic") {
    auto f = [](double, const Eigen::VectorXd& x) {
      Eigen::VectorXd out(2);
      out << -x(0) + x(1) * x(1), x(1) + x(0) * x(0);
      return out;
    };
    auto jac = [](double, const Eigen::VectorXd& x) {
      Eigen::MatrixXd J(2, 2);
      J << -1.0, 2.0 * x(1), 2.0 * x(0), 1.0;
      return J;
    };
    return SystemSpec::nonlinear(2, f, jac, name);
  }
  if (name == "cubic_contraction") {
    auto f = [](double, const Eigen::VectorXd& x) {
      Eigen::VectorXd out(1);
      out << -x(0) + x(0) * x(0) * x(0);
      return out;
    };
    auto jac = [](double, const Eigen::VectorXd& x) {
      Eigen::MatrixXd J(1, 1);
      J << -1.0 + 3.0 * x(0) * x(0);
      return J;
    };
    return SystemSpec::nonlinear(1, f, jac, name);
  }
  throw Error("unknown system: " + name);
}

std::vector<std::string> system_catalog() {
  return {"diag", "rotation", "saddle_quadratic", "cubic_contraction"};
}

}  // namespace fintime
