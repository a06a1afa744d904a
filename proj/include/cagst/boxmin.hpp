#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>
#include <vector>

namespace cagst {

// Objective with optional gradient output.
using BoxObjective = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;

struct BoxMinOptions {
  int max_iters = 500;
  double pg_tol = 1e-12;  // projected-gradient infinity norm
  int history = 10;       // L-BFGS memory
  int max_linesearch = 50;
  double armijo = 1e-4;
};

// Projected L-BFGS over a box: descent directions from the L-BFGS two-loop
// recursion, backtracking over x(a) = clamp(x + a d). Accepted steps never
// increase the objective; curvature pairs that projection invalidates are
// dropped. Stepping is exposed so callers can drive one iteration at a time.
class BoxLbfgs {
 public:
  BoxLbfgs(BoxObjective f, Eigen::VectorXd x0, Eigen::VectorXd lo, Eigen::VectorXd hi,
           BoxMinOptions opts = {});

  // One accepted monotone iteration. Returns false (and sets the status)
  // when converged or no acceptable step exists.
  bool step();

  const Eigen::VectorXd& x() const { return x_; }
  double value() const { return f_; }
  const std::string& status() const { return status_; }
  int iterations() const { return iters_; }
  double projected_gradient_norm() const;

 private:
  Eigen::VectorXd project(const Eigen::VectorXd& v) const;

  BoxObjective f_fn_;
  Eigen::VectorXd x_, lo_, hi_, g_;
  double f_ = 0.0;
  BoxMinOptions opts_;
  std::vector<Eigen::VectorXd> s_hist_, y_hist_;
  std::vector<double> rho_hist_;
  std::string status_ = "running";
  int iters_ = 0;
};

struct BoxMinResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iters = 0;
  std::string status;  // tolerance-met | stalled | max-iterations
};

BoxMinResult minimize_box(const BoxObjective& f, Eigen::VectorXd x0,
                          const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                          const BoxMinOptions& opts = {});

}  // namespace cagst
