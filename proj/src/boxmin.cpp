#include "cagst/boxmin.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cagst {

BoxLbfgs::BoxLbfgs(BoxObjective f, Eigen::VectorXd x0, Eigen::VectorXd lo,
                   Eigen::VectorXd hi, BoxMinOptions opts)
    : f_fn_(std::move(f)), x_(std::move(x0)), lo_(std::move(lo)), hi_(std::move(hi)),
      opts_(opts) {
  if (x_.size() != lo_.size() || x_.size() != hi_.size())
    throw std::invalid_argument("bound dimensions disagree with the start point");
  if (((hi_ - lo_).array() < 0).any())
    throw std::invalid_argument("box is empty (hi < lo)");
  x_ = project(x_);
  g_.resize(x_.size());
  f_ = f_fn_(x_, &g_);
}

Eigen::VectorXd BoxLbfgs::project(const Eigen::VectorXd& v) const {
  return v.cwiseMax(lo_).cwiseMin(hi_);
}

double BoxLbfgs::projected_gradient_norm() const {
  return (project(x_ - g_) - x_).lpNorm<Eigen::Infinity>();
}

bool BoxLbfgs::step() {
  if (projected_gradient_norm() <= opts_.pg_tol) {
    status_ = "tolerance-met";
    return false;
  }
  if (iters_ >= opts_.max_iters) {
    status_ = "max-iterations";
    return false;
  }

  // Two-loop recursion on the negative gradient.
  Eigen::VectorXd d = -g_;
  const int m = static_cast<int>(s_hist_.size());
  std::vector<double> alpha(m);
  for (int i = m - 1; i >= 0; --i) {
    alpha[i] = rho_hist_[i] * s_hist_[i].dot(d);
    d -= alpha[i] * y_hist_[i];
  }
  if (m > 0) {
    double gamma = s_hist_.back().dot(y_hist_.back()) / y_hist_.back().squaredNorm();
    d *= gamma;
  }
  for (int i = 0; i < m; ++i) {
    double beta = rho_hist_[i] * y_hist_[i].dot(d);
    d += (alpha[i] - beta) * s_hist_[i];
  }
  if (g_.dot(d) >= 0) {  // not a descent direction; drop the memory
    s_hist_.clear();
    y_hist_.clear();
    rho_hist_.clear();
    d = -g_;
  }

  double step_scale = 1.0;
  bool accepted = false;
  Eigen::VectorXd x_new, g_new;
  double f_new = 0.0;
  for (int ls = 0; ls < opts_.max_linesearch; ++ls) {
    x_new = project(x_ + step_scale * d);
    Eigen::VectorXd dx = x_new - x_;
    double slope = g_.dot(dx);
    if (slope < 0) {
      g_new.resize(x_.size());
      f_new = f_fn_(x_new, &g_new);
      if (f_new <= f_ + opts_.armijo * slope) {
        accepted = true;
        break;
      }
    }
    step_scale *= 0.5;
  }
  if (!accepted) {
    status_ = "stalled";
    return false;
  }

  Eigen::VectorXd s = x_new - x_;
  Eigen::VectorXd y = g_new - g_;
  double sy = s.dot(y);
  if (sy > 1e-12 * s.norm() * y.norm()) {
    s_hist_.push_back(std::move(s));
    y_hist_.push_back(std::move(y));
    rho_hist_.push_back(1.0 / sy);
    if (static_cast<int>(s_hist_.size()) > opts_.history) {
      s_hist_.erase(s_hist_.begin());
      y_hist_.erase(y_hist_.begin());
      rho_hist_.erase(rho_hist_.begin());
    }
  }
  x_ = std::move(x_new);
  g_ = std::move(g_new);
  f_ = f_new;
  ++iters_;
  status_ = "running";
  return true;
}

BoxMinResult minimize_box(const BoxObjective& f, Eigen::VectorXd x0,
                          const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                          const BoxMinOptions& opts) {
  BoxLbfgs solver(f, std::move(x0), lo, hi, opts);
  while (solver.step()) {
  }
  BoxMinResult r;
  r.x = solver.x();
  r.f = solver.value();
  r.iters = solver.iterations();
  r.status = solver.status() == "running" ? "max-iterations" : solver.status();
  return r;
}

}  // namespace cagst
