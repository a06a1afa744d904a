#include "cagst/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

namespace cagst {

DiamondResult diamond_distance(const SuperOp& g, const SuperOp& h,
                               const DiamondOptions& opts) {
  if ((g.m.row(0) - h.m.row(0)).norm() > 1e-9)
    throw std::invalid_argument(
        "diamond_distance requires maps with identical first rows "
        "(trace-annihilating difference)");
  CMat4 j = ptm_to_choi(SuperOp(g.m - h.m));
  auto sdp = diamond_sdp(j, opts.tol);
  DiamondResult out;
  out.value = opts.halved ? sdp.value / 2.0 : sdp.value;
  out.gap = sdp.gap;
  out.converged = sdp.converged;
  out.status = sdp.converged ? "converged" : "max-iterations";
  return out;
}

namespace {

// Nelder-Mead on R^3, deterministic.
struct NmResult {
  Eigen::Vector3d x;
  double f;
};

NmResult nelder_mead(const std::function<double(const Eigen::Vector3d&)>& f,
                     const Eigen::Vector3d& x0, double step, int max_iters, double tol) {
  constexpr int n = 3;
  std::vector<Eigen::Vector3d> xs(n + 1, x0);
  std::vector<double> fs(n + 1);
  for (int i = 0; i < n; ++i) xs[i + 1](i) += step;
  for (int i = 0; i <= n; ++i) fs[i] = f(xs[i]);

  for (int it = 0; it < max_iters; ++it) {
    // order ascending by value
    std::vector<int> ord{0, 1, 2, 3};
    std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    std::vector<Eigen::Vector3d> xs2;
    std::vector<double> fs2;
    for (int i : ord) {
      xs2.push_back(xs[i]);
      fs2.push_back(fs[i]);
    }
    xs = xs2;
    fs = fs2;
    if (std::abs(fs[n] - fs[0]) < tol && (xs[n] - xs[0]).norm() < tol) break;

    Eigen::Vector3d centroid = Eigen::Vector3d::Zero();
    for (int i = 0; i < n; ++i) centroid += xs[i];
    centroid /= n;

    Eigen::Vector3d xr = centroid + (centroid - xs[n]);
    double fr = f(xr);
    if (fr < fs[0]) {
      Eigen::Vector3d xe = centroid + 2.0 * (centroid - xs[n]);
      double fe = f(xe);
      if (fe < fr) {
        xs[n] = xe;
        fs[n] = fe;
      } else {
        xs[n] = xr;
        fs[n] = fr;
      }
    } else if (fr < fs[n - 1]) {
      xs[n] = xr;
      fs[n] = fr;
    } else {
      Eigen::Vector3d xc = centroid + 0.5 * (xs[n] - centroid);
      double fc = f(xc);
      if (fc < fs[n]) {
        xs[n] = xc;
        fs[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
          fs[i] = f(xs[i]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= n; ++i)
    if (fs[i] < fs[best]) best = i;
  return {xs[best], fs[best]};
}

double wrap_angle(double a) {
  while (a > M_PI) a -= 2.0 * M_PI;
  while (a < -M_PI) a += 2.0 * M_PI;
  return a;
}

// z-y-z angles of the rotation closest to inverting the unital block.
Eigen::Vector3d polar_inverse_angles(const SuperOp& g) {
  Eigen::Matrix3d r = g.m.block<3, 3>(1, 1);
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d q = svd.matrixU() * svd.matrixV().transpose();
  if (q.determinant() < 0) {
    Eigen::Matrix3d u = svd.matrixU();
    u.col(2) *= -1.0;
    q = u * svd.matrixV().transpose();
  }
  Eigen::Matrix3d inv = q.transpose();
  // z-y-z Euler extraction of the Bloch rotation inv = Rz(a) Ry(b) Rz(c)
  double b = std::atan2(std::hypot(inv(2, 0), inv(2, 1)), inv(2, 2));
  double a, c;
  if (std::abs(std::sin(b)) > 1e-12) {
    a = std::atan2(inv(1, 2), inv(0, 2));
    c = std::atan2(inv(2, 1), -inv(2, 0));
  } else {
    a = std::atan2(inv(1, 0), inv(0, 0));
    c = 0.0;
  }
  return {a, b, c};
}

}  // namespace

CorrectionFit fit_correction_unitary(const SuperOp& g, const CorrectionOptions& opts) {
  const SuperOp identity(Mat4::Identity());
  auto objective = [&](const Eigen::Vector3d& angles) {
    SuperOp u = ptm_of_euler_zyz(angles(0), angles(1), angles(2));
    return diamond_distance(SuperOp(u.m * g.m), identity, opts.diamond).value;
  };

  // Coarse SDP tolerance while searching, tight re-evaluation at the end.
  DiamondOptions search = opts.diamond;
  search.tol = std::max(opts.diamond.tol, 1e-5);
  auto search_objective = [&](const Eigen::Vector3d& angles) {
    SuperOp u = ptm_of_euler_zyz(angles(0), angles(1), angles(2));
    return diamond_distance(SuperOp(u.m * g.m), identity, search).value;
  };

  CorrectionFit fit;
  fit.uncorrected = diamond_distance(g, identity, opts.diamond).value;
  fit.corrected = fit.uncorrected;
  fit.angles = {0.0, 0.0, 0.0};

  std::vector<Eigen::Vector3d> starts;
  starts.emplace_back(0.0, 0.0, 0.0);
  starts.push_back(polar_inverse_angles(g));
  const double d = 0.02;
  starts.emplace_back(d, 0.0, 0.0);
  starts.emplace_back(-d, 0.0, 0.0);
  starts.emplace_back(0.0, d, 0.0);
  starts.emplace_back(0.0, -d, 0.0);
  starts.emplace_back(d, d, -d);
  starts.emplace_back(-d, -d, d);
  if (static_cast<int>(starts.size()) > opts.starts) starts.resize(opts.starts);

  Eigen::Vector3d best_angles = Eigen::Vector3d::Zero();
  double best_search = fit.uncorrected;
  for (const auto& s : starts) {
    auto r = nelder_mead(search_objective, s, 0.01, opts.max_nm_iters, opts.nm_tol);
    if (r.f < best_search) {
      best_search = r.f;
      best_angles = r.x;
    }
  }
  double refined = objective(best_angles);
  if (refined < fit.corrected) {
    fit.corrected = refined;
    fit.angles = {wrap_angle(best_angles(0)), wrap_angle(best_angles(1)),
                  wrap_angle(best_angles(2))};
  }
  fit.improvement_ratio = fit.uncorrected > 0 ? 1.0 - fit.corrected / fit.uncorrected : 0.0;
  return fit;
}

double process_fidelity(const SuperOp& g, const SuperOp& h) {
  // Tr(J(g) J(h))/4 collapses to the Frobenius inner product of the PTMs.
  double f = (g.m.array() * h.m.array()).sum() / 4.0;
  return std::clamp(f, 0.0, 1.0);
}

CoherenceReport coherence_fraction(double uncorrected, double corrected, double floor) {
  if (corrected > uncorrected + 1e-12)
    throw std::invalid_argument("corrected distance exceeds uncorrected");
  if (floor > corrected + 1e-12)
    throw std::invalid_argument("floor exceeds corrected distance");
  CoherenceReport r;
  r.fraction = uncorrected > 0 ? 1.0 - corrected / uncorrected : 0.0;
  if (std::abs(corrected - floor) < 1e-12) {
    r.factor_defined = false;
    r.reduction_factor = std::numeric_limits<double>::infinity();
  } else {
    r.reduction_factor = (uncorrected - floor) / (corrected - floor);
  }
  return r;
}

}  // namespace cagst
