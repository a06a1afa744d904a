#include "cagst/sdp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

namespace cagst {

namespace {

using C4 = Eigen::Matrix4cd;
using C2 = Eigen::Matrix2cd;
using cd = std::complex<double>;

constexpr int kNumVars = 19;  // 16 for Hermitian W, 3 for rho (trace fixed)

// Hermitian basis of W: 4 diagonal + 6 real-offdiag + 6 imag-offdiag.
std::array<C4, 16> w_basis() {
  std::array<C4, 16> b;
  int n = 0;
  for (int i = 0; i < 4; ++i) {
    b[n] = C4::Zero();
    b[n](i, i) = 1.0;
    ++n;
  }
  for (int p = 0; p < 4; ++p)
    for (int q = p + 1; q < 4; ++q) {
      b[n] = C4::Zero();
      b[n](p, q) = 1.0;
      b[n](q, p) = 1.0;
      ++n;
      b[n] = C4::Zero();
      b[n](p, q) = cd(0, 1);
      b[n](q, p) = cd(0, -1);
      ++n;
    }
  return b;
}

// rho = diag(0,1) + a*diag(1,-1) + re*(E01+E10) + im*(iE01 - iE10)
std::array<C2, 3> rho_basis() {
  std::array<C2, 3> b;
  b[0] = C2::Zero();
  b[0](0, 0) = 1.0;
  b[0](1, 1) = -1.0;
  b[1] = C2::Zero();
  b[1](0, 1) = 1.0;
  b[1](1, 0) = 1.0;
  b[2] = C2::Zero();
  b[2](0, 1) = cd(0, 1);
  b[2](1, 0) = cd(0, -1);
  return b;
}

C4 kron2(const C2& a) {
  C4 k = C4::Zero();
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      k(2 * i, 2 * j) = a(i, j);
      k(2 * i + 1, 2 * j + 1) = a(i, j);
    }
  return k;
}

double logdet_llt(const Eigen::LLT<C4>& llt) {
  double s = 0.0;
  auto l = llt.matrixLLT();
  for (int i = 0; i < 4; ++i) s += std::log(l(i, i).real());
  return 2.0 * s;
}

}  // namespace

DiamondSdpResult diamond_sdp(const Eigen::Matrix4cd& j_in, double tol) {
  DiamondSdpResult out;
  const double scale = j_in.norm();
  if (scale < 1e-15) {
    out.converged = true;
    return out;
  }
  const C4 j = (j_in / scale + (j_in / scale).adjoint()) / 2.0;

  const auto wb = w_basis();
  const auto rb = rho_basis();

  // S1(x) = W(x); S2(x) = rho(x) (x) I - W(x). Constant parts.
  const C4 f0_s2 = kron2([] {
    C2 m = C2::Zero();
    m(1, 1) = 1.0;
    return m;
  }());

  // Per-variable derivative matrices for both blocks.
  std::array<C4, kNumVars> f1, f2;
  Eigen::Matrix<double, kNumVars, 1> b = Eigen::Matrix<double, kNumVars, 1>::Zero();
  for (int i = 0; i < 16; ++i) {
    f1[i] = wb[i];
    f2[i] = -wb[i];
    b(i) = 2.0 * (j * wb[i]).trace().real();
  }
  for (int i = 0; i < 3; ++i) {
    f1[16 + i] = C4::Zero();
    f2[16 + i] = kron2(rb[i]);
  }

  // Strictly feasible start: W = 0.05 I, rho = I/2.
  Eigen::Matrix<double, kNumVars, 1> x = Eigen::Matrix<double, kNumVars, 1>::Zero();
  for (int i = 0; i < 4; ++i) x(i) = 0.05;
  x(16) = 0.5;

  auto assemble = [&](const Eigen::Matrix<double, kNumVars, 1>& xx, C4& s1, C4& s2) {
    s1 = C4::Zero();
    s2 = f0_s2;
    for (int i = 0; i < kNumVars; ++i) {
      if (i < 16) s1 += xx(i) * f1[i];
      s2 += xx(i) * f2[i];
    }
    s1 = ((s1 + s1.adjoint()) / 2.0).eval();
    s2 = ((s2 + s2.adjoint()) / 2.0).eval();
  };

  auto barrier = [&](const Eigen::Matrix<double, kNumVars, 1>& xx, double t,
                     double* phi) -> bool {
    C4 s1, s2;
    assemble(xx, s1, s2);
    Eigen::LLT<C4> l1(s1), l2(s2);
    if (l1.info() != Eigen::Success || l2.info() != Eigen::Success) return false;
    // reject near-singular factors (keeps the line search honest)
    for (int i = 0; i < 4; ++i)
      if (l1.matrixLLT()(i, i).real() < 1e-14 || l2.matrixLLT()(i, i).real() < 1e-14)
        return false;
    *phi = -t * b.dot(xx) - logdet_llt(l1) - logdet_llt(l2);
    return true;
  };

  const double nu = 8.0;  // two complex Hermitian 4x4 cones
  const double mu = 5.0;
  double t = 1.0;
  C4 s1, s2, s1inv, s2inv;

  // Certified dual bound from an approximate dual point: the exact dual is
  //   min lambda_max(Tr_Y Z)  s.t.  Z >= 0, Z >= 2J,
  // and any Hermitian Z becomes feasible after adding beta*I with
  // beta = max(0, -lambda_min(Z), -lambda_min(Z - 2J)), which raises the
  // objective by 2*beta. Tight when Z is near the central path.
  auto dual_bound = [&](const C4& z2) {
    C4 z = (z2 + z2.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<C4> ez(z);
    Eigen::SelfAdjointEigenSolver<C4> ezj(((z - 2.0 * j) + (z - 2.0 * j).adjoint()) / 2.0);
    double beta = std::max({0.0, -ez.eigenvalues().minCoeff(), -ezj.eigenvalues().minCoeff()});
    C2 ptrace = C2::Zero();
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k)
        for (int y = 0; y < 2; ++y) ptrace(i, k) += z(2 * i + y, 2 * k + y);
    Eigen::SelfAdjointEigenSolver<C2> ep((ptrace + ptrace.adjoint()) / 2.0);
    return ep.eigenvalues().maxCoeff() + 2.0 * beta;
  };
  double best_dual = std::numeric_limits<double>::infinity();

  while (true) {
    // Newton-center at parameter t; intermediate rounds center loosely,
    // the final round tightly (the dual certificate reads off it).
    // Coarse-tolerance solves ask for search-grade accuracy only.
    const bool final_round = nu / t <= tol;
    const double inner_tol = final_round ? (tol <= 1e-7 ? 1e-11 : 1e-7) : 1e-6;
    double ridge = 0.0;
    for (int inner = 0; inner < 120; ++inner) {
      assemble(x, s1, s2);
      s1inv = s1.inverse();
      s2inv = s2.inverse();
      std::array<C4, kNumVars> t1, t2;
      for (int i = 0; i < kNumVars; ++i) {
        t1[i] = i < 16 ? (s1inv * f1[i]).eval() : C4::Zero();
        t2[i] = s2inv * f2[i];
      }
      Eigen::Matrix<double, kNumVars, 1> g;
      Eigen::Matrix<double, kNumVars, kNumVars> h;
      for (int i = 0; i < kNumVars; ++i) {
        g(i) = -t * b(i) - t1[i].trace().real() - t2[i].trace().real();
        for (int k = i; k < kNumVars; ++k) {
          double v = (t1[i] * t1[k]).trace().real() + (t2[i] * t2[k]).trace().real();
          h(i, k) = v;
          h(k, i) = v;
        }
      }

      // Jacobi equilibration keeps the Newton solve honest when a cone
      // boundary makes the raw Hessian badly conditioned.
      Eigen::Matrix<double, kNumVars, 1> scale;
      for (int i = 0; i < kNumVars; ++i) scale(i) = 1.0 / std::sqrt(std::max(h(i, i), 1e-300));
      Eigen::Matrix<double, kNumVars, kNumVars> hs = scale.asDiagonal() * h * scale.asDiagonal();
      Eigen::Matrix<double, kNumVars, 1> gs = scale.asDiagonal() * g;

      Eigen::Matrix<double, kNumVars, 1> dx;
      double decrement = -1.0;
      for (int attempt = 0; attempt < 12; ++attempt) {
        Eigen::Matrix<double, kNumVars, kNumVars> hr = hs;
        hr.diagonal().array() += ridge;
        Eigen::LDLT<Eigen::Matrix<double, kNumVars, kNumVars>> ldlt(hr);
        Eigen::Matrix<double, kNumVars, 1> ds = ldlt.solve(-gs);
        dx = scale.asDiagonal() * ds;
        decrement = -g.dot(dx);
        if (dx.allFinite() && decrement >= 0) break;
        ridge = ridge == 0.0 ? 1e-12 : ridge * 100.0;
      }
      if (!dx.allFinite() || decrement < 0) break;
      if (decrement / 2.0 < inner_tol) break;

      // Fraction-to-boundary: largest alpha keeping both blocks definite.
      double alpha = 1.0;
      {
        C4 ds1 = C4::Zero(), ds2 = C4::Zero();
        for (int i = 0; i < kNumVars; ++i) {
          if (i < 16) ds1 += dx(i) * f1[i];
          ds2 += dx(i) * f2[i];
        }
        for (auto [s, ds] : {std::pair<const C4*, const C4*>{&s1, &ds1}, {&s2, &ds2}}) {
          Eigen::LLT<C4> llt(*s);
          if (llt.info() != Eigen::Success) continue;
          C4 l = llt.matrixL();
          C4 m = l.triangularView<Eigen::Lower>().solve(*ds);
          m = l.triangularView<Eigen::Lower>().solve(m.adjoint().eval()).adjoint();
          Eigen::SelfAdjointEigenSolver<C4> es((m + m.adjoint()) / 2.0);
          double lmin = es.eigenvalues().minCoeff();
          if (lmin < 0) alpha = std::min(alpha, -0.995 / lmin);
        }
      }

      double phi0;
      barrier(x, t, &phi0);
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        double phi;
        if (barrier(x + alpha * dx, t, &phi) && phi <= phi0 - 1e-4 * alpha * decrement) {
          x += alpha * dx;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      ++out.newton_steps;
      if (!moved) {
        // a rejected step with a healthy decrement usually means the
        // direction was poisoned by conditioning; damp and retry
        ridge = ridge == 0.0 ? 1e-10 : ridge * 100.0;
        if (ridge > 1.0) break;
        continue;
      }
      ridge *= 0.1;
    }
    assemble(x, s1, s2);
    best_dual = std::min(best_dual, dual_bound(s2.inverse() / t));
    if (final_round) break;
    t *= mu;
  }

  double primal = b.dot(x);  // certified: x is strictly feasible throughout
  out.value = scale * primal;
  out.dual_value = scale * best_dual;
  out.gap = scale * std::max(best_dual - primal, 0.0);
  out.converged = out.gap <= 100.0 * tol * scale + 1e-12;
  return out;
}

}  // namespace cagst
