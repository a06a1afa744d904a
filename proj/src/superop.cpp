#include "cagst/superop.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <stdexcept>

namespace cagst {

namespace {

constexpr double kSqrt1_2 = 0.70710678118654752440;

// sigma_I, sigma_X, sigma_Y, sigma_Z (unnormalized)
const CMat4::Scalar kI{0.0, 1.0};

Eigen::Matrix2cd pauli(int i) {
  Eigen::Matrix2cd p;
  switch (i) {
    case 0: p << 1, 0, 0, 1; break;
    case 1: p << 0, 1, 1, 0; break;
    case 2: p << 0, -kI, kI, 0; break;
    default: p << 1, 0, 0, -1; break;
  }
  return p;
}

}  // namespace

bool SuperOp::trace_preserving(double tol) const {
  return std::abs(m(0, 0) - 1.0) <= tol && std::abs(m(0, 1)) <= tol &&
         std::abs(m(0, 2)) <= tol && std::abs(m(0, 3)) <= tol;
}

const SuperOp& GateSet::gate(const std::string& label) const {
  auto it = gates.find(label);
  if (it == gates.end()) throw std::out_of_range("unknown gate label: " + label);
  return it->second;
}

StateVec ground_state() {
  return StateVec(Vec4(kSqrt1_2, 0.0, 0.0, kSqrt1_2));
}

MeasVec ground_meas() {
  return MeasVec(Vec4(kSqrt1_2, 0.0, 0.0, kSqrt1_2));
}

SuperOp ptm_of_unitary(const Eigen::Vector3d& axis, double angle) {
  if (std::abs(axis.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("rotation axis must have unit norm");
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::Matrix3d cross;
  cross << 0, -axis.z(), axis.y(), axis.z(), 0, -axis.x(), -axis.y(), axis.x(), 0;
  Eigen::Matrix3d r = c * Eigen::Matrix3d::Identity() + s * cross +
                      (1.0 - c) * (axis * axis.transpose());
  Mat4 m = Mat4::Identity();
  m.block<3, 3>(1, 1) = r;
  return SuperOp(m);
}

SuperOp ptm_of_euler_zyz(double a, double b, double c) {
  const Eigen::Vector3d z(0, 0, 1), y(0, 1, 0);
  SuperOp rza = ptm_of_unitary(z, a);
  SuperOp ryb = ptm_of_unitary(y, b);
  SuperOp rzc = ptm_of_unitary(z, c);
  return SuperOp(rza.m * ryb.m * rzc.m);
}

SuperOp perfect_gate_for_base(const std::string& base) {
  if (base == "I") return SuperOp(Mat4::Identity());
  if (base == "Rx") return ptm_of_unitary(Eigen::Vector3d(1, 0, 0), M_PI / 2);
  if (base == "Ry") return ptm_of_unitary(Eigen::Vector3d(0, 1, 0), M_PI / 2);
  throw std::invalid_argument("unknown base gate: " + base);
}

GateSet perfect_gateset_xyi() {
  GateSet gs;
  gs.prep = ground_state();
  gs.meas = ground_meas();
  gs.gates["I"] = perfect_gate_for_base("I");
  gs.gates["Rx"] = perfect_gate_for_base("Rx");
  gs.gates["Ry"] = perfect_gate_for_base("Ry");
  return gs;
}

double evaluate_circuit(const GateSet& gs, const std::vector<std::string>& seq) {
  Vec4 v = gs.prep.v;
  for (const auto& label : seq) v = gs.gate(label).m * v;
  return gs.meas.v.dot(v);
}

Mat4 principal_log(const Mat4& a) {
  Eigen::ComplexEigenSolver<CMat4> es(a.cast<std::complex<double>>());
  if (es.info() == Eigen::Success) {
    const auto& vals = es.eigenvalues();
    for (int i = 0; i < 4; ++i) {
      if (vals(i).real() <= 0.0 && std::abs(vals(i).imag()) < 1e-14)
        throw std::domain_error(
            "principal logarithm undefined: eigenvalue on the closed negative real axis");
    }
    CMat4 v = es.eigenvectors();
    Eigen::FullPivLU<CMat4> lu(v);
    // Eigenvector conditioning gate; defective inputs go to the Schur path.
    if (lu.isInvertible() && lu.rcond() > 1e-8) {
      CMat4 logd = CMat4::Zero();
      for (int i = 0; i < 4; ++i) logd(i, i) = std::log(vals(i));
      CMat4 l = v * logd * lu.inverse();
      Mat4 lr = l.real();
      if ((lr.exp() - a).norm() <= 1e-9 * std::max(1.0, a.norm())) return lr;
    }
  }
  CMat4 l = a.cast<std::complex<double>>().log();
  Mat4 lr = l.real();
  if ((lr.exp() - a).norm() > 1e-7 * std::max(1.0, a.norm()))
    throw std::domain_error("matrix logarithm failed to converge (degenerate input)");
  return lr;
}

Mat4 mat_exp(const Mat4& a) { return a.exp(); }

ErrorGenerator error_generator(const SuperOp& noisy, const SuperOp& perfect) {
  Eigen::FullPivLU<Mat4> lu(perfect.m);
  if (!lu.isInvertible())
    throw std::domain_error("perfect gate is not invertible");
  return ErrorGenerator(principal_log(lu.inverse() * noisy.m));
}

SuperOp apply_error(const SuperOp& perfect, const ErrorGenerator& err, double scale) {
  if (scale == 0.0) return perfect;
  return SuperOp(perfect.m * mat_exp(scale * err.L));
}

CMat4 ptm_to_choi(const SuperOp& g) {
  // J = sum_{kl} R_kl P_l^T (x) P_k with normalized Paulis, i.e. a factor 1/2.
  CMat4 j = CMat4::Zero();
  for (int k = 0; k < 4; ++k) {
    for (int l = 0; l < 4; ++l) {
      if (g.m(k, l) == 0.0) continue;
      Eigen::Matrix2cd pl = pauli(l).transpose();
      Eigen::Matrix2cd pk = pauli(k);
      CMat4 kron;
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          kron.block<2, 2>(2 * a, 2 * b) = pl(a, b) * pk;
      j += 0.5 * g.m(k, l) * kron;
    }
  }
  return j;
}

}  // namespace cagst
