#pragma once

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

namespace cagst {

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;
using CMat4 = Eigen::Matrix4cd;

// Pauli transfer matrix of a single-qubit channel. Basis order (I, X, Y, Z),
// normalized Paulis {I,X,Y,Z}/sqrt(2). Trace-preserving channels have first
// row (1, 0, 0, 0); all entries of a physical channel lie in [-1, 1].
struct SuperOp {
  Mat4 m = Mat4::Identity();

  SuperOp() = default;
  explicit SuperOp(const Mat4& mat) : m(mat) {}

  bool trace_preserving(double tol = 1e-12) const;
};

// Pauli expansion of a density matrix: v[i] = Tr(P_i rho). Physical states
// have v[0] = 1/sqrt(2) (unit trace) and |v[i]| <= sqrt(2).
struct StateVec {
  Vec4 v = Vec4::Zero();

  StateVec() = default;
  explicit StateVec(const Vec4& vec) : v(vec) {}
};

// Pauli expansion of a measurement effect (covector); |v[i]| <= sqrt(2).
struct MeasVec {
  Vec4 v = Vec4::Zero();

  MeasVec() = default;
  explicit MeasVec(const Vec4& vec) : v(vec) {}
};

// Logarithm of the noise part of a gate: G = G_perfect * exp(L).
// Zero for a perfect gate; first row is zero for trace-preserving noise.
struct ErrorGenerator {
  Mat4 L = Mat4::Zero();

  ErrorGenerator() = default;
  explicit ErrorGenerator(const Mat4& mat) : L(mat) {}

  double norm() const { return L.norm(); }
};

// State preparation, measurement effect, and the (context-resolved) gate map.
// The map is ordered so every label-indexed traversal is deterministic.
struct GateSet {
  StateVec prep;
  MeasVec meas;
  std::map<std::string, SuperOp> gates;

  const SuperOp& gate(const std::string& label) const;
  bool has(const std::string& label) const { return gates.count(label) != 0; }
};

// --- constructors for standard objects ---------------------------------

// Ground state |0><0| in the normalized Pauli basis: (1,0,0,1)/sqrt(2).
StateVec ground_state();

// Ground-state measurement effect |0><0|; outcome probability of "0".
MeasVec ground_meas();

// PTM of exp(-i*angle/2 * axis.sigma): rotation of the Bloch ball by `angle`
// around `axis` (right-hand rule). Throws std::invalid_argument unless the
// axis has unit norm (tol 1e-9).
SuperOp ptm_of_unitary(const Eigen::Vector3d& axis, double angle);

// PTM of the z-y-z Euler rotation Rz(a) * Ry(b) * Rz(c) (applied c first).
SuperOp ptm_of_euler_zyz(double a, double b, double c);

// Perfect PTM of a named base gate: "Rx"/"Ry" are pi/2 rotations, "I" is the
// identity. Throws std::invalid_argument for unknown names.
SuperOp perfect_gate_for_base(const std::string& base);

// Perfect {Rx, Ry, I} gate set with ground-state SPAM.
GateSet perfect_gateset_xyi();

// --- operations ---------------------------------------------------------

// <<M| G_last ... G_first |rho>>, gates applied left to right in `seq`.
// Ground-state outcome probability for a physical gate set.
// Throws std::out_of_range on an unknown label.
double evaluate_circuit(const GateSet& gs, const std::vector<std::string>& seq);

// Principal matrix logarithm of perfect^{-1} * noisy, eigendecomposition
// first, Schur-based fallback for defective inputs. Throws
// std::domain_error when the spectrum obstructs the principal branch.
ErrorGenerator error_generator(const SuperOp& noisy, const SuperOp& perfect);

// perfect * exp(scale * L); scale = 0 returns `perfect` exactly.
SuperOp apply_error(const SuperOp& perfect, const ErrorGenerator& err, double scale);

// Choi matrix sum_ij E_ij (x) Lambda(E_ij); trace 2 for trace-preserving
// input, Hermitian, PSD iff the channel is completely positive.
CMat4 ptm_to_choi(const SuperOp& g);

// Principal matrix logarithm used by error_generator; exposed for reuse.
Mat4 principal_log(const Mat4& a);

// Matrix exponential (Pade, via Eigen).
Mat4 mat_exp(const Mat4& a);

}  // namespace cagst
