#pragma once

#include <Eigen/Dense>

namespace cagst {

// Result of the diamond-norm semidefinite program.
struct DiamondSdpResult {
  double value = 0.0;       // primal optimum (unhalved diamond norm)
  double dual_value = 0.0;  // dual objective at the certificate
  double gap = 0.0;         // |dual - primal| + barrier residual
  int newton_steps = 0;
  bool converged = false;
};

// Diamond norm of the Hermiticity-preserving, trace-annihilating map with
// Choi matrix `j` (input factor first):
//
//   max 2<J, W>  s.t.  0 <= W <= rho (x) I,  Tr rho = 1
//
// solved by a log-det barrier method on the two 4x4 Hermitian cones with a
// dual certificate extracted from the final central point. `tol` bounds the
// certified duality gap relative to ||j||_F.
DiamondSdpResult diamond_sdp(const Eigen::Matrix4cd& j, double tol = 1e-8);

}  // namespace cagst
