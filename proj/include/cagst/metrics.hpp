#pragma once

#include "cagst/sdp.hpp"
#include "cagst/superop.hpp"

#include <array>
#include <string>

namespace cagst {

struct DiamondOptions {
  bool halved = false;  // report ||.||_diamond / 2 instead
  double tol = 1e-8;
};

struct DiamondResult {
  double value = 0.0;
  double gap = 0.0;
  bool converged = false;
  std::string status;
};

// Diamond-norm distance between two trace-preserving maps via the Choi SDP.
// Unhalved by default; the halved convention is a flag away. Throws
// std::invalid_argument when the difference is not trace-annihilating
// (unequal first rows), which the SDP formulation requires.
DiamondResult diamond_distance(const SuperOp& g, const SuperOp& h,
                               const DiamondOptions& opts = {});

struct CorrectionOptions {
  DiamondOptions diamond;
  int max_nm_iters = 80;
  double nm_tol = 1e-7;
  int starts = 8;  // deterministic: identity, polar inverse, coarse grid
};

struct CorrectionFit {
  std::array<double, 3> angles{0, 0, 0};  // Euler z-y-z, radians, in [-pi, pi]
  double uncorrected = 0.0;
  double corrected = 0.0;
  double improvement_ratio = 0.0;  // 1 - corrected/uncorrected
};

// Best unitary U (3 Euler angles) minimizing ||U g - I||_diamond, searched
// by Nelder-Mead from deterministic starts; never worse than no correction.
CorrectionFit fit_correction_unitary(const SuperOp& g, const CorrectionOptions& opts = {});

// Entanglement fidelity Tr(J(g) J(h))/4, in [0, 1]; equals 1 iff the
// channels coincide when h is unitary.
double process_fidelity(const SuperOp& g, const SuperOp& h);

struct CoherenceReport {
  double fraction = 0.0;          // 1 - corrected/uncorrected
  double reduction_factor = 0.0;  // (uncorrected - floor)/(corrected - floor)
  bool factor_defined = true;     // false when corrected == floor
};

// Fraction of an error budget removable by a correction unitary, plus the
// floor-referenced reduction factor.
CoherenceReport coherence_fraction(double uncorrected, double corrected, double floor);

}  // namespace cagst
