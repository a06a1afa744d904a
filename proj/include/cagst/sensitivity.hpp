#pragma once

#include "cagst/circuit.hpp"
#include "cagst/kernels.hpp"
#include "cagst/superop.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace cagst {

enum class CoeffKind { superop_entry, errorgen_entry };

// Exact first-order coefficient of the circuit expectation value with
// respect to one entry of gate `gate`: either the superoperator entry
// itself or the (row, col) entry of the gate's error generator (the
// derivative of G * exp(x E_rc) at x = 0). row/col are 1-based.
double entry_coefficient(const GateSet& gs, const std::vector<std::string>& seq,
                         const std::string& gate, int row, int col, CoeffKind kind);

// Sensitivity of the expectation value to the 12 nontrivial entries of a
// germ-block superoperator, aggregated over fiducial pairs. T(i-2, j-1)
// stores entry (i, j), i in 2..4, j in 1..4; zero entries mark directions
// the fiducial set cannot see.
struct FiducialSensitivity {
  Eigen::Matrix<double, 3, 4> T = Eigen::Matrix<double, 3, 4>::Zero();
  std::vector<std::pair<int, int>> zero_entries;  // 1-based (i, j)

  double sum() const { return T.sum(); }
  double population_variance() const;
};

FiducialSensitivity fiducial_T(const GateSet& gs_perfect,
                               const std::vector<std::vector<GateLabel>>& preps,
                               const std::vector<std::vector<GateLabel>>& meass);

struct FiducialFitness {
  double value = 0.0;
  bool non_ic = false;              // some T entry vanishes
  bool degenerate_uniform = false;  // variance below epsilon
};

// sum(T) / (population variance + 1e-12); larger is better.
FiducialFitness fiducial_fitness(const FiducialSensitivity& t);

// One row per targeted error-generator entry, one column per repetition
// index l = 1..L. Entries aggregate |a1| over every (prep, meas, germ)
// tuple at that l (tuples are not deduplicated; Eq.-level sums).
struct SensitivityMatrix {
  struct RowLabel {
    std::string gate;
    int row = 0;  // 1-based generator entry indices
    int col = 0;
  };
  std::vector<RowLabel> rows;
  Eigen::MatrixXd B;

  int max_l() const { return static_cast<int>(B.cols()); }
};

SensitivityMatrix build_B(const GateSet& gs_perfect,
                          const std::vector<std::vector<GateLabel>>& preps,
                          const std::vector<std::vector<GateLabel>>& meass,
                          const std::vector<std::vector<GateLabel>>& germs, int max_l,
                          const ContextSpec& ctx,
                          RepetitionRule rule = RepetitionRule::double_per_index);

struct AmplificationViolation {
  int row = 0;  // index into SensitivityMatrix::rows
  int l = 0;    // 1-based column where B[row][l] >= B[row][l+1]
};

// Every (row, l) where the strict amplification constraint fails
// (slack guards against float-equality artifacts).
std::vector<AmplificationViolation> germ_constraint_check(const SensitivityMatrix& b,
                                                          double slack = 1e-9);

// Min of the last column, with violations pushed below every feasible value
// so a constrained search ranks them last.
double germ_fitness(const SensitivityMatrix& b, double slack = 1e-9);

void write_B_csv(const SensitivityMatrix& b, std::ostream& os);

}  // namespace cagst
