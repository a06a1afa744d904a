#pragma once

#include "cagst/circuit.hpp"
#include "cagst/superop.hpp"

#include <functional>
#include <map>
#include <string>
#include <vector>

namespace cagst {

// A gate set bound to a fixed label universe so hot loops index gates by id.
struct ResolvedGateSet {
  Vec4 prep;
  Vec4 meas;
  std::vector<Mat4> gates;          // by id
  std::vector<std::string> labels;  // id -> label
  std::map<std::string, int> id;    // label -> id

  int require(const std::string& label) const;
};

ResolvedGateSet resolve_gateset(const GateSet& gs);
ResolvedGateSet resolve_gateset(const GateSet& gs, const std::vector<std::string>& universe);

// Evaluation plan for one circuit: the flat sequence is
//   prefix ++ block^reps ++ suffix   (gate ids, time order).
// The repeated block is raised to `reps` by square-and-multiply, which keeps
// long-germ circuits cheap. A flat circuit has an empty block.
struct CircuitPlan {
  std::vector<int> prefix;
  std::vector<int> block;
  long long reps = 0;
  std::vector<int> suffix;
};

// Mirrors compile_circuit: in memory mode the first germ copy lands in the
// prefix (its leading context differs from the steady copies) and the final
// idle in the suffix.
CircuitPlan make_plan(const CircuitSpec& spec,
                      const std::vector<std::vector<GateLabel>>& germs,
                      const ContextSpec& ctx, const ResolvedGateSet& rgs,
                      RepetitionRule rule = RepetitionRule::double_per_index);

CircuitPlan flat_plan(const std::vector<std::string>& labels, const ResolvedGateSet& rgs);

// Time-ordered id sequence the plan expands to (testing / cross-checks).
std::vector<int> plan_flatten(const CircuitPlan& plan);

// Plans grouped by identical (block, reps) so group-invariant work (the
// power chain) is done once per group.
struct PlanBatch {
  std::vector<CircuitPlan> plans;
  struct Group {
    std::vector<int> block;
    long long reps = 0;
    std::vector<int> members;  // plan indices
  };
  std::vector<Group> groups;
};

PlanBatch batch_plans(std::vector<CircuitPlan> plans);

// --- recorded building blocks for reverse-mode sweeps -------------------

// Square-and-multiply chain for M^e with recorded intermediates.
struct PowerChain {
  Mat4 base = Mat4::Identity();
  Mat4 result = Mat4::Identity();
  long long exponent = 0;
  struct Op {
    bool mult;   // false: out = in^2 ; true: out = in * base
    Mat4 input;  // value of the accumulator before the op
  };
  std::vector<Op> ops;
};

PowerChain power_chain(const Mat4& m, long long e);

// Adjoint of the chain: given dL/d(M^e), returns dL/dM.
Mat4 power_backward(const PowerChain& chain, const Mat4& result_bar);

// Right-prefix products of a gate chain: right[t] = G_t ... G_1 (right[0]=I).
struct ChainProducts {
  std::vector<Mat4> right;
  Mat4 product = Mat4::Identity();
};

ChainProducts chain_products(const ResolvedGateSet& rgs, const std::vector<int>& gates);

// Accumulates dL/dG_i into gate_bar (indexed by gate id) for the chain
// product whose adjoint is product_bar.
void chain_backward(const ResolvedGateSet& rgs, const std::vector<int>& gates,
                    const ChainProducts& prods, const Mat4& product_bar,
                    std::vector<Mat4>& gate_bar);

// --- per-circuit evaluation ----------------------------------------------

double eval_plan(const ResolvedGateSet& rgs, const CircuitPlan& plan);

// Value plus full first-order adjoints: gate_bar[i] accumulates
// d(value)/d(G_i) summed over all occurrences of gate i; prep_bar/meas_bar
// are the SPAM sensitivities. gate_bar must be sized to rgs.gates.
struct AdjointScratch {
  std::vector<Vec4> states;
  PowerChain chain;
  ChainProducts block_prods;
};

double eval_adjoint(const ResolvedGateSet& rgs, const CircuitPlan& plan,
                    std::vector<Mat4>& gate_bar, Vec4& prep_bar, Vec4& meas_bar,
                    AdjointScratch& scratch);

// --- batch kernels (OpenMP) ----------------------------------------------

std::vector<double> batch_eval(const ResolvedGateSet& rgs, const PlanBatch& batch);

// First-order coefficients of every error-generator entry, per circuit:
// out[c] holds one 4x4 matrix per gate id, entry (j,k) being the coefficient
// of entry (j,k) of that gate's error generator in circuit c's expectation
// value (C_i = G_i^T * gate_bar_i).
void batch_errorgen_coeffs(const ResolvedGateSet& rgs, const PlanBatch& batch,
                           std::vector<std::vector<Mat4>>& out);

// --- serial reference implementations ------------------------------------
//
// Straightforward dense evaluations kept as independent oracles for the fast
// kernels above; used by tests and the benchmark.
namespace ref {

// Full 4x4 product first, then one matrix-vector application.
double eval_product_chain(const GateSet& gs, const std::vector<std::string>& seq);

// Coefficient of error-generator entry (row, col), rows/cols 1..4: inserts
// G_gate * E_{row,col} at each occurrence and sums the evaluations.
double errorgen_coefficient(const GateSet& gs, const std::vector<std::string>& seq,
                            const std::string& gate, int row, int col);

// Coefficient of superoperator entry (row, col): replaces one occurrence at
// a time by the elementary matrix E_{row,col}.
double superop_entry_coefficient(const GateSet& gs, const std::vector<std::string>& seq,
                                 const std::string& gate, int row, int col);

// Central finite difference oracle for either coefficient kind.
enum class PerturbKind { superop_entry, errorgen_entry };
double finite_difference_coefficient(const GateSet& gs,
                                     const std::vector<std::string>& seq,
                                     const std::string& gate, int row, int col,
                                     PerturbKind kind, double eps = 1e-6);

}  // namespace ref

}  // namespace cagst
