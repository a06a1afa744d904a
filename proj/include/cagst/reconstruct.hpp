#pragma once

#include "cagst/boxmin.hpp"
#include "cagst/circuit.hpp"
#include "cagst/kernels.hpp"
#include "cagst/superop.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace cagst {

// One measured (or exactly simulated) circuit.
struct DatasetRecord {
  std::vector<std::string> circuit;  // compiled labels, time order
  long long shots = 0;
  long long zeros = 0;  // ground-state outcomes
  double p_exact = 0.0;
  bool exact = false;
  std::optional<CircuitSpec> provenance;  // enables structured evaluation

  double frequency() const;
};

struct Dataset {
  std::vector<DatasetRecord> records;
};

// L1 discrepancy sum_i |model_i - observed_i| over all records.
double loss(const GateSet& gs, const Dataset& ds);

// Box-constrained fit around the perfect operations: every gate entry in
// rows 2..4 is free within [perfect-0.1, perfect+0.1] \cap [-1,1]; SPAM
// components within [perfect-0.2, perfect+0.2] \cap [-sqrt2, sqrt2]. First
// rows stay (1,0,0,0). When the germ table and context are supplied,
// records with provenance evaluate through the repeated-block fast path.
struct FitProblem {
  GateSet perfect;
  double gate_margin = 0.1;
  double spam_margin = 0.2;
  const std::vector<std::vector<GateLabel>>* germs = nullptr;
  const ContextSpec* ctx = nullptr;
  RepetitionRule rule = RepetitionRule::double_per_index;
};

struct ReconstructOptions {
  // Smoothing widths for the annealed absolute value, outermost first.
  std::vector<double> anneal = {1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8};
  int stage_iters = 400;
  double pg_tol = 1e-13;
  int restarts = 1;  // additional starts perturb the perfect point
  std::uint64_t seed = 0;
};

struct FitResult {
  GateSet estimate;
  double loss = 0.0;  // exact L1 at the estimate
  int iterations = 0;
  std::vector<double> residuals;  // model - observed, record order
  std::string status;             // tolerance-met | stalled | max-iterations
  bool converged = false;
};

FitResult reconstruct(const Dataset& ds, const FitProblem& problem,
                      const ReconstructOptions& opts = {});

// Variable layout shared by the optimizer and the packers: for each gate
// label (gate-map order) the 12 free entries row-major, then prep, then meas.
struct FitLayout {
  std::vector<std::string> gates;

  int nvars() const { return 12 * static_cast<int>(gates.size()) + 8; }
  static FitLayout for_gateset(const GateSet& gs);
};

Eigen::VectorXd pack_gateset(const FitLayout& layout, const GateSet& gs);
GateSet unpack_gateset(const FitLayout& layout, const GateSet& reference,
                       const Eigen::VectorXd& x);
void fit_bounds(const FitLayout& layout, const GateSet& perfect, double gate_margin,
                double spam_margin, Eigen::VectorXd& lo, Eigen::VectorXd& hi);

// Smoothed-L1 objective over a fixed dataset; evaluation and gradient run
// through the grouped plan kernels with a deterministic reduction order.
class LossEngine {
 public:
  LossEngine(const Dataset& ds, const FitProblem& problem);

  // Pseudo-Huber smoothed loss sum_i (sqrt(r^2 + delta^2) - delta).
  double eval(const Eigen::VectorXd& x, Eigen::VectorXd* grad, double delta) const;
  double exact_l1(const Eigen::VectorXd& x) const;
  std::vector<double> residuals(const Eigen::VectorXd& x) const;

  const FitLayout& layout() const { return layout_; }
  const GateSet& perfect() const { return perfect_; }

 private:
  void forward(const Eigen::VectorXd& x, std::vector<double>& model) const;

  FitLayout layout_;
  GateSet perfect_;
  std::vector<double> observed_;
  PlanBatch batch_;
  std::vector<std::string> universe_;
  mutable std::vector<Eigen::VectorXd> group_grads_;
};

// One accepted projected quasi-Newton step of the smoothed problem; kept as
// a stepping handle for callers that drive the iteration themselves.
class FitStepper {
 public:
  FitStepper(const Dataset& ds, const FitProblem& problem, double delta = 1e-6,
             BoxMinOptions opts = {});

  bool step() { return solver_->step(); }
  GateSet point() const;
  double smoothed_loss() const { return solver_->value(); }
  const std::string& status() const { return solver_->status(); }

 private:
  std::shared_ptr<LossEngine> engine_;
  std::unique_ptr<BoxLbfgs> solver_;
};

}  // namespace cagst
