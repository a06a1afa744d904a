#include "cagst/sensitivity.hpp"

#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

namespace cagst {

double entry_coefficient(const GateSet& gs, const std::vector<std::string>& seq,
                         const std::string& gate, int row, int col, CoeffKind kind) {
  if (row < 1 || row > 4 || col < 1 || col > 4)
    throw std::invalid_argument("entry indices must be in 1..4");
  ResolvedGateSet rgs = resolve_gateset(gs);
  int target = rgs.require(gate);
  CircuitPlan plan = flat_plan(seq, rgs);

  std::vector<Mat4> gate_bar(rgs.gates.size(), Mat4::Zero());
  Vec4 prep_bar, meas_bar;
  AdjointScratch scratch;
  eval_adjoint(rgs, plan, gate_bar, prep_bar, meas_bar, scratch);

  if (kind == CoeffKind::superop_entry) return gate_bar[target](row - 1, col - 1);
  // d/dx of G * exp(x E_rc) at 0 chains the adjoint with G * E_rc, which
  // picks out column (row) of G^T * gate_bar.
  Mat4 c = rgs.gates[target].transpose() * gate_bar[target];
  return c(row - 1, col - 1);
}

double FiducialSensitivity::population_variance() const {
  double mean = T.mean();
  return (T.array() - mean).square().sum() / 12.0;
}

FiducialSensitivity fiducial_T(const GateSet& gs_perfect,
                               const std::vector<std::vector<GateLabel>>& preps,
                               const std::vector<std::vector<GateLabel>>& meass) {
  if (preps.empty() || meass.empty())
    throw std::invalid_argument("fiducial lists must be nonempty");

  // a_{i,j}^{p,m} = (meas . f_m)_i * (f_p . prep)_j for the germ-block entry
  // (i, j); accumulate |a| over fiducial pairs.
  std::vector<Vec4> prep_side, meas_side;
  prep_side.reserve(preps.size());
  meas_side.reserve(meass.size());
  for (const auto& f : preps) {
    Vec4 v = gs_perfect.prep.v;
    for (const auto& g : f) v = gs_perfect.gate(g.str()).m * v;
    prep_side.push_back(v);
  }
  for (const auto& f : meass) {
    Vec4 w = gs_perfect.meas.v;
    for (auto it = f.rbegin(); it != f.rend(); ++it)
      w = gs_perfect.gate(it->str()).m.transpose() * w;
    meas_side.push_back(w);
  }

  FiducialSensitivity out;
  for (const auto& w : meas_side)
    for (const auto& v : prep_side)
      for (int i = 2; i <= 4; ++i)
        for (int j = 1; j <= 4; ++j)
          out.T(i - 2, j - 1) += std::abs(w(i - 1) * v(j - 1));

  for (int i = 2; i <= 4; ++i)
    for (int j = 1; j <= 4; ++j)
      if (out.T(i - 2, j - 1) == 0.0) out.zero_entries.emplace_back(i, j);
  return out;
}

FiducialFitness fiducial_fitness(const FiducialSensitivity& t) {
  constexpr double kEps = 1e-12;
  FiducialFitness f;
  f.value = t.sum() / (t.population_variance() + kEps);
  f.non_ic = !t.zero_entries.empty();
  f.degenerate_uniform = t.population_variance() < kEps;
  return f;
}

SensitivityMatrix build_B(const GateSet& gs_perfect,
                          const std::vector<std::vector<GateLabel>>& preps,
                          const std::vector<std::vector<GateLabel>>& meass,
                          const std::vector<std::vector<GateLabel>>& germs, int max_l,
                          const ContextSpec& ctx, RepetitionRule rule) {
  if (germs.empty()) throw std::invalid_argument("germ set must be nonempty");
  if (preps.empty() || meass.empty())
    throw std::invalid_argument("fiducial lists must be nonempty");
  if (max_l < 1) throw std::invalid_argument("max repetition index must be >= 1");

  ResolvedGateSet rgs = resolve_gateset(gs_perfect);

  SensitivityMatrix out;
  auto targeted = ctx.targeted_labels();
  std::map<std::string, int> row_base;
  for (const auto& label : targeted) {
    row_base[label] = static_cast<int>(out.rows.size());
    for (int j = 2; j <= 4; ++j)
      for (int k = 1; k <= 4; ++k) out.rows.push_back({label, j, k});
  }
  out.B = Eigen::MatrixXd::Zero(static_cast<int>(out.rows.size()), max_l);

  // One plan per (g, l, p, m) tuple; the l of each plan indexes its column.
  std::vector<CircuitPlan> plans;
  std::vector<int> plan_l;
  for (size_t g = 0; g < germs.size(); ++g) {
    for (int l = 1; l <= max_l; ++l) {
      for (const auto& p : preps) {
        for (const auto& m : meass) {
          CircuitSpec spec{p, static_cast<int>(g), l, m};
          plans.push_back(make_plan(spec, germs, ctx, rgs, rule));
          plan_l.push_back(l);
        }
      }
    }
  }

  PlanBatch batch = batch_plans(std::move(plans));
  std::vector<std::vector<Mat4>> coeffs;
  batch_errorgen_coeffs(rgs, batch, coeffs);

  // Serial accumulation in circuit order keeps the sums bit-reproducible
  // under any thread count.
  for (size_t c = 0; c < coeffs.size(); ++c) {
    int col = plan_l[c] - 1;
    for (const auto& [label, base] : row_base) {
      const Mat4& m = coeffs[c][rgs.require(label)];
      int r = base;
      for (int j = 2; j <= 4; ++j)
        for (int k = 1; k <= 4; ++k) out.B(r++, col) += std::abs(m(j - 1, k - 1));
    }
  }
  return out;
}

std::vector<AmplificationViolation> germ_constraint_check(const SensitivityMatrix& b,
                                                          double slack) {
  std::vector<AmplificationViolation> out;
  for (int r = 0; r < b.B.rows(); ++r)
    for (int l = 0; l + 1 < b.B.cols(); ++l)
      if (b.B(r, l) >= b.B(r, l + 1) - slack) out.push_back({r, l + 1});
  return out;
}

double germ_fitness(const SensitivityMatrix& b, double slack) {
  double min_last = b.B.cols() > 0 ? b.B.col(b.B.cols() - 1).minCoeff() : 0.0;
  auto violations = germ_constraint_check(b, slack);
  if (violations.empty()) return min_last;
  // Feasible values are >= 0; rank infeasible sets below them, graded by
  // violation count so a search can climb toward feasibility.
  return -static_cast<double>(violations.size());
}

void write_B_csv(const SensitivityMatrix& b, std::ostream& os) {
  os << "gate,j,k";
  for (int l = 1; l <= b.B.cols(); ++l) os << ",l" << l;
  os << "\n";
  for (int r = 0; r < b.B.rows(); ++r) {
    os << b.rows[r].gate << "," << b.rows[r].row << "," << b.rows[r].col;
    for (int l = 0; l < b.B.cols(); ++l) os << "," << b.B(r, l);
    os << "\n";
  }
}

}  // namespace cagst
