#include "cagst/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <stdexcept>

namespace cagst {

namespace {
constexpr double kSqrt2 = 1.41421356237309504880;
}

double DatasetRecord::frequency() const {
  if (exact) return p_exact;
  if (shots <= 0) throw std::invalid_argument("record has no shots");
  return static_cast<double>(zeros) / static_cast<double>(shots);
}

double loss(const GateSet& gs, const Dataset& ds) {
  double acc = 0.0;
  for (const auto& r : ds.records)
    acc += std::abs(evaluate_circuit(gs, r.circuit) - r.frequency());
  return acc;
}

FitLayout FitLayout::for_gateset(const GateSet& gs) {
  FitLayout l;
  for (const auto& [label, _] : gs.gates) l.gates.push_back(label);
  return l;
}

Eigen::VectorXd pack_gateset(const FitLayout& layout, const GateSet& gs) {
  Eigen::VectorXd x(layout.nvars());
  int n = 0;
  for (const auto& label : layout.gates) {
    const Mat4& m = gs.gate(label).m;
    for (int j = 1; j < 4; ++j)
      for (int k = 0; k < 4; ++k) x(n++) = m(j, k);
  }
  for (int i = 0; i < 4; ++i) x(n++) = gs.prep.v(i);
  for (int i = 0; i < 4; ++i) x(n++) = gs.meas.v(i);
  return x;
}

GateSet unpack_gateset(const FitLayout& layout, const GateSet& reference,
                       const Eigen::VectorXd& x) {
  GateSet gs = reference;
  int n = 0;
  for (const auto& label : layout.gates) {
    Mat4 m = Mat4::Zero();
    m(0, 0) = 1.0;  // trace preservation is not a fit variable
    for (int j = 1; j < 4; ++j)
      for (int k = 0; k < 4; ++k) m(j, k) = x(n++);
    gs.gates[label] = SuperOp(m);
  }
  Vec4 prep, meas;
  for (int i = 0; i < 4; ++i) prep(i) = x(n++);
  for (int i = 0; i < 4; ++i) meas(i) = x(n++);
  gs.prep = StateVec(prep);
  gs.meas = MeasVec(meas);
  return gs;
}

void fit_bounds(const FitLayout& layout, const GateSet& perfect, double gate_margin,
                double spam_margin, Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
  Eigen::VectorXd center = pack_gateset(layout, perfect);
  lo.resize(center.size());
  hi.resize(center.size());
  const int ngate = 12 * static_cast<int>(layout.gates.size());
  for (int i = 0; i < center.size(); ++i) {
    double margin = i < ngate ? gate_margin : spam_margin;
    double cap = i < ngate ? 1.0 : kSqrt2;
    lo(i) = std::max(center(i) - margin, -cap);
    hi(i) = std::min(center(i) + margin, cap);
  }
}

LossEngine::LossEngine(const Dataset& ds, const FitProblem& problem)
    : perfect_(problem.perfect) {
  layout_ = FitLayout::for_gateset(problem.perfect);
  universe_ = layout_.gates;
  ResolvedGateSet rgs = resolve_gateset(problem.perfect, universe_);

  std::vector<CircuitPlan> plans;
  plans.reserve(ds.records.size());
  observed_.reserve(ds.records.size());
  for (const auto& r : ds.records) {
    observed_.push_back(r.frequency());
    if (r.provenance && problem.germs && problem.ctx) {
      plans.push_back(make_plan(*r.provenance, *problem.germs, *problem.ctx, rgs,
                                problem.rule));
    } else {
      plans.push_back(flat_plan(r.circuit, rgs));
    }
  }
  batch_ = batch_plans(std::move(plans));
  group_grads_.resize(batch_.groups.size());
}

void LossEngine::forward(const Eigen::VectorXd& x, std::vector<double>& model) const {
  GateSet gs = unpack_gateset(layout_, perfect_, x);
  ResolvedGateSet rgs = resolve_gateset(gs, universe_);
  auto vals = batch_eval(rgs, batch_);
  model = std::move(vals);
}

double LossEngine::eval(const Eigen::VectorXd& x, Eigen::VectorXd* grad,
                        double delta) const {
  GateSet gs = unpack_gateset(layout_, perfect_, x);
  ResolvedGateSet rgs = resolve_gateset(gs, universe_);
  const int nvars = layout_.nvars();
  const int ngates = static_cast<int>(universe_.size());

  if (!grad) {
    auto vals = batch_eval(rgs, batch_);
    double acc = 0.0;
    for (size_t c = 0; c < vals.size(); ++c) {
      double r = vals[c] - observed_[c];
      acc += std::sqrt(r * r + delta * delta) - delta;
    }
    return acc;
  }

  std::vector<double> group_loss(batch_.groups.size(), 0.0);

#pragma omp parallel
  {
    AdjointScratch scratch;
    std::vector<Mat4> gate_bar(ngates);
#pragma omp for schedule(dynamic, 1)
    for (long long gi = 0; gi < static_cast<long long>(batch_.groups.size()); ++gi) {
      const auto& group = batch_.groups[gi];
      Eigen::VectorXd& gg = group_grads_[gi];
      gg.setZero(nvars);
      double acc = 0.0;

      // Group-invariant structure: block products and the power chain.
      const bool has_block = !group.block.empty() && group.reps > 0;
      ChainProducts prods;
      PowerChain chain;
      Mat4 p = Mat4::Identity();
      if (has_block) {
        prods = chain_products(rgs, group.block);
        chain = power_chain(prods.product, group.reps);
        p = chain.result;
      }
      Mat4 block_sbar = Mat4::Zero();  // accumulated adjoint of M^reps

      std::fill(gate_bar.begin(), gate_bar.end(), Mat4::Zero());
      for (int c : group.members) {
        const auto& plan = batch_.plans[c];
        scratch.states.clear();
        Vec4 v = rgs.prep;
        scratch.states.push_back(v);
        for (int id : plan.prefix) {
          v = rgs.gates[id] * v;
          scratch.states.push_back(v);
        }
        Vec4 u0 = v;
        if (has_block) {
          v = p * v;
          scratch.states.push_back(v);
        }
        for (int id : plan.suffix) {
          v = rgs.gates[id] * v;
          scratch.states.push_back(v);
        }
        double value = rgs.meas.dot(v);
        double r = value - observed_[c];
        double sq = std::sqrt(r * r + delta * delta);
        acc += sq - delta;
        double coef = r / sq;  // d(loss)/d(value)

        // Backward sweep, scaled by coef as it goes.
        size_t si = scratch.states.size() - 1;
        Vec4 w = rgs.meas;
        // meas gradient
        gg.segment<4>(12 * ngates + 4) += coef * scratch.states[si];
        for (size_t i = plan.suffix.size(); i-- > 0;) {
          --si;
          gate_bar[plan.suffix[i]] += (coef * w) * scratch.states[si].transpose();
          w = rgs.gates[plan.suffix[i]].transpose() * w;
        }
        if (has_block) {
          --si;
          block_sbar += (coef * w) * u0.transpose();
          w = p.transpose() * w;
        }
        for (size_t i = plan.prefix.size(); i-- > 0;) {
          --si;
          gate_bar[plan.prefix[i]] += (coef * w) * scratch.states[si].transpose();
          w = rgs.gates[plan.prefix[i]].transpose() * w;
        }
        gg.segment<4>(12 * ngates) += coef * w;  // prep gradient
      }

      if (has_block) {
        Mat4 mbar = power_backward(chain, block_sbar);
        chain_backward(rgs, group.block, prods, mbar, gate_bar);
      }
      for (int i = 0; i < ngates; ++i) {
        const Mat4& b = gate_bar[i];
        int base = 12 * i;
        for (int j = 1; j < 4; ++j)
          for (int k = 0; k < 4; ++k) gg(base + 4 * (j - 1) + k) += b(j, k);
      }
      group_loss[gi] = acc;
    }
  }

  // Serial combination in group order keeps results thread-count invariant.
  grad->setZero(nvars);
  double total = 0.0;
  for (size_t gi = 0; gi < batch_.groups.size(); ++gi) {
    *grad += group_grads_[gi];
    total += group_loss[gi];
  }
  return total;
}

double LossEngine::exact_l1(const Eigen::VectorXd& x) const {
  std::vector<double> model;
  forward(x, model);
  double acc = 0.0;
  for (size_t c = 0; c < model.size(); ++c) acc += std::abs(model[c] - observed_[c]);
  return acc;
}

std::vector<double> LossEngine::residuals(const Eigen::VectorXd& x) const {
  std::vector<double> model;
  forward(x, model);
  for (size_t c = 0; c < model.size(); ++c) model[c] -= observed_[c];
  return model;
}

FitResult reconstruct(const Dataset& ds, const FitProblem& problem,
                      const ReconstructOptions& opts) {
  if (ds.records.empty()) throw std::invalid_argument("dataset is empty");
  LossEngine engine(ds, problem);
  const FitLayout& layout = engine.layout();

  Eigen::VectorXd lo, hi;
  fit_bounds(layout, problem.perfect, problem.gate_margin, problem.spam_margin, lo, hi);
  Eigen::VectorXd x0 = pack_gateset(layout, problem.perfect);
  // keep the start strictly interior (perfect entries can sit on the caps)
  const double inset = 1e-9;
  Eigen::VectorXd ones = Eigen::VectorXd::Constant(x0.size(), inset);
  x0 = x0.cwiseMax(lo + ones).cwiseMin(hi - ones);

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  FitResult best;
  bool have_best = false;

  for (int start = 0; start < std::max(1, opts.restarts); ++start) {
    Eigen::VectorXd x = x0;
    if (start > 0) {
      for (int i = 0; i < x.size(); ++i)
        x(i) = lo(i) + (hi(i) - lo(i)) * (0.25 + 0.5 * unit(rng));
    }

    int total_iters = 0;
    std::string status = "tolerance-met";
    for (double delta : opts.anneal) {
      BoxMinOptions bopts;
      bopts.max_iters = opts.stage_iters;
      bopts.pg_tol = opts.pg_tol;
      auto obj = [&engine, delta](const Eigen::VectorXd& xx, Eigen::VectorXd* g) {
        return engine.eval(xx, g, delta);
      };
      BoxMinResult r = minimize_box(obj, x, lo, hi, bopts);
      x = r.x;
      total_iters += r.iters;
      status = r.status;
    }

    FitResult fit;
    fit.estimate = unpack_gateset(layout, problem.perfect, x);
    fit.loss = engine.exact_l1(x);
    fit.iterations = total_iters;
    fit.residuals = engine.residuals(x);
    fit.status = status;
    fit.converged = status != "max-iterations";
    if (!have_best || fit.loss < best.loss) {
      best = std::move(fit);
      have_best = true;
    }
  }
  return best;
}

FitStepper::FitStepper(const Dataset& ds, const FitProblem& problem, double delta,
                       BoxMinOptions opts)
    : engine_(std::make_shared<LossEngine>(ds, problem)) {
  Eigen::VectorXd lo, hi;
  fit_bounds(engine_->layout(), problem.perfect, problem.gate_margin,
             problem.spam_margin, lo, hi);
  Eigen::VectorXd x0 = pack_gateset(engine_->layout(), problem.perfect);
  auto engine = engine_;
  auto obj = [engine, delta](const Eigen::VectorXd& xx, Eigen::VectorXd* g) {
    return engine->eval(xx, g, delta);
  };
  solver_ = std::make_unique<BoxLbfgs>(obj, x0, lo, hi, opts);
}

GateSet FitStepper::point() const {
  return unpack_gateset(engine_->layout(), engine_->perfect(), solver_->x());
}

}  // namespace cagst
