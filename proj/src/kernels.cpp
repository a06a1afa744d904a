#include "cagst/kernels.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <utility>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace cagst {

int ResolvedGateSet::require(const std::string& label) const {
  auto it = id.find(label);
  if (it == id.end()) throw std::out_of_range("unknown gate label: " + label);
  return it->second;
}

ResolvedGateSet resolve_gateset(const GateSet& gs) {
  std::vector<std::string> universe;
  universe.reserve(gs.gates.size());
  for (const auto& [label, _] : gs.gates) universe.push_back(label);
  return resolve_gateset(gs, universe);
}

ResolvedGateSet resolve_gateset(const GateSet& gs, const std::vector<std::string>& universe) {
  ResolvedGateSet r;
  r.prep = gs.prep.v;
  r.meas = gs.meas.v;
  r.labels = universe;
  r.gates.reserve(universe.size());
  for (size_t i = 0; i < universe.size(); ++i) {
    r.id[universe[i]] = static_cast<int>(i);
    r.gates.push_back(gs.gate(universe[i]).m);
  }
  return r;
}

namespace {

std::vector<int> to_ids(const std::vector<GateLabel>& labels, const ResolvedGateSet& rgs) {
  std::vector<int> ids;
  ids.reserve(labels.size());
  for (const auto& g : labels) ids.push_back(rgs.require(g.str()));
  return ids;
}

}  // namespace

CircuitPlan make_plan(const CircuitSpec& spec,
                      const std::vector<std::vector<GateLabel>>& germs,
                      const ContextSpec& ctx, const ResolvedGateSet& rgs,
                      RepetitionRule rule) {
  CircuitPlan plan;
  long long copies = germ_copies(spec.repetition, rule);

  if (ctx.mode != ContextMode::memory) {
    CircuitSpec one = spec;
    one.repetition = 1;
    auto compiled = compile_circuit(one, germs, ctx, rule);
    // compiled = prep ++ germ ++ meas; carve the three pieces back out.
    size_t np = spec.prep_fiducial.size();
    size_t ng = germs[spec.germ_index].size();
    plan.prefix = to_ids({compiled.seq.begin(), compiled.seq.begin() + np}, rgs);
    plan.block = to_ids({compiled.seq.begin() + np, compiled.seq.begin() + np + ng}, rgs);
    plan.reps = copies;
    plan.suffix = to_ids({compiled.seq.begin() + np + ng, compiled.seq.end()}, rgs);
    return plan;
  }

  // Memory mode: compile at l=2 to observe both the fiducial-resolved first
  // copy and the steady (wrap-resolved) copy.
  CircuitSpec two = spec;
  two.repetition = rule == RepetitionRule::double_per_index ? 2 : 1;
  auto compiled = compile_circuit(two, germs, ctx, rule);
  size_t np = spec.prep_fiducial.size();
  size_t ng = germs[spec.germ_index].size();
  auto first_copy = std::vector<GateLabel>(compiled.seq.begin() + np,
                                           compiled.seq.begin() + np + ng);
  auto steady_copy = std::vector<GateLabel>(compiled.seq.begin() + np + ng,
                                            compiled.seq.begin() + np + 2 * ng);
  // suffix = meas fiducial + appended final idle, resolved after a steady copy.
  auto suffix = std::vector<GateLabel>(compiled.seq.begin() + np + 2 * ng,
                                       compiled.seq.end());
  if (copies == 1) {
    // Re-resolve the suffix against the first copy.
    CircuitSpec one = spec;
    one.repetition = 1;
    auto c1 = compile_circuit(one, germs, ctx, rule);
    plan.prefix = to_ids({c1.seq.begin(), c1.seq.begin() + np + ng}, rgs);
    plan.suffix = to_ids({c1.seq.begin() + np + ng, c1.seq.end()}, rgs);
    plan.reps = 0;
    return plan;
  }
  auto prefix = std::vector<GateLabel>(compiled.seq.begin(), compiled.seq.begin() + np);
  prefix.insert(prefix.end(), first_copy.begin(), first_copy.end());
  plan.prefix = to_ids(prefix, rgs);
  plan.block = to_ids(steady_copy, rgs);
  plan.reps = copies - 1;
  plan.suffix = to_ids(suffix, rgs);
  return plan;
}

CircuitPlan flat_plan(const std::vector<std::string>& labels, const ResolvedGateSet& rgs) {
  CircuitPlan plan;
  plan.prefix.reserve(labels.size());
  for (const auto& l : labels) plan.prefix.push_back(rgs.require(l));
  return plan;
}

std::vector<int> plan_flatten(const CircuitPlan& plan) {
  std::vector<int> out = plan.prefix;
  for (long long r = 0; r < plan.reps; ++r)
    out.insert(out.end(), plan.block.begin(), plan.block.end());
  out.insert(out.end(), plan.suffix.begin(), plan.suffix.end());
  return out;
}

PlanBatch batch_plans(std::vector<CircuitPlan> plans) {
  PlanBatch batch;
  batch.plans = std::move(plans);
  std::map<std::pair<std::vector<int>, long long>, int> index;
  for (size_t c = 0; c < batch.plans.size(); ++c) {
    const auto& p = batch.plans[c];
    std::pair<std::vector<int>, long long> key{p.block, p.reps};
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, static_cast<int>(batch.groups.size())).first;
      batch.groups.push_back({p.block, p.reps, {}});
    }
    batch.groups[it->second].members.push_back(static_cast<int>(c));
  }
  return batch;
}

PowerChain power_chain(const Mat4& m, long long e) {
  PowerChain chain;
  chain.base = m;
  chain.exponent = e;
  if (e <= 0) {
    chain.result = Mat4::Identity();
    return chain;
  }
  int top = 63 - __builtin_clzll(static_cast<unsigned long long>(e));
  Mat4 acc = m;  // consumes the top bit
  for (int bit = top - 1; bit >= 0; --bit) {
    chain.ops.push_back({false, acc});
    acc = (acc * acc).eval();
    if ((e >> bit) & 1) {
      chain.ops.push_back({true, acc});
      acc = (acc * m).eval();
    }
  }
  chain.result = acc;
  return chain;
}

Mat4 power_backward(const PowerChain& chain, const Mat4& result_bar) {
  if (chain.exponent <= 0) return Mat4::Zero();
  Mat4 acc_bar = result_bar;
  Mat4 base_bar = Mat4::Zero();
  for (auto it = chain.ops.rbegin(); it != chain.ops.rend(); ++it) {
    if (it->mult) {
      // out = in * base
      base_bar += it->input.transpose() * acc_bar;
      acc_bar = (acc_bar * chain.base.transpose()).eval();
    } else {
      // out = in * in
      acc_bar = (acc_bar * it->input.transpose() + it->input.transpose() * acc_bar).eval();
    }
  }
  base_bar += acc_bar;  // the accumulator starts as `base` (top bit)
  return base_bar;
}

ChainProducts chain_products(const ResolvedGateSet& rgs, const std::vector<int>& gates) {
  ChainProducts p;
  p.right.resize(gates.size() + 1);
  p.right[0] = Mat4::Identity();
  for (size_t t = 0; t < gates.size(); ++t)
    p.right[t + 1] = rgs.gates[gates[t]] * p.right[t];
  p.product = p.right[gates.size()];
  return p;
}

void chain_backward(const ResolvedGateSet& rgs, const std::vector<int>& gates,
                    const ChainProducts& prods, const Mat4& product_bar,
                    std::vector<Mat4>& gate_bar) {
  Mat4 t = product_bar;
  for (size_t i = gates.size(); i-- > 0;) {
    gate_bar[gates[i]] += t * prods.right[i].transpose();
    t = (rgs.gates[gates[i]].transpose() * t).eval();
  }
}

double eval_plan(const ResolvedGateSet& rgs, const CircuitPlan& plan) {
  Vec4 v = rgs.prep;
  for (int g : plan.prefix) v = rgs.gates[g] * v;
  if (!plan.block.empty() && plan.reps > 0) {
    Mat4 m = Mat4::Identity();
    for (int g : plan.block) m = (rgs.gates[g] * m).eval();
    v = power_chain(m, plan.reps).result * v;
  }
  for (int g : plan.suffix) v = rgs.gates[g] * v;
  return rgs.meas.dot(v);
}

double eval_adjoint(const ResolvedGateSet& rgs, const CircuitPlan& plan,
                    std::vector<Mat4>& gate_bar, Vec4& prep_bar, Vec4& meas_bar,
                    AdjointScratch& scratch) {
  const bool has_block = !plan.block.empty() && plan.reps > 0;
  auto& states = scratch.states;
  states.clear();
  states.reserve(plan.prefix.size() + plan.suffix.size() + 2);

  Vec4 v = rgs.prep;
  states.push_back(v);
  for (int g : plan.prefix) {
    v = rgs.gates[g] * v;
    states.push_back(v);
  }

  Mat4 p = Mat4::Identity();
  if (has_block) {
    scratch.block_prods = chain_products(rgs, plan.block);
    scratch.chain = power_chain(scratch.block_prods.product, plan.reps);
    p = scratch.chain.result;
    v = p * v;
    states.push_back(v);
  }

  for (int g : plan.suffix) {
    v = rgs.gates[g] * v;
    states.push_back(v);
  }

  double value = rgs.meas.dot(v);
  meas_bar = v;

  // Backward covector sweep; states index mirrors the forward pushes.
  size_t si = states.size() - 1;
  Vec4 w = rgs.meas;
  for (size_t i = plan.suffix.size(); i-- > 0;) {
    --si;
    gate_bar[plan.suffix[i]] += w * states[si].transpose();
    w = rgs.gates[plan.suffix[i]].transpose() * w;
  }
  if (has_block) {
    --si;
    Mat4 pbar = w * states[si].transpose();
    Mat4 mbar = power_backward(scratch.chain, pbar);
    chain_backward(rgs, plan.block, scratch.block_prods, mbar, gate_bar);
    w = p.transpose() * w;
  }
  for (size_t i = plan.prefix.size(); i-- > 0;) {
    --si;
    gate_bar[plan.prefix[i]] += w * states[si].transpose();
    w = rgs.gates[plan.prefix[i]].transpose() * w;
  }
  prep_bar = w;
  return value;
}

std::vector<double> batch_eval(const ResolvedGateSet& rgs, const PlanBatch& batch) {
  std::vector<double> out(batch.plans.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (long long g = 0; g < static_cast<long long>(batch.groups.size()); ++g) {
    const auto& group = batch.groups[g];
    Mat4 p = Mat4::Identity();
    if (!group.block.empty() && group.reps > 0) {
      Mat4 m = Mat4::Identity();
      for (int id : group.block) m = (rgs.gates[id] * m).eval();
      p = power_chain(m, group.reps).result;
    }
    for (int c : group.members) {
      const auto& plan = batch.plans[c];
      Vec4 v = rgs.prep;
      for (int id : plan.prefix) v = rgs.gates[id] * v;
      if (!plan.block.empty() && plan.reps > 0) v = p * v;
      for (int id : plan.suffix) v = rgs.gates[id] * v;
      out[c] = rgs.meas.dot(v);
    }
  }
  return out;
}

void batch_errorgen_coeffs(const ResolvedGateSet& rgs, const PlanBatch& batch,
                           std::vector<std::vector<Mat4>>& out) {
  const int n = static_cast<int>(rgs.gates.size());
  out.assign(batch.plans.size(), {});

#pragma omp parallel
  {
    AdjointScratch scratch;
    std::vector<Mat4> gate_bar(n);
#pragma omp for schedule(dynamic, 1)
    for (long long g = 0; g < static_cast<long long>(batch.groups.size()); ++g) {
      const auto& group = batch.groups[g];
      for (int c : group.members) {
        std::fill(gate_bar.begin(), gate_bar.end(), Mat4::Zero());
        Vec4 prep_bar, meas_bar;
        eval_adjoint(rgs, batch.plans[c], gate_bar, prep_bar, meas_bar, scratch);
        auto& coeffs = out[c];
        coeffs.resize(n);
        for (int i = 0; i < n; ++i)
          coeffs[i] = rgs.gates[i].transpose() * gate_bar[i];
      }
    }
  }
}

namespace ref {

namespace {

Mat4 elementary(int row, int col) {
  Mat4 e = Mat4::Zero();
  e(row - 1, col - 1) = 1.0;
  return e;
}

double eval_with_matrices(const GateSet& gs, const std::vector<std::string>& seq,
                          size_t replace_at, const Mat4& replacement) {
  Vec4 v = gs.prep.v;
  for (size_t t = 0; t < seq.size(); ++t) {
    if (t == replace_at)
      v = replacement * v;
    else
      v = gs.gate(seq[t]).m * v;
  }
  return gs.meas.v.dot(v);
}

}  // namespace

double eval_product_chain(const GateSet& gs, const std::vector<std::string>& seq) {
  Mat4 product = Mat4::Identity();
  for (const auto& label : seq) product = (gs.gate(label).m * product).eval();
  return gs.meas.v.dot(product * gs.prep.v);
}

double errorgen_coefficient(const GateSet& gs, const std::vector<std::string>& seq,
                            const std::string& gate, int row, int col) {
  const Mat4 insert = gs.gate(gate).m * elementary(row, col);
  double acc = 0.0;
  for (size_t t = 0; t < seq.size(); ++t)
    if (seq[t] == gate) acc += eval_with_matrices(gs, seq, t, insert);
  return acc;
}

double superop_entry_coefficient(const GateSet& gs, const std::vector<std::string>& seq,
                                 const std::string& gate, int row, int col) {
  const Mat4 e = elementary(row, col);
  double acc = 0.0;
  for (size_t t = 0; t < seq.size(); ++t)
    if (seq[t] == gate) acc += eval_with_matrices(gs, seq, t, e);
  return acc;
}

double finite_difference_coefficient(const GateSet& gs,
                                     const std::vector<std::string>& seq,
                                     const std::string& gate, int row, int col,
                                     PerturbKind kind, double eps) {
  auto perturbed = [&](double x) {
    GateSet mod = gs;
    Mat4 g = gs.gate(gate).m;
    if (kind == PerturbKind::errorgen_entry)
      mod.gates[gate] = SuperOp(g * mat_exp(x * elementary(row, col)));
    else {
      g(row - 1, col - 1) += x;
      mod.gates[gate] = SuperOp(g);
    }
    return evaluate_circuit(mod, seq);
  };
  return (perturbed(eps) - perturbed(-eps)) / (2.0 * eps);
}

}  // namespace ref

}  // namespace cagst
