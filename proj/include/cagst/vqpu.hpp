#pragma once

#include "cagst/circuit.hpp"
#include "cagst/reconstruct.hpp"
#include "cagst/superop.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace cagst {

// Random-channel admixture controlling a simulated gate's noise: each gate
// becomes perfect*exp(scale*L) where L is the error generator of the convex
// sum (1-mix)*perfect + mix*random_channel.
struct NoiseParams {
  double mix_weight = 0.001;
  double scale = 1.0;
};

struct NoiseRecipe {
  std::uint64_t seed = 0;
  NoiseParams base;
  std::map<int, NoiseParams> context_overrides;  // context id -> params
  double spam_infidelity_min = 1e-3;
  double spam_infidelity_max = 1e-2;
  bool perturb_spam = true;
};

// A simulated device: the hidden ground-truth gate set plus the sampling seed.
struct VirtualQPU {
  GateSet truth;
  std::uint64_t seed = 0;
};

// CP trace-preserving random channel from a Haar-random isometry
// (environment dimension 4); deterministic per seed.
SuperOp random_channel(std::uint64_t seed);

// Builds the hidden truth for every label of the perfect gate set; labels
// whose context has an override draw independent noise with those params.
// Throws std::domain_error when scaling pushes entries outside [-1, 1].
VirtualQPU make_gateset(const NoiseRecipe& recipe, const GateSet& perfect,
                        const ContextSpec& ctx);

// zeros ~ Binomial(n, p) with p the truth's ground-outcome probability.
// Throws std::domain_error when p leaves [0,1] by more than 1e-9.
std::pair<long long, long long> sample_shots(const VirtualQPU& qpu,
                                             const CompiledCircuit& circuit,
                                             long long n, std::uint64_t seed);

// Infinite-shot dataset: records carry exact probabilities and provenance.
Dataset exact_dataset(const VirtualQPU& qpu, const std::vector<CompiledCircuit>& circuits);

// Shot-sampled dataset with per-circuit derived seeds.
Dataset sampled_dataset(const VirtualQPU& qpu, const std::vector<CompiledCircuit>& circuits,
                        long long shots, std::uint64_t seed);

}  // namespace cagst
