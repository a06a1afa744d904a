#include "cagst/vqpu.hpp"

#include "cagst/util.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

namespace cagst {

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

Eigen::Matrix2cd pauli2(int i) {
  using cd = std::complex<double>;
  Eigen::Matrix2cd p;
  switch (i) {
    case 0: p << 1, 0, 0, 1; break;
    case 1: p << 0, 1, 1, 0; break;
    case 2: p << 0, cd(0, -1), cd(0, 1), 0; break;
    default: p << 1, 0, 0, -1; break;
  }
  return p;
}

}  // namespace

SuperOp random_channel(std::uint64_t seed) {
  std::mt19937_64 rng(splitmix64(seed));
  std::normal_distribution<double> gauss(0.0, 1.0);

  // Haar-random isometry C^2 -> C^2 (x) C^4 via QR of a Gaussian 8x2 matrix.
  Eigen::MatrixXcd a(8, 2);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 2; ++j) a(i, j) = std::complex<double>(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  Eigen::MatrixXcd q = qr.householderQ() * Eigen::MatrixXcd::Identity(8, 2);
  // Fix the phase so the result is deterministic under QR conventions.
  Eigen::MatrixXcd r = qr.matrixQR().topRows(2).triangularView<Eigen::Upper>();
  for (int j = 0; j < 2; ++j)
    if (r(j, j).real() < 0) q.col(j) *= -1.0;

  // Kraus operators are the 2x2 slices; sum_k A_k^dag A_k = I by isometry.
  Mat4 ptm = Mat4::Zero();
  for (int k = 0; k < 4; ++k) {
    Eigen::Matrix2cd kraus = q.block(2 * k, 0, 2, 2);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        ptm(i, j) +=
            0.5 * (pauli2(i) * kraus * pauli2(j) * kraus.adjoint()).trace().real();
  }
  ptm.row(0) << 1, 0, 0, 0;  // clean trace preservation of roundoff
  return SuperOp(ptm);
}

VirtualQPU make_gateset(const NoiseRecipe& recipe, const GateSet& perfect,
                        const ContextSpec& ctx) {
  VirtualQPU qpu;
  qpu.seed = recipe.seed;
  qpu.truth = perfect;

  for (const auto& [label, g_perfect] : perfect.gates) {
    NoiseParams params = recipe.base;
    GateLabel parsed = parse_label(label);
    auto it = recipe.context_overrides.find(parsed.context);
    if (it != recipe.context_overrides.end()) params = it->second;
    if (params.scale == 0.0) continue;

    SuperOp random = random_channel(derive_seed(recipe.seed, "gate:" + label));
    SuperOp mix(((1.0 - params.mix_weight) * g_perfect.m + params.mix_weight * random.m));
    ErrorGenerator gen = error_generator(mix, g_perfect);
    SuperOp noisy = apply_error(g_perfect, gen, params.scale);
    if ((noisy.m.array().abs() > 1.0 + 1e-9).any())
      throw std::domain_error("noise scaling pushed gate " + label +
                              " outside the physical entry range");
    qpu.truth.gates[label] = noisy;
  }

  if (recipe.perturb_spam) {
    std::mt19937_64 rng(derive_seed(recipe.seed, "spam"));
    std::uniform_real_distribution<double> infid(recipe.spam_infidelity_min,
                                                 recipe.spam_infidelity_max);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double s2 = std::sqrt(0.5);

    // Preparation: shrink the Bloch vector to fidelity 1-u and tilt it.
    double u = infid(rng);
    double rz = 1.0 - 2.0 * u;
    double phi = 2.0 * M_PI * unit(rng);
    double tilt = 0.3 * std::sqrt(std::max(0.0, 1.0 - rz * rz)) * unit(rng);
    Vec4 prep(s2, s2 * tilt * std::cos(phi), s2 * tilt * std::sin(phi), s2 * rz);
    qpu.truth.prep = StateVec(prep);

    // Measurement: independent ground/excited misassignment rates.
    double e0 = infid(rng);
    double e1 = infid(rng);
    double a = (1.0 - e0 + e1) / 2.0;
    double bz = (1.0 - e0 - e1) / 2.0;
    double phim = 2.0 * M_PI * unit(rng);
    double bt = 0.1 * std::min(a, 1.0 - a) * unit(rng);
    Vec4 meas(std::sqrt(2.0) * a, std::sqrt(2.0) * bt * std::cos(phim),
              std::sqrt(2.0) * bt * std::sin(phim), std::sqrt(2.0) * bz);
    qpu.truth.meas = MeasVec(meas);
  }
  (void)ctx;
  return qpu;
}

std::pair<long long, long long> sample_shots(const VirtualQPU& qpu,
                                             const CompiledCircuit& circuit,
                                             long long n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("shot count must be >= 1");
  double p = evaluate_circuit(qpu.truth, circuit.labels());
  if (p < -1e-9 || p > 1.0 + 1e-9)
    throw std::domain_error("truth gate set produced an unphysical probability");
  p = std::clamp(p, 0.0, 1.0);
  std::mt19937_64 rng(splitmix64(seed));
  std::binomial_distribution<long long> binom(n, p);
  long long zeros = binom(rng);
  return {zeros, n - zeros};
}

Dataset exact_dataset(const VirtualQPU& qpu, const std::vector<CompiledCircuit>& circuits) {
  Dataset ds;
  ds.records.reserve(circuits.size());
  for (const auto& c : circuits) {
    double p = evaluate_circuit(qpu.truth, c.labels());
    if (p < -1e-9 || p > 1.0 + 1e-9)
      throw std::domain_error("truth gate set produced an unphysical probability");
    DatasetRecord r;
    r.circuit = c.labels();
    r.exact = true;
    r.p_exact = std::clamp(p, 0.0, 1.0);
    r.provenance = c.spec;
    ds.records.push_back(std::move(r));
  }
  return ds;
}

Dataset sampled_dataset(const VirtualQPU& qpu, const std::vector<CompiledCircuit>& circuits,
                        long long shots, std::uint64_t seed) {
  Dataset ds;
  ds.records.reserve(circuits.size());
  for (size_t i = 0; i < circuits.size(); ++i) {
    auto [zeros, ones] = sample_shots(qpu, circuits[i], shots, derive_seed(seed, i));
    DatasetRecord r;
    r.circuit = circuits[i].labels();
    r.shots = zeros + ones;
    r.zeros = zeros;
    r.provenance = circuits[i].spec;
    ds.records.push_back(std::move(r));
  }
  return ds;
}

}  // namespace cagst
