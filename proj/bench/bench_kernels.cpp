// Timing comparison between the batched kernels and the straightforward
// serial reference implementations they are tested against.

#include "cagst/io.hpp"
#include "cagst/sensitivity.hpp"
#include "cagst/vqpu.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace cagst;
namespace fs = std::filesystem;

namespace {

double seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GateSet perfect_for(const ContextSpec& ctx) {
  GateSet gs;
  gs.prep = ground_state();
  gs.meas = ground_meas();
  for (const auto& label : ctx.alphabet)
    gs.gates[label.str()] = perfect_gate_for_base(label.base);
  return gs;
}

}  // namespace

int main() {
  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::printf("threads: %d\n\n", threads);

  ContextSpec ctx = ContextSpec::context_free();
  GateSet gs = perfect_for(ctx);
  auto seqs = read_json_file(fs::path(CAGST_DATA_DIR) / "reference_sequences.json");
  auto bases =
      seqs.at("fiducials_standard").at("preps").get<std::vector<std::vector<std::string>>>();
  std::vector<std::vector<GateLabel>> fid;
  for (const auto& b : bases) fid.push_back(fiducial_labels(b, ctx));
  auto germs = germs_from_json(seqs.at("germs_context_free_L7"));

  // --- sensitivity matrix: batched kernel vs per-entry insertion ----------
  {
    const int max_l = 4;  // the reference path is O(len^2) per circuit
    auto t0 = std::chrono::steady_clock::now();
    auto b_fast = build_B(gs, fid, fid, germs, max_l, ctx);
    double fast = seconds(t0);

    t0 = std::chrono::steady_clock::now();
    Eigen::MatrixXd b_ref = Eigen::MatrixXd::Zero(b_fast.B.rows(), max_l);
    for (size_t g = 0; g < germs.size(); ++g) {
      for (int l = 1; l <= max_l; ++l) {
        for (const auto& p : fid) {
          for (const auto& m : fid) {
            auto compiled =
                compile_circuit({p, static_cast<int>(g), l, m}, germs, ctx);
            auto labels = compiled.labels();
            for (size_t r = 0; r < b_fast.rows.size(); ++r) {
              const auto& row = b_fast.rows[r];
              b_ref(r, l - 1) += std::abs(
                  ref::errorgen_coefficient(gs, labels, row.gate, row.row, row.col));
            }
          }
        }
      }
    }
    double slow = seconds(t0);
    double delta = (b_fast.B - b_ref).cwiseAbs().maxCoeff();
    std::printf("sensitivity matrix (L=%d, %d rows):\n", max_l,
                static_cast<int>(b_fast.B.rows()));
    std::printf("  insertion reference  %8.2f ms\n", slow * 1e3);
    std::printf("  batched kernel       %8.2f ms   (%.0fx, max |delta| %.2e)\n\n",
                fast * 1e3, slow / fast, delta);
  }

  // --- full-depth evaluation: batch vs product-chain reference ------------
  {
    auto specs = enumerate_circuits(fid, fid, germs, 7, ctx);
    std::vector<CompiledCircuit> circuits;
    for (const auto& s : specs) circuits.push_back(compile_circuit(s, germs, ctx));

    NoiseRecipe recipe;
    recipe.seed = 5;
    recipe.base.mix_weight = 0.01;
    VirtualQPU qpu = make_gateset(recipe, gs, ctx);
    ResolvedGateSet rgs = resolve_gateset(qpu.truth);

    std::vector<CircuitPlan> plans;
    for (const auto& c : circuits)
      plans.push_back(make_plan(c.spec, germs, ctx, rgs));
    PlanBatch batch = batch_plans(std::move(plans));

    auto t0 = std::chrono::steady_clock::now();
    auto vals = batch_eval(rgs, batch);
    double fast = seconds(t0);

    t0 = std::chrono::steady_clock::now();
    double check = 0.0;
    std::vector<double> ref_vals(circuits.size());
    for (size_t i = 0; i < circuits.size(); ++i)
      ref_vals[i] = ref::eval_product_chain(qpu.truth, circuits[i].labels());
    double slow = seconds(t0);

    double delta = 0.0;
    for (size_t i = 0; i < vals.size(); ++i)
      delta = std::max(delta, std::abs(vals[i] - ref_vals[i]));
    (void)check;
    std::printf("expectation values (%zu circuits, L=7):\n", circuits.size());
    std::printf("  product-chain reference %8.2f ms\n", slow * 1e3);
    std::printf("  grouped batch kernel    %8.2f ms   (%.0fx, max |delta| %.2e)\n\n",
                fast * 1e3, slow / fast, delta);

    // determinism under re-evaluation
    auto again = batch_eval(rgs, batch);
    bool identical = true;
    for (size_t i = 0; i < vals.size(); ++i) identical = identical && again[i] == vals[i];
    std::printf("repeat evaluation bit-identical: %s\n", identical ? "yes" : "NO");
  }
  return 0;
}
