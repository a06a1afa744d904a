// cagst: batch driver for the context-aware gate-set characterization
// pipeline: design -> simulate -> reconstruct -> report, plus an accuracy
// sweep over simulated devices.

#include "cagst/design.hpp"
#include "cagst/io.hpp"
#include "cagst/metrics.hpp"
#include "cagst/util.hpp"
#include "cagst/vqpu.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace cagst;

namespace {

constexpr int kExitInfeasible = 2;
constexpr int kExitNoConvergence = 3;
constexpr int kExitIo = 4;

struct Campaign {
  std::string mode = "none";
  std::uint64_t seed = 1;
  DesignConfig design;
  NoiseRecipe noise;
  long long shots = 0;  // 0 = exact probabilities
  std::string germs_file;
  std::string fiducials_file;
};

ContextSpec context_for(const std::string& mode) {
  if (mode == "none") return ContextSpec::context_free();
  if (mode == "crosstalk") return ContextSpec::crosstalk_idle();
  if (mode == "memory") return ContextSpec::memory_three_gate();
  throw std::runtime_error("unknown mode: " + mode);
}

GateSet perfect_for(const ContextSpec& ctx) {
  GateSet gs;
  gs.prep = ground_state();
  gs.meas = ground_meas();
  for (const auto& label : ctx.alphabet)
    gs.gates[label.str()] = perfect_gate_for_base(label.base);
  return gs;
}

Campaign load_campaign(const std::string& path) {
  Campaign c;
  if (path.empty()) return c;
  json j = read_json_file(path);
  c.mode = j.value("mode", c.mode);
  c.seed = j.value("seed", c.seed);
  c.shots = j.value("shots", c.shots);
  c.germs_file = j.value("germs_file", c.germs_file);
  c.fiducials_file = j.value("fiducials_file", c.fiducials_file);
  if (j.contains("design")) {
    const json& d = j["design"];
    c.design.max_fiducial_len = d.value("max_fiducial_len", c.design.max_fiducial_len);
    c.design.fiducials_per_side = d.value("fiducials_per_side", c.design.fiducials_per_side);
    c.design.germ_count = d.value("germ_count", c.design.germ_count);
    c.design.max_initial_germ_len =
        d.value("max_initial_germ_len", c.design.max_initial_germ_len);
    c.design.max_l = d.value("max_l", c.design.max_l);
    if (d.value("germ_copies_double_from_one", false))
      c.design.repetition = RepetitionRule::double_from_one;
    if (d.contains("ga")) {
      const json& g = d["ga"];
      c.design.ga.population = g.value("population", c.design.ga.population);
      c.design.ga.stall_generations =
          g.value("stall_generations", c.design.ga.stall_generations);
      c.design.ga.max_generations = g.value("max_generations", c.design.ga.max_generations);
      c.design.ga.mutation_rate = g.value("mutation_rate", c.design.ga.mutation_rate);
      c.design.ga.crossover_rate = g.value("crossover_rate", c.design.ga.crossover_rate);
    }
  }
  if (j.contains("noise")) {
    const json& n = j["noise"];
    c.noise.base.mix_weight = n.value("mix_weight", c.noise.base.mix_weight);
    c.noise.base.scale = n.value("scale", c.noise.base.scale);
    c.noise.spam_infidelity_min = n.value("spam_infidelity_min", c.noise.spam_infidelity_min);
    c.noise.spam_infidelity_max = n.value("spam_infidelity_max", c.noise.spam_infidelity_max);
    c.noise.perturb_spam = n.value("perturb_spam", c.noise.perturb_spam);
    if (n.contains("context_overrides")) {
      for (const auto& [key, v] : n["context_overrides"].items()) {
        NoiseParams p;
        p.mix_weight = v.value("mix_weight", c.noise.base.mix_weight);
        p.scale = v.value("scale", c.noise.base.scale);
        c.noise.context_overrides[std::stoi(key)] = p;
      }
    }
  }
  return c;
}

json campaign_to_json(const Campaign& c) {
  json j;
  j["mode"] = c.mode;
  j["seed"] = c.seed;
  j["shots"] = c.shots;
  j["design"] = {{"max_fiducial_len", c.design.max_fiducial_len},
                 {"fiducials_per_side", c.design.fiducials_per_side},
                 {"germ_count", c.design.germ_count},
                 {"max_initial_germ_len", c.design.max_initial_germ_len},
                 {"max_l", c.design.max_l},
                 {"ga",
                  {{"population", c.design.ga.population},
                   {"stall_generations", c.design.ga.stall_generations},
                   {"max_generations", c.design.ga.max_generations},
                   {"mutation_rate", c.design.ga.mutation_rate},
                   {"crossover_rate", c.design.ga.crossover_rate},
                   {"seed", c.design.ga.seed}}}};
  j["noise"] = {{"mix_weight", c.noise.base.mix_weight},
                {"scale", c.noise.base.scale},
                {"spam_infidelity_min", c.noise.spam_infidelity_min},
                {"spam_infidelity_max", c.noise.spam_infidelity_max}};
  return j;
}

std::vector<std::vector<GateLabel>> fiducials_from_bases(
    const std::vector<std::vector<std::string>>& bases, const ContextSpec& ctx) {
  std::vector<std::vector<GateLabel>> out;
  for (const auto& b : bases) out.push_back(fiducial_labels(b, ctx));
  return out;
}

std::vector<std::vector<std::string>> fiducial_bases(
    const std::vector<std::vector<GateLabel>>& fids) {
  std::vector<std::vector<std::string>> out;
  for (const auto& f : fids) {
    std::vector<std::string> b;
    for (const auto& g : f) b.push_back(g.base);
    out.push_back(b);
  }
  return out;
}

int cmd_design(const std::string& config_path, const std::string& out_dir,
               std::uint64_t seed_override, bool have_seed) {
  Campaign c = load_campaign(config_path);
  if (have_seed) c.seed = seed_override;
  c.design.ga.seed = c.seed;
  ContextSpec ctx = context_for(c.mode);
  GateSet perfect = perfect_for(ctx);
  GateSet perfect_free = perfect_gateset_xyi();

  // Fiducials: selected on the context-free base gates, then contextualized.
  std::vector<std::vector<GateLabel>> preps, meass;
  if (!c.fiducials_file.empty()) {
    json j = read_json_file(c.fiducials_file);
    preps = fiducials_from_bases(j.at("preps").get<std::vector<std::vector<std::string>>>(), ctx);
    meass = fiducials_from_bases(j.at("meass").get<std::vector<std::vector<std::string>>>(), ctx);
  } else {
    DesignConfig free_cfg = c.design;
    auto sel = select_fiducials(perfect_free, free_cfg);
    preps = fiducials_from_bases(fiducial_bases(sel.preps), ctx);
    meass = fiducials_from_bases(fiducial_bases(sel.meass), ctx);
  }

  GermSet germs;
  if (!c.germs_file.empty()) {
    germs.germs = germs_from_json(read_json_file(c.germs_file).at("germs"));
    for (auto& g : germs.germs) g = normalize_germ(g, ctx);
    auto b = build_B(perfect, preps, meass, germs.germs, c.design.max_l, ctx,
                     c.design.repetition);
    germs.fitness = germ_fitness(b);
    germs.feasible = germs.fitness > 0.0;
  } else {
    germs = select_germs(perfect, preps, meass, c.design, ctx);
  }

  auto b = build_B(perfect, preps, meass, germs.germs, c.design.max_l, ctx,
                   c.design.repetition);
  auto circuits_specs = enumerate_circuits(preps, meass, germs.germs, c.design.max_l, ctx,
                                           c.design.repetition);
  std::vector<CompiledCircuit> compiled;
  compiled.reserve(circuits_specs.size());
  for (const auto& s : circuits_specs)
    compiled.push_back(compile_circuit(s, germs.germs, ctx, c.design.repetition));

  fs::create_directories(out_dir);
  std::ostringstream csv;
  write_B_csv(b, csv);
  write_text_file(fs::path(out_dir) / "B.csv", csv.str());

  json fj;
  fj["preps"] = json::array();
  fj["meass"] = json::array();
  for (const auto& f : preps) {
    json a = json::array();
    for (const auto& g : f) a.push_back(g.str());
    fj["preps"].push_back(a);
  }
  for (const auto& f : meass) {
    json a = json::array();
    for (const auto& g : f) a.push_back(g.str());
    fj["meass"].push_back(a);
  }

  json dj;
  dj["mode"] = c.mode;
  dj["fiducials"] = fj;
  dj["germs"] = germs_to_json(germs.germs);
  dj["fitness"] = germs.fitness;
  dj["feasible"] = germs.feasible;
  dj["config"] = campaign_to_json(c);
  dj["B_csv"] = "B.csv";
  write_json_file(fs::path(out_dir) / "design.json", dj);
  write_json_file(fs::path(out_dir) / "circuits.json", circuits_to_json(compiled));
  write_json_file(fs::path(out_dir) / "perfect_gateset.json", gateset_to_json(perfect));

  std::cout << "design: " << germs.germs.size() << " germs, " << preps.size() << "+"
            << meass.size() << " fiducials, " << compiled.size() << " circuits, fitness "
            << germs.fitness << (germs.feasible ? "" : " (infeasible)") << "\n";
  return germs.feasible ? 0 : kExitInfeasible;
}

struct DesignBundle {
  std::string mode;
  ContextSpec ctx;
  GateSet perfect;
  std::vector<std::vector<GateLabel>> germs;
  std::vector<CompiledCircuit> circuits;
  RepetitionRule rule = RepetitionRule::double_per_index;
};

DesignBundle load_design(const std::string& dir) {
  DesignBundle d;
  json dj = read_json_file(fs::path(dir) / "design.json");
  d.mode = dj.at("mode").get<std::string>();
  d.ctx = context_for(d.mode);
  d.perfect = gateset_from_json(read_json_file(fs::path(dir) / "perfect_gateset.json"));
  d.germs = germs_from_json(dj.at("germs"));
  d.circuits = circuits_from_json(read_json_file(fs::path(dir) / "circuits.json"));
  if (dj.at("config").contains("design") &&
      dj["config"]["design"].value("germ_copies_double_from_one", false))
    d.rule = RepetitionRule::double_from_one;
  return d;
}

int cmd_simulate(const std::string& config_path, const std::string& design_dir,
                 const std::string& out_path, long long shots_flag, bool have_shots,
                 std::uint64_t seed_override, bool have_seed) {
  Campaign c = load_campaign(config_path);
  if (have_seed) c.seed = seed_override;
  if (have_shots) c.shots = shots_flag;
  DesignBundle d = load_design(design_dir);

  c.noise.seed = c.seed;
  VirtualQPU qpu = make_gateset(c.noise, d.perfect, d.ctx);
  Dataset ds = c.shots > 0 ? sampled_dataset(qpu, d.circuits, c.shots, derive_seed(c.seed, "shots"))
                           : exact_dataset(qpu, d.circuits);

  fs::path out(out_path);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot write " + out.string());
  write_dataset_jsonl(ds, os);
  write_json_file(out.parent_path() / "truth_gateset.json", gateset_to_json(qpu.truth));
  std::cout << "simulate: " << ds.records.size() << " records ("
            << (c.shots > 0 ? std::to_string(c.shots) + " shots" : "exact") << ")\n";
  return 0;
}

int cmd_reconstruct(const std::string& design_dir, const std::string& dataset_path,
                    const std::string& out_path) {
  DesignBundle d = load_design(design_dir);
  std::ifstream is(dataset_path);
  if (!is) throw std::runtime_error("cannot open " + dataset_path);
  Dataset ds = read_dataset_jsonl(is);

  auto missing = match_dataset_to_design(ds, d.circuits);
  if (!missing.empty()) {
    std::cerr << "dataset does not cover the design; missing " << missing.size()
              << " circuits:\n";
    for (size_t i = 0; i < missing.size() && i < 20; ++i)
      std::cerr << "  " << missing[i] << "\n";
    return kExitInfeasible;
  }

  FitProblem problem;
  problem.perfect = d.perfect;
  problem.germs = &d.germs;
  problem.ctx = &d.ctx;
  problem.rule = d.rule;
  FitResult fit = reconstruct(ds, problem);

  fs::path out(out_path);
  write_json_file(out, fitresult_to_json(fit));
  std::cout << "reconstruct: loss " << fit.loss << ", " << fit.iterations
            << " iterations, " << fit.status << "\n";
  return fit.converged ? 0 : kExitNoConvergence;
}

int cmd_report(const std::string& fit_path, const std::string& truth_path,
               const std::string& out_dir, double floor_value, bool have_floor) {
  json fj = read_json_file(fit_path);
  GateSet estimate =
      fj.contains("estimate") ? gateset_from_json(fj.at("estimate")) : gateset_from_json(fj);

  std::vector<MetricsRow> rows;
  const SuperOp identity{Mat4::Identity()};
  for (const auto& [label, g] : estimate.gates) {
    GateLabel parsed = parse_label(label);
    if (parsed.base != "I") continue;  // idle errors are the report's subject
    MetricsRow row;
    row.label = label;
    row.context = parsed.context;
    auto fit = fit_correction_unitary(g);
    row.d_diamond = fit.uncorrected;
    row.d_corrected = fit.corrected;
    row.angles = fit.angles;
    row.coherence_fraction = fit.improvement_ratio;
    rows.push_back(row);
  }
  if (rows.empty()) {
    // No idle labels (unusual gate set): report every gate against perfect.
    for (const auto& [label, g] : estimate.gates) {
      GateLabel parsed = parse_label(label);
      MetricsRow row;
      row.label = label;
      row.context = parsed.context;
      SuperOp perfect = perfect_gate_for_base(parsed.base);
      auto d = diamond_distance(g, perfect);
      row.d_diamond = d.value;
      row.d_corrected = d.value;
      rows.push_back(row);
    }
  }

  json report;
  report["metrics"] = metrics_to_json(rows);
  if (have_floor) {
    json factors = json::array();
    for (const auto& r : rows) {
      auto c = coherence_fraction(r.d_diamond, r.d_corrected,
                                  std::min(floor_value, r.d_corrected));
      json e;
      e["label"] = r.label;
      e["fraction"] = c.fraction;
      e["reduction_factor"] = c.factor_defined ? json(c.reduction_factor) : json();
      factors.push_back(e);
    }
    report["floor"] = floor_value;
    report["reduction"] = factors;
  }

  if (!truth_path.empty()) {
    GateSet truth = gateset_from_json(read_json_file(truth_path));
    json inacc = json::array();
    for (const auto& [label, g] : estimate.gates) {
      if (!truth.has(label)) continue;
      json e;
      e["label"] = label;
      e["d_estimate_truth"] = diamond_distance(g, truth.gate(label)).value;
      inacc.push_back(e);
    }
    report["inaccuracy"] = inacc;
  }

  fs::create_directories(out_dir);
  write_json_file(fs::path(out_dir) / "metrics.json", report);

  std::ostringstream csv;
  csv << "label,context,d_diamond,d_corrected,alpha,beta,gamma,coherence_fraction\n";
  csv.precision(12);
  for (const auto& r : rows)
    csv << r.label << "," << r.context << "," << r.d_diamond << "," << r.d_corrected << ","
        << r.angles[0] << "," << r.angles[1] << "," << r.angles[2] << ","
        << r.coherence_fraction << "\n";
  write_text_file(fs::path(out_dir) / "metrics.csv", csv.str());
  std::cout << "report: " << rows.size() << " rows\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& design_dir,
              const std::string& out_dir, int replicates,
              const std::vector<double>& targets, std::uint64_t seed_override,
              bool have_seed) {
  Campaign c = load_campaign(config_path);
  if (have_seed) c.seed = seed_override;
  DesignBundle d = load_design(design_dir);

  std::vector<double> scale_targets = targets;
  if (scale_targets.empty()) scale_targets = {1e-4, 3e-4, 1e-3, 3e-3, 1e-2};

  fs::create_directories(out_dir);
  std::ostringstream csv;
  csv.precision(12);
  csv << "target_error,replicate,mean_gate_diamond,idle_inaccuracy,final_loss\n";

  const SuperOp identity{Mat4::Identity()};
  for (double target : scale_targets) {
    for (int rep = 0; rep < replicates; ++rep) {
      NoiseRecipe recipe = c.noise;
      recipe.seed = derive_seed(c.seed, "sweep:" + std::to_string(target)) + rep;

      // Calibrate the error-generator scale so the mean gate diamond error
      // lands on the target.
      recipe.base.scale = 1.0;
      VirtualQPU probe = make_gateset(recipe, d.perfect, d.ctx);
      double base_err = 0.0;
      for (const auto& [label, g] : probe.truth.gates)
        base_err += diamond_distance(g, d.perfect.gate(label)).value;
      base_err /= static_cast<double>(probe.truth.gates.size());
      recipe.base.scale = target / base_err;

      VirtualQPU qpu = make_gateset(recipe, d.perfect, d.ctx);
      double mean_err = 0.0;
      for (const auto& [label, g] : qpu.truth.gates)
        mean_err += diamond_distance(g, d.perfect.gate(label)).value;
      mean_err /= static_cast<double>(qpu.truth.gates.size());

      Dataset ds = exact_dataset(qpu, d.circuits);
      FitProblem problem;
      problem.perfect = d.perfect;
      problem.germs = &d.germs;
      problem.ctx = &d.ctx;
      problem.rule = d.rule;
      FitResult fit = reconstruct(ds, problem);

      double inacc = diamond_distance(fit.estimate.gate("I"), qpu.truth.gate("I")).value;
      csv << target << "," << rep << "," << mean_err << "," << inacc << "," << fit.loss
          << "\n";
      std::cout << "sweep target=" << target << " rep=" << rep << " gate_err=" << mean_err
                << " idle_inaccuracy=" << inacc << "\n";
    }
  }
  write_text_file(fs::path(out_dir) / "sweep.csv", csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"context-aware gate-set characterization pipeline"};
  app.require_subcommand(1);

  std::string config, out, design_dir, dataset, fit_path, truth_path;
  std::uint64_t seed = 0;
  long long shots = 0;
  double floor_value = 0.0;
  int replicates = 20;
  std::vector<double> targets;

  auto* design = app.add_subcommand("design", "select fiducials and germs, compile circuits");
  design->add_option("--config", config, "campaign config JSON");
  design->add_option("--out", out, "output directory")->required();
  auto* dseed = design->add_option("--seed", seed, "campaign seed");

  auto* simulate = app.add_subcommand("simulate", "run the circuit list on a virtual device");
  simulate->add_option("--config", config, "campaign config JSON");
  simulate->add_option("--design", design_dir, "design directory")->required();
  simulate->add_option("--out", out, "dataset output path (JSONL)")->required();
  auto* sshots = simulate->add_option("--shots", shots, "shots per circuit (0 = exact)");
  auto* sseed = simulate->add_option("--seed", seed, "campaign seed");

  auto* rec = app.add_subcommand("reconstruct", "fit the gate set to a dataset");
  rec->add_option("--design", design_dir, "design directory")->required();
  rec->add_option("--dataset", dataset, "dataset JSONL")->required();
  rec->add_option("--out", out, "fit result path")->required();

  auto* report = app.add_subcommand("report", "per-context error metrics for a fit");
  report->add_option("--fit", fit_path, "fit result JSON (or bare gate-set JSON)")->required();
  report->add_option("--truth", truth_path, "hidden-truth gate set for inaccuracy");
  report->add_option("--out", out, "output directory")->required();
  auto* rfloor = report->add_option("--floor", floor_value, "incoherent floor for reduction factors");

  auto* sweep = app.add_subcommand("sweep", "accuracy versus injected error scale");
  sweep->add_option("--config", config, "campaign config JSON");
  sweep->add_option("--design", design_dir, "design directory")->required();
  sweep->add_option("--out", out, "output directory")->required();
  sweep->add_option("--replicates", replicates, "gate sets per scale point");
  sweep->add_option("--targets", targets, "target mean gate diamond errors");
  auto* wseed = sweep->add_option("--seed", seed, "campaign seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (design->parsed()) return cmd_design(config, out, seed, dseed->count() > 0);
    if (simulate->parsed())
      return cmd_simulate(config, design_dir, out, shots, sshots->count() > 0, seed,
                          sseed->count() > 0);
    if (rec->parsed()) return cmd_reconstruct(design_dir, dataset, out);
    if (report->parsed())
      return cmd_report(fit_path, truth_path, out, floor_value, rfloor->count() > 0);
    if (sweep->parsed())
      return cmd_sweep(config, design_dir, out, replicates, targets, seed,
                       wseed->count() > 0);
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
