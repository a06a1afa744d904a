#pragma once

#include "cagst/circuit.hpp"
#include "cagst/design.hpp"
#include "cagst/metrics.hpp"
#include "cagst/reconstruct.hpp"
#include "cagst/sensitivity.hpp"
#include "cagst/superop.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace cagst {

using json = nlohmann::json;

// Gate-set file: {"prep": [4], "meas": [4], "gates": {"label": [[4]x4]}}.
json gateset_to_json(const GateSet& gs);
GateSet gateset_from_json(const json& j);

// Circuit list entries: {"prep": [...], "germ": g, "l": l, "meas": [...],
// "compiled": [...]}.
json circuits_to_json(const std::vector<CompiledCircuit>& circuits);
std::vector<CompiledCircuit> circuits_from_json(const json& j);

json germs_to_json(const std::vector<std::vector<GateLabel>>& germs);
std::vector<std::vector<GateLabel>> germs_from_json(const json& j);

// Dataset: JSON lines, {"circuit": [...], "shots": n, "zeros": k} or
// {"circuit": [...], "p_exact": p}.
void write_dataset_jsonl(const Dataset& ds, std::ostream& os);
Dataset read_dataset_jsonl(std::istream& is);

// Attach provenance to records whose compiled labels match a design circuit.
// Returns the labels of design circuits absent from the dataset.
std::vector<std::string> match_dataset_to_design(Dataset& ds,
                                                 const std::vector<CompiledCircuit>& design);

json fitresult_to_json(const FitResult& fit);
FitResult fitresult_from_json(const json& j);

struct MetricsRow {
  std::string label;
  int context = 0;
  double d_diamond = 0.0;
  double d_corrected = 0.0;
  std::array<double, 3> angles{0, 0, 0};
  double coherence_fraction = 0.0;
};

json metrics_to_json(const std::vector<MetricsRow>& rows);

// Filesystem helpers (exceptions carry the path).
json read_json_file(const std::filesystem::path& p);
void write_json_file(const std::filesystem::path& p, const json& j);
void write_text_file(const std::filesystem::path& p, const std::string& text);
std::string read_text_file(const std::filesystem::path& p);

}  // namespace cagst
