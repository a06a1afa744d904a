#pragma once

#include "cagst/circuit.hpp"
#include "cagst/io.hpp"
#include "cagst/superop.hpp"

#include <filesystem>
#include <random>
#include <string>
#include <vector>

namespace cagst::test {

inline std::filesystem::path data_dir() { return std::filesystem::path(CAGST_DATA_DIR); }

inline json reference_sequences() {
  return read_json_file(data_dir() / "reference_sequences.json");
}

inline json device_fixtures() {
  return read_json_file(data_dir() / "device_idle_estimates.json");
}

inline Mat4 mat_from(const json& j) {
  Mat4 m;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) m(a, b) = j.at(a).at(b).get<double>();
  return m;
}

inline std::vector<std::vector<GateLabel>> load_germs(const std::string& key) {
  return germs_from_json(reference_sequences().at(key));
}

inline std::vector<std::vector<GateLabel>> load_fiducials(const ContextSpec& ctx,
                                                          const std::string& side) {
  auto bases = reference_sequences()
                   .at("fiducials_standard")
                   .at(side)
                   .get<std::vector<std::vector<std::string>>>();
  std::vector<std::vector<GateLabel>> out;
  for (const auto& b : bases) out.push_back(fiducial_labels(b, ctx));
  return out;
}

inline SuperOp random_unitary_ptm(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Vector3d axis(gauss(rng), gauss(rng), gauss(rng));
  axis.normalize();
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  return ptm_of_unitary(axis, angle(rng));
}

// Unitary conjugated with mild depolarizing: physical, near-generic.
inline SuperOp random_physical_channel(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dep(0.0, 0.2);
  double p = dep(rng);
  Mat4 d = Mat4::Identity();
  d(1, 1) = d(2, 2) = d(3, 3) = 1.0 - p;
  return SuperOp(random_unitary_ptm(rng).m * d);
}

inline GateSet random_physical_gateset(std::mt19937_64& rng, int ngates = 3) {
  GateSet gs;
  std::uniform_real_distribution<double> tilt(-0.1, 0.1);
  Vec4 prep = ground_state().v;
  prep(1) += 0.1 * tilt(rng);
  prep(2) += 0.1 * tilt(rng);
  prep(3) *= 1.0 - std::abs(tilt(rng));
  gs.prep = StateVec(prep);
  Vec4 meas = ground_meas().v;
  meas(3) *= 1.0 - std::abs(tilt(rng));
  gs.meas = MeasVec(meas);
  for (int i = 0; i < ngates; ++i)
    gs.gates["G" + std::to_string(i)] = random_physical_channel(rng);
  return gs;
}

inline std::vector<std::string> random_sequence(std::mt19937_64& rng, const GateSet& gs,
                                                int max_len) {
  std::vector<std::string> labels;
  for (const auto& [label, _] : gs.gates) labels.push_back(label);
  std::uniform_int_distribution<int> len(0, max_len);
  std::uniform_int_distribution<size_t> pick(0, labels.size() - 1);
  std::vector<std::string> seq;
  int n = len(rng);
  for (int i = 0; i < n; ++i) seq.push_back(labels[pick(rng)]);
  return seq;
}

}  // namespace cagst::test
