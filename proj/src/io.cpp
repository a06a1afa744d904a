#include "cagst/io.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace cagst {

namespace {

json mat_to_json(const Mat4& m) {
  json rows = json::array();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int j = 0; j < 4; ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Mat4 mat_from_json(const json& j) {
  Mat4 m;
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) m(i, k) = j.at(i).at(k).get<double>();
  return m;
}

json vec_to_json(const Vec4& v) {
  return json::array({v(0), v(1), v(2), v(3)});
}

Vec4 vec_from_json(const json& j) {
  return Vec4(j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>(),
              j.at(3).get<double>());
}

json labels_to_json(const std::vector<GateLabel>& labels) {
  json arr = json::array();
  for (const auto& g : labels) arr.push_back(g.str());
  return arr;
}

std::vector<GateLabel> labels_from_json(const json& j) {
  std::vector<GateLabel> out;
  for (const auto& s : j) out.push_back(parse_label(s.get<std::string>()));
  return out;
}

}  // namespace

json gateset_to_json(const GateSet& gs) {
  json j;
  j["prep"] = vec_to_json(gs.prep.v);
  j["meas"] = vec_to_json(gs.meas.v);
  json gates = json::object();
  for (const auto& [label, g] : gs.gates) gates[label] = mat_to_json(g.m);
  j["gates"] = gates;
  return j;
}

GateSet gateset_from_json(const json& j) {
  GateSet gs;
  gs.prep = StateVec(vec_from_json(j.at("prep")));
  gs.meas = MeasVec(vec_from_json(j.at("meas")));
  for (const auto& [label, m] : j.at("gates").items())
    gs.gates[label] = SuperOp(mat_from_json(m));
  return gs;
}

json circuits_to_json(const std::vector<CompiledCircuit>& circuits) {
  json arr = json::array();
  for (const auto& c : circuits) {
    json e;
    e["prep"] = labels_to_json(c.spec.prep_fiducial);
    e["germ"] = c.spec.germ_index;
    e["l"] = c.spec.repetition;
    e["meas"] = labels_to_json(c.spec.meas_fiducial);
    e["compiled"] = labels_to_json(c.seq);
    arr.push_back(e);
  }
  return arr;
}

std::vector<CompiledCircuit> circuits_from_json(const json& j) {
  std::vector<CompiledCircuit> out;
  for (const auto& e : j) {
    CompiledCircuit c;
    c.spec.prep_fiducial = labels_from_json(e.at("prep"));
    c.spec.germ_index = e.at("germ").get<int>();
    c.spec.repetition = e.at("l").get<int>();
    c.spec.meas_fiducial = labels_from_json(e.at("meas"));
    c.seq = labels_from_json(e.at("compiled"));
    out.push_back(std::move(c));
  }
  return out;
}

json germs_to_json(const std::vector<std::vector<GateLabel>>& germs) {
  json arr = json::array();
  for (const auto& g : germs) arr.push_back(labels_to_json(g));
  return arr;
}

std::vector<std::vector<GateLabel>> germs_from_json(const json& j) {
  std::vector<std::vector<GateLabel>> out;
  for (const auto& g : j) out.push_back(labels_from_json(g));
  return out;
}

void write_dataset_jsonl(const Dataset& ds, std::ostream& os) {
  for (const auto& r : ds.records) {
    json e;
    e["circuit"] = r.circuit;
    if (r.exact)
      e["p_exact"] = r.p_exact;
    else {
      e["shots"] = r.shots;
      e["zeros"] = r.zeros;
    }
    os << e.dump() << "\n";
  }
}

Dataset read_dataset_jsonl(std::istream& is) {
  Dataset ds;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json e = json::parse(line);
    DatasetRecord r;
    r.circuit = e.at("circuit").get<std::vector<std::string>>();
    if (e.contains("p_exact")) {
      r.exact = true;
      r.p_exact = e.at("p_exact").get<double>();
    } else {
      r.shots = e.at("shots").get<long long>();
      r.zeros = e.at("zeros").get<long long>();
    }
    ds.records.push_back(std::move(r));
  }
  return ds;
}

std::vector<std::string> match_dataset_to_design(Dataset& ds,
                                                 const std::vector<CompiledCircuit>& design) {
  std::map<std::string, const CompiledCircuit*> by_key;
  for (const auto& c : design) by_key[c.key()] = &c;

  auto record_key = [](const DatasetRecord& r) {
    std::string k;
    for (const auto& s : r.circuit) {
      k += s;
      k += '|';
    }
    return k;
  };

  std::map<std::string, int> seen;
  for (auto& r : ds.records) {
    std::string k = record_key(r);
    auto it = by_key.find(k);
    if (it != by_key.end()) {
      r.provenance = it->second->spec;
      seen[k] = 1;
    }
  }
  std::vector<std::string> missing;
  for (const auto& c : design) {
    if (!seen.count(c.key())) {
      std::string joined;
      for (const auto& s : c.labels()) joined += s + " ";
      missing.push_back(joined);
    }
  }
  return missing;
}

json fitresult_to_json(const FitResult& fit) {
  json j;
  j["estimate"] = gateset_to_json(fit.estimate);
  j["loss"] = fit.loss;
  j["iterations"] = fit.iterations;
  j["status"] = fit.status;
  j["converged"] = fit.converged;
  j["residuals"] = fit.residuals;
  return j;
}

FitResult fitresult_from_json(const json& j) {
  FitResult f;
  f.estimate = gateset_from_json(j.at("estimate"));
  f.loss = j.at("loss").get<double>();
  f.iterations = j.at("iterations").get<int>();
  f.status = j.at("status").get<std::string>();
  f.converged = j.at("converged").get<bool>();
  if (j.contains("residuals")) f.residuals = j.at("residuals").get<std::vector<double>>();
  return f;
}

json metrics_to_json(const std::vector<MetricsRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    json e;
    e["label"] = r.label;
    e["context"] = r.context;
    e["d_diamond"] = r.d_diamond;
    e["d_corrected"] = r.d_corrected;
    e["angles"] = json::array({r.angles[0], r.angles[1], r.angles[2]});
    e["coherence_fraction"] = r.coherence_fraction;
    arr.push_back(e);
  }
  return arr;
}

json read_json_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  json j;
  in >> j;
  return j;
}

void write_json_file(const std::filesystem::path& p, const json& j) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << j.dump(2) << "\n";
}

void write_text_file(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace cagst
