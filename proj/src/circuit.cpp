#include "cagst/circuit.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace cagst {

namespace {

int base_class(const std::string& base) {
  if (base == "Rx") return 1;
  if (base == "Ry") return 2;
  if (base == "I") return 3;
  throw std::invalid_argument("unknown base gate: " + base);
}

int base_order(const std::string& base) { return base_class(base) - 1; }

}  // namespace

long long germ_copies(int l, RepetitionRule rule) {
  if (l < 1) throw std::invalid_argument("repetition index must be >= 1");
  return 1LL << (rule == RepetitionRule::double_per_index ? l - 1 : l);
}

std::string GateLabel::str() const {
  if (context == 0) return base;
  if (context == kFloating) return base + "@f";
  return base + "@" + std::to_string(context);
}

GateLabel parse_label(const std::string& s) {
  auto at = s.find('@');
  if (at == std::string::npos) return GateLabel(s, 0);
  std::string base = s.substr(0, at);
  std::string ctx = s.substr(at + 1);
  if (ctx == "f") return GateLabel(base, GateLabel::kFloating);
  return GateLabel(base, std::stoi(ctx));
}

bool ContextSpec::in_alphabet(const GateLabel& g) const {
  if (g.floating()) {
    return std::any_of(alphabet.begin(), alphabet.end(),
                       [&](const GateLabel& a) { return a.base == g.base; });
  }
  return std::find(alphabet.begin(), alphabet.end(), g) != alphabet.end();
}

int ContextSpec::context_after(const std::string& prev_base) const {
  auto it = successor.find(prev_base);
  if (it == successor.end())
    throw std::invalid_argument("no successor rule for base gate " + prev_base);
  return it->second;
}

std::vector<std::string> ContextSpec::targeted_labels() const {
  std::vector<std::string> out;
  for (const auto& g : alphabet)
    if (!ancillary.count(g.str())) out.push_back(g.str());
  return out;
}

ContextSpec ContextSpec::context_free() {
  ContextSpec c;
  c.mode = ContextMode::none;
  c.alphabet = {GateLabel("Rx", 0), GateLabel("Ry", 0), GateLabel("I", 0)};
  return c;
}

ContextSpec ContextSpec::crosstalk_idle() {
  ContextSpec c;
  c.mode = ContextMode::crosstalk;
  for (int s = 1; s <= 4; ++s) c.alphabet.emplace_back("I", s);
  c.alphabet.emplace_back("Rx", 4);
  c.alphabet.emplace_back("Ry", 4);
  c.ancillary = {"Rx@4", "Ry@4"};
  return c;
}

ContextSpec ContextSpec::memory_three_gate() {
  ContextSpec c;
  c.mode = ContextMode::memory;
  for (const char* base : {"Rx", "Ry", "I"})
    for (int s = 1; s <= 3; ++s) c.alphabet.emplace_back(base, s);
  c.successor = {{"Rx", 1}, {"Ry", 2}, {"I", 3}};
  for (int s = 1; s <= 3; ++s) {
    c.ancillary.insert(GateLabel("Rx", s).str());
    c.ancillary.insert(GateLabel("Ry", s).str());
  }
  return c;
}

std::vector<std::string> CompiledCircuit::labels() const {
  std::vector<std::string> out;
  out.reserve(seq.size());
  for (const auto& g : seq) out.push_back(g.str());
  return out;
}

std::vector<int> CompiledCircuit::table1_indices() const {
  std::vector<int> out;
  out.reserve(seq.size());
  for (const auto& g : seq) out.push_back(table1_index(g));
  return out;
}

std::string CompiledCircuit::key() const {
  std::string k;
  for (const auto& g : seq) {
    k += g.str();
    k += '|';
  }
  return k;
}

std::vector<GateLabel> repeat_germ(const std::vector<GateLabel>& germ, int l,
                                   RepetitionRule rule) {
  long long copies = germ_copies(l, rule);
  std::vector<GateLabel> out;
  out.reserve(germ.size() * static_cast<size_t>(copies));
  for (long long c = 0; c < copies; ++c)
    out.insert(out.end(), germ.begin(), germ.end());
  return out;
}

std::set<int> valid_successors(int prev) {
  if (prev < 1 || prev > 9) throw std::out_of_range("Table-1 index outside 1..9");
  // prev in {1,2,3} is an Rx-class gate, {4,5,6} Ry, {7,8,9} idle; the class
  // of the previous gate fixes the context of the current one.
  int cls = (prev - 1) / 3 + 1;
  return {cls, 3 + cls, 6 + cls};
}

int table1_index(const GateLabel& g) {
  if (g.context < 1 || g.context > 3)
    throw std::invalid_argument("label " + g.str() + " has no Table-1 index");
  return 3 * base_order(g.base) + g.context;
}

GateLabel label_from_table1(int index) {
  if (index < 1 || index > 9) throw std::out_of_range("Table-1 index outside 1..9");
  static const char* bases[] = {"Rx", "Ry", "I"};
  return GateLabel(bases[(index - 1) / 3], (index - 1) % 3 + 1);
}

bool validate_sequence(const std::vector<int>& seq, int* first_violation) {
  for (size_t i = 0; i < seq.size(); ++i) {
    if (seq[i] < 1 || seq[i] > 9) {
      if (first_violation) *first_violation = static_cast<int>(i);
      return false;
    }
    // State preparation merges with an idle, so position 0 must be in the
    // idle-preceded class {3, 6, 9}.
    int required = i == 0 ? 3 : (seq[i - 1] - 1) / 3 + 1;
    if ((seq[i] - 1) % 3 + 1 != required) {
      if (first_violation) *first_violation = static_cast<int>(i);
      return false;
    }
  }
  return true;
}

CompiledCircuit compile_circuit(const CircuitSpec& spec,
                                const std::vector<std::vector<GateLabel>>& germs,
                                const ContextSpec& ctx, RepetitionRule rule) {
  if (spec.germ_index < 0 || spec.germ_index >= static_cast<int>(germs.size()))
    throw std::out_of_range("germ index outside the germ table");

  std::vector<GateLabel> raw = spec.prep_fiducial;
  auto repeated = repeat_germ(germs[spec.germ_index], spec.repetition, rule);
  raw.insert(raw.end(), repeated.begin(), repeated.end());
  raw.insert(raw.end(), spec.meas_fiducial.begin(), spec.meas_fiducial.end());
  if (ctx.mode == ContextMode::memory) raw.emplace_back("I", GateLabel::kFloating);

  CompiledCircuit out;
  out.spec = spec;
  out.seq.reserve(raw.size());

  if (ctx.mode != ContextMode::memory) {
    for (size_t i = 0; i < raw.size(); ++i) {
      if (!ctx.in_alphabet(raw[i]) || raw[i].floating()) {
        std::ostringstream msg;
        msg << "gate " << raw[i].str() << " at position " << i
            << " is not in the context alphabet";
        throw std::invalid_argument(msg.str());
      }
      out.seq.push_back(raw[i]);
    }
    return out;
  }

  // Memory mode: the context of every gate equals the class of its
  // predecessor; state preparation counts as an initial idle.
  int prev = base_class("I");
  for (size_t i = 0; i < raw.size(); ++i) {
    GateLabel g = raw[i];
    if (g.floating()) {
      g.context = prev;
    } else if (g.context != prev) {
      std::ostringstream msg;
      msg << "context " << g.context << " of gate " << g.str() << " at position "
          << i << " contradicts the preceding gate (requires " << prev << ")";
      throw std::invalid_argument(msg.str());
    }
    if (!ctx.in_alphabet(g))
      throw std::invalid_argument("gate " + g.str() + " is not in the context alphabet");
    out.seq.push_back(g);
    prev = base_class(g.base);
  }
  return out;
}

std::vector<CircuitSpec> enumerate_circuits(
    const std::vector<std::vector<GateLabel>>& prep_fiducials,
    const std::vector<std::vector<GateLabel>>& meas_fiducials,
    const std::vector<std::vector<GateLabel>>& germs, int max_l,
    const ContextSpec& ctx, RepetitionRule rule) {
  if (prep_fiducials.empty() || meas_fiducials.empty() || germs.empty())
    throw std::invalid_argument("fiducial and germ lists must be nonempty");

  std::vector<CircuitSpec> out;
  std::unordered_set<std::string> seen;
  for (int g = 0; g < static_cast<int>(germs.size()); ++g) {
    for (int l = 1; l <= max_l; ++l) {
      for (const auto& p : prep_fiducials) {
        for (const auto& m : meas_fiducials) {
          CircuitSpec spec{p, g, l, m};
          auto compiled = compile_circuit(spec, germs, ctx, rule);
          if (seen.insert(compiled.key()).second) out.push_back(spec);
        }
      }
    }
  }
  return out;
}

std::vector<GateLabel> fiducial_labels(const std::vector<std::string>& bases,
                                       const ContextSpec& ctx) {
  std::vector<GateLabel> out;
  out.reserve(bases.size());
  for (const auto& b : bases) {
    switch (ctx.mode) {
      case ContextMode::none: out.emplace_back(b, 0); break;
      case ContextMode::crosstalk: out.emplace_back(b, 4); break;
      case ContextMode::memory: out.emplace_back(b, GateLabel::kFloating); break;
    }
  }
  return out;
}

std::vector<GateLabel> parse_operator_string(const std::string& s) {
  std::vector<GateLabel> ops;
  size_t i = 0;
  while (i < s.size()) {
    if (s[i] == ' ') {
      ++i;
      continue;
    }
    std::string base;
    if (s[i] == 'I') {
      base = "I";
      ++i;
    } else if (s[i] == 'R' && i + 1 < s.size() && (s[i + 1] == 'x' || s[i + 1] == 'y')) {
      base = s[i + 1] == 'x' ? "Rx" : "Ry";
      i += 2;
    } else {
      throw std::invalid_argument("unparsable gate token in \"" + s + "\" at " +
                                  std::to_string(i));
    }
    int context = 0;
    if (i < s.size() && s[i] == 'f') {
      context = GateLabel::kFloating;
      ++i;
    } else if (i < s.size() && s[i] >= '1' && s[i] <= '9') {
      context = s[i] - '0';
      ++i;
    }
    ops.emplace_back(base, context);
  }
  // Operator order: rightmost gate acts first.
  std::reverse(ops.begin(), ops.end());
  return ops;
}

}  // namespace cagst
