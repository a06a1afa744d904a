#pragma once

#include "cagst/superop.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace cagst {

enum class ContextMode { none, crosstalk, memory };

// Number of germ copies per repetition index. DoublePerIndex follows
// G^l = G^{l-1} G^{l-1}, i.e. 2^(l-1) copies; DoubleFromOne uses 2^l.
enum class RepetitionRule { double_per_index, double_from_one };

long long germ_copies(int l, RepetitionRule rule = RepetitionRule::double_per_index);

// A contextual gate: base name plus context id. Context 0 means context-free;
// kFloating marks a gate whose context is resolved during compilation from
// the immediately preceding gate (memory mode).
struct GateLabel {
  std::string base;
  int context = 0;

  static constexpr int kFloating = -1;

  GateLabel() = default;
  GateLabel(std::string b, int c) : base(std::move(b)), context(c) {}

  bool floating() const { return context == kFloating; }
  std::string str() const;

  bool operator==(const GateLabel& o) const = default;
};

// Parse "base", "base@4" or "base@f" back into a label.
GateLabel parse_label(const std::string& s);

// The alphabet of contextual gates plus the rules that constrain sequences.
// In memory mode `successor` maps a base gate to the context it forces on
// the next gate (Rx -> 1, Ry -> 2, I -> 3 for the three-gate set).
// Ancillary labels take part in circuits but are not targeted by the
// germ-selection sensitivity rows.
struct ContextSpec {
  ContextMode mode = ContextMode::none;
  std::vector<GateLabel> alphabet;
  std::map<std::string, int> successor;
  std::set<std::string> ancillary;

  bool in_alphabet(const GateLabel& g) const;
  // Context forced on a gate following `prev_base` (memory mode).
  int context_after(const std::string& prev_base) const;
  std::vector<std::string> targeted_labels() const;

  static ContextSpec context_free();
  // Idle in contexts 1..4 plus ancillary Rx/Ry in the reference context 4.
  static ContextSpec crosstalk_idle();
  // Nine contextual gates (Rx/Ry/I) x (previous Rx/Ry/I); idles targeted.
  static ContextSpec memory_three_gate();
};

// (prep fiducial, germ index, repetition index, meas fiducial).
struct CircuitSpec {
  std::vector<GateLabel> prep_fiducial;
  int germ_index = 0;
  int repetition = 1;  // l >= 1
  std::vector<GateLabel> meas_fiducial;
};

// Flat, time-ordered, context-resolved gate sequence plus its provenance.
struct CompiledCircuit {
  std::vector<GateLabel> seq;
  CircuitSpec spec;

  std::vector<std::string> labels() const;
  // Table-1 indices (1..9) for the three-gate memory alphabet.
  std::vector<int> table1_indices() const;
  std::string key() const;  // dedup key over the resolved sequence
};

// Germ concatenated germ_copies(l) times; contexts are copied verbatim
// (floating markers included). Throws std::invalid_argument for l < 1.
std::vector<GateLabel> repeat_germ(const std::vector<GateLabel>& germ, int l,
                                   RepetitionRule rule = RepetitionRule::double_per_index);

// Allowed successors of Table-1 index `prev` under the memory-validity rule.
// Throws std::out_of_range outside 1..9.
std::set<int> valid_successors(int prev);

// Table-1 index of a memory-mode label (1..9) and its inverse.
int table1_index(const GateLabel& g);
GateLabel label_from_table1(int index);

// True iff every adjacent pair satisfies valid_successors and the first
// gate is in the idle-preceded class. Reports the first violating position
// (0-based; 0 flags the first gate) when given somewhere to put it.
bool validate_sequence(const std::vector<int>& seq, int* first_violation = nullptr);

// Resolve a circuit spec against a germ table: concatenates prep fiducial,
// repeated germ, meas fiducial; in memory mode resolves floating contexts
// from the preceding gate (state preparation counts as an initial idle) and
// appends a final idle so the measurement is idle-preceded. Throws
// std::invalid_argument when a fixed context contradicts the resolution,
// naming the position.
CompiledCircuit compile_circuit(const CircuitSpec& spec,
                                const std::vector<std::vector<GateLabel>>& germs,
                                const ContextSpec& ctx,
                                RepetitionRule rule = RepetitionRule::double_per_index);

// All (prep, meas, germ, l) combinations for 1 <= l <= max_l, deduplicated
// on identical compiled sequences (first occurrence wins; germ-major order).
std::vector<CircuitSpec> enumerate_circuits(
    const std::vector<std::vector<GateLabel>>& prep_fiducials,
    const std::vector<std::vector<GateLabel>>& meas_fiducials,
    const std::vector<std::vector<GateLabel>>& germs, int max_l,
    const ContextSpec& ctx, RepetitionRule rule = RepetitionRule::double_per_index);

// Fiducial base strings contextualized for a mode: context 0 for none,
// the reference context 4 for crosstalk, floating for memory.
std::vector<GateLabel> fiducial_labels(const std::vector<std::string>& bases,
                                       const ContextSpec& ctx);

// Parse a germ/fiducial written in operator order (rightmost gate acts
// first), e.g. "I2Ry3I1Rxf", into a time-ordered label sequence. Tokens are
// Rx, Ry, I with an optional context digit or the floating marker 'f'.
std::vector<GateLabel> parse_operator_string(const std::string& s);

}  // namespace cagst
