#include "cagst/sensitivity.hpp"

#include "helpers.hpp"

#include <doctest.h>

#include <sstream>

using namespace cagst;

namespace {

GateSet perfect_for(const ContextSpec& ctx) {
  GateSet gs;
  gs.prep = ground_state();
  gs.meas = ground_meas();
  for (const auto& label : ctx.alphabet)
    gs.gates[label.str()] = perfect_gate_for_base(label.base);
  return gs;
}

}  // namespace

TEST_CASE("entry_coefficient trivial cases") {
  GateSet gs = perfect_gateset_xyi();
  // gate absent from the sequence
  CHECK(entry_coefficient(gs, {"Rx", "Rx"}, "Ry", 2, 2, CoeffKind::errorgen_entry) == 0.0);
  // single idle occurrence, identity fiducials: E_22 hits the X component
  // of the ground state, which vanishes.
  CHECK(entry_coefficient(gs, {"I"}, "I", 2, 2, CoeffKind::errorgen_entry) ==
        doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("entry_coefficient matches central finite differences") {
  std::mt19937_64 rng(101);
  GateSet gs = perfect_gateset_xyi();
  std::vector<std::string> alphabet{"Rx", "Ry", "I"};
  std::uniform_int_distribution<int> len(1, 24);
  std::uniform_int_distribution<size_t> pick(0, alphabet.size() - 1);
  std::uniform_int_distribution<int> row(2, 4), col(1, 4), kindpick(0, 1);

  for (int trial = 0; trial < 60; ++trial) {
    std::vector<std::string> seq;
    int n = len(rng);
    for (int i = 0; i < n; ++i) seq.push_back(alphabet[pick(rng)]);
    std::string gate = alphabet[pick(rng)];
    int j = row(rng), k = col(rng);
    CoeffKind kind = kindpick(rng) ? CoeffKind::errorgen_entry : CoeffKind::superop_entry;
    auto ref_kind = kind == CoeffKind::errorgen_entry ? ref::PerturbKind::errorgen_entry
                                                      : ref::PerturbKind::superop_entry;

    double exact = entry_coefficient(gs, seq, gate, j, k, kind);
    double fd = ref::finite_difference_coefficient(gs, seq, gate, j, k, ref_kind, 1e-6);
    if (std::abs(exact) > 1e-9)
      CHECK(std::abs(exact - fd) / std::abs(exact) < 1e-5);
    else
      CHECK(std::abs(exact - fd) < 1e-7);
  }
}

TEST_CASE("fiducial_T basis-orthogonality zeros") {
  GateSet gs = perfect_gateset_xyi();
  auto t = fiducial_T(gs, {{}}, {{}});
  // prep has no X/Y component: columns j = 2, 3 vanish
  for (int i = 0; i < 3; ++i) {
    CHECK(t.T(i, 1) == 0.0);
    CHECK(t.T(i, 2) == 0.0);
  }
  CHECK(!t.zero_entries.empty());
}

TEST_CASE("fiducial_T is strictly positive for the standard set") {
  GateSet gs = perfect_gateset_xyi();
  ContextSpec ctx = ContextSpec::context_free();
  auto preps = test::load_fiducials(ctx, "preps");
  auto meass = test::load_fiducials(ctx, "meass");
  auto t = fiducial_T(gs, preps, meass);
  CHECK(t.zero_entries.empty());
  CHECK(t.T.minCoeff() > 0.0);
}

TEST_CASE("duplicating the fiducial lists doubles T") {
  GateSet gs = perfect_gateset_xyi();
  ContextSpec ctx = ContextSpec::context_free();
  auto preps = test::load_fiducials(ctx, "preps");
  auto meass = test::load_fiducials(ctx, "meass");
  auto t1 = fiducial_T(gs, preps, meass);

  auto preps2 = preps;
  preps2.insert(preps2.end(), preps.begin(), preps.end());
  auto meass2 = meass;
  meass2.insert(meass2.end(), meass.begin(), meass.end());
  auto t4 = fiducial_T(gs, preps2, meass2);
  // both sides doubled -> 4x the pair count
  CHECK((t4.T - 4.0 * t1.T).norm() < 1e-12);

  auto t2 = fiducial_T(gs, preps2, meass);
  CHECK((t2.T - 2.0 * t1.T).norm() < 1e-12);
}

TEST_CASE("fiducial_fitness flags and homogeneity") {
  FiducialSensitivity uniform;
  uniform.T.setConstant(0.5);
  auto f = fiducial_fitness(uniform);
  CHECK(f.degenerate_uniform);
  CHECK(f.value == doctest::Approx(12 * 0.5 / 1e-12));

  FiducialSensitivity with_zero;
  with_zero.T.setConstant(0.5);
  with_zero.T(1, 2) = 0.0;
  with_zero.zero_entries.emplace_back(3, 3);
  CHECK(fiducial_fitness(with_zero).non_ic);

  FiducialSensitivity base;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 4; ++j) base.T(i, j) = u(rng);
  double alpha = 3.0;
  FiducialSensitivity scaled;
  scaled.T = alpha * base.T;
  CHECK(fiducial_fitness(scaled).value ==
        doctest::Approx(fiducial_fitness(base).value / alpha).epsilon(1e-9));
}

TEST_CASE("build_B input validation and row bookkeeping") {
  ContextSpec ctx = ContextSpec::context_free();
  GateSet gs = perfect_for(ctx);
  auto preps = test::load_fiducials(ctx, "preps");
  auto meass = test::load_fiducials(ctx, "meass");
  CHECK_THROWS_AS(build_B(gs, preps, meass, {}, 3, ctx), std::invalid_argument);

  auto b = build_B(gs, preps, meass, {{GateLabel("I", 0)}}, 5, ctx);
  CHECK(b.rows.size() == 36);  // three targeted gates x 12 entries
  CHECK(b.B.rows() == 36);
  CHECK(b.B.cols() == 5);
  CHECK(b.B.minCoeff() >= 0.0);

  // rows for the idle germ are nondecreasing in l
  for (int r = 0; r < b.B.rows(); ++r)
    if (b.rows[r].gate == "I")
      for (int l = 0; l + 1 < b.B.cols(); ++l) CHECK(b.B(r, l) <= b.B(r, l + 1) + 1e-12);
}

TEST_CASE("memory mode targets only the idles") {
  ContextSpec ctx = ContextSpec::memory_three_gate();
  GateSet gs = perfect_for(ctx);
  auto preps = test::load_fiducials(ctx, "preps");
  auto meass = test::load_fiducials(ctx, "meass");
  auto germs = test::load_germs("germs_memory");
  auto b = build_B(gs, preps, meass, germs, 2, ctx);
  CHECK(b.rows.size() == 36);  // I@1, I@2, I@3
  for (const auto& row : b.rows) {
    CHECK(parse_label(row.gate).base == "I");
    CHECK(!ctx.ancillary.count(row.gate));
  }
}

TEST_CASE("crosstalk mode targets the four idle contexts") {
  ContextSpec ctx = ContextSpec::crosstalk_idle();
  GateSet gs = perfect_for(ctx);
  auto preps = test::load_fiducials(ctx, "preps");
  auto meass = test::load_fiducials(ctx, "meass");
  auto germs = test::load_germs("germs_crosstalk");
  auto b = build_B(gs, preps, meass, germs, 2, ctx);
  CHECK(b.rows.size() == 48);
}

TEST_CASE("germ_constraint_check counts stalls") {
  SensitivityMatrix m;
  m.rows = {{"I", 2, 1}, {"I", 2, 2}};
  m.B.resize(2, 4);
  m.B << 1, 2, 3, 4, 2, 2, 2, 2;
  auto v = germ_constraint_check(m);
  CHECK(v.size() == 3);  // the constant row stalls at every step
  for (const auto& e : v) CHECK(e.row == 1);

  m.B << 1, 2, 3, 4, 0.5, 1, 2, 4;
  CHECK(germ_constraint_check(m).empty());
}

TEST_CASE("germ_fitness value and penalty ordering") {
  SensitivityMatrix m;
  m.rows = {{"I", 2, 1}, {"I", 2, 2}, {"I", 2, 3}};
  m.B.resize(3, 2);
  m.B << 1, 3, 0.5, 1, 0.7, 2;
  CHECK(germ_fitness(m) == doctest::Approx(1.0));

  m.B << 1, 3, 2, 1, 0.7, 2;  // one decreasing row
  CHECK(germ_fitness(m) < 0.0);
}

TEST_CASE("published context-free germ set beats the single idle germ") {
  ContextSpec ctx = ContextSpec::context_free();
  GateSet gs = perfect_for(ctx);
  auto preps = test::load_fiducials(ctx, "preps");
  auto meass = test::load_fiducials(ctx, "meass");
  auto g = test::load_germs("germs_context_free_L7");

  auto bg = build_B(gs, preps, meass, g, 4, ctx);
  auto bi = build_B(gs, preps, meass, {{GateLabel("I", 0)}}, 4, ctx);
  CHECK(germ_fitness(bg) > germ_fitness(bi));
  CHECK(germ_fitness(bi) < 0.0);  // rotation rows never amplify
}

TEST_CASE("adding a germ never decreases B") {
  ContextSpec ctx = ContextSpec::context_free();
  GateSet gs = perfect_for(ctx);
  auto preps = test::load_fiducials(ctx, "preps");
  auto meass = test::load_fiducials(ctx, "meass");
  auto g = test::load_germs("germs_context_free_L7");

  std::vector<std::vector<GateLabel>> small(g.begin(), g.begin() + 4);
  std::vector<std::vector<GateLabel>> bigger(g.begin(), g.begin() + 5);
  auto bs = build_B(gs, preps, meass, small, 3, ctx);
  auto bb = build_B(gs, preps, meass, bigger, 3, ctx);
  CHECK(((bb.B - bs.B).array() >= -1e-12).all());
}

TEST_CASE("build_B is reproducible") {
  ContextSpec ctx = ContextSpec::context_free();
  GateSet gs = perfect_for(ctx);
  auto preps = test::load_fiducials(ctx, "preps");
  auto meass = test::load_fiducials(ctx, "meass");
  auto g = test::load_germs("germs_context_free_L7");
  auto b1 = build_B(gs, preps, meass, g, 4, ctx);
  auto b2 = build_B(gs, preps, meass, g, 4, ctx);
  CHECK((b1.B - b2.B).norm() == 0.0);
}

TEST_CASE("B csv export shape") {
  SensitivityMatrix m;
  m.rows = {{"I", 2, 1}};
  m.B.resize(1, 2);
  m.B << 0.25, 0.5;
  std::ostringstream os;
  write_B_csv(m, os);
  CHECK(os.str() == "gate,j,k,l1,l2\nI,2,1,0.25,0.5\n");
}
