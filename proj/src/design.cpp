#include "cagst/design.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace cagst {

namespace {

// All base-gate words of length 0..max_len, shortest first, then by the
// base order of the gate set's gate map.
std::vector<std::vector<std::string>> fiducial_pool(const GateSet& gs, int max_len) {
  std::vector<std::string> bases;
  for (const auto& [label, _] : gs.gates) bases.push_back(label);
  std::vector<std::vector<std::string>> pool{{}};
  std::vector<std::vector<std::string>> frontier{{}};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<std::vector<std::string>> next;
    for (const auto& w : frontier) {
      for (const auto& b : bases) {
        auto e = w;
        e.push_back(b);
        next.push_back(e);
        pool.push_back(std::move(e));
      }
    }
    frontier = std::move(next);
  }
  return pool;
}

Mat4 word_product(const GateSet& gs, const std::vector<std::string>& word) {
  Mat4 m = Mat4::Identity();
  for (const auto& b : word) m = (gs.gate(b).m * m).eval();
  return m;
}

std::vector<GateLabel> plain_labels(const std::vector<std::string>& word) {
  std::vector<GateLabel> out;
  out.reserve(word.size());
  for (const auto& b : word) out.emplace_back(b, 0);
  return out;
}

struct FidScore {
  int zeros = 0;
  double value = 0.0;
  bool better_than(const FidScore& o) const {
    if (zeros != o.zeros) return zeros < o.zeros;
    return value > o.value;
  }
};

FidScore score(const GateSet& gs, const std::vector<std::vector<GateLabel>>& preps,
               const std::vector<std::vector<GateLabel>>& meass) {
  auto t = fiducial_T(gs, preps, meass);
  auto f = fiducial_fitness(t);
  return {static_cast<int>(t.zero_entries.size()), f.value};
}

}  // namespace

FiducialSelection select_fiducials(const GateSet& gs_perfect, const DesignConfig& cfg) {
  auto pool_words = fiducial_pool(gs_perfect, cfg.max_fiducial_len);
  std::vector<std::vector<GateLabel>> pool;
  std::vector<Mat4> actions;
  for (const auto& w : pool_words) {
    pool.push_back(plain_labels(w));
    actions.push_back(word_product(gs_perfect, w));
  }
  const int k = cfg.fiducials_per_side;
  const int n = static_cast<int>(pool.size());

  auto duplicates_action = [&](const std::vector<int>& side, int cand) {
    for (int s : side)
      if ((actions[s] - actions[cand]).norm() < 1e-12) return true;
    return false;
  };
  auto materialize = [&](const std::vector<int>& idx) {
    std::vector<std::vector<GateLabel>> out;
    for (int i : idx) out.push_back(pool[i]);
    return out;
  };

  // Greedy growth, alternating sides; each step takes the candidate with
  // the best (fewest zero entries, then fitness) marginal score.
  std::vector<int> preps, meass;
  while (static_cast<int>(preps.size()) < k || static_cast<int>(meass.size()) < k) {
    bool grow_prep = preps.size() <= meass.size() && static_cast<int>(preps.size()) < k;
    auto& side = grow_prep ? preps : meass;
    int best = -1;
    FidScore best_score;
    for (int c = 0; c < n; ++c) {
      if (duplicates_action(side, c)) continue;
      side.push_back(c);
      auto p = materialize(preps), m = materialize(meass);
      if (p.empty()) p = {pool[0]};
      if (m.empty()) m = {pool[0]};
      FidScore s = score(gs_perfect, p, m);
      side.pop_back();
      if (best < 0 || s.better_than(best_score)) {
        best = c;
        best_score = s;
      }
    }
    if (best < 0) throw std::runtime_error("fiducial pool exhausted before reaching k per side");
    side.push_back(best);
  }

  // Single-swap hill climb until no replacement improves the score.
  FidScore current = score(gs_perfect, materialize(preps), materialize(meass));
  bool improved = true;
  while (improved) {
    improved = false;
    for (auto* side : {&preps, &meass}) {
      for (size_t i = 0; i < side->size(); ++i) {
        int old = (*side)[i];
        for (int c = 0; c < n; ++c) {
          if (c == old) continue;
          (*side)[i] = c;
          bool dup = false;
          for (size_t j = 0; j < side->size(); ++j)
            if (j != i && (actions[(*side)[j]] - actions[c]).norm() < 1e-12) dup = true;
          FidScore s = dup ? FidScore{999, 0.0}
                           : score(gs_perfect, materialize(preps), materialize(meass));
          if (s.better_than(current)) {
            current = s;
            old = c;
            improved = true;
          } else {
            (*side)[i] = old;
          }
        }
        (*side)[i] = old;
      }
    }
  }

  FiducialSelection out;
  out.preps = materialize(preps);
  out.meass = materialize(meass);
  out.sensitivity = fiducial_T(gs_perfect, out.preps, out.meass);
  auto fit = fiducial_fitness(out.sensitivity);
  out.fitness = fit.value;
  if (fit.non_ic)
    throw std::runtime_error(
        "no informationally complete fiducial set exists in the search space "
        "(sensitivity entries remain zero)");
  return out;
}

std::vector<GateLabel> normalize_germ(const std::vector<GateLabel>& germ,
                                      const ContextSpec& ctx) {
  if (ctx.mode != ContextMode::memory) return germ;
  std::vector<GateLabel> out;
  out.reserve(germ.size());
  for (size_t i = 0; i < germ.size(); ++i) {
    int c = i == 0 ? GateLabel::kFloating : ctx.context_after(germ[i - 1].base);
    if (i > 0 && !germ[i].floating() && germ[i].context != c)
      throw std::invalid_argument("germ context at position " + std::to_string(i) +
                                  " violates the successor rule");
    out.emplace_back(germ[i].base, c);
  }
  return out;
}

namespace {

struct GermSpace {
  std::vector<GateLabel> alphabet;
  const ContextSpec* ctx;
  int count;
  int max_len;

  std::vector<GateLabel> random_germ(std::mt19937_64& rng) const {
    std::uniform_int_distribution<int> len(1, max_len);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(alphabet.size()) - 1);
    std::vector<GateLabel> g;
    int n = len(rng);
    for (int i = 0; i < n; ++i) g.push_back(alphabet[pick(rng)]);
    return normalize_germ(g, *ctx);
  }

  std::vector<std::vector<GateLabel>> random(std::mt19937_64& rng) const {
    std::vector<std::vector<GateLabel>> c;
    for (int i = 0; i < count; ++i) c.push_back(random_germ(rng));
    return c;
  }

  std::vector<std::vector<GateLabel>> mutate(const std::vector<std::vector<GateLabel>>& c,
                                             std::mt19937_64& rng) const {
    auto out = c;
    std::uniform_int_distribution<int> which(0, static_cast<int>(out.size()) - 1);
    std::uniform_int_distribution<int> op(0, 2);
    std::uniform_int_distribution<int> pick(0, static_cast<int>(alphabet.size()) - 1);
    auto& g = out[which(rng)];
    std::uniform_int_distribution<int> pos(0, static_cast<int>(g.size()) - 1);
    switch (op(rng)) {
      case 0:  // replace one gate
        g[pos(rng)] = alphabet[pick(rng)];
        break;
      case 1:  // insert
        if (static_cast<int>(g.size()) < max_len)
          g.insert(g.begin() + pos(rng), alphabet[pick(rng)]);
        else
          g[pos(rng)] = alphabet[pick(rng)];
        break;
      default:  // delete
        if (g.size() > 1)
          g.erase(g.begin() + pos(rng));
        else
          g[0] = alphabet[pick(rng)];
        break;
    }
    if (ctx->mode == ContextMode::memory)
      for (auto& gl : g) gl.context = GateLabel::kFloating;  // repair
    g = normalize_germ(g, *ctx);
    return out;
  }

  std::vector<std::vector<GateLabel>> crossover(const std::vector<std::vector<GateLabel>>& a,
                                                const std::vector<std::vector<GateLabel>>& b,
                                                std::mt19937_64& rng) const {
    int c = 1;
    if (a.size() > 1) {
      std::uniform_int_distribution<int> cut(1, static_cast<int>(a.size()) - 1);
      c = cut(rng);
    }
    std::vector<std::vector<GateLabel>> child(a.begin(), a.begin() + std::min<size_t>(c, a.size()));
    if (static_cast<size_t>(c) < b.size())
      child.insert(child.end(), b.begin() + c, b.end());
    return child;
  }
};

}  // namespace

GermSet select_germs(const GateSet& gs_perfect,
                     const std::vector<std::vector<GateLabel>>& preps,
                     const std::vector<std::vector<GateLabel>>& meass,
                     const DesignConfig& cfg, const ContextSpec& ctx) {
  GermSpace space;
  space.ctx = &ctx;
  space.count = cfg.germ_count;
  space.max_len = cfg.max_initial_germ_len;
  if (cfg.germ_alphabet.empty()) {
    if (ctx.mode == ContextMode::memory) {
      // Germs are base-gate strings; contexts are forced structurally.
      std::set<std::string> bases;
      for (const auto& g : ctx.alphabet) bases.insert(g.base);
      for (const auto& b : bases) space.alphabet.emplace_back(b, GateLabel::kFloating);
    } else {
      space.alphabet = ctx.alphabet;
    }
  } else {
    for (const auto& s : cfg.germ_alphabet) {
      GateLabel g = parse_label(s);
      if (ctx.mode == ContextMode::memory) g.context = GateLabel::kFloating;
      space.alphabet.push_back(g);
    }
  }

  auto fitness = [&](const std::vector<std::vector<GateLabel>>& cand) {
    auto b = build_B(gs_perfect, preps, meass, cand, cfg.max_l, ctx, cfg.repetition);
    return germ_fitness(b);
  };

  auto res = ga_run(fitness, space, cfg.ga);
  GermSet out;
  out.germs = res.best;
  out.fitness = res.fitness;
  out.feasible = res.fitness > 0.0;
  out.generations = res.generations;
  return out;
}

}  // namespace cagst
