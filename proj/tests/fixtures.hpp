#pragma once

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "locmbt/mealy.hpp"

namespace fixtures {

using namespace locmbt;

inline Alphabet compass_inputs() { return Alphabet(AlphabetKind::input, {"N", "E", "S", "W"}); }
inline Alphabet ab_outputs() { return Alphabet(AlphabetKind::output, {"a", "b"}); }

// Three-state demo machine; W is never defined.
inline MealyMachine m_demo() {
  enum : SymbolId { N, E, S };
  enum : SymbolId { a, b };
  const std::vector<TransitionSpec> t{
      {0, N, 0, a}, {0, E, 1, b}, {0, S, 2, a}, {1, N, 0, a},
      {1, E, 1, b}, {1, S, 2, b}, {2, S, 2, a}, {2, E, 1, b},
  };
  return MealyMachine(compass_inputs(), ab_outputs(), 3, t);
}

inline std::vector<SymbolId> word(const Alphabet& alphabet, std::initializer_list<const char*> labels) {
  std::vector<SymbolId> out;
  for (const char* l : labels) out.push_back(alphabet.index_of(l));
  return out;
}

inline Sample sample(const MealyMachine& m, std::initializer_list<std::pair<const char*, const char*>> obs) {
  Sample s;
  for (auto [i, o] : obs) s.observations.push_back({m.inputs().index_of(i), m.outputs().index_of(o)});
  return s;
}

inline Sample sample(std::initializer_list<std::pair<const char*, const char*>> obs) {
  return sample(m_demo(), obs);
}

inline SampleSet sample_set(std::initializer_list<Sample> samples) {
  SampleSet set(compass_inputs(), ab_outputs());
  for (const auto& s : samples) set.add(s);
  return set;
}

inline Alphabet numbered(AlphabetKind kind, std::size_t n, const char* prefix) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(prefix + std::to_string(i));
  return Alphabet(kind, labels);
}

// Random partial machine; every (state, input) is defined with probability
// `density`. Reachability is not enforced.
inline MealyMachine random_machine(std::mt19937_64& rng, std::size_t states, std::size_t inputs,
                                   std::size_t outputs, double density) {
  std::uniform_int_distribution<std::size_t> pick_state(0, states - 1);
  std::uniform_int_distribution<std::size_t> pick_output(0, outputs - 1);
  std::bernoulli_distribution defined(density);
  std::vector<TransitionSpec> t;
  for (StateId q = 0; q < states; ++q)
    for (SymbolId a = 0; a < inputs; ++a)
      if (defined(rng))
        t.push_back({q, a, static_cast<StateId>(pick_state(rng)), static_cast<SymbolId>(pick_output(rng))});
  return MealyMachine(numbered(AlphabetKind::input, inputs, "i"), numbered(AlphabetKind::output, outputs, "o"),
                      states, t);
}

// Two states are separated when some word defined from both yields different
// outputs. Computed as the greatest fixpoint of "not yet separated".
inline bool pairwise_separated(const MealyMachine& m) {
  const std::size_t n = m.state_count();
  std::vector<std::vector<bool>> sep(n, std::vector<bool>(n, false));
  bool changed = true;
  while (changed) {
    changed = false;
    for (StateId p = 0; p < n; ++p)
      for (StateId q = p + 1; q < n; ++q) {
        if (sep[p][q]) continue;
        for (SymbolId a = 0; a < m.inputs().size(); ++a) {
          const auto& tp = m.at(p, a);
          const auto& tq = m.at(q, a);
          if (!tp || !tq) continue;
          if (tp->output != tq->output || sep[std::min(tp->target, tq->target)][std::max(tp->target, tq->target)]) {
            sep[p][q] = true;
            changed = true;
            break;
          }
        }
      }
  }
  for (StateId p = 0; p < n; ++p)
    for (StateId q = p + 1; q < n; ++q)
      if (!sep[p][q]) return false;
  return true;
}

// All defined input words of length 1..depth with their outputs, one sample
// per word.
inline SampleSet all_words(const MealyMachine& m, std::size_t depth) {
  SampleSet set(m.inputs(), m.outputs());
  struct Frame {
    StateId state;
    Sample prefix;
  };
  std::vector<Frame> layer{{0, {}}};
  for (std::size_t d = 0; d < depth; ++d) {
    std::vector<Frame> next;
    for (const auto& f : layer)
      for (SymbolId a = 0; a < m.inputs().size(); ++a)
        if (const auto& t = m.at(f.state, a)) {
          Frame g{t->target, f.prefix};
          g.prefix.observations.push_back({a, t->output});
          set.add(g.prefix);
          next.push_back(std::move(g));
        }
    layer = std::move(next);
  }
  return set;
}

}  // namespace fixtures
