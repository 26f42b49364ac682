#include <doctest.h>

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "locmbt/conformance.hpp"
#include "locmbt/learner.hpp"
#include "locmbt/mealy_io.hpp"

using namespace locmbt;
using fixtures::m_demo;
using fixtures::sample;
using fixtures::sample_set;

namespace {

bool consistent(const MealyMachine& m, const SampleSet& set) {
  for (const auto& s : set.samples())
    if (!sample_conforms(m, s).conforms) return false;
  return true;
}

// Every quotient of `tree` by a set partition of its states that is still a
// deterministic machine. Exhaustive, so only for tiny trees.
std::vector<MealyMachine> deterministic_quotients(const MealyMachine& tree) {
  const std::size_t n = tree.state_count();
  std::vector<MealyMachine> found;
  std::vector<StateId> block(n, 0);
  std::function<void(std::size_t, StateId)> assign = [&](std::size_t i, StateId blocks) {
    if (i == n) {
      std::map<std::pair<StateId, SymbolId>, Transition> table;
      for (const auto& t : tree.transitions()) {
        const Transition image{block[t.to], t.output};
        auto [it, fresh] = table.try_emplace({block[t.from], t.input}, image);
        if (!fresh && !(it->second == image)) return;
      }
      std::vector<TransitionSpec> specs;
      for (const auto& [k, t] : table) specs.push_back({k.first, k.second, t.target, t.output});
      found.emplace_back(tree.inputs(), tree.outputs(), blocks, specs);
      return;
    }
    for (StateId b = 0; b <= blocks && b < n; ++b) {
      block[i] = b;
      assign(i + 1, std::max<StateId>(blocks, b + 1));
    }
  };
  block[0] = 0;
  assign(1, 1);
  return found;
}

}  // namespace

TEST_CASE("prefix tree of the reduced sample") {
  const auto set = sample_set({sample({{"N", "a"}, {"E", "b"}, {"N", "a"}})});
  const auto tree = build_prefix_tree(set);
  CHECK(tree.state_count() == 4);
  CHECK(tree.transition_count() == 3);
  CHECK(consistent(tree, set));
}

TEST_CASE("prefix tree shares common prefixes") {
  const auto tree = build_prefix_tree(sample_set({sample({{"N", "a"}}), sample({{"N", "a"}, {"E", "b"}})}));
  CHECK(tree.state_count() == 3);
  CHECK(tree.transition_count() == 2);
}

TEST_CASE("prefix tree states follow length-lex order of their prefixes") {
  const auto tree =
      build_prefix_tree(sample_set({sample({{"S", "a"}, {"N", "a"}}), sample({{"E", "b"}}), sample({{"N", "a"}})}));
  // ε, N, E, S, SN
  const auto& in = tree.inputs();
  CHECK(tree.at(0, in.index_of("N"))->target == 1);
  CHECK(tree.at(0, in.index_of("E"))->target == 2);
  CHECK(tree.at(0, in.index_of("S"))->target == 3);
  CHECK(tree.at(3, in.index_of("N"))->target == 4);
}

TEST_CASE("prefix tree reports output conflicts") {
  const auto set = sample_set({sample({{"N", "a"}}), sample({{"N", "b"}})});
  try {
    build_prefix_tree(set);
    FAIL("expected a conflict");
  } catch (const OutputConflict& e) {
    CHECK(e.prefix().empty());
    CHECK(set.inputs().label(e.input()) == "N");
    CHECK(e.first_output() != e.second_output());
    CHECK(e.first_sample() == 0);
    CHECK(e.second_sample() == 1);
    CHECK(e.code() == ErrorCode::data);
  }
  CHECK_THROWS_AS(learn(set), OutputConflict);
}

TEST_CASE("merge_fold") {
  SUBCASE("compatible self-loop") {
    const auto tree = build_prefix_tree(sample_set({sample({{"N", "a"}, {"N", "a"}})}));
    const auto merged = merge_fold(tree, 0, 1);
    REQUIRE(merged);
    const auto m = reachable_part(*merged);
    CHECK(m.state_count() == 1);
    CHECK(m.transition_count() == 1);
    CHECK(m.at(0, m.inputs().index_of("N"))->target == 0);
  }
  SUBCASE("conflicting outputs") {
    const auto tree = build_prefix_tree(sample_set({sample({{"N", "a"}, {"N", "b"}})}));
    CHECK_FALSE(merge_fold(tree, 0, 1));
  }
  SUBCASE("conflict discovered deeper in the fold") {
    // ε -N/a-> N -N/a-> NN -E/a->, and ε -E/b->: identifying N with ε folds
    // NN onto N and then E/a onto E/b.
    const auto tree = build_prefix_tree(
        sample_set({sample({{"N", "a"}, {"N", "a"}, {"E", "a"}}), sample({{"E", "b"}})}));
    CHECK_FALSE(merge_fold(tree, 0, 1));
  }
}

TEST_CASE("learning the single reduced sample") {
  const auto set = sample_set({sample({{"N", "a"}, {"E", "b"}, {"N", "a"}})});
  const auto tree = build_prefix_tree(set);
  const auto m = learn(set);
  CHECK(m.state_count() <= 3);
  CHECK(consistent(m, set));

  // The learned machine must be one of the smallest deterministic quotients.
  const auto quotients = deterministic_quotients(tree);
  std::size_t smallest = tree.state_count();
  for (const auto& q : quotients) smallest = std::min(smallest, reachable_part(q).state_count());
  bool among_minimal = false;
  for (const auto& q : quotients)
    if (reachable_part(q).state_count() == smallest && isomorphic(q, m)) among_minimal = true;
  CHECK(among_minimal);
  CHECK(m.state_count() == smallest);
}

TEST_CASE("learning a single length-1 sample") {
  const auto m = learn(sample_set({sample({{"N", "a"}})}));
  CHECK(m.state_count() == 1);
  CHECK(m.transition_count() == 1);
  const auto& t = m.at(0, m.inputs().index_of("N"));
  REQUIRE(t);
  CHECK(t->target == 0);
  CHECK(m.outputs().label(t->output) == "a");
}

TEST_CASE("exhaustive walks of the demo machine collapse its compatible states") {
  // States 0 and 2 agree on every input both define (E/b and S/a, with equal
  // successors), so output-only merging folds them together no matter how
  // deep the walk goes.
  const auto demo = m_demo();
  for (std::size_t depth : {4, 6}) {
    const auto set = fixtures::all_words(demo, depth);
    const auto m = learn(set);
    CHECK(consistent(m, set));
    CHECK_FALSE(isomorphic(m, demo));
    CHECK(m.state_count() == 2);
  }
  CHECK_FALSE(fixtures::pairwise_separated(demo));
}

TEST_CASE("exhaustive walks recover a separated variant of the demo machine") {
  // Same shape with (2,E) emitting a, which separates states 0 and 2.
  auto specs = m_demo().transitions();
  for (auto& t : specs)
    if (t.from == 2 && t.input == 1) t.output = 0;
  const MealyMachine target(fixtures::compass_inputs(), fixtures::ab_outputs(), 3, specs);
  REQUIRE(fixtures::pairwise_separated(target));
  CHECK(isomorphic(learn(fixtures::all_words(target, 4)), target));
}

TEST_CASE("splitting samples") {
  auto make = [](std::size_t n) {
    SampleSet set(fixtures::compass_inputs(), fixtures::ab_outputs());
    for (std::size_t i = 0; i < n; ++i) {
      Sample s;
      for (std::size_t j = 0; j <= i; ++j) s.observations.push_back({0, 0});
      set.add(s);
    }
    return set;
  };
  const auto eight = split_samples(make(8), 7);
  CHECK(eight.learning.size() == 5);
  CHECK(eight.validation.size() == 3);

  const auto three = split_samples(make(3), 7);
  CHECK(three.learning.size() == 2);
  CHECK(three.validation.size() == 1);

  const auto again = split_samples(make(8), 7);
  CHECK(again.learning_indices == eight.learning_indices);
  CHECK(again.validation_indices == eight.validation_indices);

  std::vector<std::size_t> all = eight.learning_indices;
  all.insert(all.end(), eight.validation_indices.begin(), eight.validation_indices.end());
  std::sort(all.begin(), all.end());
  CHECK(all == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7});

  const auto two = split_samples(make(2), 1, SplitRatio{9, 1});
  CHECK(two.learning.size() == 1);
  CHECK(two.validation.size() == 1);

  CHECK_THROWS(split_samples(make(1), 7));
  CHECK_THROWS(split_samples(make(4), 7, SplitRatio{0, 0}));
}

// Properties.

TEST_CASE("learned machines are consistent, no larger than the tree, and deterministic") {
  std::mt19937_64 rng(21);
  int learned = 0;
  for (int seed = 0; seed < 300; ++seed) {
    const auto target = fixtures::random_machine(rng, 1 + rng() % 6, 1 + rng() % 4, 2, 0.8);
    SampleSet set(target.inputs(), target.outputs());
    for (int k = 0; k < 1 + static_cast<int>(rng() % 6); ++k) {
      Sample s;
      StateId q = 0;
      const std::size_t len = 1 + rng() % 8;
      for (std::size_t i = 0; i < len; ++i) {
        const SymbolId a = static_cast<SymbolId>(rng() % target.inputs().size());
        const auto& t = target.at(q, a);
        if (!t) break;
        s.observations.push_back({a, t->output});
        q = t->target;
      }
      if (s.size() > 0) set.add(s);
    }
    if (set.empty()) continue;
    ++learned;
    const auto m = learn(set);
    CHECK(consistent(m, set));
    CHECK(m.state_count() <= build_prefix_tree(set).state_count());
    CHECK(m.inputs() == set.inputs());
    CHECK(m.outputs() == set.outputs());
    CHECK(machine_to_json(learn(set)) == machine_to_json(m));
    CHECK(validate(m, set).accuracy == 1.0);
  }
  CHECK(learned > 200);
}

TEST_CASE("rich enough samples identify separated targets") {
  std::mt19937_64 rng(22);
  int checked = 0;
  while (checked < 100) {
    const std::size_t n = 1 + rng() % 8;
    const auto target = fixtures::random_machine(rng, n, 1 + rng() % 4, 2, 0.6);
    if (reachable_states(target).size() != n || !fixtures::pairwise_separated(target)) continue;
    const auto set = fixtures::all_words(target, n + 3);
    if (set.empty()) continue;
    ++checked;
    CHECK(isomorphic(learn(set), target));
  }
}
