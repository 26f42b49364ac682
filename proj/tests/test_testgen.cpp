#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "fixtures.hpp"
#include "locmbt/error.hpp"
#include "locmbt/testgen.hpp"

using namespace locmbt;
using fixtures::m_demo;
using std::numbers::pi;

namespace {

using Words = std::set<std::vector<std::string>>;

Words as_set(const MealyMachine& m, const std::vector<InputWord>& words) {
  Words out;
  for (const auto& w : words) out.insert(labels_of(m.inputs(), w));
  return out;
}

TestSuite suite_of(const MealyMachine& m, CoverageKind kind, const Words& words) {
  TestSuite s;
  s.kind = kind;
  for (const auto& w : words) s.sequences.push_back(ids_of(m.inputs(), w));
  return s;
}

MealyMachine loops(std::initializer_list<const char*> inputs) {
  std::vector<TransitionSpec> t;
  for (const char* in : inputs) t.push_back({0, fixtures::compass_inputs().index_of(in), 0, 0});
  return MealyMachine(fixtures::compass_inputs(), fixtures::ab_outputs(), 1, t);
}

// Independent bookkeeping: walk each word by hand.
std::set<TransitionKey> walked(const MealyMachine& m, const std::vector<InputWord>& words) {
  std::set<TransitionKey> seen;
  for (const auto& w : words) {
    StateId q = 0;
    for (auto a : w) {
      const auto& t = m.at(q, a);
      REQUIRE(t);
      seen.insert({q, a});
      q = t->target;
    }
  }
  return seen;
}

}  // namespace

TEST_CASE("state coverage of the demo machine") {
  const auto m = m_demo();
  const auto suite = state_coverage(m);
  CHECK(as_set(m, suite.sequences) == Words{{"E"}, {"S"}});
  CHECK(suite.coverage.covered_states == 3);
  CHECK(suite.coverage.total_states == 3);
  CHECK(check_suite(m, suite).full);
}

TEST_CASE("a hand-written state coverage set with a redundant word is valid") {
  const auto m = m_demo();
  const auto verdict = check_suite(m, suite_of(m, CoverageKind::state, {{"N"}, {"S"}, {"S", "E"}}));
  CHECK(verdict.valid);
  CHECK(verdict.full);
}

TEST_CASE("state coverage corner cases") {
  const auto single = state_coverage(loops({"E"}));
  CHECK(as_set(loops({"E"}), single.sequences) == Words{{"E"}});

  // Chain 0 -N-> 1 -N-> 2 -N-> 3.
  std::vector<TransitionSpec> chain{{0, 0, 1, 0}, {1, 0, 2, 0}, {2, 0, 3, 1}};
  const MealyMachine c(fixtures::compass_inputs(), fixtures::ab_outputs(), 4, chain);
  CHECK(state_coverage(c).sequences.size() == 3);
  const auto eliminated = state_coverage(c, {true, {}});
  CHECK(as_set(c, eliminated.sequences) == Words{{"N", "N", "N"}});

  MealyMachine bare(fixtures::compass_inputs(), fixtures::ab_outputs(), 1, {});
  CHECK(state_coverage(bare).sequences.empty());
}

TEST_CASE("transition coverage of the demo machine") {
  const auto m = m_demo();
  const auto suite = transition_coverage(m);
  CHECK(as_set(m, suite.sequences) == Words{{"N"}, {"E", "N"}, {"E", "E"}, {"E", "S"}, {"S", "S"}, {"S", "E"}});
  CHECK(suite.coverage.covered_transitions == 8);
  CHECK(suite.coverage.total_transitions == 8);

  const auto verdict = check_suite(m, suite);
  CHECK(verdict.full);
  CHECK(verdict.covered_transitions.size() == 8);

  const auto plain = transition_coverage(m, {false, {}});
  CHECK(plain.sequences.size() == 8);
}

TEST_CASE("transition coverage of self-loops") {
  const auto m = loops({"N", "E"});
  CHECK(as_set(m, transition_coverage(m).sequences) == Words{{"N"}, {"E"}});
}

TEST_CASE("checking suites") {
  const auto m = m_demo();
  const auto only_n = check_suite(m, suite_of(m, CoverageKind::state, {{"N"}}));
  CHECK(only_n.valid);
  CHECK_FALSE(only_n.full);
  CHECK(only_n.uncovered_states == std::vector<StateId>{1, 2});

  const auto broken = check_suite(m, suite_of(m, CoverageKind::transition, {{"E"}, {"S", "W"}}));
  CHECK_FALSE(broken.valid);
  CHECK_FALSE(broken.full);
  CHECK(broken.invalid_sequence == 1);
  CHECK(broken.undefined->position == 1);

  const auto reference =
      suite_of(m, CoverageKind::transition, {{"N"}, {"E", "N"}, {"E", "E"}, {"E", "S"}, {"S", "S"}, {"S", "E"}});
  CHECK(check_suite(m, reference).full);
}

TEST_CASE("prefix elimination") {
  const std::vector<InputWord> words{{1}, {1, 2}, {0}, {1, 2}, {2}, {2, 2, 0}};
  CHECK(eliminate_prefixes(words) == std::vector<InputWord>{{1, 2}, {0}, {2, 2, 0}});
}

TEST_CASE("an ordering hook reorders the final suite") {
  const auto m = m_demo();
  SuiteOptions longest_first{true, [](const InputWord& a, const InputWord& b) { return a.size() > b.size(); }};
  const auto s = transition_coverage(m, longest_first);
  CHECK(s.sequences.front().size() == 2);
  CHECK(s.sequences.back().size() == 1);
}

TEST_CASE("suite JSON round trip") {
  const auto m = m_demo();
  const auto suite = transition_coverage(m);
  const auto doc = suite_to_json(suite, m.inputs());
  CHECK(doc.at("kind") == "transition-coverage");
  CHECK(doc.at("coverage").at("transitions").at("total") == 8);
  const auto back = suite_from_json(doc, m.inputs());
  CHECK(back.sequences == suite.sequences);
  CHECK(back.kind == suite.kind);

  auto bad = doc;
  bad["sequences"][0] = nlohmann::json::array({"Q"});
  CHECK_THROWS(suite_from_json(bad, m.inputs()));
}

TEST_CASE("mapping words to trajectories") {
  const auto sectors = SectorSpec::compass(4);
  const std::vector<std::string> se{"S", "E"};
  const auto t = map_to_trajectory(se, sectors, {{0, 0}, 1.0, std::nullopt, false});
  REQUIRE(t.waypoints.size() == 2);
  CHECK(t.waypoints[0] == Point{0, -1});
  CHECK(t.waypoints[1] == Point{1, -1});
  CHECK(sectors.labels[sectors.sector_of(t.headings[0])] == "S");
  CHECK(sectors.labels[sectors.sector_of(t.headings[1])] == "E");

  const std::vector<std::string> n{"N"};
  CHECK(map_to_trajectory(n, sectors, {}).waypoints == std::vector<Point>{{0, 1}});

  const std::vector<std::string> e{"E"};
  const Rect bed{0, 0, 8, 10};
  const auto out = map_to_trajectory(e, sectors, {{7.5, 0}, 1.0, bed, false});
  CHECK(out.waypoints[0] == Point{8.5, 0});
  CHECK(out.warnings.size() == 1);
  CHECK_THROWS_AS(map_to_trajectory(e, sectors, {{7.5, 0}, 1.0, bed, true}), DataError);

  const std::vector<std::string> bad{"Q"};
  CHECK_THROWS_AS(map_to_trajectory(bad, sectors, {}), UsageError);

  std::ostringstream csv;
  write_trajectory_csv(csv, t);
  CHECK(csv.str().rfind("leg,x,y,heading\n1,0,-1,", 0) == 0);
}

TEST_CASE("trajectory legs have the step length and re-discretize to their labels") {
  std::mt19937_64 rng(51);
  for (std::size_t k : {4, 6, 8, 5}) {
    const auto sectors = SectorSpec::compass(k);
    for (int i = 0; i < 100; ++i) {
      std::vector<std::string> labels(1 + rng() % 12);
      for (auto& l : labels) l = sectors.labels[rng() % k];
      const double step = 0.25 + (rng() % 100) / 25.0;
      const auto t = map_to_trajectory(labels, sectors, {{1.0, 2.0}, step, std::nullopt, false});
      Point prev{1.0, 2.0};
      for (std::size_t j = 0; j < labels.size(); ++j) {
        const double d = std::hypot(t.waypoints[j].x - prev.x, t.waypoints[j].y - prev.y);
        CHECK(std::fabs(d - step) < 1e-9);
        CHECK(sectors.labels[sectors.sector_of(t.headings[j])] == labels[j]);
        prev = t.waypoints[j];
      }
    }
  }
}

// Properties over random machines.

TEST_CASE("generated suites are runnable and fully covering") {
  std::mt19937_64 rng(52);
  for (int seed = 0; seed < 150; ++seed) {
    const auto m = fixtures::random_machine(rng, 1 + rng() % 20, 1 + rng() % 4, 2, 0.3 + (rng() % 60) / 100.0);
    const auto reach = reachable_states(m);
    const auto listing = defined_transitions(m);
    for (bool elim : {false, true}) {
      const auto sc = state_coverage(m, {elim, {}});
      const auto sv = check_suite(m, sc);
      CHECK(sv.valid);
      CHECK(sv.full);
      CHECK(sc.sequences.size() <= reach.size());
      if (listing.reachable.empty()) continue;
      const auto tc = transition_coverage(m, {elim, {}});
      const auto tv = check_suite(m, tc);
      CHECK(tv.valid);
      CHECK(tv.full);
      CHECK(tc.sequences.size() <= listing.reachable.size());
      const auto seen = walked(m, tc.sequences);
      CHECK(std::vector<TransitionKey>(seen.begin(), seen.end()) ==
            [&] {
              auto v = listing.reachable;
              std::sort(v.begin(), v.end());
              return v;
            }());
      for (const auto& w : tc.sequences) CHECK_FALSE(w.empty());
    }
  }
}

TEST_CASE("adding a transition never shrinks the transition suite") {
  std::mt19937_64 rng(53);
  for (int seed = 0; seed < 300; ++seed) {
    const std::size_t n = 1 + rng() % 10;
    const std::size_t k = 1 + rng() % 4;
    auto m = fixtures::random_machine(rng, n, k, 2, 0.4);
    auto specs = m.transitions();
    std::vector<std::pair<StateId, SymbolId>> free;
    for (StateId q = 0; q < n; ++q)
      for (SymbolId a = 0; a < k; ++a)
        if (!m.at(q, a)) free.emplace_back(q, a);
    if (free.empty()) continue;
    const auto [q, a] = free[rng() % free.size()];
    specs.push_back({q, a, static_cast<StateId>(rng() % n), static_cast<SymbolId>(rng() % 2)});
    const MealyMachine bigger(m.inputs(), m.outputs(), n, specs);
    const auto before = defined_transitions(m).reachable.empty() ? 0 : transition_coverage(m).sequences.size();
    CHECK(transition_coverage(bigger).sequences.size() >= before);
  }
}
