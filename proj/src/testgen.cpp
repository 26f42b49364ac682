#include "locmbt/testgen.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "locmbt/error.hpp"

namespace locmbt {

namespace {

bool is_proper_prefix(const InputWord& a, const InputWord& b) {
  return a.size() < b.size() && std::equal(a.begin(), a.end(), b.begin());
}

// cos/sin of axis headings leave ~1e-17 residue; snap it so axis-aligned legs
// produce exact coordinates.
double unit_component(double v) { return std::abs(v) < 1e-15 ? 0.0 : v; }

void finish(TestSuite& suite, const MealyMachine& machine, const SuiteOptions& options) {
  if (options.prefix_elimination) suite.sequences = eliminate_prefixes(std::move(suite.sequences));
  if (options.ordering) std::stable_sort(suite.sequences.begin(), suite.sequences.end(), options.ordering);

  const auto verdict = check_suite(machine, suite);
  const auto listing = defined_transitions(machine);
  suite.coverage.covered_states = verdict.covered_states.size();
  suite.coverage.total_states = verdict.covered_states.size() + verdict.uncovered_states.size();
  suite.coverage.covered_transitions = verdict.covered_transitions.size();
  suite.coverage.total_transitions = listing.reachable.size();
  suite.coverage.unreachable_transitions = listing.unreachable;
  for (StateId s = static_cast<StateId>(suite.coverage.total_states); s < machine.state_count(); ++s) {
    suite.coverage.unreachable_states.push_back(s);
  }
  if (!verdict.valid || !verdict.full) {
    throw InternalError(fmt::format("generated {} suite does not reach full coverage",
                                    coverage_name(suite.kind)));
  }
}

}  // namespace

std::string_view coverage_name(CoverageKind kind) {
  return kind == CoverageKind::state ? "state-coverage" : "transition-coverage";
}

CoverageKind parse_coverage_kind(std::string_view name) {
  if (name == "state-coverage" || name == "sc" || name == "state") return CoverageKind::state;
  if (name == "transition-coverage" || name == "tc" || name == "transition") return CoverageKind::transition;
  throw UsageError(fmt::format("unknown coverage kind '{}'", name));
}

std::vector<InputWord> eliminate_prefixes(std::vector<InputWord> words) {
  std::vector<InputWord> unique;
  for (auto& w : words) {
    if (std::find(unique.begin(), unique.end(), w) == unique.end()) unique.push_back(std::move(w));
  }
  std::vector<InputWord> kept;
  for (const auto& w : unique) {
    const bool dominated = std::any_of(unique.begin(), unique.end(),
                                       [&](const InputWord& other) { return is_proper_prefix(w, other); });
    if (!dominated) kept.push_back(w);
  }
  return kept;
}

TestSuite state_coverage(const MealyMachine& machine, const SuiteOptions& options) {
  TestSuite suite;
  suite.kind = CoverageKind::state;
  const auto access = access_sequences(machine);
  const auto reachable = reachable_states(machine);
  for (StateId s : reachable) {
    if (s != machine.initial()) suite.sequences.push_back(*access[s]);
  }
  if (reachable.size() == 1) {
    for (SymbolId a = 0; a < machine.inputs().size(); ++a) {
      if (machine.at(machine.initial(), a)) {
        suite.sequences.push_back({a});
        break;
      }
    }
  }
  finish(suite, machine, options);
  return suite;
}

TestSuite transition_coverage(const MealyMachine& machine, const SuiteOptions& options) {
  TestSuite suite;
  suite.kind = CoverageKind::transition;
  const auto access = access_sequences(machine);
  for (const auto& key : defined_transitions(machine).reachable) {
    auto word = *access[key.state];
    word.push_back(key.input);
    suite.sequences.push_back(std::move(word));
  }
  finish(suite, machine, options);
  return suite;
}

SuiteVerdict check_suite(const MealyMachine& machine, const TestSuite& suite) {
  SuiteVerdict verdict;
  const auto reachable = reachable_states(machine);
  const auto targets = defined_transitions(machine).reachable;

  std::vector<bool> state_seen(machine.state_count(), false);
  state_seen[machine.initial()] = true;
  std::vector<TransitionKey> traversed;
  for (std::size_t i = 0; i < suite.sequences.size(); ++i) {
    const auto result = run(machine, suite.sequences[i]);
    for (StateId s : result.visited) state_seen[s] = true;
    traversed.insert(traversed.end(), result.traversed.begin(), result.traversed.end());
    if (!result.ok() && verdict.valid) {
      verdict.valid = false;
      verdict.invalid_sequence = i;
      verdict.undefined = result.undefined;
    }
  }
  std::sort(traversed.begin(), traversed.end());
  traversed.erase(std::unique(traversed.begin(), traversed.end()), traversed.end());

  for (StateId s : reachable) (state_seen[s] ? verdict.covered_states : verdict.uncovered_states).push_back(s);
  for (const auto& t : targets) {
    const bool hit = std::binary_search(traversed.begin(), traversed.end(), t);
    (hit ? verdict.covered_transitions : verdict.uncovered_transitions).push_back(t);
  }
  const bool targets_met = suite.kind == CoverageKind::state ? verdict.uncovered_states.empty()
                                                              : verdict.uncovered_transitions.empty();
  verdict.full = verdict.valid && targets_met;
  return verdict;
}

nlohmann::json suite_to_json(const TestSuite& suite, const Alphabet& inputs) {
  nlohmann::json sequences = nlohmann::json::array();
  for (const auto& w : suite.sequences) sequences.push_back(labels_of(inputs, w));
  return {{"kind", coverage_name(suite.kind)},
          {"sequences", std::move(sequences)},
          {"coverage",
           {{"states", {{"covered", suite.coverage.covered_states}, {"total", suite.coverage.total_states}}},
            {"transitions",
             {{"covered", suite.coverage.covered_transitions},
              {"total", suite.coverage.total_transitions}}}}}};
}

TestSuite suite_from_json(const nlohmann::json& doc, const Alphabet& inputs) {
  try {
    TestSuite suite;
    suite.kind = parse_coverage_kind(doc.at("kind").get<std::string>());
    for (const auto& seq : doc.at("sequences")) {
      const auto labels = seq.get<std::vector<std::string>>();
      if (labels.empty()) throw DataError("test sequences must not be empty");
      suite.sequences.push_back(ids_of(inputs, labels));
    }
    if (doc.contains("coverage")) {
      const auto& c = doc.at("coverage");
      suite.coverage.covered_states = c.at("states").at("covered").get<std::size_t>();
      suite.coverage.total_states = c.at("states").at("total").get<std::size_t>();
      suite.coverage.covered_transitions = c.at("transitions").at("covered").get<std::size_t>();
      suite.coverage.total_transitions = c.at("transitions").at("total").get<std::size_t>();
    }
    return suite;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("malformed test suite JSON: {}", e.what()));
  } catch (const UsageError& e) {
    throw DataError(fmt::format("invalid test suite JSON: {}", e.what()));
  }
}

Trajectory map_to_trajectory(std::span<const std::string> labels, const SectorSpec& sectors,
                             const MappingOptions& options) {
  if (!(options.step_length > 0.0)) throw UsageError("step length must be positive");
  Trajectory traj;
  traj.origin = options.origin;
  traj.step_length = options.step_length;
  Point at = options.origin;
  for (std::size_t leg = 0; leg < labels.size(); ++leg) {
    const auto it = std::find(sectors.labels.begin(), sectors.labels.end(), labels[leg]);
    if (it == sectors.labels.end()) {
      throw UsageError(fmt::format("'{}' is not a sector label", labels[leg]));
    }
    const double heading = sectors.center(static_cast<std::size_t>(it - sectors.labels.begin()));
    at = Point{at.x + options.step_length * unit_component(std::cos(heading)),
               at.y + options.step_length * unit_component(std::sin(heading))};
    traj.waypoints.push_back(at);
    traj.headings.push_back(heading);
    if (options.bounds && !options.bounds->contains(at)) {
      auto message = fmt::format("leg {} ('{}') ends at ({}, {}) outside the bounds", leg + 1, labels[leg],
                                 at.x, at.y);
      if (options.strict) throw DataError(message);
      traj.warnings.push_back(std::move(message));
    }
  }
  return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  out << "leg,x,y,heading\n";
  for (std::size_t i = 0; i < trajectory.waypoints.size(); ++i) {
    out << fmt::format("{},{},{},{}\n", i + 1, trajectory.waypoints[i].x, trajectory.waypoints[i].y,
                       trajectory.headings[i]);
  }
}

}  // namespace locmbt
