#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "locmbt/dataprep.hpp"
#include "locmbt/mealy.hpp"

namespace locmbt {

using InputWord = std::vector<SymbolId>;

enum class CoverageKind { state, transition };

std::string_view coverage_name(CoverageKind kind);
CoverageKind parse_coverage_kind(std::string_view name);

struct CoverageReport {
  std::size_t covered_states = 0;
  std::size_t total_states = 0;
  std::size_t covered_transitions = 0;
  std::size_t total_transitions = 0;
  std::vector<StateId> unreachable_states;
  std::vector<TransitionKey> unreachable_transitions;
};

struct TestSuite {
  CoverageKind kind = CoverageKind::state;
  std::vector<InputWord> sequences;
  CoverageReport coverage;
};

struct SuiteOptions {
  bool prefix_elimination = false;
  // Optional reordering of the final sequences, e.g. to run critical
  // input/output combinations first. Generation order is kept when empty.
  std::function<bool(const InputWord&, const InputWord&)> ordering;

  static SuiteOptions for_states() { return {false, {}}; }
  static SuiteOptions for_transitions() { return {true, {}}; }
};

// One shortest access word per reachable non-initial state.
TestSuite state_coverage(const MealyMachine& machine, const SuiteOptions& options = SuiteOptions::for_states());

// access(q)·a for every reachable defined transition (q, a).
TestSuite transition_coverage(const MealyMachine& machine,
                              const SuiteOptions& options = SuiteOptions::for_transitions());

// Drops duplicates and words that are proper prefixes of other words; keeps
// the first-occurrence order of the survivors.
std::vector<InputWord> eliminate_prefixes(std::vector<InputWord> words);

struct SuiteVerdict {
  bool valid = true;  // every sequence runnable
  bool full = false;  // all kind-specific targets covered
  std::vector<StateId> covered_states;
  std::vector<StateId> uncovered_states;
  std::vector<TransitionKey> covered_transitions;
  std::vector<TransitionKey> uncovered_transitions;
  std::optional<std::size_t> invalid_sequence;
  std::optional<UndefinedStep> undefined;
};

// Replays every sequence and compares what was exercised against the
// reachable states or reachable defined transitions of the machine.
SuiteVerdict check_suite(const MealyMachine& machine, const TestSuite& suite);

nlohmann::json suite_to_json(const TestSuite& suite, const Alphabet& inputs);
TestSuite suite_from_json(const nlohmann::json& doc, const Alphabet& inputs);

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

struct Rect {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  bool contains(Point p) const { return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y; }
};

struct Trajectory {
  Point origin;
  std::vector<Point> waypoints;
  double step_length = 1.0;
  std::vector<double> headings;  // one per leg
  std::vector<std::string> warnings;
};

struct MappingOptions {
  Point origin;
  double step_length = 1.0;
  std::optional<Rect> bounds;
  bool strict = false;  // bounds violations throw instead of warning
};

// Each sector label becomes a straight leg of step_length along the sector's
// center direction.
Trajectory map_to_trajectory(std::span<const std::string> labels, const SectorSpec& sectors,
                             const MappingOptions& options);

// Header `leg,x,y,heading`, one waypoint per line, legs numbered from 1.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace locmbt
