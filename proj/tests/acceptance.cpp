// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.
#include <fmt/core.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "locmbt/conformance.hpp"
#include "locmbt/dataprep.hpp"
#include "locmbt/learner.hpp"
#include "locmbt/mealy_io.hpp"
#include "locmbt/pipeline.hpp"
#include "locmbt/rtls_sim.hpp"
#include "locmbt/testgen.hpp"

using namespace locmbt;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

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

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("locmbt_acceptance_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

PipelineConfig default_config(const fs::path& out, std::vector<std::string> extra = {}) {
  extra.push_back("paths.output=" + out.string());
  return load_config(fs::path(LOCMBT_CONFIG_DIR) / "default.ini", extra);
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = read_text(e.path());
  return files;
}

Outcome reduction_golden() {
  const auto got = reduce(fixtures::sample({{"N", "a"}, {"N", "a"}, {"N", "a"}, {"E", "b"}, {"E", "b"}, {"N", "a"}}),
                          {ReductionKind::merge_runs, 1});
  const auto want = fixtures::sample({{"N", "a"}, {"E", "b"}, {"N", "a"}});
  return {got == want, fmt::format("{} observations", got.size())};
}

Outcome tc_golden() {
  const auto m = fixtures::m_demo();
  const auto got = as_set(m, transition_coverage(m).sequences);
  const Words want{{"N"}, {"E", "N"}, {"E", "E"}, {"E", "S"}, {"S", "S"}, {"S", "E"}};
  return {got == want, fmt::format("{} sequences", got.size())};
}

Outcome sc_validity() {
  const auto m = fixtures::m_demo();
  const auto reference = check_suite(m, suite_of(m, CoverageKind::state, {{"N"}, {"S"}, {"S", "E"}}));
  const auto own_suite = state_coverage(m);
  const auto own = check_suite(m, own_suite);
  return {reference.valid && reference.full && own.valid && own.full,
          fmt::format("generated suite has {} sequences", own_suite.sequences.size())};
}

Outcome learner_recovery() {
  std::mt19937_64 rng(20210601);
  int checked = 0;
  int recovered = 0;
  int recovered_deeper = 0;
  while (checked < 200) {
    const std::size_t n = 1 + rng() % 8;
    const double density = 0.4 + 0.2 * static_cast<double>(rng() % 4);
    const auto target = fixtures::random_machine(rng, n, 1 + rng() % 4, 2, density);
    // Only minimal targets can be recovered up to isomorphism.
    if (reachable_states(target).size() != n || !fixtures::pairwise_separated(target)) continue;
    const auto set = fixtures::all_words(target, n + 1);
    if (set.empty()) continue;
    ++checked;
    if (isomorphic(learn(set), target)) {
      ++recovered;
      ++recovered_deeper;
    } else if (isomorphic(learn(fixtures::all_words(target, n + 3)), target)) {
      ++recovered_deeper;
    }
  }
  return {recovered == checked,
          fmt::format("{}/{} recovered from words up to |Q|+1; {}/{} with words up to |Q|+3", recovered, checked,
                      recovered_deeper, checked)};
}

Outcome coverage_invariants() {
  std::mt19937_64 rng(20210602);
  int checked = 0;
  int failed = 0;
  for (int i = 0; i < 200; ++i) {
    const auto m = fixtures::random_machine(rng, 1 + rng() % 20, 1 + rng() % 4, 2, 0.3 + (rng() % 60) / 100.0);
    ++checked;
    const auto sc = check_suite(m, state_coverage(m));
    bool ok = sc.valid && sc.full;
    if (!defined_transitions(m).reachable.empty()) {
      const auto tc = check_suite(m, transition_coverage(m));
      ok = ok && tc.valid && tc.full;
    }
    if (!ok) ++failed;
  }
  return {failed == 0, fmt::format("{}/{} machines fully covered", checked - failed, checked)};
}

Outcome oracle_end_to_end() {
  const auto dir = scratch("oracle");
  const auto demo = fixtures::m_demo();
  write_text(dir / "demo.json", machine_to_json(demo).dump(2));
  std::istringstream text(R"(
[simulator]
model = oracle
campaign = characteristic
[oracle]
machine = demo.json
magnitudes = a:0.02, b:0.30
base_sigma = 0
)");
  const auto config = parse_config(text, dir);
  cmd_simulate(config);
  const auto prepared = prepare_all(config, load_traces(config));
  const auto split = split_samples(prepared.samples, config.split_seed, config.ratio);
  const auto machine = learn(split.learning);
  const auto accuracy = validate(machine, split.validation).accuracy;
  const bool iso = isomorphic(machine, demo);
  fs::remove_all(dir);
  return {accuracy == 1.0 && iso,
          fmt::format("accuracy {}, {} states, {} transitions, isomorphic to the oracle machine: {}", accuracy,
                      machine.state_count(), machine.transitions().size(), iso ? "yes" : "no")};
}

bool in_thirds(double accuracy) {
  const double k = accuracy * 3.0;
  return std::fabs(k - std::round(k)) < 1e-9;
}

struct TrendCheck {
  bool ok = true;
  std::string rows;
};

TrendCheck trend(const PipelineConfig& config) {
  cmd_simulate(config);
  const auto rows = sweep(config, load_traces(config));
  TrendCheck out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (!r.learned) {
      out.ok = false;
      out.rows += fmt::format("K={}: {}; ", r.sectors, r.error);
      continue;
    }
    out.rows += fmt::format("K={}: accuracy {:.3f} tc {}; ", r.sectors, r.accuracy, r.tc);
    if (!in_thirds(r.accuracy)) out.ok = false;
    if (i > 0 && rows[i - 1].learned && (r.accuracy > rows[i - 1].accuracy || r.tc < rows[i - 1].tc)) out.ok = false;
  }
  if (!out.rows.empty()) out.rows.resize(out.rows.size() - 2);
  return out;
}

Outcome sweep_trend() {
  const auto dir = scratch("sweep");
  const auto config = default_config(dir);
  const auto prepared = prepare_all(config, [&] {
    cmd_simulate(config);
    return load_traces(config);
  }());
  const auto split = split_samples(prepared.samples, config.split_seed, config.ratio);
  const auto fixed = trend(config);

  // How often the trend holds for other campaign seeds.
  int held = 0;
  const int seeds = 10;
  for (int s = 1; s <= seeds; ++s)
    if (trend(default_config(dir, {"simulator.master_seed=" + std::to_string(s)})).ok) ++held;
  fs::remove_all(dir);

  const bool sizes = split.learning.size() == 5 && split.validation.size() == 3;
  return {fixed.ok && sizes, fmt::format("{}+{} samples; {}; trend holds for {}/{} other campaign seeds",
                                         split.learning.size(), split.validation.size(), fixed.rows, held, seeds)};
}

Outcome trajectory_mapping() {
  const auto sectors = SectorSpec::compass(4);
  const std::vector<std::string> word{"S", "E"};
  const auto t = map_to_trajectory(word, sectors, {{0, 0}, 1.0, std::nullopt, false});
  std::vector<std::string> back;
  for (double h : t.headings) back.push_back(sectors.labels[sectors.sector_of(h)]);
  const bool ok = t.waypoints == std::vector<Point>{{0, -1}, {1, -1}} && back == word;
  return {ok, fmt::format("waypoints ({},{}) ({},{})", t.waypoints[0].x, t.waypoints[0].y, t.waypoints[1].x,
                          t.waypoints[1].y)};
}

Outcome determinism() {
  std::vector<std::map<std::string, std::string>> rounds;
  for (const char* name : {"det_a", "det_b"}) {
    const auto dir = scratch(name);
    const auto config = default_config(dir);
    cmd_simulate(config);
    cmd_run(config);
    cmd_run(config);
    rounds.push_back(snapshot(dir));
    fs::remove_all(dir);
  }
  return {rounds[0] == rounds[1] && rounds[0].count("suite_tc.json") == 1,
          fmt::format("{} artifacts compared", rounds[0].size())};
}

Outcome reduction_scale() {
  // 2 m legs at 0.25 m/s and 20 Hz: 160 records per constant-heading leg.
  ErrorModel model;
  const auto path = generate_trajectory(Testbed{}, 63, 2.0, 20210603, HeadingMode::free);
  const auto trace = simulate_run(path, 0.25, 20.0, model);
  const FeatureSelection input{FeatureKind::orientation, SectorSpec::compass(4)};
  const FeatureSelection output{FeatureKind::euclidean_error, ThresholdSpec{{0.10}, {"a", "b"}}};
  const auto s = prepare(trace, input, output, {});
  return {trace.records.size() >= 10000 && s.size() < 100,
          fmt::format("{} records -> {} observations", trace.records.size(), s.size())};
}

struct Criterion {
  int id;
  std::string name;
  double budget_ms;
  std::function<Outcome()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "reduction golden", 1.0, reduction_golden},
      {2, "transition coverage golden", 1.0, tc_golden},
      {3, "state coverage validity", 1.0, sc_validity},
      {4, "learner recovery", 30e3, learner_recovery},
      {5, "coverage invariants", 30e3, coverage_invariants},
      {6, "oracle pipeline end to end", 60e3, oracle_end_to_end},
      {7, "sector sweep trend", 120e3, sweep_trend},
      {8, "trajectory mapping", 1.0, trajectory_mapping},
      {9, "determinism", 120e3, determinism},
      {10, "reduction scale", 5e3, reduction_scale},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = Clock::now();
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, fmt::format("threw: {}", e.what())};
    }
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    const bool in_time = ms < c.budget_ms;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    fmt::print("criterion {}: {} {} ({}; {:.3f} ms{})\n", c.id, pass ? "PASS" : "FAIL", c.name, o.detail, ms,
               in_time ? "" : fmt::format(", over the {} ms budget", c.budget_ms));
    std::fflush(stdout);
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
