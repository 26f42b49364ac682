#include "locmbt/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "locmbt/conformance.hpp"
#include "locmbt/error.hpp"
#include "locmbt/mealy_io.hpp"

namespace locmbt {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"paths", {"traces", "output"}},
      {"features", {"input", "output", "rate"}},
      {"input_discretization", {"type", "count", "labels", "offset_deg", "clockwise", "cuts"}},
      {"output_discretization", {"type", "count", "labels", "offset_deg", "clockwise", "cuts"}},
      {"reduction", {"type", "n"}},
      {"split", {"seed", "learn_parts", "validate_parts"}},
      {"validation", {"min_accuracy"}},
      {"testgen", {"sc_prefix_elimination", "tc_prefix_elimination"}},
      {"trajectory", {"origin_x", "origin_y", "step_length", "bounds", "strict"}},
      {"testbed", {"width", "height"}},
      {"simulator",
       {"model", "campaign", "runs", "leg_length", "speed", "rate", "min_records", "max_records", "heading_mode",
        "master_seed"}},
      {"error_model", {"base_sigma", "degraded_sectors", "degraded_bias", "heading_sigma", "seed", "sectors"}},
      {"oracle", {"machine", "magnitudes", "base_sigma", "seed", "depth", "step_length", "speed"}},
      {"sweep", {"sectors"}},
  };
  return keys;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

class ConfigReader {
 public:
  ConfigReader(const pt::ptree& tree, fs::path base_dir) : tree_(tree), base_(std::move(base_dir)) {}

  bool has_section(const std::string& section) const { return tree_.get_child_optional(section).has_value(); }
  bool has(const std::string& path) const { return tree_.get_optional<std::string>(path).has_value(); }

  std::string text(const std::string& path, const std::string& fallback) const {
    return trim(tree_.get<std::string>(path, fallback));
  }

  template <typename T>
  T number(const std::string& path, T fallback) const {
    const auto raw = tree_.get_optional<std::string>(path);
    if (!raw) return fallback;
    const auto value = trim(*raw);
    try {
      std::size_t used = 0;
      T parsed{};
      if constexpr (std::is_floating_point_v<T>) {
        parsed = static_cast<T>(std::stod(value, &used));
        if (!std::isfinite(parsed)) throw std::invalid_argument("non-finite");
      } else {
        if (!value.empty() && value.front() == '-') throw std::invalid_argument("negative");
        parsed = static_cast<T>(std::stoull(value, &used));
      }
      if (used != value.size()) throw std::invalid_argument("trailing characters");
      return parsed;
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("{}: '{}' is not a valid number", path, value));
    }
  }

  bool flag(const std::string& path, bool fallback) const {
    const auto raw = tree_.get_optional<std::string>(path);
    if (!raw) return fallback;
    const auto v = trim(*raw);
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ConfigError(fmt::format("{}: '{}' is not a boolean", path, v));
  }

  std::vector<double> numbers(const std::string& path) const {
    std::vector<double> out;
    for (const auto& item : split_list(text(path, ""))) {
      try {
        std::size_t used = 0;
        out.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ConfigError(fmt::format("{}: '{}' is not a valid number", path, item));
      }
    }
    return out;
  }

  fs::path file(const std::string& path, const fs::path& fallback) const {
    const auto raw = text(path, "");
    fs::path p = raw.empty() ? fallback : fs::path(raw);
    if (p.empty() || p.is_absolute()) return p;
    return base_ / p;
  }

 private:
  const pt::ptree& tree_;
  fs::path base_;
};

DiscretizationSpec read_discretization(const ConfigReader& r, const std::string& section,
                                       const DiscretizationSpec& fallback) {
  if (!r.has_section(section)) return fallback;
  const auto type = r.text(section + ".type", fallback.is_sectors() ? "sectors" : "thresholds");
  try {
    if (type == "sectors") {
      SectorSpec spec;
      auto labels = split_list(r.text(section + ".labels", ""));
      const auto count = r.number<std::size_t>(section + ".count", labels.empty() ? 4 : labels.size());
      if (labels.empty()) labels = SectorSpec::compass(count).labels;
      if (labels.size() != count) {
        throw ConfigError(fmt::format("{}.labels: {} labels for {} sectors", section, labels.size(), count));
      }
      spec.labels = std::move(labels);
      spec.offset = r.number<double>(section + ".offset_deg", 90.0) * kDegToRad;
      spec.clockwise = r.flag(section + ".clockwise", true);
      return DiscretizationSpec(std::move(spec));
    }
    if (type == "thresholds") {
      ThresholdSpec spec;
      spec.cuts = r.numbers(section + ".cuts");
      spec.labels = split_list(r.text(section + ".labels", ""));
      return DiscretizationSpec(std::move(spec));
    }
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    if (what.rfind(section, 0) == 0) throw;
    throw ConfigError(fmt::format("{}: {}", section, what));
  }
  throw ConfigError(fmt::format("{}.type: unknown discretization '{}'", section, type));
}

MealyMachine load_machine(const fs::path& path) {
  try {
    return machine_from_json(nlohmann::json::parse(read_text(path)));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

std::optional<SimulatorConfig> read_simulator(const ConfigReader& r, const Testbed& testbed) {
  if (!r.has_section("simulator")) return std::nullopt;
  SimulatorConfig sim;
  auto& c = sim.campaign;
  c.testbed = testbed;
  c.runs = r.number<std::size_t>("simulator.runs", c.runs);
  c.leg_length = r.number<double>("simulator.leg_length", c.leg_length);
  c.speed = r.number<double>("simulator.speed", c.speed);
  c.rate_hz = r.number<double>("simulator.rate", c.rate_hz);
  c.min_records = r.number<std::size_t>("simulator.min_records", c.min_records);
  c.max_records = r.number<std::size_t>("simulator.max_records", c.max_records);
  c.heading_mode = parse_heading_mode(r.text("simulator.heading_mode", "free"));
  c.master_seed = r.number<std::uint64_t>("simulator.master_seed", c.master_seed);

  const auto campaign = r.text("simulator.campaign", "random");
  if (campaign == "random") {
    sim.kind = CampaignKind::random;
  } else if (campaign == "characteristic") {
    sim.kind = CampaignKind::characteristic;
  } else {
    throw ConfigError(fmt::format("simulator.campaign: unknown campaign '{}'", campaign));
  }

  const auto model = r.text("simulator.model", "error_model");
  if (model == "error_model") {
    ErrorModel em;
    em.base_sigma = r.number<double>("error_model.base_sigma", em.base_sigma);
    em.degraded_bias = r.number<double>("error_model.degraded_bias", em.degraded_bias);
    em.heading_sigma = r.number<double>("error_model.heading_sigma", em.heading_sigma);
    em.seed = r.number<std::uint64_t>("error_model.seed", em.seed);
    em.sectors = SectorSpec::compass(r.number<std::size_t>("error_model.sectors", 4));
    if (r.has("error_model.degraded_sectors")) em.degraded_sectors = split_list(r.text("error_model.degraded_sectors", ""));
    try {
      em.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("error_model: {}", e.what()));
    }
    c.model = em;
  } else if (model == "oracle") {
    if (!r.has("oracle.machine")) throw ConfigError("oracle.machine: missing path to the oracle machine JSON");
    ScriptedOracle oracle{load_machine(r.file("oracle.machine", {})), {}, SectorSpec::compass(4), 0.0, 1};
    oracle.sectors = SectorSpec::compass(oracle.machine.inputs().size());
    oracle.base_sigma = r.number<double>("oracle.base_sigma", 0.0);
    oracle.seed = r.number<std::uint64_t>("oracle.seed", 1);
    for (const auto& item : split_list(r.text("oracle.magnitudes", ""))) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) {
        throw ConfigError(fmt::format("oracle.magnitudes: '{}' is not of the form class:meters", item));
      }
      try {
        oracle.error_magnitude[trim(item.substr(0, colon))] = std::stod(item.substr(colon + 1));
      } catch (const std::exception&) {
        throw ConfigError(fmt::format("oracle.magnitudes: '{}' has an invalid magnitude", item));
      }
    }
    try {
      oracle.validate();
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("oracle: {}", e.what()));
    }
    sim.depth = r.number<std::size_t>("oracle.depth", 0);
    sim.words.testbed = testbed;
    sim.words.step_length = r.number<double>("oracle.step_length", sim.words.step_length);
    sim.words.speed = r.number<double>("oracle.speed", sim.words.speed);
    sim.words.rate_hz = c.rate_hz;
    sim.words.seed = oracle.seed;
    c.model = std::move(oracle);
  } else {
    throw ConfigError(fmt::format("simulator.model: unknown model '{}'", model));
  }
  return sim;
}

std::string fmt_number(double v) { return fmt::format("{}", v); }

void write_json(const fs::path& path, const nlohmann::json& doc) { write_text(path, doc.dump(2) + "\n"); }

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw ConfigError(fmt::format("paths.output: cannot create directory '{}'", dir.string()));
  }
}

struct Learned {
  SampleSplit split;
  MealyMachine machine;
  ValidationReport report;
};

// Rewraps learner conflicts with the trace ids behind the offending samples.
Learned learn_and_validate(const PipelineConfig& config, const PreparedSamples& prepared) {
  auto split = split_samples(prepared.samples, config.split_seed, config.ratio);
  try {
    auto machine = learn(split.learning);
    auto report = validate(machine, split.validation);
    return Learned{std::move(split), std::move(machine), std::move(report)};
  } catch (const OutputConflict& e) {
    throw OutputConflict(e.prefix(), e.input(), e.first_output(), e.second_output(), e.first_sample(),
                         e.second_sample(),
                         fmt::format("{} (sources: {} and {})", e.what(),
                                     prepared.sources[split.learning_indices[e.first_sample()]],
                                     prepared.sources[split.learning_indices[e.second_sample()]]));
  }
}

}  // namespace

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path.string()));
  out << text;
  if (!out) throw ConfigError(fmt::format("failed writing '{}'", path.string()));
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

PipelineConfig parse_config(std::istream& in, const fs::path& base_dir, std::span<const std::string> overrides) {
  std::stringstream text;
  text << in.rdbuf();
  pt::ptree tree;
  try {
    pt::read_ini(text, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(fmt::format("config line {}: {}", e.line(), e.message()));
  }
  // read_ini drops sections without keys, but an empty [simulator] still
  // means "simulate with defaults".
  text.clear();
  text.seekg(0);
  for (std::string line; std::getline(text, line);) {
    line = trim(line);
    if (line.size() > 2 && line.front() == '[' && line.back() == ']') {
      const auto name = trim(line.substr(1, line.size() - 2));
      if (!tree.get_child_optional(pt::ptree::path_type(name, '\0'))) tree.push_back({name, pt::ptree{}});
    }
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      throw ConfigError(fmt::format("override '{}' is not of the form section.key=value", o));
    }
    tree.put(pt::ptree::path_type(trim(o.substr(0, eq)), '.'), trim(o.substr(eq + 1)));
  }

  const auto& known = known_keys();
  for (const auto& [section, body] : tree) {
    const auto it = known.find(section);
    if (it == known.end()) throw ConfigError(fmt::format("{}: unknown section", section));
    if (body.empty() && !body.data().empty()) throw ConfigError(fmt::format("{}: expected a section", section));
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError(fmt::format("{}.{}: unknown key", section, key));
    }
  }

  const ConfigReader r(tree, base_dir);
  PipelineConfig c;
  c.output = r.file("paths.output", "out");
  c.traces = r.has("paths.traces") ? r.file("paths.traces", {}) : c.output / "traces";
  c.rate_hz = r.number<double>("features.rate", c.rate_hz);
  if (!(c.rate_hz > 0.0)) throw ConfigError("features.rate: must be positive");

  c.input.kind = parse_feature_kind(r.text("features.input", "orientation"));
  c.output_feature.kind = parse_feature_kind(r.text("features.output", "euclidean_error"));
  c.input.spec = read_discretization(r, "input_discretization", c.input.spec);
  c.output_feature.spec = read_discretization(r, "output_discretization", c.output_feature.spec);
  if (c.input.spec.is_sectors() != is_angular(c.input.kind) ||
      c.output_feature.spec.is_sectors() != is_angular(c.output_feature.kind)) {
    throw ConfigError("features: angular features need sector discretization, others need thresholds");
  }

  c.reduction.kind = parse_reduction_kind(r.text("reduction.type", "merge_runs"));
  c.reduction.n = r.number<std::size_t>("reduction.n", 1);
  if (c.reduction.n < 1) throw ConfigError("reduction.n: must be at least 1");

  c.split_seed = r.number<std::uint64_t>("split.seed", c.split_seed);
  c.ratio.learn_parts = r.number<unsigned>("split.learn_parts", c.ratio.learn_parts);
  c.ratio.validate_parts = r.number<unsigned>("split.validate_parts", c.ratio.validate_parts);
  if (c.ratio.learn_parts == 0 || c.ratio.validate_parts == 0) {
    throw ConfigError("split: learn_parts and validate_parts must be positive");
  }
  c.min_accuracy = r.number<double>("validation.min_accuracy", c.min_accuracy);
  if (c.min_accuracy < 0.0 || c.min_accuracy > 1.0) throw ConfigError("validation.min_accuracy: must lie in [0, 1]");

  c.sc_prefix_elimination = r.flag("testgen.sc_prefix_elimination", c.sc_prefix_elimination);
  c.tc_prefix_elimination = r.flag("testgen.tc_prefix_elimination", c.tc_prefix_elimination);

  c.testbed.width = r.number<double>("testbed.width", c.testbed.width);
  c.testbed.height = r.number<double>("testbed.height", c.testbed.height);
  if (!(c.testbed.width > 0.0) || !(c.testbed.height > 0.0)) throw ConfigError("testbed: dimensions must be positive");

  if (r.has("trajectory.origin_x") || r.has("trajectory.origin_y")) {
    c.origin = Point{r.number<double>("trajectory.origin_x", c.testbed.center().x),
                     r.number<double>("trajectory.origin_y", c.testbed.center().y)};
  }
  c.step_length = r.number<double>("trajectory.step_length", c.step_length);
  if (!(c.step_length > 0.0)) throw ConfigError("trajectory.step_length: must be positive");
  const auto bounds = r.text("trajectory.bounds", "testbed");
  if (bounds != "testbed" && bounds != "none") {
    throw ConfigError(fmt::format("trajectory.bounds: expected 'testbed' or 'none', got '{}'", bounds));
  }
  c.use_bounds = bounds == "testbed";
  c.strict_bounds = r.flag("trajectory.strict", c.strict_bounds);

  c.simulator = read_simulator(r, c.testbed);

  if (r.has("sweep.sectors")) {
    c.sweep_sectors.clear();
    for (double k : r.numbers("sweep.sectors")) {
      if (k < 2 || k != std::floor(k)) throw ConfigError("sweep.sectors: sector counts must be integers >= 2");
      c.sweep_sectors.push_back(static_cast<std::size_t>(k));
    }
  }
  return c;
}

PipelineConfig load_config(const fs::path& path, std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config '{}'", path.string()));
  return parse_config(in, path.parent_path(), overrides);
}

LoadedTraces load_traces(const PipelineConfig& config) {
  std::vector<fs::path> files;
  std::vector<std::string> ids;
  fs::path manifest = config.traces;
  if (fs::is_directory(manifest)) manifest /= "manifest.json";

  if (fs::is_regular_file(manifest) && manifest.extension() == ".json") {
    try {
      const auto doc = nlohmann::json::parse(read_text(manifest));
      for (const auto& run : doc.at("runs")) {
        files.push_back(manifest.parent_path() / run.at("path").get<std::string>());
        ids.push_back(run.at("id").get<std::string>());
      }
    } catch (const nlohmann::json::exception& e) {
      throw DataError(fmt::format("{}: {}", manifest.string(), e.what()));
    }
  } else if (fs::is_directory(config.traces)) {
    for (const auto& entry : fs::directory_iterator(config.traces)) {
      if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) ids.push_back(f.stem().string());
  } else if (fs::is_regular_file(config.traces)) {
    files.push_back(config.traces);
    ids.push_back(config.traces.stem().string());
  } else {
    throw DataError(fmt::format("paths.traces: '{}' does not exist", config.traces.string()));
  }
  if (files.empty()) throw DataError(fmt::format("no trace files found in '{}'", config.traces.string()));

  LoadedTraces loaded;
  for (std::size_t i = 0; i < files.size(); ++i) {
    loaded.traces.push_back(load_trace(files[i].string(), config.rate_hz));
    loaded.traces.back().run_id = ids[i];
    loaded.ids.push_back(ids[i]);
  }
  return loaded;
}

PreparedSamples prepare_all(const PipelineConfig& config, const LoadedTraces& traces) {
  PreparedSamples out{SampleSet(config.input.spec.alphabet(AlphabetKind::input),
                                config.output_feature.spec.alphabet(AlphabetKind::output)),
                      {}};
  for (std::size_t i = 0; i < traces.traces.size(); ++i) {
    out.samples.add(prepare(traces.traces[i], config.input, config.output_feature, config.reduction));
    out.sources.push_back(traces.ids[i]);
  }
  return out;
}

CommandResult cmd_simulate(const PipelineConfig& config) {
  if (!config.simulator) throw ConfigError("simulator: section missing");
  const auto& sim = *config.simulator;

  std::vector<CampaignRun> runs;
  if (sim.kind == CampaignKind::random) {
    runs = default_campaign(sim.campaign);
  } else {
    const auto* oracle = std::get_if<ScriptedOracle>(&sim.campaign.model);
    if (!oracle) throw ConfigError("simulator.campaign: characteristic campaigns need simulator.model = oracle");
    const auto reachable = reachable_states(oracle->machine).size();
    const auto depth = sim.depth == 0 ? reachable + 1 : sim.depth;
    runs = word_campaign(characteristic_words(oracle->machine, depth), sim.campaign.model, sim.words);
  }

  const fs::path dir = config.traces;
  ensure_directory(dir);
  nlohmann::json manifest_runs = nlohmann::json::array();
  std::string summary = fmt::format("runs={}\n", runs.size());
  for (const auto& run : runs) {
    const auto file = run.id + ".csv";
    std::ostringstream csv;
    write_trace(csv, run.trace);
    write_text(dir / file, csv.str());
    manifest_runs.push_back(
        {{"id", run.id}, {"seed", run.seed}, {"path", file}, {"records", run.trace.records.size()}});
    summary += fmt::format("run={} records={}\n", run.id, run.trace.records.size());
  }
  write_json(dir / "manifest.json", {{"master_seed", sim.campaign.master_seed}, {"runs", manifest_runs}});
  return {ErrorCode::usage, true, summary, {}};
}

std::vector<Trajectory> map_suite(const PipelineConfig& config, const MealyMachine& machine, const TestSuite& suite,
                                  const fs::path& out_dir, const std::string& prefix) {
  if (!config.input.spec.is_sectors()) {
    throw UsageError("trajectory mapping needs a sector discretization of the input feature");
  }
  MappingOptions options;
  options.origin = config.origin.value_or(config.testbed.center());
  options.step_length = config.step_length;
  if (config.use_bounds) options.bounds = config.testbed.bounds();
  options.strict = config.strict_bounds;

  ensure_directory(out_dir);
  std::vector<Trajectory> out;
  for (std::size_t i = 0; i < suite.sequences.size(); ++i) {
    const auto labels = labels_of(machine.inputs(), suite.sequences[i]);
    auto traj = map_to_trajectory(labels, config.input.spec.sectors(), options);
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    write_text(out_dir / fmt::format("{}_{:03d}.csv", prefix, i), csv.str());
    out.push_back(std::move(traj));
  }
  return out;
}

CommandResult cmd_run(const PipelineConfig& config) {
  const auto traces = load_traces(config);
  const auto prepared = prepare_all(config, traces);
  const auto learned = learn_and_validate(config, prepared);
  const auto& machine = learned.machine;
  const auto& report = learned.report;

  ensure_directory(config.output);
  for (const char* stale : {"suite_sc.json", "suite_tc.json"}) fs::remove(config.output / stale);
  fs::remove_all(config.output / "trajectories");

  write_json(config.output / "samples.json", samples_to_json(prepared.samples));
  write_json(config.output / "machine.json", machine_to_json(machine));
  write_text(config.output / "machine.dot", machine_to_dot(machine, "learned"));
  write_json(config.output / "validation.json", report_to_json(report));

  std::string summary;
  summary += fmt::format("traces={}\n", traces.traces.size());
  summary += fmt::format("learning_samples={}\n", learned.split.learning.size());
  summary += fmt::format("validation_samples={}\n", learned.split.validation.size());
  summary += fmt::format("states={}\n", machine.state_count());
  summary += fmt::format("inputs={}\n", machine.inputs().size());
  summary += fmt::format("outputs={}\n", machine.outputs().size());
  summary += fmt::format("accuracy={}\n", fmt_number(report.accuracy));
  summary += fmt::format("valid={}\n", report.valid);
  summary += fmt::format("total={}\n", report.total);
  summary += fmt::format("min_accuracy={}\n", fmt_number(config.min_accuracy));

  if (report.accuracy < config.min_accuracy) {
    summary += "status=needs-more-samples\n";
    write_text(config.output / "summary.txt", summary);
    return {ErrorCode::needs_more_samples, false, summary,
            fmt::format("accuracy {} is below the required {}; further samples are needed",
                        fmt_number(report.accuracy), fmt_number(config.min_accuracy))};
  }

  const auto sc = state_coverage(machine, {config.sc_prefix_elimination, {}});
  const auto tc = transition_coverage(machine, {config.tc_prefix_elimination, {}});
  for (const auto* suite : {&sc, &tc}) {
    const auto verdict = check_suite(machine, *suite);
    if (!verdict.full) {
      throw InternalError(fmt::format("{} suite failed its coverage check", coverage_name(suite->kind)));
    }
  }
  write_json(config.output / "suite_sc.json", suite_to_json(sc, machine.inputs()));
  write_json(config.output / "suite_tc.json", suite_to_json(tc, machine.inputs()));

  std::size_t warnings = 0;
  if (config.input.spec.is_sectors()) {
    for (const auto& [suite, prefix] : {std::pair{&sc, "sc"}, std::pair{&tc, "tc"}}) {
      for (const auto& t : map_suite(config, machine, *suite, config.output / "trajectories", prefix)) {
        warnings += t.warnings.size();
      }
    }
  }

  summary += fmt::format("sc={}\n", sc.sequences.size());
  summary += fmt::format("tc={}\n", tc.sequences.size());
  summary += fmt::format("states_covered={}/{}\n", sc.coverage.covered_states, sc.coverage.total_states);
  summary += fmt::format("transitions_covered={}/{}\n", tc.coverage.covered_transitions,
                         tc.coverage.total_transitions);
  summary += fmt::format("bounds_warnings={}\n", warnings);
  summary += "status=ok\n";
  write_text(config.output / "summary.txt", summary);
  return {ErrorCode::usage, true, summary, {}};
}

std::vector<SweepRow> sweep(const PipelineConfig& config, const LoadedTraces& traces) {
  std::vector<SweepRow> rows;
  for (std::size_t k : config.sweep_sectors) {
    PipelineConfig variant = config;
    SectorSpec sectors = SectorSpec::compass(k);
    if (config.input.spec.is_sectors()) {
      sectors.offset = config.input.spec.sectors().offset;
      sectors.clockwise = config.input.spec.sectors().clockwise;
    }
    variant.input = FeatureSelection{config.input.kind, DiscretizationSpec(sectors)};

    SweepRow row;
    row.sectors = k;
    try {
      const auto prepared = prepare_all(variant, traces);
      const auto learned = learn_and_validate(variant, prepared);
      row.learned = true;
      row.states = learned.machine.state_count();
      row.inputs = learned.machine.inputs().size();
      row.outputs = learned.machine.outputs().size();
      row.accuracy = learned.report.accuracy;
      row.sc = state_coverage(learned.machine, {config.sc_prefix_elimination, {}}).sequences.size();
      row.tc = transition_coverage(learned.machine, {config.tc_prefix_elimination, {}}).sequences.size();
    } catch (const OutputConflict& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

CommandResult cmd_sweep(const PipelineConfig& config) {
  const auto traces = load_traces(config);
  const auto rows = sweep(config, traces);
  std::string summary;
  std::string failures;
  for (const auto& row : rows) {
    if (row.learned) {
      summary += fmt::format("sectors={} states={} inputs={} outputs={} accuracy={} sc={} tc={} status=ok\n",
                             row.sectors, row.states, row.inputs, row.outputs, fmt_number(row.accuracy), row.sc,
                             row.tc);
    } else {
      summary += fmt::format("sectors={} status=conflict\n", row.sectors);
      failures += fmt::format("{}{} sectors: {}", failures.empty() ? "" : "; ", row.sectors, row.error);
    }
  }
  ensure_directory(config.output);
  write_text(config.output / "sweep.txt", summary);
  if (!failures.empty()) return {ErrorCode::data, false, summary, failures};
  return {ErrorCode::usage, true, summary, {}};
}

}  // namespace locmbt
