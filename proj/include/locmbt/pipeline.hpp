#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "locmbt/dataprep.hpp"
#include "locmbt/learner.hpp"
#include "locmbt/rtls_sim.hpp"
#include "locmbt/testgen.hpp"

namespace locmbt {

enum class CampaignKind { random, characteristic };

struct SimulatorConfig {
  CampaignConfig campaign;
  CampaignKind kind = CampaignKind::random;
  // Characteristic campaigns only; depth 0 means |Q| + 1.
  std::size_t depth = 0;
  WordCampaignOptions words;
};

struct PipelineConfig {
  std::filesystem::path traces;  // directory of trace CSVs, or a campaign manifest
  std::filesystem::path output = "out";
  double rate_hz = 20.0;

  FeatureSelection input{FeatureKind::orientation, SectorSpec::compass(4)};
  FeatureSelection output_feature{FeatureKind::euclidean_error, ThresholdSpec{{0.10}, {"a", "b"}}};
  ReductionSpec reduction;

  std::uint64_t split_seed = 7;
  SplitRatio ratio;
  double min_accuracy = 0.9;

  bool sc_prefix_elimination = false;
  bool tc_prefix_elimination = true;

  std::optional<Point> origin;  // defaults to the testbed center
  double step_length = 1.0;
  bool use_bounds = true;
  bool strict_bounds = false;
  Testbed testbed;

  std::optional<SimulatorConfig> simulator;
  std::vector<std::size_t> sweep_sectors{4, 6, 8};
};

// INI-style file with [sections] and key = value lines. Relative paths are
// resolved against the directory holding the file. Each override has the
// form "section.key=value" and wins over the file.
PipelineConfig load_config(const std::filesystem::path& path, std::span<const std::string> overrides = {});
PipelineConfig parse_config(std::istream& in, const std::filesystem::path& base_dir,
                            std::span<const std::string> overrides = {});

struct LoadedTraces {
  std::vector<std::string> ids;
  std::vector<RawTrace> traces;
};

LoadedTraces load_traces(const PipelineConfig& config);

struct PreparedSamples {
  SampleSet samples;
  std::vector<std::string> sources;  // trace id per sample
};

PreparedSamples prepare_all(const PipelineConfig& config, const LoadedTraces& traces);

struct CommandResult {
  ErrorCode status = ErrorCode::usage;  // ignored when ok
  bool ok = true;
  std::string summary;  // key=value lines
  std::string message;  // why the command did not succeed
};

// Writes the campaign CSVs plus manifest.json into <output>/traces.
CommandResult cmd_simulate(const PipelineConfig& config);

// prepare -> split -> learn -> validate -> (accuracy >= min) test generation
// and trajectory mapping. Artifacts go to <output>.
CommandResult cmd_run(const PipelineConfig& config);

// One summary row per sector count, each on a fresh prepare/split/learn.
CommandResult cmd_sweep(const PipelineConfig& config);

struct SweepRow {
  std::size_t sectors = 0;
  bool learned = false;
  std::string error;
  std::size_t states = 0;
  std::size_t inputs = 0;
  std::size_t outputs = 0;
  double accuracy = 0.0;
  std::size_t sc = 0;
  std::size_t tc = 0;
};

std::vector<SweepRow> sweep(const PipelineConfig& config, const LoadedTraces& traces);

// Maps every sequence of the suite to a trajectory CSV named <prefix>_NNN.csv.
std::vector<Trajectory> map_suite(const PipelineConfig& config, const MealyMachine& machine,
                                  const TestSuite& suite, const std::filesystem::path& out_dir,
                                  const std::string& prefix);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace locmbt
