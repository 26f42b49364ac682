#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "locmbt/dataprep.hpp"
#include "locmbt/mealy.hpp"
#include "locmbt/testgen.hpp"

namespace locmbt {

// Synthetic stand-in for a localization system under test: ground truth
// follows a planned path on a rectangular testbed and the measured pose is
// corrupted by a heading-dependent error model.

struct Testbed {
  double width = 8.0;
  double height = 10.0;

  Rect bounds() const { return {0.0, 0.0, width, height}; }
  Point center() const { return {width / 2.0, height / 2.0}; }
  double area() const { return width * height; }
};

enum class HeadingMode { axis_aligned, free };

HeadingMode parse_heading_mode(std::string_view name);

// Memoryless error: isotropic Gaussian position noise, plus a radial bias
// along the heading whenever the true heading lies in a degraded sector.
struct ErrorModel {
  double base_sigma = 0.02;
  std::vector<std::string> degraded_sectors{"E"};
  double degraded_bias = 0.30;
  double heading_sigma = 0.01;
  std::uint64_t seed = 1;
  SectorSpec sectors = SectorSpec::compass(4);

  void validate() const;
};

// Ground-truth oracle mode. The machine is stepped once per leg on the
// leg's sector label and the output class picks the radial error magnitude.
struct ScriptedOracle {
  MealyMachine machine;
  std::map<std::string, double> error_magnitude;
  SectorSpec sectors = SectorSpec::compass(4);
  double base_sigma = 0.0;
  std::uint64_t seed = 1;

  void validate() const;
};

using SensorModel = std::variant<ErrorModel, ScriptedOracle>;

// SplitMix64 output number `stream` of the sequence seeded with `master`.
// Campaign run i draws its trajectory from split_seed(master_seed, i) and its
// measurement noise from split_seed(model seed, i).
std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream);

// Random walk of `legs` straight legs starting at `start` (default: testbed
// center). Legs leaving the testbed are redrawn. Returns legs + 1 points.
std::vector<Point> generate_trajectory(const Testbed& testbed, std::size_t legs, double step_length,
                                       std::uint64_t seed, HeadingMode mode = HeadingMode::free,
                                       std::optional<Point> start = std::nullopt);

// Samples the path at `rate_hz` while moving at constant `speed`;
// ceil(length / speed * rate) + 1 records with t_k = k / rate.
RawTrace simulate_run(std::span<const Point> waypoints, double speed, double rate_hz, const SensorModel& model,
                      std::string run_id = {});

struct CampaignConfig {
  Testbed testbed;
  std::size_t runs = 8;
  double leg_length = 2.0;
  double speed = 0.25;
  double rate_hz = 20.0;
  std::size_t min_records = 5000;
  std::size_t max_records = 15000;
  HeadingMode heading_mode = HeadingMode::free;
  std::uint64_t master_seed = 20210601;
  SensorModel model = ErrorModel{};
};

struct CampaignRun {
  std::string id;
  std::uint64_t seed = 0;
  std::vector<Point> waypoints;
  RawTrace trace;
};

// Leg counts are drawn so every run lands in [min_records, max_records].
std::vector<CampaignRun> default_campaign(const CampaignConfig& config);

// Maximal defined input words of length <= depth (canonical DFS order).
std::vector<std::vector<std::string>> characteristic_words(const MealyMachine& machine, std::size_t depth);

// Random words that stay on defined transitions of the machine.
std::vector<std::vector<std::string>> random_words(const MealyMachine& machine, std::size_t count,
                                                   std::size_t length, std::uint64_t seed);

struct WordCampaignOptions {
  Testbed testbed;
  double step_length = 1.0;
  double speed = 0.5;
  double rate_hz = 20.0;
  std::uint64_t seed = 1;
};

// One run per word: the word is mapped to legs from the testbed center and
// simulated against `model`.
std::vector<CampaignRun> word_campaign(const std::vector<std::vector<std::string>>& words, const SensorModel& model,
                                       const WordCampaignOptions& options);

}  // namespace locmbt
