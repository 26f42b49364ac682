#include "locmbt/rtls_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "locmbt/error.hpp"

namespace locmbt {

namespace {

constexpr int kMaxLegAttempts = 1000;

struct Leg {
  Point from;
  double length = 0.0;
  double heading = 0.0;
  double dx = 0.0;  // unit direction
  double dy = 0.0;
  double start_time = 0.0;
  double duration = 0.0;
};

double snap(double v) { return std::abs(v) < 1e-15 ? 0.0 : v; }

bool in_sector_set(const SectorSpec& sectors, const std::vector<std::string>& set, double heading) {
  const auto& label = sectors.labels[sectors.sector_of(heading)];
  return std::find(set.begin(), set.end(), label) != set.end();
}

class Gaussian {
 public:
  explicit Gaussian(std::uint64_t seed) : rng_(seed) {}
  double operator()(double sigma) {
    if (sigma <= 0.0) return 0.0;
    return std::normal_distribution<double>(0.0, sigma)(rng_);
  }

 private:
  std::mt19937_64 rng_;
};

const SectorSpec& sectors_of(const SensorModel& model) {
  return std::visit([](const auto& m) -> const SectorSpec& { return m.sectors; }, model);
}

}  // namespace

HeadingMode parse_heading_mode(std::string_view name) {
  if (name == "free") return HeadingMode::free;
  if (name == "axis" || name == "axis_aligned") return HeadingMode::axis_aligned;
  throw ConfigError(fmt::format("unknown heading mode '{}'", name));
}

void ErrorModel::validate() const {
  if (!(base_sigma >= 0.0) || !(degraded_bias >= 0.0) || !(heading_sigma >= 0.0)) {
    throw ConfigError("error model sigmas and bias must be non-negative");
  }
  DiscretizationSpec check(sectors);
  for (const auto& s : degraded_sectors) {
    if (std::find(sectors.labels.begin(), sectors.labels.end(), s) == sectors.labels.end()) {
      throw ConfigError(fmt::format("degraded sector '{}' is not a configured sector label", s));
    }
  }
}

void ScriptedOracle::validate() const {
  DiscretizationSpec check(sectors);
  if (!(base_sigma >= 0.0)) throw ConfigError("oracle base sigma must be non-negative");
  if (machine.inputs().labels() != sectors.labels) {
    throw ConfigError("oracle machine inputs must equal the configured sector labels");
  }
  for (const auto& label : machine.outputs().labels()) {
    const auto it = error_magnitude.find(label);
    if (it == error_magnitude.end()) {
      throw ConfigError(fmt::format("no error magnitude configured for output class '{}'", label));
    }
    if (!(it->second >= 0.0)) throw ConfigError("error magnitudes must be non-negative");
  }
}

std::uint64_t split_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + (stream + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<Point> generate_trajectory(const Testbed& testbed, std::size_t legs, double step_length,
                                       std::uint64_t seed, HeadingMode mode, std::optional<Point> start) {
  if (legs < 1) throw UsageError("trajectory needs at least one leg");
  if (!(step_length > 0.0)) throw UsageError("step length must be positive");
  if (step_length > testbed.width && step_length > testbed.height) {
    throw UsageError(fmt::format("step length {} m exceeds both testbed dimensions", step_length));
  }
  const Rect bounds = testbed.bounds();
  const Point origin = start.value_or(testbed.center());
  if (!bounds.contains(origin)) throw UsageError("trajectory start lies outside the testbed");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> axis(0, 3);
  std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);

  std::vector<Point> points{origin};
  points.reserve(legs + 1);
  for (std::size_t leg = 0; leg < legs; ++leg) {
    const Point at = points.back();
    bool placed = false;
    for (int attempt = 0; attempt < kMaxLegAttempts && !placed; ++attempt) {
      const double heading =
          mode == HeadingMode::axis_aligned ? axis(rng) * (std::numbers::pi / 2.0) : angle(rng);
      const Point next{at.x + step_length * snap(std::cos(heading)), at.y + step_length * snap(std::sin(heading))};
      if (bounds.contains(next)) {
        points.push_back(next);
        placed = true;
      }
    }
    if (!placed) {
      throw DataError(fmt::format("could not place leg {} inside the testbed after {} attempts", leg + 1,
                                  kMaxLegAttempts));
    }
  }
  return points;
}

RawTrace simulate_run(std::span<const Point> waypoints, double speed, double rate_hz, const SensorModel& model,
                      std::string run_id) {
  if (waypoints.size() < 2) throw UsageError("simulation needs at least 2 waypoints");
  if (!(speed > 0.0) || !(rate_hz > 0.0)) throw UsageError("speed and rate must be positive");
  std::visit([](const auto& m) { m.validate(); }, model);

  std::vector<Leg> legs;
  double elapsed = 0.0;
  for (std::size_t i = 0; i + 1 < waypoints.size(); ++i) {
    Leg leg;
    leg.from = waypoints[i];
    const double dx = waypoints[i + 1].x - waypoints[i].x;
    const double dy = waypoints[i + 1].y - waypoints[i].y;
    leg.length = std::hypot(dx, dy);
    if (!(leg.length > 0.0)) throw UsageError(fmt::format("leg {} has zero length", i + 1));
    leg.heading = wrap_angle(std::atan2(dy, dx));
    leg.dx = dx / leg.length;
    leg.dy = dy / leg.length;
    leg.start_time = elapsed;
    leg.duration = leg.length / speed;
    if (leg.duration * rate_hz < 1.0) {
      throw UsageError(fmt::format("leg {} is shorter than one sample period", i + 1));
    }
    elapsed += leg.duration;
    legs.push_back(leg);
  }

  // Per-leg radial error magnitude.
  std::vector<double> radial(legs.size(), 0.0);
  double base_sigma = 0.0;
  double heading_sigma = 0.0;
  std::uint64_t noise_seed = 0;
  if (const auto* em = std::get_if<ErrorModel>(&model)) {
    base_sigma = em->base_sigma;
    heading_sigma = em->heading_sigma;
    noise_seed = em->seed;
    for (std::size_t i = 0; i < legs.size(); ++i) {
      if (in_sector_set(em->sectors, em->degraded_sectors, legs[i].heading)) radial[i] = em->degraded_bias;
    }
  } else {
    const auto& oracle = std::get<ScriptedOracle>(model);
    base_sigma = oracle.base_sigma;
    noise_seed = oracle.seed;
    StateId state = oracle.machine.initial();
    for (std::size_t i = 0; i < legs.size(); ++i) {
      const auto& label = oracle.sectors.labels[oracle.sectors.sector_of(legs[i].heading)];
      const SymbolId input = oracle.machine.inputs().index_of(label);
      const auto& t = oracle.machine.at(state, input);
      if (!t) {
        throw DataError(fmt::format("oracle machine has no transition from state {} on '{}' (leg {})", state,
                                    label, i + 1));
      }
      radial[i] = oracle.error_magnitude.at(oracle.machine.outputs().label(t->output));
      state = t->target;
    }
  }

  const auto count = static_cast<std::size_t>(std::ceil(elapsed * rate_hz - 1e-9)) + 1;
  RawTrace trace;
  trace.run_id = std::move(run_id);
  trace.rate_hz = rate_hz;
  trace.records.reserve(count);
  Gaussian noise(noise_seed);
  std::size_t leg = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) / rate_hz;
    while (leg + 1 < legs.size() && t >= legs[leg + 1].start_time) ++leg;
    const Leg& l = legs[leg];
    const double along = std::clamp((t - l.start_time) * speed, 0.0, l.length);

    PoseRecord r;
    r.t = t;
    r.ref_x = l.from.x + along * l.dx;
    r.ref_y = l.from.y + along * l.dy;
    r.ref_theta = l.heading;
    r.meas_x = r.ref_x + radial[leg] * l.dx + noise(base_sigma);
    r.meas_y = r.ref_y + radial[leg] * l.dy + noise(base_sigma);
    r.meas_theta = wrap_angle(l.heading + noise(heading_sigma));
    trace.records.push_back(r);
  }
  return trace;
}

std::vector<CampaignRun> default_campaign(const CampaignConfig& config) {
  if (config.runs < 1) throw ConfigError("campaign needs at least one run");
  if (!(config.leg_length > 0.0) || !(config.speed > 0.0) || !(config.rate_hz > 0.0)) {
    throw ConfigError("leg length, speed and rate must be positive");
  }
  if (config.min_records < 2 || config.min_records > config.max_records) {
    throw ConfigError("record bounds must satisfy 2 <= min_records <= max_records");
  }
  std::visit([](const auto& m) { m.validate(); }, config.model);

  const double per_leg = config.leg_length / config.speed * config.rate_hz;
  const auto min_legs =
      static_cast<std::size_t>(std::max(1.0, std::ceil((static_cast<double>(config.min_records) - 1.0) / per_leg)));
  const auto max_legs =
      static_cast<std::size_t>(std::floor((static_cast<double>(config.max_records) - 1.0) / per_leg));
  if (max_legs < min_legs) {
    throw ConfigError(fmt::format("no leg count yields between {} and {} records at {} records per leg",
                                  config.min_records, config.max_records, per_leg));
  }

  std::vector<CampaignRun> runs;
  runs.reserve(config.runs);
  for (std::size_t i = 0; i < config.runs; ++i) {
    CampaignRun run;
    run.id = fmt::format("run_{:03d}", i);
    run.seed = split_seed(config.master_seed, i);
    std::mt19937_64 rng(run.seed);
    const auto legs = std::uniform_int_distribution<std::size_t>(min_legs, max_legs)(rng);
    run.waypoints =
        generate_trajectory(config.testbed, legs, config.leg_length, rng(), config.heading_mode, std::nullopt);

    SensorModel model = config.model;
    std::visit([&](auto& m) { m.seed = split_seed(m.seed, i); }, model);
    run.trace = simulate_run(run.waypoints, config.speed, config.rate_hz, model, run.id);
    runs.push_back(std::move(run));
  }
  return runs;
}

std::vector<std::vector<std::string>> characteristic_words(const MealyMachine& machine, std::size_t depth) {
  std::vector<std::vector<std::string>> words;
  std::vector<std::string> word;
  auto visit = [&](auto&& self, StateId state) -> void {
    bool extended = false;
    if (word.size() < depth) {
      for (SymbolId a = 0; a < machine.inputs().size(); ++a) {
        const auto& t = machine.at(state, a);
        if (!t) continue;
        extended = true;
        word.push_back(machine.inputs().label(a));
        self(self, t->target);
        word.pop_back();
      }
    }
    if (!extended && !word.empty()) words.push_back(word);
  };
  visit(visit, machine.initial());
  return words;
}

std::vector<std::vector<std::string>> random_words(const MealyMachine& machine, std::size_t count,
                                                   std::size_t length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<std::string>> words;
  for (std::size_t w = 0; w < count; ++w) {
    std::vector<std::string> word;
    StateId state = machine.initial();
    while (word.size() < length) {
      std::vector<SymbolId> options;
      for (SymbolId a = 0; a < machine.inputs().size(); ++a) {
        if (machine.at(state, a)) options.push_back(a);
      }
      if (options.empty()) break;
      const SymbolId a = options[std::uniform_int_distribution<std::size_t>(0, options.size() - 1)(rng)];
      word.push_back(machine.inputs().label(a));
      state = machine.at(state, a)->target;
    }
    if (!word.empty()) words.push_back(std::move(word));
  }
  return words;
}

std::vector<CampaignRun> word_campaign(const std::vector<std::vector<std::string>>& words, const SensorModel& model,
                                       const WordCampaignOptions& options) {
  std::vector<CampaignRun> runs;
  MappingOptions mapping;
  mapping.origin = options.testbed.center();
  mapping.step_length = options.step_length;
  for (std::size_t i = 0; i < words.size(); ++i) {
    CampaignRun run;
    run.id = fmt::format("word_{:03d}", i);
    run.seed = split_seed(options.seed, i);
    const auto traj = map_to_trajectory(words[i], sectors_of(model), mapping);
    run.waypoints.push_back(traj.origin);
    run.waypoints.insert(run.waypoints.end(), traj.waypoints.begin(), traj.waypoints.end());
    SensorModel m = model;
    std::visit([&](auto& mm) { mm.seed = run.seed; }, m);
    run.trace = simulate_run(run.waypoints, options.speed, options.rate_hz, m, run.id);
    runs.push_back(std::move(run));
  }
  return runs;
}

}  // namespace locmbt
