#include "locmbt/dataprep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include <fmt/format.h>

#include "locmbt/error.hpp"

namespace locmbt {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_positive(double radians) {
  double u = std::fmod(radians, kTwoPi);
  if (u < 0.0) u += kTwoPi;
  if (u >= kTwoPi) u = 0.0;
  return u;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view field, std::size_t line, std::size_t column) {
  static constexpr const char* kColumns[] = {"t",     "meas_x", "meas_y",   "meas_theta",
                                             "ref_x", "ref_y",  "ref_theta"};
  field = trim(field);
  double value = 0.0;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (field.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw DataError(fmt::format("line {}: column {} has invalid value '{}'", line, kColumns[column], field));
  }
  return value;
}

void check_unique(const std::vector<std::string>& labels, const char* what) {
  if (labels.empty()) throw ConfigError(fmt::format("{} needs at least one label", what));
  std::unordered_set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw ConfigError(fmt::format("{} has an empty label", what));
    if (!seen.insert(l).second) throw ConfigError(fmt::format("{} label '{}' is duplicated", what, l));
  }
}

double circular_mean(std::span<const double> values) {
  double s = 0.0;
  double c = 0.0;
  for (double v : values) {
    s += std::sin(v);
    c += std::cos(v);
  }
  return wrap_angle(std::atan2(s, c));
}

}  // namespace

double wrap_angle(double radians) {
  if (radians >= -kPi && radians < kPi) return radians;
  double r = wrap_positive(radians + kPi) - kPi;
  if (r >= kPi) r = -kPi;
  return r;
}

RawTrace ingest_trace(std::istream& in, std::string run_id, double rate_hz) {
  RawTrace trace;
  trace.run_id = std::move(run_id);
  trace.rate_hz = rate_hz;

  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (line_no == 1 && view.size() >= 3 && view.substr(0, 3) == "\xEF\xBB\xBF") view.remove_prefix(3);
    if (view.empty()) continue;
    if (!header_seen) {
      std::string header;
      for (char c : view) {
        if (c != ' ' && c != '\t') header.push_back(c);
      }
      if (header != kTraceCsvHeader) {
        throw DataError(fmt::format("line {}: expected header '{}'", line_no, kTraceCsvHeader));
      }
      header_seen = true;
      continue;
    }

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = view.find(',', start);
      fields.push_back(view.substr(start, comma == std::string_view::npos ? view.npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 7) {
      throw DataError(fmt::format("line {}: expected 7 fields, found {}", line_no, fields.size()));
    }
    PoseRecord r;
    r.t = parse_number(fields[0], line_no, 0);
    r.meas_x = parse_number(fields[1], line_no, 1);
    r.meas_y = parse_number(fields[2], line_no, 2);
    r.meas_theta = wrap_angle(parse_number(fields[3], line_no, 3));
    r.ref_x = parse_number(fields[4], line_no, 4);
    r.ref_y = parse_number(fields[5], line_no, 5);
    r.ref_theta = wrap_angle(parse_number(fields[6], line_no, 6));
    if (r.t < 0.0) throw DataError(fmt::format("line {}: negative timestamp {}", line_no, r.t));
    if (!trace.records.empty() && !(r.t > trace.records.back().t)) {
      throw DataError(fmt::format("line {}: timestamp {} does not increase after {}", line_no, r.t,
                                  trace.records.back().t));
    }
    trace.records.push_back(r);
  }
  if (!header_seen) throw DataError("trace is empty; expected a header row");
  if (trace.records.size() < 2) {
    throw DataError(fmt::format("trace needs at least 2 records, found {}", trace.records.size()));
  }
  return trace;
}

RawTrace load_trace(const std::string& path, double rate_hz) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open trace '{}'", path));
  try {
    return ingest_trace(in, path, rate_hz);
  } catch (const DataError& e) {
    throw DataError(fmt::format("{}: {}", path, e.what()));
  }
}

void write_trace(std::ostream& out, const RawTrace& trace) {
  out << kTraceCsvHeader << '\n';
  for (const auto& r : trace.records) {
    out << fmt::format("{},{},{},{},{},{},{}\n", r.t, r.meas_x, r.meas_y, r.meas_theta, r.ref_x,
                       r.ref_y, r.ref_theta);
  }
}

void validate_trace(const RawTrace& trace) {
  if (!(trace.rate_hz > 0.0)) throw DataError("trace sample rate must be positive");
  if (trace.records.size() < 2) throw DataError("trace needs at least 2 records");
  for (std::size_t i = 0; i < trace.records.size(); ++i) {
    const auto& r = trace.records[i];
    for (double v : {r.t, r.meas_x, r.meas_y, r.meas_theta, r.ref_x, r.ref_y, r.ref_theta}) {
      if (!std::isfinite(v)) throw DataError(fmt::format("record {} holds a non-finite value", i));
    }
    if (i > 0 && !(r.t > trace.records[i - 1].t)) {
      throw DataError(fmt::format("record {}: timestamp {} does not increase after {}", i, r.t,
                                  trace.records[i - 1].t));
    }
  }
}

FeatureKind parse_feature_kind(std::string_view name) {
  for (auto k : {FeatureKind::euclidean_error, FeatureKind::orientation, FeatureKind::orientation_error,
                 FeatureKind::axis_error_x, FeatureKind::axis_error_y, FeatureKind::movement_direction}) {
    if (feature_name(k) == name) return k;
  }
  throw ConfigError(fmt::format("unknown feature '{}'", name));
}

std::string_view feature_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::euclidean_error: return "euclidean_error";
    case FeatureKind::orientation: return "orientation";
    case FeatureKind::orientation_error: return "orientation_error";
    case FeatureKind::axis_error_x: return "axis_error_x";
    case FeatureKind::axis_error_y: return "axis_error_y";
    case FeatureKind::movement_direction: return "movement_direction";
  }
  return "?";
}

bool is_angular(FeatureKind kind) {
  return kind == FeatureKind::orientation || kind == FeatureKind::orientation_error ||
         kind == FeatureKind::movement_direction;
}

std::vector<double> extract_feature(const RawTrace& trace, FeatureKind kind) {
  validate_trace(trace);
  const auto& rs = trace.records;
  std::vector<double> out;
  out.reserve(rs.size());
  switch (kind) {
    case FeatureKind::euclidean_error:
      for (const auto& r : rs) out.push_back(std::hypot(r.meas_x - r.ref_x, r.meas_y - r.ref_y));
      break;
    case FeatureKind::orientation:
      for (const auto& r : rs) out.push_back(wrap_angle(r.ref_theta));
      break;
    case FeatureKind::orientation_error:
      for (const auto& r : rs) out.push_back(wrap_angle(r.meas_theta - r.ref_theta));
      break;
    case FeatureKind::axis_error_x:
      for (const auto& r : rs) out.push_back(r.meas_x - r.ref_x);
      break;
    case FeatureKind::axis_error_y:
      for (const auto& r : rs) out.push_back(r.meas_y - r.ref_y);
      break;
    case FeatureKind::movement_direction:
      out.push_back(0.0);
      for (std::size_t i = 1; i < rs.size(); ++i) {
        out.push_back(wrap_angle(std::atan2(rs[i].ref_y - rs[i - 1].ref_y, rs[i].ref_x - rs[i - 1].ref_x)));
      }
      out[0] = out[1];
      break;
  }
  return out;
}

double SectorSpec::center(std::size_t i) const {
  const double width = kTwoPi / static_cast<double>(count());
  const double delta = static_cast<double>(i) * width;
  return wrap_angle(clockwise ? offset - delta : offset + delta);
}

std::size_t SectorSpec::sector_of(double radians) const {
  const std::size_t k = count();
  const double width = kTwoPi / static_cast<double>(k);
  const double u = wrap_positive(radians - offset + kPi / static_cast<double>(k));
  auto ccw = static_cast<std::size_t>(std::floor(u / width));
  if (ccw >= k) ccw = k - 1;
  return clockwise ? (k - ccw) % k : ccw;
}

SectorSpec SectorSpec::compass(std::size_t k) {
  SectorSpec spec;
  spec.offset = kPi / 2.0;
  spec.clockwise = true;
  if (k == 4) {
    spec.labels = {"N", "E", "S", "W"};
  } else if (k == 8) {
    spec.labels = {"N", "NE", "E", "SE", "S", "SW", "W", "NW"};
  } else {
    for (std::size_t i = 0; i < k; ++i) spec.labels.push_back(fmt::format("s{}", i));
  }
  return spec;
}

std::size_t ThresholdSpec::bin_of(double value) const {
  return static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), value) - cuts.begin());
}

DiscretizationSpec::DiscretizationSpec(SectorSpec sectors) : spec_(std::move(sectors)) {
  const auto& s = std::get<SectorSpec>(spec_);
  if (s.count() < 2) throw ConfigError("sector discretization needs at least 2 sectors");
  if (!std::isfinite(s.offset)) throw ConfigError("sector offset must be finite");
  check_unique(s.labels, "sector");
}

DiscretizationSpec::DiscretizationSpec(ThresholdSpec thresholds) : spec_(std::move(thresholds)) {
  const auto& t = std::get<ThresholdSpec>(spec_);
  if (t.cuts.empty()) throw ConfigError("threshold discretization needs at least one cut point");
  for (std::size_t i = 0; i < t.cuts.size(); ++i) {
    if (!std::isfinite(t.cuts[i])) throw ConfigError("threshold cut points must be finite");
    if (i > 0 && !(t.cuts[i] > t.cuts[i - 1])) {
      throw ConfigError("threshold cut points must be strictly ascending");
    }
  }
  if (t.labels.size() != t.cuts.size() + 1) {
    throw ConfigError(fmt::format("{} cut points need {} labels, got {}", t.cuts.size(),
                                  t.cuts.size() + 1, t.labels.size()));
  }
  check_unique(t.labels, "threshold");
}

const SectorSpec& DiscretizationSpec::sectors() const {
  if (!is_sectors()) throw UsageError("discretization is not sector based");
  return std::get<SectorSpec>(spec_);
}

const ThresholdSpec& DiscretizationSpec::thresholds() const {
  if (is_sectors()) throw UsageError("discretization is not threshold based");
  return std::get<ThresholdSpec>(spec_);
}

const std::vector<std::string>& DiscretizationSpec::labels() const {
  return std::visit([](const auto& s) -> const std::vector<std::string>& { return s.labels; }, spec_);
}

std::vector<SymbolId> discretize(std::span<const double> values, const DiscretizationSpec& spec) {
  std::vector<SymbolId> out;
  out.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v)) throw DataError(fmt::format("value {} at index {} is not finite", v, i));
    const std::size_t bin = spec.is_sectors() ? spec.sectors().sector_of(v) : spec.thresholds().bin_of(v);
    out.push_back(static_cast<SymbolId>(bin));
  }
  return out;
}

ReductionKind parse_reduction_kind(std::string_view name) {
  for (auto k : {ReductionKind::none, ReductionKind::merge_runs, ReductionKind::subsample,
                 ReductionKind::window_average}) {
    if (reduction_name(k) == name) return k;
  }
  throw ConfigError(fmt::format("unknown reduction '{}'", name));
}

std::string_view reduction_name(ReductionKind kind) {
  switch (kind) {
    case ReductionKind::none: return "none";
    case ReductionKind::merge_runs: return "merge_runs";
    case ReductionKind::subsample: return "subsample";
    case ReductionKind::window_average: return "window_average";
  }
  return "?";
}

Sample zip_observations(std::span<const SymbolId> inputs, std::span<const SymbolId> outputs) {
  if (inputs.size() != outputs.size()) {
    throw DataError(fmt::format("cannot pair {} inputs with {} outputs", inputs.size(), outputs.size()));
  }
  if (inputs.empty()) throw DataError("cannot build a sample from empty sequences");
  Sample s;
  s.observations.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) s.observations.push_back({inputs[i], outputs[i]});
  return s;
}

Sample reduce(const Sample& sample, const ReductionSpec& spec) {
  if (sample.observations.empty()) throw UsageError("cannot reduce an empty sample");
  Sample out;
  switch (spec.kind) {
    case ReductionKind::none:
      return sample;
    case ReductionKind::merge_runs:
      for (const auto& o : sample.observations) {
        if (out.observations.empty() || !(out.observations.back() == o)) out.observations.push_back(o);
      }
      return out;
    case ReductionKind::subsample:
      if (spec.n < 1) throw UsageError("subsample step must be at least 1");
      for (std::size_t i = 0; i < sample.observations.size(); i += spec.n) {
        out.observations.push_back(sample.observations[i]);
      }
      return out;
    case ReductionKind::window_average:
      throw UsageError("window_average applies to continuous feature values, not to discrete samples");
  }
  throw InternalError("unhandled reduction kind");
}

std::vector<double> window_average(std::span<const double> values, std::size_t width, bool angular) {
  if (width < 1) throw UsageError("window width must be at least 1");
  std::vector<double> out;
  out.reserve(values.size() / width + 1);
  for (std::size_t i = 0; i < values.size(); i += width) {
    const auto block = values.subspan(i, std::min(width, values.size() - i));
    if (angular) {
      out.push_back(circular_mean(block));
    } else {
      double sum = 0.0;
      for (double v : block) sum += v;
      out.push_back(sum / static_cast<double>(block.size()));
    }
  }
  return out;
}

Sample prepare(const RawTrace& trace, const FeatureSelection& input, const FeatureSelection& output,
               const ReductionSpec& reduction) {
  auto in_values = extract_feature(trace, input.kind);
  auto out_values = extract_feature(trace, output.kind);
  if (reduction.kind == ReductionKind::window_average) {
    in_values = window_average(in_values, reduction.n, is_angular(input.kind));
    out_values = window_average(out_values, reduction.n, is_angular(output.kind));
  }
  const auto in_symbols = discretize(in_values, input.spec);
  const auto out_symbols = discretize(out_values, output.spec);
  const auto sample = zip_observations(in_symbols, out_symbols);
  if (reduction.kind == ReductionKind::window_average) return sample;
  return reduce(sample, reduction);
}

}  // namespace locmbt
