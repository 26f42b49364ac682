#pragma once

#include <cstddef>
#include <iosfwd>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "locmbt/mealy.hpp"

namespace locmbt {

// One time-aligned pair of measured and reference poses. Positions in
// meters, angles in radians within [-pi, pi), t in seconds.
struct PoseRecord {
  double t = 0.0;
  double meas_x = 0.0;
  double meas_y = 0.0;
  double meas_theta = 0.0;
  double ref_x = 0.0;
  double ref_y = 0.0;
  double ref_theta = 0.0;
};

struct RawTrace {
  std::string run_id;
  double rate_hz = 20.0;
  std::vector<PoseRecord> records;
};

inline constexpr std::string_view kTraceCsvHeader = "t,meas_x,meas_y,meas_theta,ref_x,ref_y,ref_theta";

// Parses trace-CSV. Errors carry the 1-based line number.
RawTrace ingest_trace(std::istream& in, std::string run_id = {}, double rate_hz = 20.0);
RawTrace load_trace(const std::string& path, double rate_hz = 20.0);
// Shortest round-trip decimal formatting, so re-ingesting is exact.
void write_trace(std::ostream& out, const RawTrace& trace);
void validate_trace(const RawTrace& trace);

// Maps any finite angle into [-pi, pi).
double wrap_angle(double radians);

enum class FeatureKind {
  euclidean_error,
  orientation,
  orientation_error,
  axis_error_x,
  axis_error_y,
  movement_direction,
};

FeatureKind parse_feature_kind(std::string_view name);
std::string_view feature_name(FeatureKind kind);
bool is_angular(FeatureKind kind);

std::vector<double> extract_feature(const RawTrace& trace, FeatureKind kind);

// Sector i covers [center_i - pi/K, center_i + pi/K) measured counter-clockwise,
// with center_i = offset + i * 2pi/K, or offset - i * 2pi/K when clockwise.
struct SectorSpec {
  std::vector<std::string> labels;
  double offset = 0.0;
  bool clockwise = false;

  std::size_t count() const noexcept { return labels.size(); }
  double center(std::size_t i) const;
  std::size_t sector_of(double radians) const;

  // K sectors with the first centered on +y, numbered clockwise. Uses
  // N,E,S,W for K=4 and the eight compass points for K=8, s0..s(K-1) otherwise.
  static SectorSpec compass(std::size_t k);
};

// Label j covers [cut_(j-1), cut_j); a value equal to a cut belongs to the upper bin.
struct ThresholdSpec {
  std::vector<double> cuts;
  std::vector<std::string> labels;

  std::size_t bin_of(double value) const;
};

class DiscretizationSpec {
 public:
  DiscretizationSpec(SectorSpec sectors);       // NOLINT(google-explicit-constructor)
  DiscretizationSpec(ThresholdSpec thresholds);  // NOLINT(google-explicit-constructor)

  bool is_sectors() const noexcept { return std::holds_alternative<SectorSpec>(spec_); }
  const SectorSpec& sectors() const;
  const ThresholdSpec& thresholds() const;
  const std::vector<std::string>& labels() const;
  Alphabet alphabet(AlphabetKind kind) const { return Alphabet(kind, labels()); }

 private:
  std::variant<SectorSpec, ThresholdSpec> spec_;
};

std::vector<SymbolId> discretize(std::span<const double> values, const DiscretizationSpec& spec);

enum class ReductionKind { none, merge_runs, subsample, window_average };

struct ReductionSpec {
  ReductionKind kind = ReductionKind::merge_runs;
  std::size_t n = 1;
};

ReductionKind parse_reduction_kind(std::string_view name);
std::string_view reduction_name(ReductionKind kind);

Sample zip_observations(std::span<const SymbolId> inputs, std::span<const SymbolId> outputs);

// merge_runs collapses maximal runs of identical observations; subsample keeps
// every n-th observation starting at index 0. window_average is rejected since
// it only applies to continuous values.
Sample reduce(const Sample& sample, const ReductionSpec& spec);

// Non-overlapping block means of width n (circular mean for angles). The
// final partial block is averaged as well.
std::vector<double> window_average(std::span<const double> values, std::size_t width, bool angular);

struct FeatureSelection {
  FeatureKind kind;
  DiscretizationSpec spec;
};

Sample prepare(const RawTrace& trace, const FeatureSelection& input, const FeatureSelection& output,
               const ReductionSpec& reduction);

}  // namespace locmbt
