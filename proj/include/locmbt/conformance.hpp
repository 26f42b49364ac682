#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "locmbt/mealy.hpp"

namespace locmbt {

enum class FailureKind { output_mismatch, undefined_transition };

struct ConformanceFailure {
  std::size_t position = 0;
  FailureKind kind = FailureKind::output_mismatch;
  StateId state = 0;
  SymbolId input = 0;
  SymbolId expected = 0;            // recorded output
  std::optional<SymbolId> actual;   // machine output, absent when undefined
};

struct Conformance {
  bool conforms = true;
  std::optional<ConformanceFailure> failure;  // first failing step
};

// Replays the sample from the initial state. An undefined transition makes
// the sample invalid, same as a differing output.
Conformance sample_conforms(const MealyMachine& machine, const Sample& sample);

struct ValidationFailure {
  std::size_t sample = 0;
  ConformanceFailure failure;
  std::string details;
};

struct ValidationReport {
  std::size_t total = 0;
  std::size_t valid = 0;
  double accuracy = 0.0;
  std::vector<ValidationFailure> failures;
};

// The sample set's alphabets must match the machine's label for label.
ValidationReport validate(const MealyMachine& machine, const SampleSet& samples);

nlohmann::json report_to_json(const ValidationReport& report);

}  // namespace locmbt
