#include "locmbt/conformance.hpp"

#include <fmt/format.h>

#include "locmbt/error.hpp"

namespace locmbt {

Conformance sample_conforms(const MealyMachine& machine, const Sample& sample) {
  for (const auto& o : sample.observations) {
    if (!machine.inputs().contains(o.input) || !machine.outputs().contains(o.output)) {
      throw UsageError("sample uses symbols outside the machine's alphabets");
    }
  }
  StateId state = machine.initial();
  for (std::size_t i = 0; i < sample.observations.size(); ++i) {
    const auto& o = sample.observations[i];
    const auto& t = machine.at(state, o.input);
    if (!t) {
      return {false, ConformanceFailure{i, FailureKind::undefined_transition, state, o.input, o.output,
                                        std::nullopt}};
    }
    if (t->output != o.output) {
      return {false, ConformanceFailure{i, FailureKind::output_mismatch, state, o.input, o.output,
                                        t->output}};
    }
    state = t->target;
  }
  return {true, std::nullopt};
}

ValidationReport validate(const MealyMachine& machine, const SampleSet& samples) {
  if (samples.empty()) throw DataError("cannot validate against an empty sample set");
  if (samples.inputs().labels() != machine.inputs().labels() ||
      samples.outputs().labels() != machine.outputs().labels()) {
    throw UsageError("validation samples and machine use different alphabets");
  }

  ValidationReport report;
  report.total = samples.size();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto result = sample_conforms(machine, samples.samples()[i]);
    if (result.conforms) {
      ++report.valid;
      continue;
    }
    const auto& f = *result.failure;
    const auto& in = machine.inputs();
    const auto& out = machine.outputs();
    std::string details =
        f.kind == FailureKind::undefined_transition
            ? fmt::format("no transition from state {} on '{}'", f.state, in.label(f.input))
            : fmt::format("state {} on '{}' outputs '{}', sample recorded '{}'", f.state, in.label(f.input),
                          out.label(*f.actual), out.label(f.expected));
    report.failures.push_back({i, f, std::move(details)});
  }
  report.accuracy = static_cast<double>(report.valid) / static_cast<double>(report.total);
  return report;
}

nlohmann::json report_to_json(const ValidationReport& report) {
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& f : report.failures) {
    failures.push_back({{"sample", f.sample},
                        {"position", f.failure.position},
                        {"kind", f.failure.kind == FailureKind::undefined_transition ? "undefined-transition"
                                                                                     : "output-mismatch"},
                        {"details", f.details}});
  }
  return {{"total", report.total},
          {"valid", report.valid},
          {"accuracy", report.accuracy},
          {"failures", std::move(failures)}};
}

}  // namespace locmbt
