#include "locmbt/locmbt.h"

#include <cstdlib>
#include <cstring>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "locmbt/conformance.hpp"
#include "locmbt/error.hpp"
#include "locmbt/learner.hpp"
#include "locmbt/mealy_io.hpp"
#include "locmbt/pipeline.hpp"
#include "locmbt/testgen.hpp"

struct locmbt_config {
  locmbt::PipelineConfig value;
};

struct locmbt_samples {
  locmbt::SampleSet value;
};

struct locmbt_machine {
  locmbt::MealyMachine value;
};

struct locmbt_suite {
  locmbt::TestSuite value;
  locmbt::Alphabet inputs;
};

namespace {

thread_local std::string last_error;

locmbt_status fail(locmbt_status status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs fn, translating exceptions into status codes.
template <typename Fn>
locmbt_status guarded(Fn&& fn) {
  last_error.clear();
  try {
    return fn();
  } catch (const locmbt::Error& e) {
    return fail(static_cast<locmbt_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(LOCMBT_ERR_INTERNAL, "out of memory");
  } catch (const nlohmann::json::exception& e) {
    return fail(LOCMBT_ERR_DATA, e.what());
  } catch (const std::exception& e) {
    return fail(LOCMBT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(LOCMBT_ERR_INTERNAL, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  auto* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void hand_out(char** dst, const std::string& s) {
  if (dst) *dst = dup_string(s);
}

void require(const void* p, const char* what) {
  if (!p) throw locmbt::UsageError(fmt::format("{} must not be NULL", what));
}

std::vector<std::string> strings(const char* const* items, size_t n) {
  if (n > 0) require(items, "string array");
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i) {
    require(items[i], "string array element");
    out.emplace_back(items[i]);
  }
  return out;
}

locmbt_status command_status(const locmbt::CommandResult& result) {
  if (result.ok) return LOCMBT_OK;
  last_error = result.message.empty() ? result.summary : result.message;
  return static_cast<locmbt_status>(result.status);
}

}  // namespace

extern "C" {

const char* locmbt_version(void) { return "0.1.0"; }

const char* locmbt_last_error(void) { return last_error.c_str(); }

void locmbt_string_free(char* s) { std::free(s); }

locmbt_status locmbt_config_load(const char* path, const char* const* overrides, size_t n, locmbt_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    const auto o = strings(overrides, n);
    *out = new locmbt_config{locmbt::load_config(path, o)};
    return LOCMBT_OK;
  });
}

locmbt_status locmbt_config_parse(const char* text, const char* base_dir, const char* const* overrides, size_t n,
                                  locmbt_config** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    const auto o = strings(overrides, n);
    std::istringstream in(text);
    *out = new locmbt_config{locmbt::parse_config(in, base_dir ? base_dir : ".", o)};
    return LOCMBT_OK;
  });
}

void locmbt_config_free(locmbt_config* config) { delete config; }

locmbt_status locmbt_simulate(const locmbt_config* config, char** summary) {
  return guarded([&] {
    require(config, "config");
    const auto result = locmbt::cmd_simulate(config->value);
    hand_out(summary, result.summary);
    return command_status(result);
  });
}

locmbt_status locmbt_run(const locmbt_config* config, char** summary) {
  return guarded([&] {
    require(config, "config");
    const auto result = locmbt::cmd_run(config->value);
    hand_out(summary, result.summary);
    return command_status(result);
  });
}

locmbt_status locmbt_sweep(const locmbt_config* config, char** summary) {
  return guarded([&] {
    require(config, "config");
    const auto result = locmbt::cmd_sweep(config->value);
    hand_out(summary, result.summary);
    return command_status(result);
  });
}

locmbt_status locmbt_prepare(const locmbt_config* config, locmbt_samples** out) {
  return guarded([&] {
    require(config, "config");
    require(out, "out");
    const auto traces = locmbt::load_traces(config->value);
    *out = new locmbt_samples{locmbt::prepare_all(config->value, traces).samples};
    return LOCMBT_OK;
  });
}

locmbt_status locmbt_samples_from_json(const char* json, locmbt_samples** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new locmbt_samples{locmbt::samples_from_json(nlohmann::json::parse(json))};
    return LOCMBT_OK;
  });
}

locmbt_status locmbt_samples_load(const char* path, locmbt_samples** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new locmbt_samples{locmbt::samples_from_json(nlohmann::json::parse(locmbt::read_text(path)))};
    return LOCMBT_OK;
  });
}

locmbt_status locmbt_samples_save(const locmbt_samples* samples, const char* path) {
  return guarded([&] {
    require(samples, "samples");
    require(path, "path");
    locmbt::write_text(path, locmbt::samples_to_json(samples->value).dump(2) + "\n");
    return LOCMBT_OK;
  });
}

size_t locmbt_samples_count(const locmbt_samples* samples) { return samples ? samples->value.size() : 0; }

void locmbt_samples_free(locmbt_samples* samples) { delete samples; }

locmbt_status locmbt_learn(const locmbt_samples* samples, locmbt_machine** out) {
  return guarded([&] {
    require(samples, "samples");
    require(out, "out");
    *out = new locmbt_machine{locmbt::learn(samples->value)};
    return LOCMBT_OK;
  });
}

locmbt_status locmbt_machine_from_json(const char* json, locmbt_machine** out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new locmbt_machine{locmbt::machine_from_json(nlohmann::json::parse(json))};
    return LOCMBT_OK;
  });
}

locmbt_status locmbt_machine_load(const char* path, locmbt_machine** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new locmbt_machine{locmbt::machine_from_json(nlohmann::json::parse(locmbt::read_text(path)))};
    return LOCMBT_OK;
  });
}

locmbt_status locmbt_machine_save(const locmbt_machine* machine, const char* json_path, const char* dot_path) {
  return guarded([&] {
    require(machine, "machine");
    if (json_path) locmbt::write_text(json_path, locmbt::machine_to_json(machine->value).dump(2) + "\n");
    if (dot_path) locmbt::write_text(dot_path, locmbt::machine_to_dot(machine->value));
    return LOCMBT_OK;
  });
}

locmbt_status locmbt_machine_to_json(const locmbt_machine* machine, char** json) {
  return guarded([&] {
    require(machine, "machine");
    require(json, "json");
    hand_out(json, locmbt::machine_to_json(machine->value).dump(2));
    return LOCMBT_OK;
  });
}

locmbt_status locmbt_machine_to_dot(const locmbt_machine* machine, char** dot) {
  return guarded([&] {
    require(machine, "machine");
    require(dot, "dot");
    hand_out(dot, locmbt::machine_to_dot(machine->value));
    return LOCMBT_OK;
  });
}

size_t locmbt_machine_state_count(const locmbt_machine* machine) {
  return machine ? machine->value.state_count() : 0;
}

size_t locmbt_machine_transition_count(const locmbt_machine* machine) {
  return machine ? machine->value.transition_count() : 0;
}

locmbt_status locmbt_machine_run(const locmbt_machine* machine, const char* const* inputs, size_t n,
                                 char** outputs) {
  return guarded([&] {
    require(machine, "machine");
    const auto& m = machine->value;
    const auto labels = strings(inputs, n);
    const auto word = locmbt::ids_of(m.inputs(), labels);
    const auto result = locmbt::run(m, word);
    if (!result.ok()) {
      const auto& u = *result.undefined;
      return fail(LOCMBT_ERR_DATA, fmt::format("undefined transition at position {} (state {}, input '{}')",
                                               u.position, u.state, m.inputs().label(u.input)));
    }
    hand_out(outputs, fmt::format("{}", fmt::join(locmbt::labels_of(m.outputs(), result.outputs), ",")));
    return LOCMBT_OK;
  });
}

int locmbt_machine_isomorphic(const locmbt_machine* a, const locmbt_machine* b) {
  int result = -1;
  guarded([&] {
    require(a, "a");
    require(b, "b");
    result = locmbt::isomorphic(a->value, b->value) ? 1 : 0;
    return LOCMBT_OK;
  });
  return result;
}

void locmbt_machine_free(locmbt_machine* machine) { delete machine; }

locmbt_status locmbt_validate(const locmbt_machine* machine, const locmbt_samples* samples, double* accuracy,
                              char** report_json) {
  return guarded([&] {
    require(machine, "machine");
    require(samples, "samples");
    const auto report = locmbt::validate(machine->value, samples->value);
    if (accuracy) *accuracy = report.accuracy;
    hand_out(report_json, locmbt::report_to_json(report).dump(2));
    return LOCMBT_OK;
  });
}

locmbt_status locmbt_suite_generate(const locmbt_machine* machine, locmbt_coverage kind, int prefix_elimination,
                                    locmbt_suite** out) {
  return guarded([&] {
    require(machine, "machine");
    require(out, "out");
    if (kind != LOCMBT_STATE_COVERAGE && kind != LOCMBT_TRANSITION_COVERAGE) {
      throw locmbt::UsageError("unknown coverage kind");
    }
    const bool state = kind == LOCMBT_STATE_COVERAGE;
    locmbt::SuiteOptions options = state ? locmbt::SuiteOptions::for_states() : locmbt::SuiteOptions::for_transitions();
    if (prefix_elimination >= 0) options.prefix_elimination = prefix_elimination != 0;
    auto suite = state ? locmbt::state_coverage(machine->value, options)
                       : locmbt::transition_coverage(machine->value, options);
    *out = new locmbt_suite{std::move(suite), machine->value.inputs()};
    return LOCMBT_OK;
  });
}

locmbt_status locmbt_suite_from_json(const char* json, const locmbt_machine* machine, locmbt_suite** out) {
  return guarded([&] {
    require(json, "json");
    require(machine, "machine");
    require(out, "out");
    const auto& inputs = machine->value.inputs();
    *out = new locmbt_suite{locmbt::suite_from_json(nlohmann::json::parse(json), inputs), inputs};
    return LOCMBT_OK;
  });
}

locmbt_status locmbt_suite_load(const char* path, const locmbt_machine* machine, locmbt_suite** out) {
  return guarded([&] {
    require(path, "path");
    require(machine, "machine");
    require(out, "out");
    const auto& inputs = machine->value.inputs();
    *out = new locmbt_suite{locmbt::suite_from_json(nlohmann::json::parse(locmbt::read_text(path)), inputs),
                            inputs};
    return LOCMBT_OK;
  });
}

locmbt_status locmbt_suite_to_json(const locmbt_suite* suite, char** json) {
  return guarded([&] {
    require(suite, "suite");
    require(json, "json");
    hand_out(json, locmbt::suite_to_json(suite->value, suite->inputs).dump(2));
    return LOCMBT_OK;
  });
}

locmbt_status locmbt_suite_save(const locmbt_suite* suite, const char* path) {
  return guarded([&] {
    require(suite, "suite");
    require(path, "path");
    locmbt::write_text(path, locmbt::suite_to_json(suite->value, suite->inputs).dump(2) + "\n");
    return LOCMBT_OK;
  });
}

size_t locmbt_suite_size(const locmbt_suite* suite) { return suite ? suite->value.sequences.size() : 0; }

locmbt_status locmbt_suite_check(const locmbt_machine* machine, const locmbt_suite* suite, int* full,
                                 char** verdict_json) {
  return guarded([&] {
    require(machine, "machine");
    require(suite, "suite");
    if (suite->inputs.labels() != machine->value.inputs().labels()) {
      throw locmbt::UsageError("suite and machine use different input alphabets");
    }
    const auto v = locmbt::check_suite(machine->value, suite->value);
    if (full) *full = v.full ? 1 : 0;
    if (verdict_json) {
      nlohmann::json doc{{"valid", v.valid},
                         {"full", v.full},
                         {"covered_states", v.covered_states},
                         {"uncovered_states", v.uncovered_states},
                         {"covered_transitions", v.covered_transitions.size()},
                         {"uncovered_transitions", nlohmann::json::array()}};
      for (const auto& t : v.uncovered_transitions) {
        doc["uncovered_transitions"].push_back({{"state", t.state}, {"in", suite->inputs.label(t.input)}});
      }
      if (v.invalid_sequence) {
        doc["invalid_sequence"] = *v.invalid_sequence;
        doc["invalid_position"] = v.undefined->position;
      }
      hand_out(verdict_json, doc.dump(2));
    }
    return LOCMBT_OK;
  });
}

locmbt_status locmbt_suite_map(const locmbt_config* config, const locmbt_machine* machine, const locmbt_suite* suite,
                               const char* out_dir, const char* prefix, char** summary) {
  return guarded([&] {
    require(config, "config");
    require(machine, "machine");
    require(suite, "suite");
    require(out_dir, "out_dir");
    const auto trajectories =
        locmbt::map_suite(config->value, machine->value, suite->value, out_dir, prefix ? prefix : "traj");
    std::string text = fmt::format("trajectories={}\n", trajectories.size());
    for (const auto& t : trajectories) {
      for (const auto& w : t.warnings) text += fmt::format("warning={}\n", w);
    }
    hand_out(summary, text);
    return LOCMBT_OK;
  });
}

void locmbt_suite_free(locmbt_suite* suite) { delete suite; }

}  // extern "C"
