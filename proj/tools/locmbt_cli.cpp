// Command-line front end. Talks to the library exclusively through the C API.

#include <cstdio>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "locmbt/locmbt.h"

namespace {

struct Deleter {
  void operator()(locmbt_config* p) const { locmbt_config_free(p); }
  void operator()(locmbt_samples* p) const { locmbt_samples_free(p); }
  void operator()(locmbt_machine* p) const { locmbt_machine_free(p); }
  void operator()(locmbt_suite* p) const { locmbt_suite_free(p); }
  void operator()(char* p) const { locmbt_string_free(p); }
};

template <typename T>
using Handle = std::unique_ptr<T, Deleter>;

struct Failure {
  locmbt_status status;
};

void check(locmbt_status status) {
  if (status == LOCMBT_OK) return;
  const char* message = locmbt_last_error();
  std::cerr << "locmbt: " << (message && *message ? message : "error") << '\n';
  throw Failure{status};
}

void print(char* text) {
  Handle<char> owned(text);
  if (owned) std::cout << owned.get();
}

Handle<locmbt_config> load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::vector<const char*> raw;
  for (const auto& o : overrides) raw.push_back(o.c_str());
  locmbt_config* config = nullptr;
  check(locmbt_config_load(path.c_str(), raw.data(), raw.size(), &config));
  return Handle<locmbt_config>(config);
}

Handle<locmbt_machine> load_machine(const std::string& path) {
  locmbt_machine* machine = nullptr;
  check(locmbt_machine_load(path.c_str(), &machine));
  return Handle<locmbt_machine>(machine);
}

Handle<locmbt_samples> load_samples(const std::string& path) {
  locmbt_samples* samples = nullptr;
  check(locmbt_samples_load(path.c_str(), &samples));
  return Handle<locmbt_samples>(samples);
}

// Summary text is printed even when the command reports a non-zero status.
void run_command(locmbt_status (*command)(const locmbt_config*, char**), const locmbt_config* config) {
  char* summary = nullptr;
  const auto status = command(config, &summary);
  print(summary);
  check(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learn Mealy-machine models of localization systems and generate coverage test suites"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(locmbt_version()));

  std::string config_path;
  std::vector<std::string> overrides;
  auto add_config = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "Pipeline config file")->required();
    sub->add_option("--set", overrides, "Override a config key (section.key=value)");
  };

  auto* simulate = app.add_subcommand("simulate", "Generate a simulated trace campaign");
  add_config(simulate);

  auto* prepare = app.add_subcommand("prepare", "Abstract traces into a sample set");
  add_config(prepare);
  std::string samples_out;
  prepare->add_option("-o,--out", samples_out, "Sample set JSON to write")->required();

  auto* learn = app.add_subcommand("learn", "Learn a Mealy machine from a sample set");
  std::string samples_in;
  std::string machine_out;
  std::string dot_out;
  learn->add_option("-s,--samples", samples_in, "Sample set JSON")->required()->check(CLI::ExistingFile);
  learn->add_option("-o,--out", machine_out, "Machine JSON to write")->required();
  learn->add_option("--dot", dot_out, "Also write a Graphviz rendering");

  auto* validate = app.add_subcommand("validate", "Validate a machine against held-out samples");
  std::string machine_in;
  std::string report_out;
  double min_accuracy = -1.0;
  validate->add_option("-m,--machine", machine_in, "Machine JSON")->required()->check(CLI::ExistingFile);
  validate->add_option("-s,--samples", samples_in, "Sample set JSON")->required()->check(CLI::ExistingFile);
  validate->add_option("-o,--out", report_out, "Validation report JSON to write");
  validate->add_option("--min-accuracy", min_accuracy, "Exit with status 4 below this accuracy");

  auto* testgen = app.add_subcommand("testgen", "Generate a state or transition coverage suite");
  std::string kind = "tc";
  std::string elimination = "default";
  std::string suite_out;
  testgen->add_option("-m,--machine", machine_in, "Machine JSON")->required()->check(CLI::ExistingFile);
  testgen->add_option("-k,--kind", kind, "sc or tc")->check(CLI::IsMember({"sc", "tc"}));
  testgen->add_option("--prefix-elimination", elimination, "on, off or default")
      ->check(CLI::IsMember({"on", "off", "default"}));
  testgen->add_option("-o,--out", suite_out, "Suite JSON to write")->required();

  auto* map = app.add_subcommand("map", "Map a test suite to waypoint trajectories");
  add_config(map);
  std::string suite_in;
  std::string out_dir;
  std::string prefix = "traj";
  map->add_option("-m,--machine", machine_in, "Machine JSON")->required()->check(CLI::ExistingFile);
  map->add_option("-t,--suite", suite_in, "Suite JSON")->required()->check(CLI::ExistingFile);
  map->add_option("-o,--out-dir", out_dir, "Directory for trajectory CSVs")->required();
  map->add_option("--prefix", prefix, "File name prefix");

  auto* run = app.add_subcommand("run", "Full pipeline: prepare, learn, validate, generate and map tests");
  add_config(run);

  auto* sweep = app.add_subcommand("sweep", "Learn once per sector count and print one summary row each");
  add_config(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : LOCMBT_ERR_USAGE;
  }

  try {
    if (*simulate) {
      run_command(locmbt_simulate, load_config(config_path, overrides).get());
    } else if (*run) {
      run_command(locmbt_run, load_config(config_path, overrides).get());
    } else if (*sweep) {
      run_command(locmbt_sweep, load_config(config_path, overrides).get());
    } else if (*prepare) {
      auto config = load_config(config_path, overrides);
      locmbt_samples* samples = nullptr;
      check(locmbt_prepare(config.get(), &samples));
      Handle<locmbt_samples> owned(samples);
      check(locmbt_samples_save(samples, samples_out.c_str()));
      std::cout << "samples=" << locmbt_samples_count(samples) << '\n';
    } else if (*learn) {
      auto samples = load_samples(samples_in);
      locmbt_machine* machine = nullptr;
      check(locmbt_learn(samples.get(), &machine));
      Handle<locmbt_machine> owned(machine);
      check(locmbt_machine_save(machine, machine_out.c_str(), dot_out.empty() ? nullptr : dot_out.c_str()));
      std::cout << "states=" << locmbt_machine_state_count(machine) << '\n'
                << "transitions=" << locmbt_machine_transition_count(machine) << '\n';
    } else if (*validate) {
      auto machine = load_machine(machine_in);
      auto samples = load_samples(samples_in);
      double accuracy = 0.0;
      char* report = nullptr;
      check(locmbt_validate(machine.get(), samples.get(), &accuracy, &report));
      Handle<char> owned(report);
      if (!report_out.empty()) {
        std::FILE* f = std::fopen(report_out.c_str(), "wb");
        if (!f) {
          std::cerr << "locmbt: cannot write " << report_out << '\n';
          return LOCMBT_ERR_CONFIG;
        }
        std::fputs(report, f);
        std::fputc('\n', f);
        std::fclose(f);
      }
      std::cout << "accuracy=" << accuracy << '\n';
      if (min_accuracy >= 0.0 && accuracy < min_accuracy) return LOCMBT_NEEDS_MORE_SAMPLES;
    } else if (*testgen) {
      auto machine = load_machine(machine_in);
      const int flag = elimination == "default" ? -1 : (elimination == "on" ? 1 : 0);
      locmbt_suite* suite = nullptr;
      check(locmbt_suite_generate(machine.get(), kind == "sc" ? LOCMBT_STATE_COVERAGE : LOCMBT_TRANSITION_COVERAGE,
                                  flag, &suite));
      Handle<locmbt_suite> owned(suite);
      check(locmbt_suite_save(suite, suite_out.c_str()));
      std::cout << "sequences=" << locmbt_suite_size(suite) << '\n';
    } else if (*map) {
      auto config = load_config(config_path, overrides);
      auto machine = load_machine(machine_in);
      locmbt_suite* suite = nullptr;
      check(locmbt_suite_load(suite_in.c_str(), machine.get(), &suite));
      Handle<locmbt_suite> owned(suite);
      int full = 0;
      check(locmbt_suite_check(machine.get(), suite, &full, nullptr));
      if (!full) std::cerr << "locmbt: warning: suite does not reach full coverage on this machine\n";
      char* summary = nullptr;
      check(locmbt_suite_map(config.get(), machine.get(), suite, out_dir.c_str(), prefix.c_str(), &summary));
      print(summary);
    }
  } catch (const Failure& f) {
    return f.status;
  }
  return 0;
}
