#include "locmbt/mealy_io.hpp"

#include <algorithm>
#include <sstream>

#include <fmt/format.h>

#include "locmbt/error.hpp"

namespace locmbt {

namespace {

using nlohmann::json;

const json& require(const json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) {
    throw DataError(fmt::format("JSON document is missing key '{}'", key));
  }
  return doc.at(key);
}

std::vector<std::string> string_list(const json& doc, const char* key) {
  const auto& node = require(doc, key);
  if (!node.is_array()) throw DataError(fmt::format("'{}' must be an array of strings", key));
  std::vector<std::string> out;
  for (const auto& v : node) {
    if (!v.is_string()) throw DataError(fmt::format("'{}' must be an array of strings", key));
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

json machine_to_json(const MealyMachine& machine) {
  json states = json::array();
  for (StateId s = 0; s < machine.state_count(); ++s) states.push_back(s);
  json transitions = json::array();
  for (const auto& t : machine.transitions()) {
    transitions.push_back({{"from", t.from},
                           {"in", machine.inputs().label(t.input)},
                           {"to", t.to},
                           {"out", machine.outputs().label(t.output)}});
  }
  return json{{"states", std::move(states)},
              {"initial", machine.initial()},
              {"inputs", machine.inputs().labels()},
              {"outputs", machine.outputs().labels()},
              {"transitions", std::move(transitions)}};
}

MealyMachine machine_from_json(const json& doc) {
  try {
    Alphabet inputs(AlphabetKind::input, string_list(doc, "inputs"));
    Alphabet outputs(AlphabetKind::output, string_list(doc, "outputs"));

    const auto& states = require(doc, "states");
    if (!states.is_array() || states.empty()) throw DataError("'states' must be a non-empty array");
    std::vector<long long> ids;
    for (const auto& s : states) ids.push_back(s.get<long long>());
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i] != static_cast<long long>(i)) {
        throw DataError("'states' must list the dense ids 0..n-1");
      }
    }

    std::vector<TransitionSpec> specs;
    for (const auto& t : require(doc, "transitions")) {
      specs.push_back({require(t, "from").get<StateId>(),
                       inputs.index_of(require(t, "in").get<std::string>()),
                       require(t, "to").get<StateId>(),
                       outputs.index_of(require(t, "out").get<std::string>())});
    }
    const auto initial = require(doc, "initial").get<StateId>();
    return MealyMachine(std::move(inputs), std::move(outputs), ids.size(), specs, initial);
  } catch (const json::exception& e) {
    throw DataError(fmt::format("malformed machine JSON: {}", e.what()));
  } catch (const UsageError& e) {
    throw DataError(fmt::format("invalid machine JSON: {}", e.what()));
  }
}

std::string machine_to_dot(const MealyMachine& machine, const std::string& name) {
  std::ostringstream out;
  out << "digraph \"" << dot_escape(name) << "\" {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=circle];\n";
  out << "  __start [shape=point, style=invis];\n";
  for (StateId s = 0; s < machine.state_count(); ++s) out << "  " << s << ";\n";
  out << "  __start -> " << machine.initial() << ";\n";
  for (const auto& t : machine.transitions()) {
    out << "  " << t.from << " -> " << t.to << " [label=\""
        << dot_escape(machine.inputs().label(t.input)) << '/'
        << dot_escape(machine.outputs().label(t.output)) << "\"];\n";
  }
  out << "}\n";
  return out.str();
}

json samples_to_json(const SampleSet& samples) {
  json list = json::array();
  for (const auto& s : samples.samples()) {
    json obs = json::array();
    for (const auto& o : s.observations) {
      obs.push_back({samples.inputs().label(o.input), samples.outputs().label(o.output)});
    }
    list.push_back(std::move(obs));
  }
  return json{{"inputs", samples.inputs().labels()},
              {"outputs", samples.outputs().labels()},
              {"samples", std::move(list)}};
}

SampleSet samples_from_json(const json& doc) {
  try {
    SampleSet set(Alphabet(AlphabetKind::input, string_list(doc, "inputs")),
                  Alphabet(AlphabetKind::output, string_list(doc, "outputs")));
    for (const auto& s : require(doc, "samples")) {
      Sample sample;
      for (const auto& o : s) {
        if (!o.is_array() || o.size() != 2) throw DataError("observations must be [input, output] pairs");
        sample.observations.push_back({set.inputs().index_of(o[0].get<std::string>()),
                                       set.outputs().index_of(o[1].get<std::string>())});
      }
      set.add(std::move(sample));
    }
    return set;
  } catch (const json::exception& e) {
    throw DataError(fmt::format("malformed sample JSON: {}", e.what()));
  } catch (const UsageError& e) {
    throw DataError(fmt::format("invalid sample JSON: {}", e.what()));
  }
}

}  // namespace locmbt
