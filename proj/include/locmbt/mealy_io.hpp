#pragma once

#include <string>

#include <json.hpp>

#include "locmbt/mealy.hpp"

namespace locmbt {

// {"states":[...], "initial":0, "inputs":[...], "outputs":[...],
//  "transitions":[{"from":0,"in":"N","to":0,"out":"a"}, ...]}
nlohmann::json machine_to_json(const MealyMachine& machine);
MealyMachine machine_from_json(const nlohmann::json& doc);

// Graphviz rendering; edges are labelled "in/out" and the initial state gets
// an entry arrow from an invisible node.
std::string machine_to_dot(const MealyMachine& machine, const std::string& name = "mealy");

// {"inputs":[...], "outputs":[...], "samples":[[["N","a"],["E","b"]], ...]}
nlohmann::json samples_to_json(const SampleSet& samples);
SampleSet samples_from_json(const nlohmann::json& doc);

}  // namespace locmbt
