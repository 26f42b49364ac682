#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace locmbt {

using StateId = std::uint32_t;
using SymbolId = std::uint16_t;

enum class AlphabetKind { input, output };

struct Symbol {
  SymbolId id = 0;
  std::string label;

  friend bool operator==(const Symbol&, const Symbol&) = default;
};

// Ordered, non-empty set of labelled symbols. The order fixed at construction
// is the canonical order used for every tie-break in the library.
class Alphabet {
 public:
  Alphabet() = default;
  Alphabet(AlphabetKind kind, std::vector<std::string> labels);

  AlphabetKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }

  const std::string& label(SymbolId id) const;
  Symbol symbol(SymbolId id) const { return Symbol{id, label(id)}; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  std::optional<SymbolId> find(std::string_view label) const;
  // Throws UsageError for labels not in the alphabet.
  SymbolId index_of(std::string_view label) const;
  bool contains(SymbolId id) const noexcept { return id < labels_.size(); }

  friend bool operator==(const Alphabet& a, const Alphabet& b) {
    return a.kind_ == b.kind_ && a.labels_ == b.labels_;
  }

 private:
  AlphabetKind kind_ = AlphabetKind::input;
  std::vector<std::string> labels_;
};

struct Observation {
  SymbolId input = 0;
  SymbolId output = 0;

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct Sample {
  std::vector<Observation> observations;

  std::size_t size() const noexcept { return observations.size(); }
  std::vector<SymbolId> inputs() const;
  std::vector<SymbolId> outputs() const;

  friend bool operator==(const Sample&, const Sample&) = default;
};

class SampleSet {
 public:
  SampleSet(Alphabet inputs, Alphabet outputs, std::vector<Sample> samples = {});

  const Alphabet& inputs() const noexcept { return inputs_; }
  const Alphabet& outputs() const noexcept { return outputs_; }
  const std::vector<Sample>& samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }

  // Validates the sample against both alphabets.
  void add(Sample sample);

 private:
  Alphabet inputs_;
  Alphabet outputs_;
  std::vector<Sample> samples_;
};

struct Transition {
  StateId target = 0;
  SymbolId output = 0;

  friend bool operator==(const Transition&, const Transition&) = default;
};

struct TransitionSpec {
  StateId from = 0;
  SymbolId input = 0;
  StateId to = 0;
  SymbolId output = 0;
};

struct TransitionKey {
  StateId state = 0;
  SymbolId input = 0;

  friend auto operator<=>(const TransitionKey&, const TransitionKey&) = default;
};

// Partial deterministic Mealy machine.
//
// States are renumbered on construction: states reachable from the initial
// state come first in breadth-first discovery order (inputs expanded in
// canonical alphabet order), so the initial state is always 0. Unreachable
// states follow in their original relative order.
class MealyMachine {
 public:
  MealyMachine(Alphabet inputs, Alphabet outputs, std::size_t state_count,
               std::span<const TransitionSpec> transitions, StateId initial = 0);

  const Alphabet& inputs() const noexcept { return inputs_; }
  const Alphabet& outputs() const noexcept { return outputs_; }
  std::size_t state_count() const noexcept { return state_count_; }
  StateId initial() const noexcept { return 0; }

  // Unchecked lookup; callers must pass a valid state and input.
  const std::optional<Transition>& at(StateId state, SymbolId input) const {
    return table_[static_cast<std::size_t>(state) * inputs_.size() + input];
  }

  std::size_t transition_count() const;
  std::vector<TransitionSpec> transitions() const;

 private:
  Alphabet inputs_;
  Alphabet outputs_;
  std::size_t state_count_ = 0;
  std::vector<std::optional<Transition>> table_;
};

std::optional<Transition> step(const MealyMachine& machine, StateId state, SymbolId input);

struct UndefinedStep {
  std::size_t position = 0;
  StateId state = 0;
  SymbolId input = 0;
};

// Outcome of replaying an input word from the initial state. On failure the
// fields describe the prefix that was replayed before the undefined step.
struct RunResult {
  std::vector<SymbolId> outputs;
  std::vector<StateId> visited;
  std::vector<TransitionKey> traversed;  // sorted, unique
  std::optional<UndefinedStep> undefined;

  bool ok() const noexcept { return !undefined.has_value(); }
};

RunResult run(const MealyMachine& machine, std::span<const SymbolId> inputs);

std::vector<StateId> reachable_states(const MealyMachine& machine);

struct TransitionListing {
  std::vector<TransitionKey> reachable;
  std::vector<TransitionKey> unreachable;
};

// Reachable transitions ordered by (BFS state order, canonical input order).
TransitionListing defined_transitions(const MealyMachine& machine);

// Shortest access word per reachable state; absent for unreachable states.
std::vector<std::optional<std::vector<SymbolId>>> access_sequences(const MealyMachine& machine);

// Compares reachable parts. Alphabets must hold the same labels (order may
// differ); otherwise throws UsageError.
bool isomorphic(const MealyMachine& a, const MealyMachine& b);

// Copy restricted to the states reachable from the initial state.
MealyMachine reachable_part(const MealyMachine& machine);

std::vector<std::string> labels_of(const Alphabet& alphabet, std::span<const SymbolId> ids);
std::vector<SymbolId> ids_of(const Alphabet& alphabet, std::span<const std::string> labels);

}  // namespace locmbt
