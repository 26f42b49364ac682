#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "locmbt/error.hpp"
#include "locmbt/mealy.hpp"

namespace locmbt {

// Two samples disagree on the output after the same input prefix. Usually
// a sign that the chosen features or discretization do not describe a
// deterministic system.
class OutputConflict : public DataError {
 public:
  OutputConflict(std::vector<SymbolId> prefix, SymbolId input, SymbolId first_output,
                 SymbolId second_output, std::size_t first_sample, std::size_t second_sample,
                 const std::string& what);

  const std::vector<SymbolId>& prefix() const noexcept { return prefix_; }
  SymbolId input() const noexcept { return input_; }
  SymbolId first_output() const noexcept { return first_output_; }
  SymbolId second_output() const noexcept { return second_output_; }
  std::size_t first_sample() const noexcept { return first_sample_; }
  std::size_t second_sample() const noexcept { return second_sample_; }

 private:
  std::vector<SymbolId> prefix_;
  SymbolId input_;
  SymbolId first_output_;
  SymbolId second_output_;
  std::size_t first_sample_;
  std::size_t second_sample_;
};

// Tree-shaped machine with one state per distinct input prefix. States come
// out in length-lexicographic order of their prefixes. Throws OutputConflict.
MealyMachine build_prefix_tree(const SampleSet& samples);

// Identifies `blue` with `red` and folds successors until the machine is
// deterministic again. Returns nullopt when two folded transitions on the same
// input disagree on their output.
std::optional<MealyMachine> merge_fold(const MealyMachine& machine, StateId red, StateId blue);

// Red-blue state merging over the prefix tree. The least blue state (shortest
// access word, then input order) is merged into the first compatible red
// state or promoted to red when none is compatible.
MealyMachine learn(const SampleSet& samples);

struct SplitRatio {
  unsigned learn_parts = 2;
  unsigned validate_parts = 1;
};

struct SampleSplit {
  SampleSet learning;
  SampleSet validation;
  std::vector<std::size_t> learning_indices;
  std::vector<std::size_t> validation_indices;
};

// Seeded shuffle (mt19937_64) followed by a cut at
// round(total * learn / (learn + validate)), clamped so both parts are non-empty.
SampleSplit split_samples(const SampleSet& samples, std::uint64_t seed, SplitRatio ratio = {});

}  // namespace locmbt
