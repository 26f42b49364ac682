#include "locmbt/mealy.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <unordered_set>

#include <fmt/format.h>

#include "locmbt/error.hpp"

namespace locmbt {

namespace {

constexpr StateId kNoState = std::numeric_limits<StateId>::max();

const char* kind_name(AlphabetKind kind) {
  return kind == AlphabetKind::input ? "input" : "output";
}

void check_state(const MealyMachine& machine, StateId state) {
  if (state >= machine.state_count()) {
    throw UsageError(fmt::format("state {} is not a state of the machine ({} states)", state,
                                 machine.state_count()));
  }
}

void check_input(const MealyMachine& machine, SymbolId input) {
  if (!machine.inputs().contains(input)) {
    throw UsageError(fmt::format("input symbol id {} is not in the input alphabet", input));
  }
}

}  // namespace

Alphabet::Alphabet(AlphabetKind kind, std::vector<std::string> labels)
    : kind_(kind), labels_(std::move(labels)) {
  if (labels_.empty()) {
    throw UsageError(fmt::format("{} alphabet must not be empty", kind_name(kind_)));
  }
  if (labels_.size() > std::numeric_limits<SymbolId>::max()) {
    throw UsageError(fmt::format("{} alphabet is too large", kind_name(kind_)));
  }
  std::unordered_set<std::string> seen;
  for (const auto& l : labels_) {
    if (l.empty()) throw UsageError(fmt::format("{} alphabet has an empty label", kind_name(kind_)));
    if (!seen.insert(l).second) {
      throw UsageError(fmt::format("duplicate label '{}' in {} alphabet", l, kind_name(kind_)));
    }
  }
}

const std::string& Alphabet::label(SymbolId id) const {
  if (!contains(id)) {
    throw UsageError(fmt::format("symbol id {} is not in the {} alphabet", id, kind_name(kind_)));
  }
  return labels_[id];
}

std::optional<SymbolId> Alphabet::find(std::string_view label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<SymbolId>(it - labels_.begin());
}

SymbolId Alphabet::index_of(std::string_view label) const {
  if (auto id = find(label)) return *id;
  throw UsageError(fmt::format("'{}' is not in the {} alphabet", label, kind_name(kind_)));
}

std::vector<SymbolId> Sample::inputs() const {
  std::vector<SymbolId> out;
  out.reserve(observations.size());
  for (const auto& o : observations) out.push_back(o.input);
  return out;
}

std::vector<SymbolId> Sample::outputs() const {
  std::vector<SymbolId> out;
  out.reserve(observations.size());
  for (const auto& o : observations) out.push_back(o.output);
  return out;
}

SampleSet::SampleSet(Alphabet inputs, Alphabet outputs, std::vector<Sample> samples)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)) {
  if (inputs_.kind() != AlphabetKind::input || outputs_.kind() != AlphabetKind::output) {
    throw UsageError("sample set needs an input and an output alphabet");
  }
  samples_.reserve(samples.size());
  for (auto& s : samples) add(std::move(s));
}

void SampleSet::add(Sample sample) {
  if (sample.observations.empty()) throw UsageError("samples must hold at least one observation");
  for (std::size_t i = 0; i < sample.observations.size(); ++i) {
    const auto& o = sample.observations[i];
    if (!inputs_.contains(o.input) || !outputs_.contains(o.output)) {
      throw UsageError(fmt::format("sample {} observation {} uses a symbol outside the alphabets",
                                   samples_.size(), i));
    }
  }
  samples_.push_back(std::move(sample));
}

MealyMachine::MealyMachine(Alphabet inputs, Alphabet outputs, std::size_t state_count,
                           std::span<const TransitionSpec> transitions, StateId initial)
    : inputs_(std::move(inputs)), outputs_(std::move(outputs)), state_count_(state_count) {
  if (inputs_.kind() != AlphabetKind::input || outputs_.kind() != AlphabetKind::output) {
    throw UsageError("machine needs an input and an output alphabet");
  }
  if (state_count_ == 0) throw UsageError("machine needs at least one state");
  if (state_count_ >= kNoState) throw UsageError("too many states");
  if (initial >= state_count_) {
    throw UsageError(fmt::format("initial state {} does not exist", initial));
  }

  const std::size_t width = inputs_.size();
  std::vector<std::optional<Transition>> raw(state_count_ * width);
  for (const auto& t : transitions) {
    if (t.from >= state_count_ || t.to >= state_count_) {
      throw UsageError(fmt::format("transition {} -> {} references a missing state", t.from, t.to));
    }
    if (!inputs_.contains(t.input) || !outputs_.contains(t.output)) {
      throw UsageError(fmt::format("transition from state {} uses a foreign symbol", t.from));
    }
    auto& slot = raw[static_cast<std::size_t>(t.from) * width + t.input];
    const Transition value{t.to, t.output};
    if (slot && *slot != value) {
      throw UsageError(fmt::format("nondeterministic transition at state {} input '{}'", t.from,
                                   inputs_.label(t.input)));
    }
    slot = value;
  }

  // Canonical renumbering.
  std::vector<StateId> rename(state_count_, kNoState);
  std::vector<StateId> order;
  order.reserve(state_count_);
  rename[initial] = 0;
  order.push_back(initial);
  for (std::size_t head = 0; head < order.size(); ++head) {
    const StateId s = order[head];
    for (std::size_t a = 0; a < width; ++a) {
      const auto& t = raw[s * width + a];
      if (t && rename[t->target] == kNoState) {
        rename[t->target] = static_cast<StateId>(order.size());
        order.push_back(t->target);
      }
    }
  }
  for (StateId s = 0; s < state_count_; ++s) {
    if (rename[s] == kNoState) {
      rename[s] = static_cast<StateId>(order.size());
      order.push_back(s);
    }
  }

  table_.resize(raw.size());
  for (std::size_t n = 0; n < order.size(); ++n) {
    const StateId old = order[n];
    for (std::size_t a = 0; a < width; ++a) {
      if (const auto& t = raw[old * width + a]) {
        table_[n * width + a] = Transition{rename[t->target], t->output};
      }
    }
  }
}

std::size_t MealyMachine::transition_count() const {
  return static_cast<std::size_t>(
      std::count_if(table_.begin(), table_.end(), [](const auto& t) { return t.has_value(); }));
}

std::vector<TransitionSpec> MealyMachine::transitions() const {
  std::vector<TransitionSpec> out;
  const std::size_t width = inputs_.size();
  for (std::size_t i = 0; i < table_.size(); ++i) {
    if (const auto& t = table_[i]) {
      out.push_back({static_cast<StateId>(i / width), static_cast<SymbolId>(i % width), t->target,
                     t->output});
    }
  }
  return out;
}

std::optional<Transition> step(const MealyMachine& machine, StateId state, SymbolId input) {
  check_state(machine, state);
  check_input(machine, input);
  return machine.at(state, input);
}

RunResult run(const MealyMachine& machine, std::span<const SymbolId> inputs) {
  for (SymbolId a : inputs) check_input(machine, a);

  RunResult result;
  result.outputs.reserve(inputs.size());
  result.visited.reserve(inputs.size() + 1);
  StateId state = machine.initial();
  result.visited.push_back(state);
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& t = machine.at(state, inputs[i]);
    if (!t) {
      result.undefined = UndefinedStep{i, state, inputs[i]};
      break;
    }
    result.traversed.push_back({state, inputs[i]});
    result.outputs.push_back(t->output);
    state = t->target;
    result.visited.push_back(state);
  }
  std::sort(result.traversed.begin(), result.traversed.end());
  result.traversed.erase(std::unique(result.traversed.begin(), result.traversed.end()),
                         result.traversed.end());
  return result;
}

std::vector<StateId> reachable_states(const MealyMachine& machine) {
  std::vector<bool> seen(machine.state_count(), false);
  std::vector<StateId> order{machine.initial()};
  seen[machine.initial()] = true;
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (SymbolId a = 0; a < machine.inputs().size(); ++a) {
      if (const auto& t = machine.at(order[head], a); t && !seen[t->target]) {
        seen[t->target] = true;
        order.push_back(t->target);
      }
    }
  }
  return order;
}

TransitionListing defined_transitions(const MealyMachine& machine) {
  const auto reachable = reachable_states(machine);
  std::vector<bool> is_reachable(machine.state_count(), false);
  for (StateId s : reachable) is_reachable[s] = true;

  TransitionListing listing;
  for (StateId s : reachable) {
    for (SymbolId a = 0; a < machine.inputs().size(); ++a) {
      if (machine.at(s, a)) listing.reachable.push_back({s, a});
    }
  }
  for (StateId s = 0; s < machine.state_count(); ++s) {
    if (is_reachable[s]) continue;
    for (SymbolId a = 0; a < machine.inputs().size(); ++a) {
      if (machine.at(s, a)) listing.unreachable.push_back({s, a});
    }
  }
  return listing;
}

std::vector<std::optional<std::vector<SymbolId>>> access_sequences(const MealyMachine& machine) {
  std::vector<std::optional<std::vector<SymbolId>>> access(machine.state_count());
  access[machine.initial()] = std::vector<SymbolId>{};
  std::deque<StateId> queue{machine.initial()};
  while (!queue.empty()) {
    const StateId s = queue.front();
    queue.pop_front();
    for (SymbolId a = 0; a < machine.inputs().size(); ++a) {
      const auto& t = machine.at(s, a);
      if (!t || access[t->target]) continue;
      auto word = *access[s];
      word.push_back(a);
      access[t->target] = std::move(word);
      queue.push_back(t->target);
    }
  }
  return access;
}

bool isomorphic(const MealyMachine& a, const MealyMachine& b) {
  const auto& ia = a.inputs().labels();
  const auto& oa = a.outputs().labels();
  if (ia.size() != b.inputs().size() || oa.size() != b.outputs().size()) {
    throw UsageError("isomorphism check needs machines over the same alphabets");
  }
  std::vector<SymbolId> in_map(ia.size());
  std::vector<SymbolId> out_map(oa.size());
  for (SymbolId i = 0; i < ia.size(); ++i) {
    auto found = b.inputs().find(ia[i]);
    if (!found) throw UsageError("isomorphism check needs machines over the same alphabets");
    in_map[i] = *found;
  }
  for (SymbolId i = 0; i < oa.size(); ++i) {
    auto found = b.outputs().find(oa[i]);
    if (!found) throw UsageError("isomorphism check needs machines over the same alphabets");
    out_map[i] = *found;
  }

  std::vector<StateId> a_to_b(a.state_count(), kNoState);
  std::vector<StateId> b_to_a(b.state_count(), kNoState);
  std::deque<StateId> queue{a.initial()};
  a_to_b[a.initial()] = b.initial();
  b_to_a[b.initial()] = a.initial();
  while (!queue.empty()) {
    const StateId sa = queue.front();
    const StateId sb = a_to_b[sa];
    queue.pop_front();
    for (SymbolId x = 0; x < ia.size(); ++x) {
      const auto& ta = a.at(sa, x);
      const auto& tb = b.at(sb, in_map[x]);
      if (ta.has_value() != tb.has_value()) return false;
      if (!ta) continue;
      if (out_map[ta->output] != tb->output) return false;
      const StateId ma = a_to_b[ta->target];
      const StateId mb = b_to_a[tb->target];
      if (ma == kNoState && mb == kNoState) {
        a_to_b[ta->target] = tb->target;
        b_to_a[tb->target] = ta->target;
        queue.push_back(ta->target);
      } else if (ma != tb->target || mb != ta->target) {
        return false;
      }
    }
  }
  return true;
}

MealyMachine reachable_part(const MealyMachine& machine) {
  const auto reachable = reachable_states(machine);
  // Canonical numbering puts reachable states first, so ids are already dense.
  std::vector<TransitionSpec> kept;
  for (const auto& t : machine.transitions()) {
    if (t.from < reachable.size()) kept.push_back(t);
  }
  return MealyMachine(machine.inputs(), machine.outputs(), reachable.size(), kept);
}

std::vector<std::string> labels_of(const Alphabet& alphabet, std::span<const SymbolId> ids) {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (SymbolId id : ids) out.push_back(alphabet.label(id));
  return out;
}

std::vector<SymbolId> ids_of(const Alphabet& alphabet, std::span<const std::string> labels) {
  std::vector<SymbolId> out;
  out.reserve(labels.size());
  for (const auto& l : labels) out.push_back(alphabet.index_of(l));
  return out;
}

}  // namespace locmbt
