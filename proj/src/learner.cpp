#include "locmbt/learner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace locmbt {

namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();

struct TreeEdge {
  std::uint32_t child = kNone;
  SymbolId output = 0;
  std::size_t sample = 0;
};

// Working copy of a machine during red-blue merging. Every write goes through
// set() so a failed fold can be rolled back.
class Hypothesis {
 public:
  explicit Hypothesis(const MealyMachine& tree)
      : width_(tree.inputs().size()), table_(tree.state_count() * width_) {
    for (const auto& t : tree.transitions()) table_[index(t.from, t.input)] = Transition{t.to, t.output};
  }

  std::size_t width() const { return width_; }
  std::size_t state_count() const { return table_.size() / width_; }
  const std::optional<Transition>& at(StateId s, SymbolId a) const { return table_[index(s, a)]; }

  void set(StateId s, SymbolId a, std::optional<Transition> value) {
    const auto i = index(s, a);
    log_.push_back({i, table_[i]});
    table_[i] = value;
  }

  std::size_t checkpoint() const { return log_.size(); }
  void rollback(std::size_t mark) {
    while (log_.size() > mark) {
      table_[log_.back().first] = log_.back().second;
      log_.pop_back();
    }
  }
  void commit() { log_.clear(); }

  // Redirects the edge (parent, input) to red, then folds the tree rooted at
  // blue into red.
  bool try_merge(StateId parent, SymbolId input, StateId red, StateId blue) {
    const auto mark = checkpoint();
    set(parent, input, Transition{red, at(parent, input)->output});
    std::vector<std::pair<StateId, StateId>> pending{{red, blue}};
    while (!pending.empty()) {
      const auto [into, from] = pending.back();
      pending.pop_back();
      for (SymbolId a = 0; a < width_; ++a) {
        const auto& src = at(from, a);
        if (!src) continue;
        const auto& dst = at(into, a);
        if (!dst) {
          set(into, a, src);
        } else if (dst->output != src->output) {
          rollback(mark);
          return false;
        } else {
          pending.push_back({dst->target, src->target});
        }
      }
    }
    commit();
    return true;
  }

 private:
  std::size_t index(StateId s, SymbolId a) const { return static_cast<std::size_t>(s) * width_ + a; }

  std::size_t width_;
  std::vector<std::optional<Transition>> table_;
  std::vector<std::pair<std::size_t, std::optional<Transition>>> log_;
};

struct Frontier {
  std::vector<StateId> red;  // breadth-first order over red states
  StateId blue = kNone;
  StateId blue_parent = kNone;
  SymbolId blue_input = 0;
};

Frontier scan_frontier(const Hypothesis& h, const std::vector<bool>& is_red) {
  Frontier f;
  std::vector<bool> seen(h.state_count(), false);
  f.red.push_back(0);
  seen[0] = true;
  for (std::size_t head = 0; head < f.red.size(); ++head) {
    const StateId s = f.red[head];
    for (SymbolId a = 0; a < h.width(); ++a) {
      const auto& t = h.at(s, a);
      if (!t || seen[t->target]) continue;
      seen[t->target] = true;
      if (is_red[t->target]) {
        f.red.push_back(t->target);
      } else if (f.blue == kNone) {
        f.blue = t->target;
        f.blue_parent = s;
        f.blue_input = a;
      }
    }
  }
  return f;
}

}  // namespace

OutputConflict::OutputConflict(std::vector<SymbolId> prefix, SymbolId input, SymbolId first_output,
                               SymbolId second_output, std::size_t first_sample,
                               std::size_t second_sample, const std::string& what)
    : DataError(what),
      prefix_(std::move(prefix)),
      input_(input),
      first_output_(first_output),
      second_output_(second_output),
      first_sample_(first_sample),
      second_sample_(second_sample) {}

MealyMachine build_prefix_tree(const SampleSet& samples) {
  if (samples.empty()) throw UsageError("cannot build a prefix tree from an empty sample set");
  const std::size_t width = samples.inputs().size();
  std::vector<TreeEdge> edges(width);  // node 0 = empty prefix
  std::size_t nodes = 1;

  for (std::size_t si = 0; si < samples.size(); ++si) {
    const auto& obs = samples.samples()[si].observations;
    std::uint32_t node = 0;
    for (std::size_t i = 0; i < obs.size(); ++i) {
      auto& edge = edges[node * width + obs[i].input];
      if (edge.child == kNone) {
        edge = TreeEdge{static_cast<std::uint32_t>(nodes++), obs[i].output, si};
        edges.resize(nodes * width);
        node = static_cast<std::uint32_t>(nodes - 1);
        continue;
      }
      if (edge.output != obs[i].output) {
        std::vector<SymbolId> prefix;
        for (std::size_t j = 0; j < i; ++j) prefix.push_back(obs[j].input);
        const auto& in = samples.inputs();
        const auto& out = samples.outputs();
        throw OutputConflict(
            prefix, obs[i].input, edge.output, obs[i].output, edge.sample, si,
            fmt::format("output conflict after prefix <{}> on input '{}': sample {} observed '{}', "
                        "sample {} observed '{}'",
                        fmt::join(labels_of(in, prefix), ","), in.label(obs[i].input), edge.sample,
                        out.label(edge.output), si, out.label(obs[i].output)));
      }
      node = edge.child;
    }
  }

  std::vector<TransitionSpec> specs;
  specs.reserve(nodes - 1);
  for (std::size_t n = 0; n < nodes; ++n) {
    for (std::size_t a = 0; a < width; ++a) {
      const auto& e = edges[n * width + a];
      if (e.child != kNone) {
        specs.push_back({static_cast<StateId>(n), static_cast<SymbolId>(a), e.child, e.output});
      }
    }
  }
  return MealyMachine(samples.inputs(), samples.outputs(), nodes, specs);
}

std::optional<MealyMachine> merge_fold(const MealyMachine& machine, StateId red, StateId blue) {
  const std::size_t n = machine.state_count();
  if (red >= n || blue >= n) throw UsageError("merge_fold: state out of range");
  const std::size_t width = machine.inputs().size();

  // Union-find over states; each class root owns the merged outgoing table.
  std::vector<StateId> parent(n);
  std::iota(parent.begin(), parent.end(), StateId{0});
  std::vector<std::optional<Transition>> table(n * width);
  for (const auto& t : machine.transitions()) table[t.from * width + t.input] = Transition{t.to, t.output};

  auto find = [&](StateId s) {
    while (parent[s] != s) {
      parent[s] = parent[parent[s]];
      s = parent[s];
    }
    return s;
  };

  std::vector<std::pair<StateId, StateId>> pending{{red, blue}};
  while (!pending.empty()) {
    auto [p, q] = pending.back();
    pending.pop_back();
    p = find(p);
    q = find(q);
    if (p == q) continue;
    // The red class keeps its root; otherwise the smaller id wins.
    const StateId red_root = find(red);
    if (q == red_root || (p != red_root && q < p)) std::swap(p, q);
    parent[q] = p;
    for (std::size_t a = 0; a < width; ++a) {
      auto& into = table[p * width + a];
      const auto& from = table[q * width + a];
      if (!from) continue;
      if (!into) {
        into = from;
      } else if (into->output != from->output) {
        return std::nullopt;
      } else {
        pending.push_back({into->target, from->target});
      }
    }
  }

  std::vector<StateId> class_id(n, kNone);
  std::size_t classes = 0;
  for (StateId s = 0; s < n; ++s) {
    if (find(s) == s) class_id[s] = static_cast<StateId>(classes++);
  }
  std::vector<TransitionSpec> specs;
  for (StateId s = 0; s < n; ++s) {
    if (find(s) != s) continue;
    for (std::size_t a = 0; a < width; ++a) {
      if (const auto& t = table[s * width + a]) {
        specs.push_back({class_id[s], static_cast<SymbolId>(a), class_id[find(t->target)], t->output});
      }
    }
  }
  return MealyMachine(machine.inputs(), machine.outputs(), classes, specs,
                      class_id[find(machine.initial())]);
}

MealyMachine learn(const SampleSet& samples) {
  const MealyMachine tree = build_prefix_tree(samples);
  Hypothesis h(tree);
  std::vector<bool> is_red(tree.state_count(), false);
  is_red[0] = true;

  while (true) {
    const Frontier f = scan_frontier(h, is_red);
    if (f.blue == kNone) break;
    bool merged = false;
    for (StateId r : f.red) {
      if (h.try_merge(f.blue_parent, f.blue_input, r, f.blue)) {
        merged = true;
        break;
      }
    }
    if (!merged) is_red[f.blue] = true;
  }

  std::vector<TransitionSpec> specs;
  for (StateId s = 0; s < h.state_count(); ++s) {
    if (!is_red[s]) continue;
    for (SymbolId a = 0; a < h.width(); ++a) {
      if (const auto& t = h.at(s, a)) specs.push_back({s, a, t->target, t->output});
    }
  }
  // Red states that were merged away are unreachable; keep only the reachable part.
  return reachable_part(MealyMachine(samples.inputs(), samples.outputs(), h.state_count(), specs));
}

SampleSplit split_samples(const SampleSet& samples, std::uint64_t seed, SplitRatio ratio) {
  const std::size_t total = samples.size();
  if (total < 2) throw DataError(fmt::format("need at least 2 samples to split, got {}", total));
  if (ratio.learn_parts == 0 || ratio.validate_parts == 0) {
    throw ConfigError("split ratio parts must be positive");
  }

  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  const double share = static_cast<double>(ratio.learn_parts) /
                       static_cast<double>(ratio.learn_parts + ratio.validate_parts);
  auto learn_count = static_cast<std::size_t>(std::llround(static_cast<double>(total) * share));
  learn_count = std::clamp<std::size_t>(learn_count, 1, total - 1);

  SampleSplit split{SampleSet(samples.inputs(), samples.outputs()),
                    SampleSet(samples.inputs(), samples.outputs()),
                    {},
                    {}};
  for (std::size_t i = 0; i < total; ++i) {
    const std::size_t idx = order[i];
    if (i < learn_count) {
      split.learning.add(samples.samples()[idx]);
      split.learning_indices.push_back(idx);
    } else {
      split.validation.add(samples.samples()[idx]);
      split.validation_indices.push_back(idx);
    }
  }
  return split;
}

}  // namespace locmbt
