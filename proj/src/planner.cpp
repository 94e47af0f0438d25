#include "coopmitl/planner.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <unordered_map>

#include "coopmitl/errors.hpp"
#include "coopmitl/progression.hpp"

namespace coopmitl::plan {

TransitionSystem::TransitionSystem(grid::Partition partition, grid::Labeling labels,
                                   double default_duration,
                                   std::map<std::pair<RegionId, RegionId>, double> durations,
                                   std::vector<RegionId> initial)
    : partition_(std::move(partition)),
      labels_(std::move(labels)),
      default_duration_(default_duration),
      durations_(std::move(durations)),
      initial_(std::move(initial)) {
  if (!(default_duration_ > 0.0) || !std::isfinite(default_duration_)) {
    throw Error(ErrorCode::InvalidConfig, "transition durations must be positive");
  }
  for (const auto& [edge, d] : durations_) {
    if (!has_transition(edge.first, edge.second)) {
      std::ostringstream os;
      os << "duration given for a non-transition " << edge.first << " -> " << edge.second;
      throw Error(ErrorCode::InvalidConfig, os.str());
    }
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw Error(ErrorCode::InvalidConfig, "transition durations must be positive");
    }
  }
  for (RegionId r : initial_) {
    if (!partition_.valid(r)) throw Error(ErrorCode::InvalidConfig, "unknown initial region");
  }
  for (const auto& [r, props] : labels_.entries()) {
    if (!partition_.valid(r)) throw Error(ErrorCode::InvalidConfig, "label on unknown region");
  }
}

bool TransitionSystem::has_transition(RegionId from, RegionId to) const {
  if (!partition_.valid(from) || !partition_.valid(to)) return false;
  return from == to || partition_.adjacent(from, to);
}

double TransitionSystem::duration(RegionId from, RegionId to) const {
  if (!has_transition(from, to)) {
    std::ostringstream os;
    os << "no transition " << from << " -> " << to;
    throw Error(ErrorCode::NotAdjacent, os.str());
  }
  const auto it = durations_.find({from, to});
  return it == durations_.end() ? default_duration_ : it->second;
}

std::vector<RegionId> TransitionSystem::successors(RegionId from) const {
  std::vector<RegionId> out = partition_.neighbors(from);
  out.push_back(from);
  return out;
}

std::size_t TransitionSystem::transition_count() const {
  std::size_t n = 0;
  for (const auto& r : partition_.regions()) n += successors(r.id).size();
  return n;
}

TransitionSystem build_wts(const grid::Partition& partition, const grid::Labeling& labels,
                           double default_duration,
                           std::map<std::pair<RegionId, RegionId>, double> durations,
                           std::vector<RegionId> initial) {
  return TransitionSystem(partition, labels, default_duration, std::move(durations),
                          std::move(initial));
}

mitl::TimedWord plan_word(const Plan& plan, const TransitionSystem& wts) {
  if (plan.steps.empty() || plan.loop_start >= plan.steps.size()) {
    throw Error(ErrorCode::InvalidConfig, "plan needs steps and a loop start inside them");
  }
  mitl::TimedWord w;
  for (const auto& s : plan.steps) w.prefix.push_back({wts.labels().labels(s.region), s.time});
  const RegionId back = plan.steps[plan.loop_start].region;
  w.loop.push_back(
      {wts.labels().labels(back), wts.duration(plan.steps.back().region, back)});
  for (std::size_t i = plan.loop_start + 1; i < plan.steps.size(); ++i) {
    const RegionId r = plan.steps[i].region;
    w.loop.push_back({wts.labels().labels(r), wts.duration(plan.steps[i - 1].region, r)});
  }
  return w;
}

bool validate_plan(const Plan& plan, const TransitionSystem& wts, const mitl::Formula& f) {
  if (plan.steps.empty() || plan.loop_start >= plan.steps.size()) return false;
  for (const auto& s : plan.steps) {
    if (!wts.partition().valid(s.region)) return false;
  }
  if (!wts.initial().empty() &&
      std::find(wts.initial().begin(), wts.initial().end(), plan.steps.front().region) ==
          wts.initial().end()) {
    return false;
  }
  if (std::abs(plan.steps.front().time) > 1e-9) return false;
  for (std::size_t i = 1; i < plan.steps.size(); ++i) {
    const RegionId a = plan.steps[i - 1].region;
    const RegionId b = plan.steps[i].region;
    if (!wts.has_transition(a, b)) return false;
    const double expected = plan.steps[i - 1].time + wts.duration(a, b);
    if (std::abs(plan.steps[i].time - expected) > 1e-9 * std::max(1.0, expected)) return false;
  }
  if (!wts.has_transition(plan.steps.back().region, plan.steps[plan.loop_start].region)) {
    return false;
  }
  return mitl::satisfies(plan_word(plan, wts), f);
}

namespace {

struct ProductState {
  RegionId region;
  mitl::Formula residual;
  std::size_t parent = 0;
  std::size_t depth = 0;
  std::vector<std::size_t> next;
};

// Tarjan's algorithm without recursion; returns the component id per state.
std::vector<std::size_t> strongly_connected(const std::vector<ProductState>& states) {
  const std::size_t n = states.size();
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, unset), low(n, 0), comp(n, unset);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  std::size_t counter = 0, components = 0;
  std::vector<std::pair<std::size_t, std::size_t>> call;  // (state, next edge)
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != unset) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [v, e] = call.back();
      if (e < states[v].next.size()) {
        const std::size_t w = states[v].next[e++];
        if (index[w] == unset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = components;
        } while (w != v);
        ++components;
      }
      const std::size_t finished = v;
      call.pop_back();
      if (!call.empty()) {
        const std::size_t parent = call.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }
  return comp;
}

// Shortest cycle through s as the list of states after s, ending with s.
std::vector<std::size_t> shortest_cycle(const std::vector<ProductState>& states,
                                        std::size_t s) {
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> pred(states.size(), unset);
  std::deque<std::size_t> queue;
  for (std::size_t w : states[s].next) {
    if (w == s) return {s};
    if (pred[w] == unset) {
      pred[w] = s;
      queue.push_back(w);
    }
  }
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t w : states[v].next) {
      if (w == s) {
        std::vector<std::size_t> out;
        for (std::size_t x = v; x != s; x = pred[x]) out.push_back(x);
        std::reverse(out.begin(), out.end());
        out.push_back(s);
        return out;
      }
      if (pred[w] == unset) {
        pred[w] = v;
        queue.push_back(w);
      }
    }
  }
  return {};
}

}  // namespace

std::optional<Plan> find_accepting_run(const TransitionSystem& wts, const mitl::Formula& f,
                                       RegionId initial, const PlannerOptions& options) {
  require_fragment(f);
  if (!wts.partition().valid(initial) ||
      (!wts.initial().empty() &&
       std::find(wts.initial().begin(), wts.initial().end(), initial) == wts.initial().end())) {
    throw Error(ErrorCode::InvalidConfig, "start region is not an initial state");
  }
  const mitl::Formula start = simplify(f);
  if (start->kind == mitl::Kind::False) return std::nullopt;

  std::vector<ProductState> states;
  std::unordered_map<std::string, std::size_t> index;
  const auto key_of = [](RegionId r, const mitl::Formula& g) {
    return std::to_string(r.value) + "|" + mitl::to_string(g);
  };
  states.push_back({initial, start, 0, 0, {}});
  index.emplace(key_of(initial, start), 0);

  // Breadth-first exploration of every reachable non-false product state.
  for (std::size_t v = 0; v < states.size(); ++v) {
    const RegionId r = states[v].region;
    const PropositionSet& symbol = wts.labels().labels(r);
    for (RegionId next : wts.successors(r)) {
      const mitl::Formula residual =
          progress(states[v].residual, symbol, wts.duration(r, next));
      if (residual->kind == mitl::Kind::False) continue;
      const std::string key = key_of(next, residual);
      auto it = index.find(key);
      if (it == index.end()) {
        if (states.size() >= options.max_states) {
          throw Error(ErrorCode::InvalidConfig, "planner state limit exceeded");
        }
        it = index.emplace(key, states.size()).first;
        states.push_back({next, residual, v, states[v].depth + 1, {}});
      }
      states[v].next.push_back(it->second);
    }
  }

  const std::vector<std::size_t> comp = strongly_connected(states);
  std::vector<std::size_t> comp_size(states.size(), 0);
  for (std::size_t c : comp) ++comp_size[c];
  const auto on_cycle = [&](std::size_t v) {
    if (comp_size[comp[v]] > 1) return true;
    const auto& n = states[v].next;
    return std::find(n.begin(), n.end(), v) != n.end();
  };

  std::optional<std::size_t> best;
  std::vector<std::size_t> best_cycle;
  for (std::size_t v = 0; v < states.size(); ++v) {
    if (!on_cycle(v)) continue;
    if (best && states[v].depth > states[*best].depth) break;  // BFS order: depths ascend
    std::vector<std::size_t> cycle = shortest_cycle(states, v);
    if (!best || cycle.size() < best_cycle.size()) {
      best = v;
      best_cycle = std::move(cycle);
    }
  }
  if (!best) return std::nullopt;

  std::vector<std::size_t> prefix;
  for (std::size_t v = *best;; v = states[v].parent) {
    prefix.push_back(v);
    if (v == 0) break;
  }
  std::reverse(prefix.begin(), prefix.end());

  Plan plan;
  plan.loop_start = prefix.size() - 1;
  double t = 0.0;
  RegionId prev = states[prefix.front()].region;
  const auto append = [&](std::size_t v) {
    const RegionId r = states[v].region;
    if (!plan.steps.empty()) t += wts.duration(prev, r);
    plan.steps.push_back({r, t});
    prev = r;
  };
  for (std::size_t v : prefix) append(v);
  for (std::size_t i = 0; i + 1 < best_cycle.size(); ++i) append(best_cycle[i]);

  if (!validate_plan(plan, wts, f)) {
    throw Error(ErrorCode::InvalidConfig,
                "internal error: planned run failed independent monitor validation");
  }
  return plan;
}

}  // namespace coopmitl::plan
