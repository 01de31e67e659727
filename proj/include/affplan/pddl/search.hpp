#pragma once

#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "affplan/pddl/task.hpp"

namespace affplan::pddl {

struct PlanStep {
  std::string action;
  std::vector<std::string> args;

  std::string to_string() const {
    std::string s = "(" + action;
    for (const auto& a : args) s += " " + a;
    return s + ")";
  }

  friend bool operator==(const PlanStep&, const PlanStep&) = default;
};

// Unit-cost sequential plan.
struct Plan {
  std::vector<PlanStep> steps;

  std::size_t cost() const noexcept { return steps.size(); }
  bool empty() const noexcept { return steps.empty(); }

  std::string to_string() const {
    std::string s;
    for (const auto& st : steps) s += st.to_string() + "\n";
    return s;
  }

  friend bool operator==(const Plan&, const Plan&) = default;
};

enum class PlannerMode { fast, optimal };

inline PlannerMode parse_planner_mode(const std::string& s) {
  if (s == "fast") return PlannerMode::fast;
  if (s == "optimal") return PlannerMode::optimal;
  throw std::invalid_argument("unknown planner mode '" + s + "' (expected fast or optimal)");
}

struct SearchResult {
  bool solved = false;
  Plan plan;
  // Goal atoms unreachable even under delete relaxation. Empty when the
  // task is unsolvable for a subtler reason or was solved.
  std::vector<Atom> unreachable_goals;
  std::size_t expanded = 0;
  std::size_t generated = 0;
};

using HeuristicValue = std::int64_t;
inline constexpr HeuristicValue kDeadEnd = std::numeric_limits<HeuristicValue>::max();

// Additive delete-relaxation heuristic. Negative preconditions and negative
// goals are ignored, so a dead-end verdict is always sound.
class AdditiveHeuristic {
 public:
  explicit AdditiveHeuristic(const GroundTask& task) : task_(task) {
    const std::size_t n = task.facts.size();
    pre_of_.resize(n);
    for (std::size_t a = 0; a < task.actions.size(); ++a)
      for (auto f : task.actions[a].pre) pre_of_[f].push_back(a);
  }

  // Relaxed cost of every fact from state s (kDeadEnd when unreachable).
  std::vector<HeuristicValue> fact_costs(const FactSet& s) const {
    const std::size_t n = task_.facts.size();
    std::vector<HeuristicValue> cost(n, kDeadEnd);
    std::vector<std::size_t> remaining(task_.actions.size());
    std::vector<HeuristicValue> acc(task_.actions.size(), 0);
    using Entry = std::pair<HeuristicValue, FactId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;

    auto relax = [&](FactId f, HeuristicValue c) {
      if (c < cost[f]) {
        cost[f] = c;
        queue.emplace(c, f);
      }
    };
    for (auto f : s.members()) relax(f, 0);
    for (std::size_t a = 0; a < task_.actions.size(); ++a) {
      remaining[a] = task_.actions[a].pre.size();
      if (remaining[a] == 0)
        for (auto g : task_.actions[a].add) relax(g, 1);
    }
    std::vector<char> done(n, 0);
    while (!queue.empty()) {
      auto [c, f] = queue.top();
      queue.pop();
      if (done[f] || c > cost[f]) continue;
      done[f] = 1;
      for (auto a : pre_of_[f]) {
        acc[a] += c;
        if (--remaining[a] == 0)
          for (auto g : task_.actions[a].add) relax(g, acc[a] + 1);
      }
    }
    return cost;
  }

  HeuristicValue operator()(const FactSet& s) const {
    const auto cost = fact_costs(s);
    HeuristicValue h = 0;
    for (auto g : task_.goal) {
      if (cost[g] == kDeadEnd) return kDeadEnd;
      h += cost[g];
    }
    return h;
  }

 private:
  const GroundTask& task_;
  std::vector<std::vector<std::size_t>> pre_of_;
};

namespace detail {

struct SearchNode {
  FactSet state;
  std::size_t parent;
  std::size_t action;
};

inline constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

inline Plan extract_plan(const GroundTask& task, const std::vector<SearchNode>& nodes,
                         std::size_t leaf) {
  Plan plan;
  for (std::size_t i = leaf; nodes[i].parent != kNoParent; i = nodes[i].parent) {
    const auto& a = task.actions[nodes[i].action];
    plan.steps.push_back({a.name, a.args});
  }
  std::reverse(plan.steps.begin(), plan.steps.end());
  return plan;
}

inline SearchResult breadth_first(const GroundTask& task) {
  SearchResult r;
  std::vector<SearchNode> nodes{{task.init, kNoParent, 0}};
  std::unordered_map<FactSet, std::size_t, FactSetHash> seen{{task.init, 0}};
  if (task.is_goal(task.init)) {
    r.solved = true;
    return r;
  }
  std::deque<std::size_t> open{0};
  while (!open.empty()) {
    const std::size_t id = open.front();
    open.pop_front();
    ++r.expanded;
    for (std::size_t a = 0; a < task.actions.size(); ++a) {
      const auto& act = task.actions[a];
      if (!act.applicable(nodes[id].state)) continue;
      FactSet next = act.apply(nodes[id].state);
      ++r.generated;
      if (seen.count(next)) continue;
      seen.emplace(next, nodes.size());
      nodes.push_back({std::move(next), id, a});
      if (task.is_goal(nodes.back().state)) {
        r.solved = true;
        r.plan = extract_plan(task, nodes, nodes.size() - 1);
        return r;
      }
      open.push_back(nodes.size() - 1);
    }
  }
  return r;
}

// Greedy best-first search ordered by (h, insertion order). States with an
// infinite relaxed estimate are pruned; the closed list makes the search
// exhaustive over the reachable state space.
inline SearchResult greedy_best_first(const GroundTask& task) {
  SearchResult r;
  AdditiveHeuristic h(task);
  std::vector<SearchNode> nodes{{task.init, kNoParent, 0}};
  std::unordered_map<FactSet, std::size_t, FactSetHash> seen{{task.init, 0}};
  using Entry = std::tuple<HeuristicValue, std::size_t>;  // (h, node id == insertion order)
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  const HeuristicValue h0 = h(task.init);
  if (h0 != kDeadEnd) open.emplace(h0, 0);
  while (!open.empty()) {
    const auto [hv, id] = open.top();
    open.pop();
    if (task.is_goal(nodes[id].state)) {
      r.solved = true;
      r.plan = extract_plan(task, nodes, id);
      return r;
    }
    ++r.expanded;
    for (std::size_t a = 0; a < task.actions.size(); ++a) {
      const auto& act = task.actions[a];
      if (!act.applicable(nodes[id].state)) continue;
      FactSet next = act.apply(nodes[id].state);
      ++r.generated;
      if (seen.count(next)) continue;
      const HeuristicValue hn = h(next);
      seen.emplace(next, nodes.size());
      nodes.push_back({std::move(next), id, a});
      if (hn != kDeadEnd) open.emplace(hn, nodes.size() - 1);
    }
  }
  return r;
}

}  // namespace detail

// Goal atoms with no relaxed path from the initial state.
inline std::vector<Atom> relaxed_unreachable_goals(const GroundTask& task) {
  const auto cost = AdditiveHeuristic(task).fact_costs(task.init);
  std::vector<Atom> out;
  for (auto g : task.goal)
    if (cost[g] == kDeadEnd) out.push_back(task.facts[g]);
  return out;
}

inline SearchResult plan(const GroundTask& task, PlannerMode mode = PlannerMode::fast) {
  SearchResult r = mode == PlannerMode::optimal ? detail::breadth_first(task)
                                                : detail::greedy_best_first(task);
  if (!r.solved) r.unreachable_goals = relaxed_unreachable_goals(task);
  return r;
}

}  // namespace affplan::pddl
