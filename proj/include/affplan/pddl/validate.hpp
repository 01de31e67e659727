#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "affplan/pddl/search.hpp"
#include "affplan/pddl/sexpr.hpp"
#include "affplan/pddl/task.hpp"

namespace affplan::pddl {

class UnknownActionError : public std::invalid_argument {
 public:
  explicit UnknownActionError(const PlanStep& step, std::size_t index)
      : std::invalid_argument("plan step " + std::to_string(index) + ": unknown action " +
                              step.to_string()),
        index_(index) {}
  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

struct ValidationResult {
  bool valid = false;
  // Index of the first step whose precondition fails, or plan length when
  // every step applies but the goal is missed.
  std::optional<std::size_t> failed_at;
  std::string reason;
  FactSet final_state;

  explicit operator bool() const noexcept { return valid; }
};

// Sequence of states visited by the plan, starting with init. Stops early
// at the first inapplicable step.
inline std::vector<FactSet> progress(const Plan& plan, const GroundTask& task,
                                     std::optional<std::size_t>* failed_at = nullptr) {
  std::vector<FactSet> states{task.init};
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto* act = task.find_action(plan.steps[i].action, plan.steps[i].args);
    if (act == nullptr) throw UnknownActionError(plan.steps[i], i);
    if (!act->applicable(states.back())) {
      if (failed_at) *failed_at = i;
      return states;
    }
    states.push_back(act->apply(states.back()));
  }
  return states;
}

// One step per s-expression, e.g. "(pick fork) (place-in fork bowl)".
// Lines starting with ';' are comments, so planner output files parse too.
inline Plan parse_plan(const std::string& text) {
  Plan plan;
  for (const auto& e : read_sexprs(text)) {
    if (!e.is_list || e.items.empty() || e.items.front().is_list) {
      throw PddlError("plan step must look like (action arg...)", e.where);
    }
    PlanStep st{e.items.front().symbol, {}};
    for (std::size_t i = 1; i < e.items.size(); ++i) {
      if (e.items[i].is_list) throw PddlError("plan step arguments must be names", e.items[i].where);
      st.args.push_back(e.items[i].symbol);
    }
    plan.steps.push_back(std::move(st));
  }
  return plan;
}

inline ValidationResult validate(const Plan& plan, const GroundTask& task) {
  ValidationResult r;
  std::optional<std::size_t> failed;
  auto states = progress(plan, task, &failed);
  r.final_state = states.back();
  if (failed) {
    const auto& step = plan.steps[*failed];
    const auto* act = task.find_action(step.action, step.args);
    std::string missing;
    for (auto f : act->pre)
      if (!r.final_state.test(f)) missing += " " + to_string(task.facts[f]);
    for (auto f : act->pre_neg)
      if (r.final_state.test(f)) missing += " (not " + to_string(task.facts[f]) + ")";
    r.failed_at = failed;
    r.reason = "precondition of " + step.to_string() + " fails:" + missing;
    return r;
  }
  if (!task.is_goal(r.final_state)) {
    r.failed_at = plan.steps.size();
    std::string missing;
    for (auto g : task.goal)
      if (!r.final_state.test(g)) missing += " " + to_string(task.facts[g]);
    for (auto g : task.goal_neg)
      if (r.final_state.test(g)) missing += " (not " + to_string(task.facts[g]) + ")";
    r.reason = "goal not reached:" + missing;
    return r;
  }
  r.valid = true;
  return r;
}

}  // namespace affplan::pddl
