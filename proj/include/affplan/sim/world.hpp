#pragma once

// Symbolic tabletop world with hand-written transition rules for the
// manipulation actions. It is deliberately independent of the PDDL engine
// so the two can be checked against each other.

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "affplan/pddl/model.hpp"
#include "affplan/pddl/search.hpp"

namespace affplan::sim {

class WorldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Location {
  enum class Kind { table, in, on, held };
  Kind kind = Kind::table;
  std::string ref;  // container or supporter for in/on

  friend bool operator==(const Location&, const Location&) = default;
};

class SimWorld {
 public:
  std::map<std::string, std::set<std::string>> capabilities;
  std::map<std::string, Location> location;
  std::optional<std::string> gripper;
  std::set<std::string> beans;
  std::set<std::string> pounded;
  std::set<std::string> cut;

  bool has(const std::string& object) const { return location.count(object) > 0; }

  bool can(const std::string& object, const std::string& capability) const {
    auto it = capabilities.find(object);
    return it != capabilities.end() && it->second.count(capability);
  }

  std::optional<std::string> occupant(const std::string& container) const {
    for (const auto& [o, loc] : location)
      if (loc.kind == Location::Kind::in && loc.ref == container) return o;
    return std::nullopt;
  }

  // Builds a world from ground atoms. Every object needs exactly one of
  // on-table / in / on / holding.
  static SimWorld from_atoms(const std::vector<std::string>& objects,
                             const std::vector<pddl::Atom>& atoms) {
    SimWorld w;
    for (const auto& o : objects) w.capabilities[o];
    auto place = [&](const std::string& o, Location loc) {
      if (!w.capabilities.count(o)) throw WorldError("location fact for unknown object '" + o + "'");
      if (!w.location.emplace(o, loc).second) {
        throw WorldError("object '" + o + "' has more than one location");
      }
    };
    for (const auto& a : atoms) {
      const auto& p = a.predicate;
      if (p == "on-table") {
        place(a.args.at(0), {Location::Kind::table, {}});
      } else if (p == "in") {
        place(a.args.at(0), {Location::Kind::in, a.args.at(1)});
      } else if (p == "on") {
        place(a.args.at(0), {Location::Kind::on, a.args.at(1)});
      } else if (p == "holding") {
        place(a.args.at(0), {Location::Kind::held, {}});
        if (w.gripper) throw WorldError("gripper holds more than one object");
        w.gripper = a.args.at(0);
      } else if (p == "has-beans") {
        w.beans.insert(a.args.at(0));
      } else if (p == "pounded") {
        w.pounded.insert(a.args.at(0));
      } else if (p == "cut") {
        w.cut.insert(a.args.at(0));
      } else if (p == "hand-empty" || p == "empty") {
        // derived from the rest
      } else if (a.args.size() == 1) {
        w.capabilities[a.args[0]].insert(p);
      } else {
        throw WorldError("unsupported fact " + pddl::to_string(a));
      }
    }
    for (const auto& [o, _] : w.capabilities)
      if (!w.location.count(o)) throw WorldError("object '" + o + "' has no location");
    w.check_capacity();
    return w;
  }

  // Canonical fact set, in the vocabulary of the manipulation domain.
  std::set<pddl::Atom> facts() const {
    std::set<pddl::Atom> out;
    for (const auto& [o, caps] : capabilities)
      for (const auto& c : caps) out.insert({c, {o}});
    for (const auto& [o, loc] : location) {
      switch (loc.kind) {
        case Location::Kind::table: out.insert({"on-table", {o}}); break;
        case Location::Kind::in: out.insert({"in", {o, loc.ref}}); break;
        case Location::Kind::on: out.insert({"on", {o, loc.ref}}); break;
        case Location::Kind::held: out.insert({"holding", {o}}); break;
      }
    }
    if (!gripper) out.insert({"hand-empty", {}});
    for (const auto& [o, caps] : capabilities)
      if (caps.count("container") && !occupant(o)) out.insert({"empty", {o}});
    for (const auto& b : beans) out.insert({"has-beans", {b}});
    for (const auto& p : pounded) out.insert({"pounded", {p}});
    for (const auto& c : cut) out.insert({"cut", {c}});
    return out;
  }

  bool holds(const pddl::Literal& lit) const { return (facts().count(lit.atom) > 0) != lit.negated; }

  void check_capacity() const {
    std::map<std::string, int> load;
    for (const auto& [o, loc] : location) {
      if (loc.kind == Location::Kind::in && ++load[loc.ref] > 1) {
        throw WorldError("container '" + loc.ref + "' holds more than one object");
      }
    }
  }
};

struct ExecutionResult {
  SimWorld world;  // state after the last successful step
  bool ok = true;
  std::optional<std::size_t> failed_at;
  std::string reason;
  bool injected = false;  // failure came from a scripted fault
};

namespace detail {

// Applies one step in place; returns an empty string on success or the
// reason for failure.
inline std::string step(SimWorld& w, const pddl::PlanStep& s) {
  const auto& a = s.args;
  auto need_args = [&](std::size_t n) { return a.size() == n; };
  auto known = [&](const std::string& o) { return w.has(o); };
  for (const auto& o : a)
    if (!known(o)) return "unknown object '" + o + "'";

  auto pick_up = [&](const std::string& o, Location from) -> std::string {
    if (w.gripper) return "gripper is not empty";
    if (!w.can(o, "graspable")) return "'" + o + "' is not graspable";
    if (!(w.location[o] == from)) return "'" + o + "' is not where the action expects";
    w.location[o] = {Location::Kind::held, {}};
    w.gripper = o;
    return {};
  };
  auto holding = [&](const std::string& o) { return w.gripper && *w.gripper == o; };

  if (s.action == "pick" && need_args(1)) return pick_up(a[0], {Location::Kind::table, {}});
  if (s.action == "pick-from" && need_args(2)) return pick_up(a[0], {Location::Kind::in, a[1]});
  if (s.action == "pick-off" && need_args(2)) return pick_up(a[0], {Location::Kind::on, a[1]});

  if (s.action == "place-in" && need_args(2)) {
    const auto& o = a[0];
    const auto& c = a[1];
    if (!holding(o)) return "not holding '" + o + "'";
    if (o == c) return "cannot place '" + o + "' into itself";
    if (!w.can(c, "container")) return "'" + c + "' is not a container";
    if (auto occ = w.occupant(c)) return "'" + c + "' already contains '" + *occ + "'";
    w.location[o] = {Location::Kind::in, c};
    w.gripper.reset();
    return {};
  }
  if (s.action == "place-on" && need_args(2)) {
    const auto& o = a[0];
    const auto& t = a[1];
    if (!holding(o)) return "not holding '" + o + "'";
    if (o == t) return "cannot place '" + o + "' onto itself";
    if (!w.can(t, "supporter")) return "'" + t + "' is not a supporter";
    w.location[o] = {Location::Kind::on, t};
    w.gripper.reset();
    return {};
  }
  if (s.action == "scoop" && need_args(3)) {
    const auto& tool = a[0];
    const auto& src = a[1];
    const auto& dst = a[2];
    if (!holding(tool)) return "not holding '" + tool + "'";
    if (!w.can(tool, "scooper")) return "'" + tool + "' cannot scoop";
    if (!w.beans.count(src)) return "'" + src + "' has no beans";
    if (!w.can(dst, "container")) return "'" + dst + "' is not a container";
    if (w.occupant(dst)) return "'" + dst + "' is occupied";
    if (w.beans.count(dst)) return "'" + dst + "' already has beans";
    w.beans.erase(src);
    w.beans.insert(dst);
    return {};
  }
  if ((s.action == "pound" || s.action == "cut") && need_args(2)) {
    const auto& tool = a[0];
    const auto& target = a[1];
    const bool pounding = s.action == "pound";
    if (!holding(tool)) return "not holding '" + tool + "'";
    if (!w.can(tool, pounding ? "pounder" : "cutter")) {
      return "'" + tool + "' cannot " + s.action;
    }
    if (tool == target) return "cannot " + s.action + " the held tool";
    (pounding ? w.pounded : w.cut).insert(target);
    return {};
  }
  return "unknown action " + s.to_string();
}

}  // namespace detail

// Executes a plan step by step. `fault_at` makes that step fail as if the
// robot had fumbled it.
inline ExecutionResult execute(const pddl::Plan& plan, const SimWorld& world,
                               std::optional<std::size_t> fault_at = std::nullopt) {
  ExecutionResult r{world, true, std::nullopt, {}, false};
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    if (fault_at && *fault_at == i) {
      r.ok = false;
      r.failed_at = i;
      r.injected = true;
      r.reason = "injected execution fault at " + plan.steps[i].to_string();
      return r;
    }
    SimWorld next = r.world;
    const std::string why = detail::step(next, plan.steps[i]);
    if (!why.empty()) {
      r.ok = false;
      r.failed_at = i;
      r.reason = plan.steps[i].to_string() + ": " + why;
      return r;
    }
    next.check_capacity();
    r.world = std::move(next);
  }
  return r;
}

}  // namespace affplan::sim
