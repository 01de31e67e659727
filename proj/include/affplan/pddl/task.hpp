#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "affplan/pddl/model.hpp"

namespace affplan::pddl {

using FactId = std::uint32_t;

// Fixed-universe set of facts packed into 64-bit words.
class FactSet {
 public:
  FactSet() = default;
  explicit FactSet(std::size_t universe) : universe_(universe), words_((universe + 63) / 64, 0) {}

  std::size_t universe() const noexcept { return universe_; }

  bool test(FactId f) const { return (words_[f >> 6] >> (f & 63)) & 1u; }
  void set(FactId f) { words_[f >> 6] |= std::uint64_t{1} << (f & 63); }
  void reset(FactId f) { words_[f >> 6] &= ~(std::uint64_t{1} << (f & 63)); }

  bool contains_all(const std::vector<FactId>& fs) const {
    return std::all_of(fs.begin(), fs.end(), [&](FactId f) { return test(f); });
  }
  bool contains_none(const std::vector<FactId>& fs) const {
    return std::none_of(fs.begin(), fs.end(), [&](FactId f) { return test(f); });
  }

  std::size_t count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
  }

  std::vector<FactId> members() const {
    std::vector<FactId> out;
    for (std::size_t i = 0; i < universe_; ++i)
      if (test(static_cast<FactId>(i))) out.push_back(static_cast<FactId>(i));
    return out;
  }

  std::size_t hash() const noexcept {
    std::size_t h = 0xcbf29ce484222325ull;
    for (auto w : words_) h = (h ^ std::hash<std::uint64_t>{}(w)) * 0x100000001b3ull;
    return h;
  }

  friend bool operator==(const FactSet&, const FactSet&) = default;

 private:
  std::size_t universe_ = 0;
  std::vector<std::uint64_t> words_;
};

struct FactSetHash {
  std::size_t operator()(const FactSet& s) const noexcept { return s.hash(); }
};

struct GroundAction {
  std::string name;
  std::vector<std::string> args;
  std::vector<FactId> pre;      // must hold
  std::vector<FactId> pre_neg;  // must not hold
  std::vector<FactId> add;
  std::vector<FactId> del;

  bool applicable(const FactSet& s) const { return s.contains_all(pre) && s.contains_none(pre_neg); }

  FactSet apply(const FactSet& s) const {
    FactSet next = s;
    for (auto f : del) next.reset(f);
    for (auto f : add) next.set(f);
    return next;
  }

  std::string label() const {
    std::string s = "(" + name;
    for (const auto& a : args) s += " " + a;
    return s + ")";
  }
};

// Propositional planning task. Facts are indexed by position in `facts`.
struct GroundTask {
  std::vector<Atom> facts;
  std::vector<GroundAction> actions;
  FactSet init;
  std::vector<FactId> goal;      // must hold at the end
  std::vector<FactId> goal_neg;  // must not hold at the end

  bool is_goal(const FactSet& s) const { return s.contains_all(goal) && s.contains_none(goal_neg); }

  std::optional<FactId> find_fact(const Atom& a) const {
    for (std::size_t i = 0; i < facts.size(); ++i)
      if (facts[i] == a) return static_cast<FactId>(i);
    return std::nullopt;
  }

  const GroundAction* find_action(const std::string& name,
                                  const std::vector<std::string>& args) const {
    for (const auto& a : actions)
      if (a.name == name && a.args == args) return &a;
    return nullptr;
  }

  std::vector<Atom> atoms(const FactSet& s) const {
    std::vector<Atom> out;
    for (auto f : s.members()) out.push_back(facts[f]);
    return out;
  }
};

namespace detail {

class FactTable {
 public:
  FactId intern(const Atom& a) {
    auto [it, inserted] = index_.try_emplace(a, static_cast<FactId>(atoms_.size()));
    if (inserted) atoms_.push_back(a);
    return it->second;
  }
  std::vector<Atom> take() { return std::move(atoms_); }

 private:
  std::map<Atom, FactId> index_;
  std::vector<Atom> atoms_;
};

inline Atom substitute(const Atom& a, const std::map<std::string, std::string>& binding) {
  Atom g{a.predicate, {}};
  for (const auto& x : a.args) {
    auto it = binding.find(x);
    g.args.push_back(it == binding.end() ? x : it->second);
  }
  return g;
}

inline void sort_unique(std::vector<FactId>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace detail

// Predicates that no action effect mentions.
inline std::set<std::string> static_predicates(const DomainDef& d) {
  std::set<std::string> fluent;
  for (const auto& a : d.actions)
    for (const auto& l : a.effect) fluent.insert(l.atom.predicate);
  std::set<std::string> out;
  for (const auto& p : d.predicates)
    if (!fluent.count(p.name)) out.insert(p.name);
  return out;
}

// Instantiates every action schema over all type-consistent bindings.
// Preconditions on static predicates are evaluated against init during
// binding and then dropped. Goal atoms may mention objects outside the
// problem; they are interned and simply never become true.
inline GroundTask ground(const DomainDef& dom, const ProblemDef& prob) {
  detail::FactTable table;
  const auto statics = static_predicates(dom);
  const std::set<Atom> init_atoms(prob.init.begin(), prob.init.end());

  std::vector<FactId> init_ids;
  for (const auto& a : prob.init) init_ids.push_back(table.intern(a));

  GroundTask task;
  for (const auto& schema : dom.actions) {
    std::vector<std::vector<const std::string*>> candidates(schema.params.size());
    for (std::size_t i = 0; i < schema.params.size(); ++i)
      for (const auto& o : prob.objects)
        if (dom.is_subtype(o.type, schema.params[i].type)) candidates[i].push_back(&o.name);

    // Static literals become checkable once their last variable is bound.
    std::vector<std::vector<const Literal*>> checks(schema.params.size() + 1);
    for (const auto& lit : schema.precondition) {
      if (!statics.count(lit.atom.predicate)) continue;
      std::size_t last = 0;
      for (const auto& arg : lit.atom.args)
        for (std::size_t i = 0; i < schema.params.size(); ++i)
          if (schema.params[i].name == arg) last = std::max(last, i + 1);
      checks[last].push_back(&lit);
    }

    std::map<std::string, std::string> binding;
    auto statics_hold = [&](std::size_t level) {
      for (const Literal* lit : checks[level]) {
        const bool present = init_atoms.count(detail::substitute(lit->atom, binding)) > 0;
        if (present == lit->negated) return false;
      }
      return true;
    };

    std::function<void(std::size_t)> bind = [&](std::size_t level) {
      if (level == schema.params.size()) {
        GroundAction ga{schema.name, {}, {}, {}, {}, {}};
        for (const auto& p : schema.params) ga.args.push_back(binding[p.name]);
        for (const auto& lit : schema.precondition) {
          if (statics.count(lit.atom.predicate)) continue;
          const FactId f = table.intern(detail::substitute(lit.atom, binding));
          (lit.negated ? ga.pre_neg : ga.pre).push_back(f);
        }
        for (const auto& lit : schema.effect) {
          const FactId f = table.intern(detail::substitute(lit.atom, binding));
          (lit.negated ? ga.del : ga.add).push_back(f);
        }
        detail::sort_unique(ga.pre);
        detail::sort_unique(ga.pre_neg);
        detail::sort_unique(ga.add);
        detail::sort_unique(ga.del);
        // delete-then-add: an atom both added and deleted ends up true
        std::erase_if(ga.del, [&](FactId f) {
          return std::binary_search(ga.add.begin(), ga.add.end(), f);
        });
        const bool contradictory = std::any_of(ga.pre.begin(), ga.pre.end(), [&](FactId f) {
          return std::binary_search(ga.pre_neg.begin(), ga.pre_neg.end(), f);
        });
        if (!contradictory) task.actions.push_back(std::move(ga));
        return;
      }
      for (const std::string* obj : candidates[level]) {
        binding[schema.params[level].name] = *obj;
        if (statics_hold(level + 1)) bind(level + 1);
      }
      binding.erase(schema.params[level].name);
    };
    if (statics_hold(0)) bind(0);
  }

  for (const auto& lit : prob.goal) {
    const FactId f = table.intern(lit.atom);
    (lit.negated ? task.goal_neg : task.goal).push_back(f);
  }
  detail::sort_unique(task.goal);
  detail::sort_unique(task.goal_neg);

  task.facts = table.take();
  task.init = FactSet(task.facts.size());
  for (auto f : init_ids) task.init.set(f);
  return task;
}

}  // namespace affplan::pddl
