#pragma once

// Parser for the STRIPS subset of PDDL with :typing and
// :negative-preconditions.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "affplan/pddl/model.hpp"
#include "affplan/pddl/sexpr.hpp"

namespace affplan::pddl {

inline const std::vector<std::string>& supported_requirements() {
  static const std::vector<std::string> reqs = {":strips", ":typing", ":negative-preconditions"};
  return reqs;
}

namespace detail {

inline bool is_variable(std::string_view s) { return !s.empty() && s.front() == '?'; }

inline const std::string& expect_symbol(const SExpr& e, std::string_view what) {
  if (!e.is_symbol()) throw PddlError("expected " + std::string(what) + ", found '('", e.where);
  return e.symbol;
}

inline const SExpr& expect_list(const SExpr& e, std::string_view what) {
  if (!e.is_list) {
    throw PddlError("expected " + std::string(what) + ", found '" + e.symbol + "'", e.where);
  }
  return e;
}

inline void expect_head(const SExpr& e, std::string_view head, std::string_view what) {
  expect_list(e, what);
  if (e.head() != head) {
    throw PddlError("expected (" + std::string(head) + " ...) for " + std::string(what), e.where);
  }
}

// Parses "a b - t c ?x - u" style lists starting at `first`.
inline std::vector<TypedName> parse_typed_list(const SExpr& list, std::size_t first,
                                               bool variables) {
  std::vector<TypedName> out;
  std::size_t pending = 0;
  for (std::size_t i = first; i < list.size(); ++i) {
    const auto& item = list[i];
    const auto& sym = expect_symbol(item, variables ? "variable" : "name");
    if (sym == "-") {
      if (pending == 0) throw PddlError("type annotation '-' without preceding names", item.where);
      if (i + 1 >= list.size()) throw PddlError("expected type name after '-'", item.where);
      const auto& type_expr = list[i + 1];
      if (type_expr.is_list) {
        if (type_expr.head() == "either") throw UnsupportedFeature("either-types", type_expr.where);
        throw PddlError("expected type name after '-'", type_expr.where);
      }
      for (std::size_t k = out.size() - pending; k < out.size(); ++k) out[k].type = type_expr.symbol;
      pending = 0;
      ++i;
      continue;
    }
    if (variables && !is_variable(sym)) {
      throw PddlError("expected variable starting with '?', found '" + sym + "'", item.where);
    }
    if (!variables && is_variable(sym)) {
      throw PddlError("expected name, found variable '" + sym + "'", item.where);
    }
    out.push_back({sym, kRootType});
    ++pending;
  }
  return out;
}

inline Atom parse_atom(const SExpr& e) {
  expect_list(e, "atom");
  if (e.size() == 0) throw PddlError("empty atom, expected predicate name", e.where);
  Atom a;
  a.predicate = expect_symbol(e[0], "predicate name");
  static const std::set<std::string, std::less<>> reserved = {
      "and", "not", "or", "imply", "exists", "forall", "when", "=", "increase", "decrease"};
  if (reserved.count(a.predicate)) {
    const std::string feature = a.predicate == "=" ? ":equality" : "'" + a.predicate + "'";
    throw UnsupportedFeature(feature, e.where);
  }
  for (std::size_t i = 1; i < e.size(); ++i) a.args.push_back(expect_symbol(e[i], "argument"));
  return a;
}

inline Literal parse_literal(const SExpr& e) {
  expect_list(e, "literal");
  if (e.head() == "not") {
    if (e.size() != 2) throw PddlError("(not ...) takes exactly one atom", e.where);
    return {parse_atom(e[1]), true};
  }
  return {parse_atom(e), false};
}

// Accepts (), a single literal, or (and literal...).
inline std::vector<Literal> parse_conjunction(const SExpr& e) {
  expect_list(e, "conjunction");
  std::vector<Literal> out;
  if (e.size() == 0) return out;
  if (e.head() == "and") {
    for (std::size_t i = 1; i < e.size(); ++i) {
      const auto& item = e[i];
      expect_list(item, "literal");
      if (item.head() == "and") {
        auto inner = parse_conjunction(item);
        out.insert(out.end(), inner.begin(), inner.end());
      } else {
        out.push_back(parse_literal(item));
      }
    }
    return out;
  }
  out.push_back(parse_literal(e));
  return out;
}

struct Scope {
  const DomainDef* domain = nullptr;
  std::map<std::string, std::string> bindings;  // variable/object -> type
  bool variables = true;
};

inline void check_atom(const Atom& atom, const Scope& scope, SourceLocation where) {
  const auto* schema = scope.domain->find_predicate(atom.predicate);
  if (schema == nullptr) throw PddlError("unknown predicate '" + atom.predicate + "'", where);
  if (schema->params.size() != atom.args.size()) {
    throw PddlError("arity mismatch for predicate '" + atom.predicate + "': expected " +
                        std::to_string(schema->params.size()) + " arguments, got " +
                        std::to_string(atom.args.size()),
                    where);
  }
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    const auto& arg = atom.args[i];
    auto it = scope.bindings.find(arg);
    if (it == scope.bindings.end()) {
      if (scope.variables) {
        throw PddlError(is_variable(arg) ? "unbound variable '" + arg + "'"
                                         : "constant '" + arg + "' not supported in actions",
                        where);
      }
      throw PddlError("unknown object '" + arg + "'", where);
    }
    if (!scope.domain->is_subtype(it->second, schema->params[i].type)) {
      throw PddlError("type mismatch: '" + arg + "' of type " + it->second +
                          " used where predicate '" + atom.predicate + "' expects " +
                          schema->params[i].type,
                      where);
    }
  }
}

inline void check_type_known(const DomainDef& d, const std::string& t, SourceLocation where) {
  if (!d.has_type(t)) throw PddlError("unknown type '" + t + "'", where);
}

inline void check_literals(const std::vector<Literal>& lits, const std::vector<const SExpr*>& srcs,
                           const Scope& scope, bool allow_negation, std::string_view where_used) {
  for (std::size_t i = 0; i < lits.size(); ++i) {
    const SourceLocation loc = i < srcs.size() ? srcs[i]->where : SourceLocation{};
    if (lits[i].negated && !allow_negation) {
      throw PddlError("negative literal in " + std::string(where_used) +
                          " requires :negative-preconditions",
                      loc);
    }
    check_atom(lits[i].atom, scope, loc);
  }
}

// Source expressions of the literals parse_conjunction would return, for
// error locations.
inline void collect_literal_sources(const SExpr& e, std::vector<const SExpr*>& out) {
  if (!e.is_list || e.size() == 0) return;
  if (e.head() == "and") {
    for (std::size_t i = 1; i < e.size(); ++i) collect_literal_sources(e[i], out);
    return;
  }
  out.push_back(&e);
}

inline ActionSchema parse_action(const SExpr& e, const DomainDef& dom) {
  if (e.size() < 2) throw PddlError("expected action name after :action", e.where);
  ActionSchema a;
  a.name = expect_symbol(e[1], "action name");
  std::optional<const SExpr*> pre_src, eff_src;
  for (std::size_t i = 2; i < e.size(); i += 2) {
    const auto& key = expect_symbol(e[i], "action keyword");
    if (i + 1 >= e.size()) throw PddlError("missing value after " + key, e[i].where);
    const auto& value = e[i + 1];
    if (key == ":parameters") {
      a.params = parse_typed_list(expect_list(value, "parameter list"), 0, true);
    } else if (key == ":precondition") {
      a.precondition = parse_conjunction(value);
      pre_src = &value;
    } else if (key == ":effect") {
      expect_list(value, "effect");
      if (value.head() == "forall" || value.head() == "when") {
        throw UnsupportedFeature(value.head() == "when" ? ":conditional-effects" : "forall effects",
                                 value.where);
      }
      a.effect = parse_conjunction(value);
      eff_src = &value;
    } else {
      throw UnsupportedFeature("action keyword " + key, e[i].where);
    }
  }

  Scope scope{&dom, {}, true};
  std::set<std::string> seen;
  for (const auto& p : a.params) {
    check_type_known(dom, p.type, e.where);
    if (!seen.insert(p.name).second) {
      throw PddlError("duplicate parameter '" + p.name + "' in action '" + a.name + "'", e.where);
    }
    scope.bindings[p.name] = p.type;
  }
  std::vector<const SExpr*> srcs;
  if (pre_src) collect_literal_sources(**pre_src, srcs);
  check_literals(a.precondition, srcs, scope, dom.has_requirement(":negative-preconditions"),
                 "precondition of '" + a.name + "'");
  srcs.clear();
  if (eff_src) collect_literal_sources(**eff_src, srcs);
  check_literals(a.effect, srcs, scope, true, "effect");
  return a;
}

}  // namespace detail

inline DomainDef parse_domain(std::string_view text) {
  using namespace detail;
  const SExpr root = read_sexpr(text);
  expect_head(root, "define", "domain definition");
  if (root.size() < 2) throw PddlError("expected (domain NAME)", root.where);
  const auto& header = root[1];
  expect_head(header, "domain", "domain header");
  if (header.size() != 2) throw PddlError("expected (domain NAME)", header.where);

  DomainDef d;
  d.name = expect_symbol(header[1], "domain name");
  std::vector<const SExpr*> actions;
  for (std::size_t i = 2; i < root.size(); ++i) {
    const auto& section = expect_list(root[i], "domain section");
    const std::string head(section.head());
    if (head == ":requirements") {
      for (std::size_t k = 1; k < section.size(); ++k) {
        const auto& r = expect_symbol(section[k], "requirement");
        const auto& ok = supported_requirements();
        if (std::find(ok.begin(), ok.end(), r) == ok.end()) {
          throw UnsupportedFeature(r, section[k].where);
        }
        d.requirements.push_back(r);
      }
    } else if (head == ":types") {
      for (const auto& t : parse_typed_list(section, 1, false)) d.types.push_back({t.name, t.type});
    } else if (head == ":predicates") {
      for (std::size_t k = 1; k < section.size(); ++k) {
        const auto& p = expect_list(section[k], "predicate declaration");
        if (p.size() == 0) throw PddlError("empty predicate declaration", p.where);
        PredicateSchema schema{expect_symbol(p[0], "predicate name"), parse_typed_list(p, 1, true)};
        if (d.find_predicate(schema.name)) {
          throw PddlError("duplicate predicate '" + schema.name + "'", p.where);
        }
        d.predicates.push_back(std::move(schema));
      }
    } else if (head == ":action") {
      actions.push_back(&section);
    } else if (head.empty()) {
      throw PddlError("expected section keyword", section.where);
    } else {
      throw UnsupportedFeature("section " + head, section.where);
    }
  }

  for (const auto& t : d.types) check_type_known(d, t.parent, root.where);
  for (const auto& p : d.predicates)
    for (const auto& param : p.params) check_type_known(d, param.type, root.where);
  for (const SExpr* a : actions) {
    auto action = parse_action(*a, d);
    if (d.find_action(action.name)) {
      throw PddlError("duplicate action '" + action.name + "'", (*a).where);
    }
    d.actions.push_back(std::move(action));
  }
  return d;
}

// Validates a problem built in code against its domain. Messages name
// the offending predicate, object or type.
inline void check_problem(const ProblemDef& p, const DomainDef& d) {
  using namespace detail;
  if (p.domain != d.name) {
    throw PddlError("problem is for domain '" + p.domain + "', not '" + d.name + "'");
  }
  Scope scope{&d, {}, false};
  for (const auto& o : p.objects) {
    check_type_known(d, o.type, {});
    if (!scope.bindings.emplace(o.name, o.type).second) {
      throw PddlError("duplicate object '" + o.name + "'");
    }
  }
  for (const auto& a : p.init) check_atom(a, scope, {});
  check_literals(p.goal, {}, scope, true, "goal");
}

inline ProblemDef parse_problem(std::string_view text, const DomainDef& d) {
  using namespace detail;
  const SExpr root = read_sexpr(text);
  expect_head(root, "define", "problem definition");
  if (root.size() < 2) throw PddlError("expected (problem NAME)", root.where);
  const auto& header = root[1];
  expect_head(header, "problem", "problem header");
  if (header.size() != 2) throw PddlError("expected (problem NAME)", header.where);

  ProblemDef p;
  p.name = expect_symbol(header[1], "problem name");
  Scope scope{&d, {}, false};
  const SExpr* goal_src = nullptr;
  std::vector<const SExpr*> init_src;
  for (std::size_t i = 2; i < root.size(); ++i) {
    const auto& section = expect_list(root[i], "problem section");
    const std::string head(section.head());
    if (head == ":domain") {
      if (section.size() != 2) throw PddlError("expected (:domain NAME)", section.where);
      p.domain = expect_symbol(section[1], "domain name");
      if (p.domain != d.name) {
        throw PddlError("problem refers to domain '" + p.domain + "' but domain is '" + d.name + "'",
                        section[1].where);
      }
    } else if (head == ":objects") {
      for (auto& o : parse_typed_list(section, 1, false)) {
        check_type_known(d, o.type, section.where);
        if (!scope.bindings.emplace(o.name, o.type).second) {
          throw PddlError("duplicate object '" + o.name + "'", section.where);
        }
        p.objects.push_back(std::move(o));
      }
    } else if (head == ":init") {
      for (std::size_t k = 1; k < section.size(); ++k) init_src.push_back(&section[k]);
    } else if (head == ":goal") {
      if (section.size() != 2) throw PddlError("expected (:goal FORMULA)", section.where);
      goal_src = &section[1];
    } else if (head.empty()) {
      throw PddlError("expected section keyword", section.where);
    } else {
      throw UnsupportedFeature("section " + head, section.where);
    }
  }
  if (p.domain.empty()) throw PddlError("problem lacks (:domain NAME)", root.where);

  std::set<Atom> seen;
  for (const SExpr* e : init_src) {
    Atom a = parse_atom(*e);
    check_atom(a, scope, e->where);
    if (seen.insert(a).second) p.init.push_back(std::move(a));
  }
  if (goal_src != nullptr) {
    p.goal = parse_conjunction(*goal_src);
    std::vector<const SExpr*> srcs;
    collect_literal_sources(*goal_src, srcs);
    check_literals(p.goal, srcs, scope, d.has_requirement(":negative-preconditions"), "goal");
  }
  return p;
}

// Parses a standalone goal formula such as "(and (in fork bowl))".
// Atoms are not checked against any problem.
inline std::vector<Literal> parse_goal(std::string_view text) {
  return detail::parse_conjunction(read_sexpr(text));
}

}  // namespace affplan::pddl
