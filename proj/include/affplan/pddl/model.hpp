#pragma once

#include <compare>
#include <string>
#include <vector>

namespace affplan::pddl {

inline constexpr const char* kRootType = "object";

struct TypedName {
  std::string name;
  std::string type = kRootType;

  friend bool operator==(const TypedName&, const TypedName&) = default;
};

// Predicate applied to arguments. Arguments are either variables ("?x")
// or object names, depending on context.
struct Atom {
  std::string predicate;
  std::vector<std::string> args;

  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

struct Literal {
  Atom atom;
  bool negated = false;

  friend bool operator==(const Literal&, const Literal&) = default;
};

struct TypeDecl {
  std::string name;
  std::string parent = kRootType;

  friend bool operator==(const TypeDecl&, const TypeDecl&) = default;
};

struct PredicateSchema {
  std::string name;
  std::vector<TypedName> params;

  friend bool operator==(const PredicateSchema&, const PredicateSchema&) = default;
};

// STRIPS action schema. Effect literals: positive = add, negated = delete.
struct ActionSchema {
  std::string name;
  std::vector<TypedName> params;
  std::vector<Literal> precondition;
  std::vector<Literal> effect;

  friend bool operator==(const ActionSchema&, const ActionSchema&) = default;
};

struct DomainDef {
  std::string name;
  std::vector<std::string> requirements;
  std::vector<TypeDecl> types;
  std::vector<PredicateSchema> predicates;
  std::vector<ActionSchema> actions;

  const PredicateSchema* find_predicate(const std::string& n) const {
    for (const auto& p : predicates)
      if (p.name == n) return &p;
    return nullptr;
  }

  const ActionSchema* find_action(const std::string& n) const {
    for (const auto& a : actions)
      if (a.name == n) return &a;
    return nullptr;
  }

  bool has_type(const std::string& t) const {
    if (t == kRootType) return true;
    for (const auto& d : types)
      if (d.name == t) return true;
    return false;
  }

  // True when `type` equals `ancestor` or descends from it.
  bool is_subtype(std::string type, const std::string& ancestor) const {
    for (std::size_t guard = 0; guard <= types.size() + 1; ++guard) {
      if (type == ancestor || ancestor == kRootType) return true;
      if (type == kRootType) return false;
      const TypeDecl* decl = nullptr;
      for (const auto& d : types)
        if (d.name == type) decl = &d;
      if (decl == nullptr) return false;
      type = decl->parent;
    }
    return false;  // cyclic hierarchy
  }

  bool has_requirement(const std::string& r) const {
    for (const auto& x : requirements)
      if (x == r) return true;
    return false;
  }

  friend bool operator==(const DomainDef&, const DomainDef&) = default;
};

struct ProblemDef {
  std::string name;
  std::string domain;
  std::vector<TypedName> objects;
  std::vector<Atom> init;
  std::vector<Literal> goal;

  const TypedName* find_object(const std::string& n) const {
    for (const auto& o : objects)
      if (o.name == n) return &o;
    return nullptr;
  }

  friend bool operator==(const ProblemDef&, const ProblemDef&) = default;
};

inline std::string to_string(const Atom& a) {
  std::string s = "(" + a.predicate;
  for (const auto& x : a.args) s += " " + x;
  return s + ")";
}

inline std::string to_string(const Literal& l) {
  return l.negated ? "(not " + to_string(l.atom) + ")" : to_string(l.atom);
}

}  // namespace affplan::pddl
