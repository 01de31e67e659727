#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "affplan/pddl/model.hpp"

namespace affplan::pddl {

namespace detail {

inline void write_typed_list(std::ostringstream& os, const std::vector<TypedName>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) os << ' ';
    os << names[i].name << " - " << names[i].type;
  }
}

inline void write_conjunction(std::ostringstream& os, const std::vector<Literal>& lits) {
  os << "(and";
  for (const auto& l : lits) os << ' ' << to_string(l);
  os << ')';
}

}  // namespace detail

inline std::string to_pddl(const DomainDef& d) {
  std::ostringstream os;
  os << "(define (domain " << d.name << ")\n";
  if (!d.requirements.empty()) {
    os << "  (:requirements";
    for (const auto& r : d.requirements) os << ' ' << r;
    os << ")\n";
  }
  if (!d.types.empty()) {
    os << "  (:types";
    for (const auto& t : d.types) os << ' ' << t.name << " - " << t.parent;
    os << ")\n";
  }
  os << "  (:predicates";
  for (const auto& p : d.predicates) {
    os << "\n    (" << p.name;
    if (!p.params.empty()) os << ' ';
    detail::write_typed_list(os, p.params);
    os << ')';
  }
  os << ")\n";
  for (const auto& a : d.actions) {
    os << "  (:action " << a.name << "\n    :parameters (";
    detail::write_typed_list(os, a.params);
    os << ")\n    :precondition ";
    detail::write_conjunction(os, a.precondition);
    os << "\n    :effect ";
    detail::write_conjunction(os, a.effect);
    os << ")\n";
  }
  os << ")\n";
  return os.str();
}

inline std::string to_pddl(const ProblemDef& p) {
  std::ostringstream os;
  os << "(define (problem " << p.name << ")\n  (:domain " << p.domain << ")\n  (:objects";
  for (const auto& o : p.objects) os << ' ' << o.name << " - " << o.type;
  os << ")\n  (:init";
  for (const auto& a : p.init) os << "\n    " << to_string(a);
  os << ")\n  (:goal ";
  detail::write_conjunction(os, p.goal);
  os << "))\n";
  return os.str();
}

}  // namespace affplan::pddl
