#pragma once

// Symbolic facts and planar anchors carried from one planning session to
// the next, so objects hidden inside containers stay plannable.
//
// JSON form (version 1):
//   {"version": 1, "session": 2,
//    "facts": [{"atom": ["in", "spoon", "plate"], "since": 1}, ...],
//    "anchors": {"spoon": {"x": 10.5, "y": 4.0, "theta": 0.0,
//                          "place": [12.0, 8.0]}}}

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "affplan/pddl/model.hpp"
#include "affplan/scene/geometry.hpp"

namespace affplan::scene {

inline constexpr int kKeeperVersion = 1;

struct KeptFact {
  pddl::Atom atom;
  std::uint64_t since = 0;  // session in which the fact was first recorded

  friend bool operator==(const KeptFact&, const KeptFact&) = default;
};

struct Anchor {
  Point center;
  double theta = 0.0;
  std::optional<Point> place;  // where things go when placed in/on this object
};

class KeeperError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StateKeeper {
 public:
  std::vector<KeptFact> facts;
  std::map<std::string, Anchor> anchors;
  std::uint64_t session = 0;

  bool empty() const noexcept { return facts.empty() && anchors.empty(); }

  bool holds(const pddl::Atom& a) const {
    for (const auto& f : facts)
      if (f.atom == a) return true;
    return false;
  }

  std::set<std::string> objects() const {
    std::set<std::string> out;
    for (const auto& f : facts) out.insert(f.atom.args.begin(), f.atom.args.end());
    for (const auto& [name, _] : anchors) out.insert(name);
    return out;
  }

  std::optional<std::uint64_t> since(const pddl::Atom& a) const {
    for (const auto& f : facts)
      if (f.atom == a) return f.since;
    return std::nullopt;
  }

  // At most one containment fact per object; no container both empty and
  // occupied.
  void check_invariants() const {
    std::map<std::string, std::string> container_of;
    std::set<std::string> occupied;
    for (const auto& f : facts) {
      if (f.atom.predicate != "in" || f.atom.args.size() != 2) continue;
      const auto& o = f.atom.args[0];
      const auto& c = f.atom.args[1];
      if (!container_of.emplace(o, c).second) {
        throw KeeperError("keeper holds two containment facts for '" + o + "'");
      }
      occupied.insert(c);
    }
    for (const auto& f : facts) {
      if (f.atom.predicate == "empty" && f.atom.args.size() == 1 && occupied.count(f.atom.args[0])) {
        throw KeeperError("keeper marks '" + f.atom.args[0] + "' both empty and containing");
      }
    }
  }
};

inline nlohmann::json atom_to_json(const pddl::Atom& a) {
  nlohmann::json j = nlohmann::json::array({a.predicate});
  for (const auto& x : a.args) j.push_back(x);
  return j;
}

inline pddl::Atom atom_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty()) throw KeeperError("atom must be a non-empty array of strings");
  pddl::Atom a{j[0].get<std::string>(), {}};
  for (std::size_t i = 1; i < j.size(); ++i) a.args.push_back(j[i].get<std::string>());
  return a;
}

// Goal given as a JSON list: [["in", "fork", "bowl"], ["not", ["on-table", "cup"]]].
inline std::vector<pddl::Literal> goal_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw KeeperError("goal must be a JSON array of atoms");
  std::vector<pddl::Literal> out;
  for (const auto& item : j) {
    if (item.is_array() && item.size() == 2 && item[0] == "not" && item[1].is_array()) {
      out.push_back({atom_from_json(item[1]), true});
    } else {
      out.push_back({atom_from_json(item), false});
    }
  }
  return out;
}

inline nlohmann::json keeper_to_json(const StateKeeper& k) {
  nlohmann::json j = {{"version", kKeeperVersion},
                      {"session", k.session},
                      {"facts", nlohmann::json::array()},
                      {"anchors", nlohmann::json::object()}};
  for (const auto& f : k.facts) j["facts"].push_back({{"atom", atom_to_json(f.atom)}, {"since", f.since}});
  for (const auto& [name, a] : k.anchors) {
    nlohmann::json aj = {{"x", a.center.x}, {"y", a.center.y}, {"theta", a.theta}};
    if (a.place) aj["place"] = {a.place->x, a.place->y};
    j["anchors"][name] = aj;
  }
  return j;
}

inline StateKeeper keeper_from_json(const nlohmann::json& j) {
  try {
    const int version = j.at("version").get<int>();
    if (version != kKeeperVersion) {
      throw KeeperError("unsupported keeper version " + std::to_string(version) + " (expected " +
                        std::to_string(kKeeperVersion) + ")");
    }
    StateKeeper k;
    k.session = j.value("session", std::uint64_t{0});
    for (const auto& f : j.value("facts", nlohmann::json::array()))
      k.facts.push_back({atom_from_json(f.at("atom")), f.value("since", std::uint64_t{0})});
    const auto anchors = j.value("anchors", nlohmann::json::object());
    for (const auto& [name, aj] : anchors.items()) {
      Anchor a{{aj.at("x").get<double>(), aj.at("y").get<double>()}, aj.value("theta", 0.0), {}};
      if (aj.contains("place")) a.place = Point{aj["place"][0].get<double>(), aj["place"][1].get<double>()};
      k.anchors[name] = a;
    }
    k.check_invariants();
    return k;
  } catch (const nlohmann::json::exception& e) {
    throw KeeperError(std::string("keeper JSON: ") + e.what());
  }
}

inline StateKeeper load_keeper(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw KeeperError("cannot open keeper file " + path);
  try {
    return keeper_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw KeeperError(path + ": " + e.what());
  }
}

inline void save_keeper(const StateKeeper& k, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw KeeperError("cannot write keeper file " + path);
  out << keeper_to_json(k).dump(2) << '\n';
}

}  // namespace affplan::scene
