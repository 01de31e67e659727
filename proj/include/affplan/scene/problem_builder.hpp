#pragma once

// Turns detections plus the state keeper into a planning problem for the
// manipulation domain, and folds executed plans back into the keeper.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "affplan/pddl/parse.hpp"
#include "affplan/pddl/task.hpp"
#include "affplan/pddl/validate.hpp"
#include "affplan/scene/association.hpp"
#include "affplan/scene/detection.hpp"
#include "affplan/scene/geometry.hpp"
#include "affplan/scene/keeper.hpp"

namespace affplan::scene {

struct SceneConfig {
  double iou_min = kDefaultIouMin;
  // An affordance counts as present with at least this many labelled pixels.
  std::size_t min_pixels = 25;
  std::string object_type = "item";
  std::string problem_name = "scene";
};

// Capability predicate implied by each affordance; wrap-grasp implies none.
inline std::optional<std::string> capability_predicate(AffordanceLabel l) {
  switch (l) {
    case AffordanceLabel::grasp: return "graspable";
    case AffordanceLabel::contain: return "container";
    case AffordanceLabel::support: return "supporter";
    case AffordanceLabel::pound: return "pounder";
    case AffordanceLabel::cut: return "cutter";
    case AffordanceLabel::scoop: return "scooper";
    default: return std::nullopt;
  }
}

inline bool is_capability(const std::string& predicate) {
  for (auto l : kAffordances)
    if (capability_predicate(l) == predicate) return true;
  return false;
}

inline bool is_location(const std::string& predicate) {
  return predicate == "in" || predicate == "on" || predicate == "on-table";
}

// Gripper state; not carried between sessions.
inline bool is_transient(const std::string& predicate) {
  return predicate == "holding" || predicate == "hand-empty";
}

class UngroundableGoal : public std::runtime_error {
 public:
  explicit UngroundableGoal(std::vector<std::string> missing)
      : std::runtime_error(message(missing)), missing_(std::move(missing)) {}
  const std::vector<std::string>& missing() const noexcept { return missing_; }

 private:
  static std::string message(const std::vector<std::string>& missing) {
    std::string s = "ungroundable goal: unknown object(s)";
    for (const auto& m : missing) s += " " + m;
    return s;
  }
  std::vector<std::string> missing_;
};

struct SceneProblem {
  pddl::ProblemDef problem;
  std::map<std::string, Anchor> anchors;  // detected objects only
  std::vector<std::string> detected;      // object name per detection record
};

inline std::string sanitize_name(const std::string& s) {
  std::string out;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u) || c == '-' || c == '_') {
      out.push_back(static_cast<char>(std::tolower(u)));
    } else if (std::isspace(u)) {
      out.push_back('-');
    }
  }
  if (out.empty() || !std::isalpha(static_cast<unsigned char>(out.front()))) out.insert(0, "o");
  return out;
}

inline Anchor anchor_for(const DetectionRecord& rec, std::size_t min_pixels) {
  Anchor a;
  a.center = {0.5 * (rec.bbox.x0 + rec.bbox.x1), 0.5 * (rec.bbox.y0 + rec.bbox.y1)};
  if (rec.pixel_count(AffordanceLabel::grasp) >= std::max<std::size_t>(2, min_pixels)) {
    const auto pose = grasp_pose(rec);
    a.center = pose.center;
    a.theta = pose.theta;
  }
  for (auto l : {AffordanceLabel::contain, AffordanceLabel::support}) {
    if (rec.pixel_count(l) >= std::max<std::size_t>(1, min_pixels)) {
      a.place = place_target(rec, l);
      break;
    }
  }
  return a;
}

inline SceneProblem build_problem(const std::vector<DetectionRecord>& aff,
                                  const std::vector<ObjectDetection>& obj,
                                  const StateKeeper& keeper,
                                  const std::vector<pddl::Literal>& goal,
                                  const pddl::DomainDef& domain, const SceneConfig& cfg = {},
                                  const std::vector<pddl::Atom>& scene_facts = {}) {
  SceneProblem out;
  auto& p = out.problem;
  p.name = cfg.problem_name;
  p.domain = domain.name;

  std::set<std::string> used;
  auto claim = [&](std::string base) {
    std::string name = base;
    for (int k = 2; used.count(name); ++k) name = base + "-" + std::to_string(k);
    used.insert(name);
    return name;
  };

  const auto match = associate(aff, obj, cfg.iou_min);
  std::size_t anon = 0;
  for (std::size_t i = 0; i < aff.size(); ++i) {
    std::string name;
    if (match[i]) {
      name = claim(sanitize_name(obj[*match[i]].category));
    } else {
      do {
        name = "obj" + std::to_string(++anon);
      } while (used.count(name));
      used.insert(name);
    }
    out.detected.push_back(name);
    out.anchors[name] = anchor_for(aff[i], cfg.min_pixels);
  }
  const std::set<std::string> detected(out.detected.begin(), out.detected.end());

  std::vector<std::string> names = out.detected;
  for (const auto& o : keeper.objects())
    if (!detected.count(o)) names.push_back(o);
  for (const auto& n : names) p.objects.push_back({n, cfg.object_type});
  const std::set<std::string> known(names.begin(), names.end());

  std::set<pddl::Atom> init;
  for (std::size_t i = 0; i < aff.size(); ++i) {
    for (auto l : kAffordances) {
      const auto pred = capability_predicate(l);
      if (pred && aff[i].pixel_count(l) >= cfg.min_pixels) init.insert({*pred, {out.detected[i]}});
    }
  }
  std::set<std::string> located;
  for (const auto& f : keeper.facts) {
    const auto& pred = f.atom.predicate;
    if (is_transient(pred) || pred == "empty") continue;
    // fresh capability facts win over remembered ones
    if (is_capability(pred) && !f.atom.args.empty() && detected.count(f.atom.args[0])) continue;
    if (is_location(pred) && !f.atom.args.empty()) located.insert(f.atom.args[0]);
    init.insert(f.atom);
  }
  for (const auto& n : out.detected)
    if (!located.count(n)) init.insert({"on-table", {n}});
  for (const auto& a : scene_facts) init.insert(a);
  init.insert({"hand-empty", {}});

  std::set<std::string> occupied;
  for (const auto& a : init)
    if (a.predicate == "in" && a.args.size() == 2) occupied.insert(a.args[1]);
  std::vector<pddl::Atom> empties;
  for (const auto& a : init)
    if (a.predicate == "container" && a.args.size() == 1 && !occupied.count(a.args[0]))
      empties.push_back({"empty", {a.args[0]}});
  init.insert(empties.begin(), empties.end());
  p.init.assign(init.begin(), init.end());

  std::vector<std::string> missing;
  for (const auto& lit : goal)
    for (const auto& arg : lit.atom.args)
      if (!known.count(arg) && std::find(missing.begin(), missing.end(), arg) == missing.end())
        missing.push_back(arg);
  if (!missing.empty()) throw UngroundableGoal(missing);
  p.goal = goal;

  pddl::check_problem(p, domain);
  return out;
}

// Records the terminal state of an executed plan. Gripper state is reset:
// a held object is put back on the table. Objects whose location changed
// take the place point of their destination as their new anchor.
inline StateKeeper update_keeper(const StateKeeper& keeper, const pddl::GroundTask& task,
                                 const pddl::Plan& plan,
                                 const std::map<std::string, Anchor>& fresh_anchors = {}) {
  const auto check = pddl::validate(plan, task);
  if (!check.valid) throw KeeperError("cannot update keeper with an invalid plan: " + check.reason);

  StateKeeper next;
  next.session = keeper.session + 1;
  std::set<pddl::Atom> terminal;
  for (const auto& a : task.atoms(check.final_state)) {
    if (a.predicate == "holding") {
      terminal.insert({"on-table", a.args});
    } else if (!is_transient(a.predicate)) {
      terminal.insert(a);
    }
  }
  for (const auto& a : terminal) next.facts.push_back({a, keeper.since(a).value_or(next.session)});

  next.anchors = keeper.anchors;
  for (const auto& [name, a] : fresh_anchors) next.anchors[name] = a;

  std::map<std::string, pddl::Atom> before;
  for (const auto& a : task.atoms(task.init))
    if (is_location(a.predicate) && !a.args.empty()) before[a.args[0]] = a;
  for (const auto& a : terminal) {
    if (!is_location(a.predicate) || a.args.empty()) continue;
    auto it = before.find(a.args[0]);
    if (it != before.end() && it->second == a) continue;
    if (a.args.size() == 2) {
      auto dst = next.anchors.find(a.args[1]);
      if (dst != next.anchors.end()) {
        next.anchors[a.args[0]].center = dst->second.place.value_or(dst->second.center);
      }
    }
  }
  next.check_invariants();
  return next;
}

}  // namespace affplan::scene
