#pragma once

// Scenario runner: perception -> problem -> plan -> simulated execution,
// repeated over trials and sequential goal phases, with scripted faults.
//
// Scenario file (paths relative to the file):
//   {"name": "pick knife or spoon into bowl",
//    "domain": "../pddl/manipulation.pddl",
//    "trials": 10, "planner": "fast", "keeper": true, "seed": 0,
//    "config": {"iou_min": 0.5, "min_pixels": 25},
//    "phases": [{"detections": "scenes/a.json", "objects": "scenes/a_obj.json",
//                "scene_facts": [["has-beans", "pot"]],
//                "goals": ["(in knife bowl)", "(in spoon bowl)"]}],
//    "faults": [{"trial": 3, "phase": 0, "kind": "drop_detection", "index": 1}]}
//
// Trial t pursues goals[t % goals.size()] in each phase. Fault kinds:
// drop_detection / corrupt_mask (by "index", or drawn from the seed),
// drop_object (by "category" or "index"), and action (fails plan "step").
// The simulator keeps the true world across phases; perception only ever
// sees the phase's detection files.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "affplan/pddl/parse.hpp"
#include "affplan/pddl/search.hpp"
#include "affplan/pddl/task.hpp"
#include "affplan/pddl/validate.hpp"
#include "affplan/scene/detection.hpp"
#include "affplan/scene/keeper.hpp"
#include "affplan/scene/problem_builder.hpp"
#include "affplan/sim/world.hpp"

namespace affplan::sim {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FailureStage { perception, planning, action };

inline std::string_view stage_name(FailureStage s) {
  switch (s) {
    case FailureStage::perception: return "perception";
    case FailureStage::planning: return "planning";
    case FailureStage::action: return "action";
  }
  return "unknown";
}

struct Fault {
  std::size_t trial = 0;
  std::size_t phase = 0;
  std::string kind;
  std::optional<std::size_t> index;
  std::optional<std::string> category;
  std::optional<std::string> label;
  std::size_t step = 0;
};

struct Phase {
  scene::DetectionFile detections;
  std::vector<pddl::Atom> scene_facts;
  std::vector<std::vector<pddl::Literal>> goals;
  std::vector<std::string> goal_text;
};

struct Scenario {
  std::string name;
  pddl::DomainDef domain;
  std::size_t trials = 1;
  pddl::PlannerMode mode = pddl::PlannerMode::fast;
  bool use_keeper = true;
  std::uint64_t seed = 0;
  scene::SceneConfig config;
  std::vector<Phase> phases;
  std::vector<Fault> faults;
};

struct TrialOutcome {
  std::size_t trial = 0;
  bool success = false;
  std::optional<FailureStage> stage;
  std::optional<std::size_t> phase;  // failing phase
  std::string detail;
  std::vector<pddl::Plan> plans;  // one per completed or attempted phase
};

struct ScenarioReport {
  std::string scenario;
  std::vector<TrialOutcome> outcomes;
  std::size_t successes = 0;
  std::map<FailureStage, std::size_t> failures;

  std::size_t trials() const noexcept { return outcomes.size(); }
};

namespace detail {

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ScenarioError("cannot open " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Fault fault_from_json(const nlohmann::json& j) {
  Fault f;
  f.trial = j.at("trial").get<std::size_t>();
  f.phase = j.value("phase", std::size_t{0});
  f.kind = j.at("kind").get<std::string>();
  if (j.contains("index")) f.index = j["index"].get<std::size_t>();
  if (j.contains("category")) f.category = j["category"].get<std::string>();
  if (j.contains("label")) f.label = j["label"].get<std::string>();
  f.step = j.value("step", std::size_t{0});
  static const std::set<std::string> kinds = {"drop_detection", "corrupt_mask", "drop_object",
                                              "action"};
  if (!kinds.count(f.kind)) throw ScenarioError("unknown fault kind '" + f.kind + "'");
  if (f.label && !scene::parse_label(*f.label)) {
    throw ScenarioError("unknown affordance label '" + *f.label + "'");
  }
  return f;
}

}  // namespace detail

inline Scenario load_scenario(const std::filesystem::path& path) {
  const auto base = path.parent_path();
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
  try {
    Scenario s;
    s.name = j.at("name").get<std::string>();
    s.domain = pddl::parse_domain(detail::read_text(base / j.at("domain").get<std::string>()));
    s.trials = j.value("trials", std::size_t{1});
    if (s.trials == 0) throw ScenarioError("trials must be at least 1");
    s.mode = pddl::parse_planner_mode(j.value("planner", std::string("fast")));
    s.use_keeper = j.value("keeper", true);
    s.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("config")) {
      const auto& c = j["config"];
      s.config.iou_min = c.value("iou_min", s.config.iou_min);
      s.config.min_pixels = c.value("min_pixels", s.config.min_pixels);
    }
    const auto& phases = j.at("phases");
    if (!phases.is_array() || phases.empty()) throw ScenarioError("scenario needs at least one phase");
    for (const auto& pj : phases) {
      Phase ph;
      ph.detections = scene::load_detections((base / pj.at("detections").get<std::string>()).string());
      if (pj.contains("objects")) {
        auto extra = scene::load_detections((base / pj["objects"].get<std::string>()).string());
        ph.detections.objects.insert(ph.detections.objects.end(), extra.objects.begin(),
                                     extra.objects.end());
      }
      for (const auto& a : pj.value("scene_facts", nlohmann::json::array()))
        ph.scene_facts.push_back(scene::atom_from_json(a));
      for (const auto& g : pj.at("goals")) {
        ph.goal_text.push_back(g.get<std::string>());
        ph.goals.push_back(pddl::parse_goal(ph.goal_text.back()));
      }
      if (ph.goals.empty()) throw ScenarioError("phase needs at least one goal");
      s.phases.push_back(std::move(ph));
    }
    for (const auto& fj : j.value("faults", nlohmann::json::array())) {
      auto f = detail::fault_from_json(fj);
      if (f.phase >= s.phases.size()) throw ScenarioError("fault refers to a missing phase");
      s.faults.push_back(f);
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  } catch (const pddl::PddlError& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  } catch (const scene::DetectionFormatError& e) {
    throw ScenarioError(e.what());
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
}

namespace detail {

struct PhaseInput {
  scene::DetectionFile perceived;
  std::optional<std::size_t> action_fault;
};

inline PhaseInput apply_faults(const Scenario& s, std::size_t trial, std::size_t phase,
                               std::mt19937_64& rng) {
  PhaseInput in{s.phases[phase].detections, std::nullopt};
  auto& dets = in.perceived.detections;
  auto& objs = in.perceived.objects;
  auto pick = [&](std::size_t n, const std::optional<std::size_t>& idx) -> std::optional<std::size_t> {
    if (n == 0) return std::nullopt;
    if (idx) {
      if (*idx >= n) throw ScenarioError("fault index out of range");
      return idx;
    }
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  };
  for (const auto& f : s.faults) {
    if (f.trial != trial || f.phase != phase) continue;
    if (f.kind == "drop_detection") {
      if (auto i = pick(dets.size(), f.index)) dets.erase(dets.begin() + static_cast<std::ptrdiff_t>(*i));
    } else if (f.kind == "corrupt_mask") {
      if (auto i = pick(dets.size(), f.index)) {
        auto& mask = dets[*i].mask;
        const auto target = f.label ? static_cast<std::uint8_t>(*scene::parse_label(*f.label)) : 0;
        for (std::size_t k = 0; k < mask.size(); ++k)
          if (!f.label || mask[k] == target) mask[k] = 0;
      }
    } else if (f.kind == "drop_object") {
      if (f.category) {
        std::erase_if(objs, [&](const auto& o) { return o.category == *f.category; });
      } else if (auto i = pick(objs.size(), f.index)) {
        objs.erase(objs.begin() + static_cast<std::ptrdiff_t>(*i));
      }
    } else if (f.kind == "action") {
      in.action_fault = f.step;
    }
  }
  return in;
}

// Adds objects seen for the first time to the true world, using the clean
// detections as ground truth.
inline void admit_new_objects(SimWorld& truth, const scene::SceneProblem& clean) {
  SimWorld fresh = SimWorld::from_atoms(
      [&] {
        std::vector<std::string> names;
        for (const auto& o : clean.problem.objects) names.push_back(o.name);
        return names;
      }(),
      clean.problem.init);
  for (const auto& [o, caps] : fresh.capabilities) {
    if (truth.has(o)) continue;
    truth.capabilities[o] = caps;
    truth.location[o] = fresh.location.at(o);
    if (fresh.beans.count(o)) truth.beans.insert(o);
  }
}

inline bool solvable_from(const SimWorld& w, const std::vector<pddl::Literal>& goal,
                          const pddl::DomainDef& domain, const std::string& type) {
  pddl::ProblemDef p{"truth", domain.name, {}, {}, goal};
  for (const auto& [o, _] : w.capabilities) p.objects.push_back({o, type});
  const auto facts = w.facts();
  p.init.assign(facts.begin(), facts.end());
  for (const auto& lit : goal)
    for (const auto& arg : lit.atom.args)
      if (!w.has(arg)) return false;
  return pddl::plan(pddl::ground(domain, p), pddl::PlannerMode::optimal).solved;
}

}  // namespace detail

inline TrialOutcome run_trial(const Scenario& s, std::size_t trial) {
  TrialOutcome out;
  out.trial = trial;
  std::mt19937_64 rng(s.seed * 0x9e3779b97f4a7c15ull + trial);
  scene::StateKeeper keeper;
  SimWorld truth;

  auto fail = [&](FailureStage stage, std::size_t phase, std::string detail) {
    out.success = false;
    out.stage = stage;
    out.phase = phase;
    out.detail = std::move(detail);
    return out;
  };

  for (std::size_t ph = 0; ph < s.phases.size(); ++ph) {
    const auto& phase = s.phases[ph];
    const auto& goal = phase.goals[trial % phase.goals.size()];

    const auto clean = scene::build_problem(phase.detections.detections, phase.detections.objects,
                                            scene::StateKeeper{}, {}, s.domain, s.config,
                                            phase.scene_facts);
    detail::admit_new_objects(truth, clean);

    auto input = detail::apply_faults(s, trial, ph, rng);
    scene::SceneProblem perceived;
    try {
      perceived = scene::build_problem(input.perceived.detections, input.perceived.objects,
                                       s.use_keeper ? keeper : scene::StateKeeper{}, goal, s.domain,
                                       s.config, phase.scene_facts);
    } catch (const scene::UngroundableGoal& e) {
      return fail(FailureStage::perception, ph, e.what());
    }

    const auto task = pddl::ground(s.domain, perceived.problem);
    const auto result = pddl::plan(task, s.mode);
    if (!result.solved) {
      std::string why = "no plan found";
      if (!result.unreachable_goals.empty()) {
        why += "; relaxed-unreachable:";
        for (const auto& a : result.unreachable_goals) why += " " + pddl::to_string(a);
      }
      if (detail::solvable_from(truth, goal, s.domain, s.config.object_type)) {
        return fail(FailureStage::perception, ph, why + " (solvable in the true scene)");
      }
      return fail(FailureStage::planning, ph, why);
    }
    out.plans.push_back(result.plan);
    if (const auto v = pddl::validate(result.plan, task); !v.valid) {
      return fail(FailureStage::planning, ph, "planner returned an invalid plan: " + v.reason);
    }

    const auto exec = execute(result.plan, truth, input.action_fault);
    if (!exec.ok) {
      return fail(exec.injected ? FailureStage::action : FailureStage::perception, ph,
                  exec.injected ? exec.reason : "belief mismatch: " + exec.reason);
    }
    for (const auto& lit : goal) {
      if (!exec.world.holds(lit)) {
        return fail(FailureStage::perception, ph, "goal literal " + pddl::to_string(lit) +
                                                      " does not hold in the true scene");
      }
    }
    truth = exec.world;
    if (s.use_keeper) keeper = scene::update_keeper(keeper, task, result.plan, perceived.anchors);
  }
  out.success = true;
  return out;
}

inline ScenarioReport run_scenario(const Scenario& s) {
  ScenarioReport r;
  r.scenario = s.name;
  for (auto st : {FailureStage::perception, FailureStage::planning, FailureStage::action})
    r.failures[st] = 0;
  for (std::size_t t = 0; t < s.trials; ++t) {
    auto o = run_trial(s, t);
    if (o.success) {
      ++r.successes;
    } else {
      ++r.failures[*o.stage];
    }
    r.outcomes.push_back(std::move(o));
  }
  return r;
}

inline ScenarioReport run_scenario(const std::filesystem::path& spec) {
  return run_scenario(load_scenario(spec));
}

inline nlohmann::json report_to_json(const ScenarioReport& r) {
  nlohmann::json j = {{"scenario", r.scenario},
                      {"trials", r.trials()},
                      {"successes", r.successes},
                      {"failures", nlohmann::json::object()},
                      {"outcomes", nlohmann::json::array()}};
  for (const auto& [stage, n] : r.failures) j["failures"][std::string(stage_name(stage))] = n;
  for (const auto& o : r.outcomes) {
    nlohmann::json oj = {{"trial", o.trial}, {"success", o.success}};
    if (o.stage) {
      oj["stage"] = std::string(stage_name(*o.stage));
      oj["phase"] = *o.phase;
      oj["detail"] = o.detail;
    }
    oj["plans"] = nlohmann::json::array();
    for (const auto& p : o.plans) {
      nlohmann::json steps = nlohmann::json::array();
      for (const auto& st : p.steps) steps.push_back(st.to_string());
      oj["plans"].push_back(steps);
    }
    j["outcomes"].push_back(oj);
  }
  return j;
}

inline std::string report_table(const ScenarioReport& r) {
  std::ostringstream os;
  os << "scenario: " << r.scenario << "\n";
  os << "trial  result   stage       detail\n";
  for (const auto& o : r.outcomes) {
    os << std::left;
    os.width(7);
    os << o.trial;
    os.width(9);
    os << (o.success ? "success" : "failure");
    os.width(12);
    os << (o.stage ? std::string(stage_name(*o.stage)) : std::string("-"));
    os << (o.detail.empty() ? "" : o.detail) << "\n";
  }
  os << "success " << r.successes << "/" << r.trials() << "; perception "
     << r.failures.at(FailureStage::perception) << ", planning "
     << r.failures.at(FailureStage::planning) << ", action " << r.failures.at(FailureStage::action)
     << "\n";
  return os.str();
}

}  // namespace affplan::sim
