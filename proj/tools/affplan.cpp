// affplan command-line tool.
//
//   affplan plan --domain D (--problem P | --detections F [--objects F]) [--goal G] [--keeper K]
//   affplan metrics PRED_DIR GT_DIR [--ranked]
//   affplan check-attention [--seed N] [--trials N]
//   affplan simulate SPEC [--json]
//
// Exit codes: 0 success, 1 usage/IO/parse error, 2 unsolvable.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "affplan/config.hpp"
#include "affplan/gradcheck.hpp"
#include "affplan/image_io.hpp"
#include "affplan/metrics.hpp"
#include "affplan/pddl/parse.hpp"
#include "affplan/pddl/search.hpp"
#include "affplan/pddl/task.hpp"
#include "affplan/pddl/unparse.hpp"
#include "affplan/scene/detection.hpp"
#include "affplan/scene/keeper.hpp"
#include "affplan/scene/problem_builder.hpp"
#include "affplan/sim/scenario.hpp"

namespace fs = std::filesystem;
using namespace affplan;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kUnsolvable = 2;

// Raised for anything that should end the run with exit code 1.
struct CommandError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CommandError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Goal as an s-expression, a JSON list of atoms, or a file holding either.
std::vector<pddl::Literal> read_goal(const std::string& text, bool allow_file = true) {
  const auto start = text.find_first_not_of(" \t\r\n");
  if (start != std::string::npos && text[start] == '(') return pddl::parse_goal(text);
  if (start != std::string::npos && text[start] == '[') {
    try {
      return scene::goal_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
      throw CommandError(std::string("goal JSON: ") + e.what());
    }
  }
  if (allow_file && fs::is_regular_file(text)) {
    try {
      return read_goal(read_file(text), false);
    } catch (const pddl::PddlError& e) {
      throw CommandError(text + ": " + e.what());
    }
  }
  throw CommandError("goal must be an s-expression, a JSON list, or a file: '" + text + "'");
}

struct PlanOptions {
  std::string domain;
  std::string problem;
  std::string detections;
  std::string objects;
  std::string keeper;
  std::string goal;
  std::string emit_problem;
  std::vector<std::string> scene_facts;
};

pddl::DomainDef load_domain(const std::string& path) {
  try {
    return pddl::parse_domain(read_file(path));
  } catch (const pddl::PddlError& e) {
    throw CommandError(path + ": " + e.what());
  }
}

int cmd_plan(const PlanOptions& o, const Config& cfg) {
  const auto domain = load_domain(o.domain);
  if (o.problem.empty() == o.detections.empty()) {
    throw CommandError("give exactly one of --problem or --detections");
  }
  std::optional<std::vector<pddl::Literal>> goal;
  if (!o.goal.empty()) goal = read_goal(o.goal);

  pddl::ProblemDef problem;
  scene::StateKeeper keeper;
  std::map<std::string, scene::Anchor> anchors;
  if (!o.problem.empty()) {
    if (!o.keeper.empty()) throw CommandError("--keeper needs --detections");
    try {
      problem = pddl::parse_problem(read_file(o.problem), domain);
    } catch (const pddl::PddlError& e) {
      throw CommandError(o.problem + ": " + e.what());
    }
    if (goal) {
      problem.goal = *goal;
      try {
        pddl::check_problem(problem, domain);
      } catch (const pddl::PddlError& e) {
        throw CommandError(std::string("goal: ") + e.what());
      }
    }
  } else {
    if (!goal) throw CommandError("--goal is required with --detections");
    auto dets = scene::load_detections(o.detections);
    if (!o.objects.empty()) {
      auto extra = scene::load_detections(o.objects);
      dets.objects.insert(dets.objects.end(), extra.objects.begin(), extra.objects.end());
    }
    if (!o.keeper.empty() && fs::exists(o.keeper)) keeper = scene::load_keeper(o.keeper);
    std::vector<pddl::Atom> facts;
    for (const auto& f : o.scene_facts) facts.push_back(pddl::detail::parse_atom(pddl::read_sexpr(f)));
    try {
      auto built = scene::build_problem(dets.detections, dets.objects, keeper, *goal, domain,
                                        cfg.scene, facts);
      problem = std::move(built.problem);
      anchors = std::move(built.anchors);
    } catch (const scene::UngroundableGoal& e) {
      std::cout << "unsolvable: " << e.what() << "\n";
      return kUnsolvable;
    }
  }
  if (!o.emit_problem.empty()) {
    std::ofstream out(o.emit_problem);
    if (!out) throw CommandError("cannot write " + o.emit_problem);
    out << pddl::to_pddl(problem);
  }

  const auto task = pddl::ground(domain, problem);
  const auto result = pddl::plan(task, cfg.planner);
  if (!result.solved) {
    std::cout << "unsolvable: no plan reaches the goal\n";
    for (const auto& a : result.unreachable_goals) {
      std::cout << "unreachable: " << pddl::to_string(a) << "\n";
    }
    return kUnsolvable;
  }
  std::cout << result.plan.to_string() << "; cost " << result.plan.cost() << "\n";
  if (!o.keeper.empty()) {
    scene::save_keeper(scene::update_keeper(keeper, task, result.plan, anchors), o.keeper);
  }
  return kOk;
}

std::map<std::string, fs::path> list_pgm(const std::string& dir) {
  if (!fs::is_directory(dir)) throw CommandError("not a directory: " + dir);
  std::map<std::string, fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".pgm") out[e.path().filename().string()] = e.path();
  }
  return out;
}

metrics::ScoreReport score_pair(const fs::path& pred, const fs::path& gt, const Config& cfg) {
  const auto d = io::load_prediction(pred.string());
  const auto g = io::load_mask(gt.string());
  if (!d.same_shape(g)) {
    throw CommandError("shape mismatch: " + pred.string() + " is " + d.shape_string() + ", " +
                       gt.string() + " is " + g.shape_string());
  }
  return metrics::weighted_fmeasure(d, g, cfg.metric);
}

int cmd_metrics(const std::string& pred_dir, const std::string& gt_dir, bool ranked,
                const Config& cfg) {
  const auto preds = list_pgm(pred_dir);
  const auto gts = list_pgm(gt_dir);
  std::vector<std::string> unpaired;
  for (const auto& [name, _] : preds)
    if (!gts.count(name)) unpaired.push_back(pred_dir + "/" + name);
  for (const auto& [name, _] : gts)
    if (!preds.count(name)) unpaired.push_back(gt_dir + "/" + name);
  if (!unpaired.empty()) {
    std::string msg = "unpaired files:";
    for (const auto& u : unpaired) msg += "\n  " + u;
    throw CommandError(msg);
  }
  if (preds.empty()) throw CommandError("no .pgm files in " + pred_dir);

  std::printf(ranked ? "name,ranks,f_r1,f_r2,f_r3,ranked_f,empty_gt\n"
                     : "name,precision,recall,f,empty_gt\n");
  double total = 0.0;
  std::size_t count = 0;
  if (!ranked) {
    for (const auto& [name, pred] : preds) {
      const auto s = score_pair(pred, gts.at(name), cfg);
      std::printf("%s,%.6f,%.6f,%.6f,%d\n", name.c_str(), s.precision, s.recall, s.f,
                  s.empty_ground_truth ? 1 : 0);
      total += s.f;
      ++count;
    }
    std::printf("mean,,,%.6f,\n", total / static_cast<double>(count));
    return kOk;
  }

  static const std::regex rank_name(R"((.+)\.r([0-9]+)\.pgm)");
  std::map<std::string, std::map<int, std::string>> groups;
  for (const auto& [name, _] : preds) {
    std::smatch m;
    if (!std::regex_match(name, m, rank_name)) {
      throw CommandError("ranked file names must look like NAME.rK.pgm: " + name);
    }
    groups[m[1]][std::stoi(m[2])] = name;
  }
  for (const auto& [stem, ranks] : groups) {
    std::vector<std::pair<metrics::PredictionMap, metrics::GroundTruthMask>> pairs;
    int expect = 1;
    for (const auto& [r, name] : ranks) {
      if (r != expect++) throw CommandError(stem + ": ranks must run 1, 2, ... without gaps");
      score_pair(preds.at(name), gts.at(name), cfg);  // shape check with file names
      pairs.emplace_back(io::load_prediction(preds.at(name).string()),
                         io::load_mask(gts.at(name).string()));
    }
    metrics::RankedScore s;
    try {
      s = metrics::ranked_weighted_fmeasure(pairs, cfg.metric);
    } catch (const std::invalid_argument& e) {
      throw CommandError(stem + ": " + e.what());
    }
    std::printf("%s,%zu", stem.c_str(), pairs.size());
    for (std::size_t r = 0; r < metrics::kMaxRanks; ++r) {
      if (r < s.per_rank.size()) {
        std::printf(",%.6f", s.per_rank[r].f);
      } else {
        std::printf(",");
      }
    }
    std::printf(",%.6f,%d\n", s.value, s.empty_ground_truth ? 1 : 0);
    total += s.value;
    ++count;
  }
  std::printf("mean,,,,,%.6f,\n", total / static_cast<double>(count));
  return kOk;
}

int cmd_check(std::uint64_t seed, std::size_t trials) {
  const auto r = gradcheck::run(seed, trials);
  std::printf("seed %llu, %zu trials\n", static_cast<unsigned long long>(seed), r.trials);
  std::printf("attention  max relative error %.3e\n", r.attention);
  std::printf("detection  max relative error %.3e\n", r.detection);
  std::printf("affordance max relative error %.3e\n", r.affordance);
  std::printf("kl         max relative error %.3e\n", r.kl);
  std::printf("%s (tolerance %.0e)\n", r.pass() ? "pass" : "FAIL", gradcheck::kTolerance);
  return r.pass() ? kOk : kError;
}

int cmd_simulate(const std::string& spec, bool json, std::optional<std::uint64_t> seed,
                 std::optional<pddl::PlannerMode> planner) {
  auto s = sim::load_scenario(spec);
  if (seed) s.seed = *seed;
  if (planner) s.mode = *planner;
  const auto report = sim::run_scenario(s);
  if (json) {
    std::cout << sim::report_to_json(report).dump(2) << "\n";
  } else {
    std::cout << sim::report_table(report);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Affordance-driven task planning tools"};
  app.require_subcommand(1);
  std::string config_flag;
  app.add_option("--config", config_flag, "key = value config file (default: $AFFPLAN_CONFIG)");

  std::optional<double> iou_min;
  std::optional<std::size_t> min_pixels;
  std::string planner_flag;
  auto add_scene_flags = [&](CLI::App* sub) {
    sub->add_option("--iou-min", iou_min, "IoU threshold for object association");
    sub->add_option("--min-pixels", min_pixels, "pixels needed for an affordance to count");
  };
  auto add_planner_flag = [&](CLI::App* sub) {
    sub->add_option("--planner", planner_flag, "fast or optimal")
        ->check(CLI::IsMember({"fast", "optimal"}));
  };

  PlanOptions plan_opts;
  auto* plan = app.add_subcommand("plan", "build a planning problem and solve it");
  plan->add_option("--domain", plan_opts.domain, "PDDL domain file")->required();
  plan->add_option("--problem", plan_opts.problem, "PDDL problem file");
  plan->add_option("--detections", plan_opts.detections, "affordance detection JSON");
  plan->add_option("--objects", plan_opts.objects, "extra object detection JSON");
  plan->add_option("--keeper", plan_opts.keeper, "state keeper file, read and updated");
  plan->add_option("--goal", plan_opts.goal, "goal s-expression, JSON list or file");
  plan->add_option("--scene-fact", plan_opts.scene_facts, "extra init atom such as \"(has-beans pot)\"");
  plan->add_option("--emit-problem", plan_opts.emit_problem, "write the generated problem as PDDL");
  add_scene_flags(plan);
  add_planner_flag(plan);

  std::string pred_dir, gt_dir;
  bool ranked = false;
  auto* met = app.add_subcommand("metrics", "weighted F-measure over PGM map pairs");
  met->add_option("pred_dir", pred_dir, "prediction maps")->required();
  met->add_option("gt_dir", gt_dir, "ground-truth masks")->required();
  met->add_flag("--ranked", ranked, "score NAME.rK.pgm rank groups");

  std::uint64_t seed = 0;
  std::size_t trials = 100;
  auto* check = app.add_subcommand("check-attention", "finite-difference gradient checks");
  check->add_option("--seed", seed, "random seed");
  check->add_option("--trials", trials, "number of random instances")->check(CLI::PositiveNumber);

  std::string spec;
  bool json = false;
  std::optional<std::uint64_t> sim_seed;
  auto* simulate = app.add_subcommand("simulate", "run a scenario spec in the simulator");
  simulate->add_option("spec", spec, "scenario JSON")->required();
  simulate->add_flag("--json", json, "emit the report as JSON");
  simulate->add_option("--seed", sim_seed, "override the scenario's fault seed");
  add_planner_flag(simulate);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kError;
  }

  try {
    Config cfg;
    if (const auto path = config_path(config_flag); !path.empty()) load_config_file(cfg, path);
    if (iou_min) cfg.scene.iou_min = *iou_min;
    if (min_pixels) cfg.scene.min_pixels = *min_pixels;
    if (!planner_flag.empty()) cfg.planner = pddl::parse_planner_mode(planner_flag);
    cfg.validate();

    if (*plan) return cmd_plan(plan_opts, cfg);
    if (*met) return cmd_metrics(pred_dir, gt_dir, ranked, cfg);
    if (*check) return cmd_check(seed, trials);
    if (*simulate) {
      std::optional<pddl::PlannerMode> mode;
      if (!planner_flag.empty()) mode = cfg.planner;
      return cmd_simulate(spec, json, sim_seed, mode);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
