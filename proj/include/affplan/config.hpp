#pragma once

// Run configuration: defaults, then a key = value config file, then
// command-line flags.
//
//   # affplan.conf
//   iou_min = 0.5
//   min_pixels = 25
//   lambda1 = 1.0
//   lambda2 = 1.0
//   metric_beta = 1.0
//   metric_sigma = 5.0
//   metric_alpha = -0.1386
//   planner = "fast"

#include <cstdlib>
#include <fstream>
#include <stdexcept>
#include <string>

#include "affplan/losses.hpp"
#include "affplan/metrics.hpp"
#include "affplan/pddl/search.hpp"
#include "affplan/scene/problem_builder.hpp"

namespace affplan {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Config {
  scene::SceneConfig scene;
  losses::LossWeights loss;
  metrics::MetricParams metric;
  pddl::PlannerMode planner = pddl::PlannerMode::fast;

  void validate() const {
    if (!(scene.iou_min > 0.0 && scene.iou_min <= 1.0)) throw ConfigError("iou_min must lie in (0, 1]");
    if (loss.lambda1 < 0.0 || loss.lambda2 < 0.0) throw ConfigError("lambda1/lambda2 must be nonnegative");
    try {
      metric.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double to_double(const std::string& v, const std::string& where) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(where + ": expected a number, got '" + v + "'");
  }
}

}  // namespace detail

inline void apply_setting(Config& cfg, const std::string& key, std::string value,
                          const std::string& where) {
  if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
    value = value.substr(1, value.size() - 2);
  }
  if (key == "iou_min") {
    cfg.scene.iou_min = detail::to_double(value, where);
  } else if (key == "min_pixels") {
    const double v = detail::to_double(value, where);
    if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw ConfigError(where + ": min_pixels must be a nonnegative integer");
    }
    cfg.scene.min_pixels = static_cast<std::size_t>(v);
  } else if (key == "lambda1") {
    cfg.loss.lambda1 = detail::to_double(value, where);
  } else if (key == "lambda2") {
    cfg.loss.lambda2 = detail::to_double(value, where);
  } else if (key == "metric_beta") {
    cfg.metric.beta = detail::to_double(value, where);
  } else if (key == "metric_sigma") {
    cfg.metric.sigma = detail::to_double(value, where);
  } else if (key == "metric_alpha") {
    cfg.metric.alpha = detail::to_double(value, where);
  } else if (key == "planner") {
    try {
      cfg.planner = pddl::parse_planner_mode(value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + ": " + e.what());
    }
  } else {
    throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

inline void load_config_file(Config& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = path + ":" + std::to_string(n);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    apply_setting(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)), where);
  }
  cfg.validate();
}

// Path from --config if given, else AFFPLAN_CONFIG, else none.
inline std::string config_path(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("AFFPLAN_CONFIG")) return env;
  return {};
}

}  // namespace affplan
