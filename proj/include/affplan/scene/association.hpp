#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "affplan/scene/detection.hpp"

namespace affplan::scene {

inline constexpr double kDefaultIouMin = 0.5;

// Greedy one-to-one matching of affordance detections to object
// detections by descending IoU. Ties go to the lower affordance index,
// then the lower object index. Entry i is the matched object index for
// affordance record i, if any.
inline std::vector<std::optional<std::size_t>> associate(const std::vector<DetectionRecord>& aff,
                                                         const std::vector<ObjectDetection>& obj,
                                                         double iou_min = kDefaultIouMin) {
  if (!(iou_min > 0.0 && iou_min <= 1.0)) {
    throw std::invalid_argument("iou_min must lie in (0, 1]");
  }
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < aff.size(); ++i) {
    for (std::size_t j = 0; j < obj.size(); ++j) {
      const double v = iou(aff[i].bbox, obj[j].bbox);
      if (v >= iou_min) pairs.emplace_back(v, i, j);
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
    return std::tie(std::get<1>(a), std::get<2>(a)) < std::tie(std::get<1>(b), std::get<2>(b));
  });
  std::vector<std::optional<std::size_t>> match(aff.size());
  std::vector<bool> taken(obj.size(), false);
  for (const auto& [v, i, j] : pairs) {
    if (match[i] || taken[j]) continue;
    match[i] = j;
    taken[j] = true;
  }
  return match;
}

}  // namespace affplan::scene
