#pragma once

// Affordance detection records and object detections, plus their JSON
// encoding.
//
// Detection file:
//   {"detections": [{"bbox": [x0, y0, x1, y1], "objectness": 0.97,
//                    "mask": MASK, "ranked_masks": [MASK, ...],
//                    "attributes": [7 probabilities]}],
//    "objects": [{"bbox": [...], "category": "spoon", "score": 0.9}]}
//
// MASK is either {"rows": [[label, ...], ...]} or {"base64": "..."} holding
// (y1 - y0) * (x1 - x0) label bytes in row-major order. Labels use the UMD
// numbering: 0 background, 1 grasp, 2 cut, 3 scoop, 4 contain, 5 pound,
// 6 support, 7 wrap-grasp.

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/binary_from_base64.hpp>
#include <boost/archive/iterators/transform_width.hpp>
#include <json.hpp>

#include "affplan/grid.hpp"

namespace affplan::scene {

enum class AffordanceLabel : std::uint8_t {
  background = 0,
  grasp = 1,
  cut = 2,
  scoop = 3,
  contain = 4,
  pound = 5,
  support = 6,
  wrap_grasp = 7,
};

inline constexpr std::size_t kAffordanceCount = 7;

inline constexpr std::array<AffordanceLabel, kAffordanceCount> kAffordances = {
    AffordanceLabel::grasp,   AffordanceLabel::cut,     AffordanceLabel::scoop,
    AffordanceLabel::contain, AffordanceLabel::pound,   AffordanceLabel::support,
    AffordanceLabel::wrap_grasp};

inline std::string_view label_name(AffordanceLabel l) {
  switch (l) {
    case AffordanceLabel::background: return "background";
    case AffordanceLabel::grasp: return "grasp";
    case AffordanceLabel::cut: return "cut";
    case AffordanceLabel::scoop: return "scoop";
    case AffordanceLabel::contain: return "contain";
    case AffordanceLabel::pound: return "pound";
    case AffordanceLabel::support: return "support";
    case AffordanceLabel::wrap_grasp: return "wrap-grasp";
  }
  return "unknown";
}

inline std::optional<AffordanceLabel> parse_label(std::string_view s) {
  for (std::uint8_t i = 0; i <= kAffordanceCount; ++i) {
    const auto l = static_cast<AffordanceLabel>(i);
    if (label_name(l) == s) return l;
  }
  if (s == "wrap_grasp") return AffordanceLabel::wrap_grasp;
  return std::nullopt;
}

using LabelMask = Grid<std::uint8_t>;

struct BBox {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const noexcept { return x1 - x0; }
  int height() const noexcept { return y1 - y0; }
  double area() const noexcept {
    return x1 > x0 && y1 > y0 ? static_cast<double>(width()) * height() : 0.0;
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

inline double iou(const BBox& a, const BBox& b) {
  const BBox inter{std::max(a.x0, b.x0), std::max(a.y0, b.y0), std::min(a.x1, b.x1),
                   std::min(a.y1, b.y1)};
  const double i = inter.area();
  const double u = a.area() + b.area() - i;
  return u > 0.0 ? i / u : 0.0;
}

struct DetectionRecord {
  BBox bbox;
  double objectness = 1.0;
  LabelMask mask;  // cropped to bbox
  std::vector<LabelMask> ranked_masks;
  std::optional<std::array<double, kAffordanceCount>> attributes;

  std::size_t pixel_count(AffordanceLabel l) const {
    std::size_t n = 0;
    for (auto v : mask.values()) n += v == static_cast<std::uint8_t>(l);
    return n;
  }

  void validate() const {
    if (bbox.x0 >= bbox.x1 || bbox.y0 >= bbox.y1) {
      throw std::invalid_argument("detection bbox must satisfy x0 < x1 and y0 < y1");
    }
    if (!(objectness >= 0.0 && objectness <= 1.0)) {
      throw std::invalid_argument("objectness must lie in [0,1]");
    }
    auto check_mask = [&](const LabelMask& m, const char* what) {
      if (m.height() != static_cast<std::size_t>(bbox.height()) ||
          m.width() != static_cast<std::size_t>(bbox.width())) {
        throw std::invalid_argument(std::string(what) + " is " + m.shape_string() +
                                    " but bbox extent is " + std::to_string(bbox.height()) + "x" +
                                    std::to_string(bbox.width()));
      }
      for (auto v : m.values()) {
        if (v > kAffordanceCount) {
          throw std::invalid_argument(std::string(what) + " has label " + std::to_string(v) +
                                      " outside 0.." + std::to_string(kAffordanceCount));
        }
      }
    };
    check_mask(mask, "affordance mask");
    if (ranked_masks.size() > 3) throw std::invalid_argument("at most 3 ranked masks are allowed");
    for (const auto& m : ranked_masks) check_mask(m, "ranked mask");
    if (attributes) {
      for (double p : *attributes)
        if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("attributes must lie in [0,1]");
    }
  }
};

struct ObjectDetection {
  BBox bbox;
  std::string category;
  double score = 1.0;
};

struct DetectionFile {
  std::vector<DetectionRecord> detections;
  std::vector<ObjectDetection> objects;
};

class DetectionFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::uint8_t> base64_decode(std::string text) {
  using namespace boost::archive::iterators;
  using Decoder = transform_width<binary_from_base64<std::string::const_iterator>, 8, 6>;
  std::erase_if(text, [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
  std::size_t pad = 0;
  while (!text.empty() && text.back() == '=') {
    text.pop_back();
    ++pad;
  }
  if (pad > 2 || (text.size() + pad) % 4 != 0) {
    throw DetectionFormatError("malformed base64 mask payload");
  }
  try {
    std::vector<std::uint8_t> out(Decoder(text.cbegin()), Decoder(text.cend()));
    // transform_width emits trailing partial bytes from the padding bits
    out.resize(text.size() * 3 / 4);
    return out;
  } catch (const std::exception&) {
    throw DetectionFormatError("malformed base64 mask payload");
  }
}

inline std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  using namespace boost::archive::iterators;
  using Encoder = base64_from_binary<transform_width<std::vector<std::uint8_t>::const_iterator, 6, 8>>;
  std::string out(Encoder(bytes.cbegin()), Encoder(bytes.cend()));
  out.append((3 - bytes.size() % 3) % 3, '=');
  return out;
}

inline BBox bbox_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 4) {
    throw DetectionFormatError("bbox must be an array [x0, y0, x1, y1]");
  }
  return {j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

inline LabelMask mask_from_json(const nlohmann::json& j, const BBox& box) {
  const auto h = static_cast<std::size_t>(std::max(0, box.height()));
  const auto w = static_cast<std::size_t>(std::max(0, box.width()));
  if (j.contains("rows")) {
    const auto& rows = j.at("rows");
    std::vector<std::uint8_t> values;
    for (const auto& row : rows) {
      if (row.size() != w) throw DetectionFormatError("mask row length does not match bbox width");
      for (const auto& v : row) values.push_back(v.get<std::uint8_t>());
    }
    if (rows.size() != h) throw DetectionFormatError("mask row count does not match bbox height");
    return LabelMask(h, w, std::move(values));
  }
  if (j.contains("base64")) {
    auto bytes = base64_decode(j.at("base64").get<std::string>());
    if (bytes.size() != h * w) {
      throw DetectionFormatError("base64 mask holds " + std::to_string(bytes.size()) +
                                 " bytes, bbox needs " + std::to_string(h * w));
    }
    return LabelMask(h, w, std::move(bytes));
  }
  throw DetectionFormatError("mask needs either \"rows\" or \"base64\"");
}

inline nlohmann::json mask_to_json(const LabelMask& m) {
  return {{"base64", base64_encode(m.values())}};
}

}  // namespace detail

inline DetectionRecord detection_from_json(const nlohmann::json& j) {
  DetectionRecord r;
  r.bbox = detail::bbox_from_json(j.at("bbox"));
  r.objectness = j.value("objectness", 1.0);
  r.mask = detail::mask_from_json(j.at("mask"), r.bbox);
  if (j.contains("ranked_masks"))
    for (const auto& m : j.at("ranked_masks")) r.ranked_masks.push_back(detail::mask_from_json(m, r.bbox));
  if (j.contains("attributes")) {
    const auto& a = j.at("attributes");
    if (a.size() != kAffordanceCount) {
      throw DetectionFormatError("attributes must hold " + std::to_string(kAffordanceCount) +
                                 " probabilities");
    }
    std::array<double, kAffordanceCount> probs{};
    for (std::size_t i = 0; i < kAffordanceCount; ++i) probs[i] = a[i].get<double>();
    r.attributes = probs;
  }
  r.validate();
  return r;
}

inline nlohmann::json detection_to_json(const DetectionRecord& r) {
  nlohmann::json j = {{"bbox", {r.bbox.x0, r.bbox.y0, r.bbox.x1, r.bbox.y1}},
                      {"objectness", r.objectness},
                      {"mask", detail::mask_to_json(r.mask)}};
  if (!r.ranked_masks.empty()) {
    j["ranked_masks"] = nlohmann::json::array();
    for (const auto& m : r.ranked_masks) j["ranked_masks"].push_back(detail::mask_to_json(m));
  }
  if (r.attributes) j["attributes"] = *r.attributes;
  return j;
}

inline ObjectDetection object_from_json(const nlohmann::json& j) {
  ObjectDetection o{detail::bbox_from_json(j.at("bbox")), j.at("category").get<std::string>(),
                    j.value("score", 1.0)};
  if (!(o.score >= 0.0 && o.score <= 1.0)) throw DetectionFormatError("object score must lie in [0,1]");
  if (o.category.empty()) throw DetectionFormatError("object category must be non-empty");
  return o;
}

inline nlohmann::json object_to_json(const ObjectDetection& o) {
  return {{"bbox", {o.bbox.x0, o.bbox.y0, o.bbox.x1, o.bbox.y1}},
          {"category", o.category},
          {"score", o.score}};
}

inline DetectionFile detections_from_json(const nlohmann::json& j) {
  DetectionFile f;
  try {
    if (j.contains("detections"))
      for (const auto& d : j.at("detections")) f.detections.push_back(detection_from_json(d));
    if (j.contains("objects"))
      for (const auto& o : j.at("objects")) f.objects.push_back(object_from_json(o));
  } catch (const nlohmann::json::exception& e) {
    throw DetectionFormatError(std::string("detection JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw DetectionFormatError(std::string("detection JSON: ") + e.what());
  }
  return f;
}

inline nlohmann::json detections_to_json(const DetectionFile& f) {
  nlohmann::json j = {{"detections", nlohmann::json::array()}, {"objects", nlohmann::json::array()}};
  for (const auto& d : f.detections) j["detections"].push_back(detection_to_json(d));
  for (const auto& o : f.objects) j["objects"].push_back(object_to_json(o));
  return j;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

inline DetectionFile load_detections(const std::string& path) {
  try {
    return detections_from_json(read_json_file(path));
  } catch (const DetectionFormatError& e) {
    throw DetectionFormatError(path + ": " + e.what());
  }
}

}  // namespace affplan::scene
