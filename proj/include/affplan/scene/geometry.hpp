#pragma once

// Manipulation geometry from affordance masks. Coordinates are image
// pixels: x grows rightwards, y downwards, and a mask pixel at (row, col)
// sits at (bbox.x0 + col, bbox.y0 + row).

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "affplan/scene/detection.hpp"

namespace affplan::scene {

class AffordanceAbsent : public std::runtime_error {
 public:
  AffordanceAbsent(AffordanceLabel label, std::size_t found, std::size_t needed)
      : std::runtime_error("affordance absent: '" + std::string(label_name(label)) + "' has " +
                           std::to_string(found) + " pixels, need at least " +
                           std::to_string(needed)),
        label_(label) {}
  AffordanceLabel label() const noexcept { return label_; }

 private:
  AffordanceLabel label_;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct GraspPose {
  Point center;
  double theta = 0.0;  // principal axis angle in [0, pi)
};

namespace detail {

struct Moments {
  std::size_t n = 0;
  double mx = 0.0, my = 0.0;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
};

inline Moments label_moments(const DetectionRecord& rec, AffordanceLabel label) {
  Moments m;
  const auto want = static_cast<std::uint8_t>(label);
  for (std::size_t r = 0; r < rec.mask.height(); ++r) {
    for (std::size_t c = 0; c < rec.mask.width(); ++c) {
      if (rec.mask(r, c) != want) continue;
      ++m.n;
      m.mx += static_cast<double>(c);
      m.my += static_cast<double>(r);
    }
  }
  if (m.n == 0) return m;
  m.mx /= static_cast<double>(m.n);
  m.my /= static_cast<double>(m.n);
  for (std::size_t r = 0; r < rec.mask.height(); ++r) {
    for (std::size_t c = 0; c < rec.mask.width(); ++c) {
      if (rec.mask(r, c) != want) continue;
      const double dx = static_cast<double>(c) - m.mx;
      const double dy = static_cast<double>(r) - m.my;
      m.sxx += dx * dx;
      m.syy += dy * dy;
      m.sxy += dx * dy;
    }
  }
  m.mx += rec.bbox.x0;
  m.my += rec.bbox.y0;
  return m;
}

}  // namespace detail

inline double normalize_angle(double theta) {
  double t = std::fmod(theta, std::numbers::pi);
  if (t < 0.0) t += std::numbers::pi;
  if (t >= std::numbers::pi) t -= std::numbers::pi;
  return t;
}

// Centroid of the grasp pixels and the orientation of their total
// least-squares line.
inline GraspPose grasp_pose(const DetectionRecord& rec) {
  const auto m = detail::label_moments(rec, AffordanceLabel::grasp);
  if (m.n < 2) throw AffordanceAbsent(AffordanceLabel::grasp, m.n, 2);
  const double theta = 0.5 * std::atan2(2.0 * m.sxy, m.sxx - m.syy);
  return {{m.mx, m.my}, normalize_angle(theta)};
}

// Centroid of the contain- or support-labelled pixels.
inline Point place_target(const DetectionRecord& rec, AffordanceLabel label) {
  if (label != AffordanceLabel::contain && label != AffordanceLabel::support) {
    throw std::invalid_argument("place_target accepts contain or support, got '" +
                                std::string(label_name(label)) + "'");
  }
  const auto m = detail::label_moments(rec, label);
  if (m.n == 0) throw AffordanceAbsent(label, 0, 1);
  return {m.mx, m.my};
}

}  // namespace affplan::scene
