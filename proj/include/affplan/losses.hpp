#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "affplan/tensor.hpp"

namespace affplan::losses {

// Probabilities are clamped to this floor before any log.
inline constexpr double kProbabilityFloor = 1e-12;

// Number of affordance attributes in the UMD tool taxonomy.
inline constexpr std::size_t kUmdAttributeCount = 7;

struct DetectionPrediction {
  double rho = 0.0;                 // foreground probability
  std::array<double, 4> bbox{};     // box regression output
  std::vector<double> attributes;   // per-attribute probabilities
};

struct DetectionTarget {
  int cls = 0;  // 0 background, 1 foreground
  std::array<double, 4> bbox{};
  std::vector<int> attributes;  // 0/1 labels
};

struct LossWeights {
  double lambda1 = 1.0;
  double lambda2 = 1.0;
};

struct DetectionGrad {
  double rho = 0.0;
  std::array<double, 4> bbox{};
  std::vector<double> attributes;
};

namespace detail {

inline double clamped_log(double p) { return std::log(std::max(p, kProbabilityFloor)); }

// d/dp of clamped_log(p); zero where the clamp is active.
inline double clamped_log_grad(double p) { return p > kProbabilityFloor ? 1.0 / p : 0.0; }

inline void check_detection(const DetectionPrediction& pred, const DetectionTarget& tgt,
                            const LossWeights& w) {
  if (tgt.cls != 0 && tgt.cls != 1) {
    throw std::invalid_argument("detection target class must be 0 or 1, got " +
                                std::to_string(tgt.cls));
  }
  if (pred.attributes.size() != tgt.attributes.size()) {
    throw std::invalid_argument("attribute count mismatch: prediction has " +
                                std::to_string(pred.attributes.size()) + ", target has " +
                                std::to_string(tgt.attributes.size()));
  }
  if (w.lambda1 < 0.0 || w.lambda2 < 0.0) {
    throw std::invalid_argument("loss weights must be nonnegative");
  }
}

inline void check_same_matrix(const Tensor& q, const Tensor& y, const char* what) {
  if (q.rank() != 2) throw ShapeError(std::string(what) + ": prediction must be |RoI| x |A|");
  Tensor::require_same_shape(q, y, what);
}

}  // namespace detail

// Detection-branch loss: two-class objectness cross-entropy, plus for
// foreground targets an l1 box term weighted by lambda1 and the mean binary
// cross-entropy over attributes weighted by lambda2.
inline double detection_loss(const DetectionPrediction& pred, const DetectionTarget& tgt,
                             const LossWeights& w = {}) {
  detail::check_detection(pred, tgt, w);
  using detail::clamped_log;
  const bool fg = tgt.cls == 1;
  double loss = fg ? -clamped_log(pred.rho) : -clamped_log(1.0 - pred.rho);
  if (!fg) return loss;

  double l1 = 0.0;
  for (std::size_t i = 0; i < 4; ++i) l1 += std::abs(pred.bbox[i] - tgt.bbox[i]);
  loss += w.lambda1 * l1;

  const std::size_t n = pred.attributes.size();
  if (n > 0) {
    double bce = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = pred.attributes[i];
      bce -= tgt.attributes[i] ? clamped_log(p) : clamped_log(1.0 - p);
    }
    loss += w.lambda2 / static_cast<double>(n) * bce;
  }
  return loss;
}

// Analytic gradient of detection_loss. The l1 term uses sign(), so it is a
// subgradient at exact box matches.
inline DetectionGrad detection_loss_grad(const DetectionPrediction& pred,
                                         const DetectionTarget& tgt, const LossWeights& w = {}) {
  detail::check_detection(pred, tgt, w);
  using detail::clamped_log_grad;
  DetectionGrad g;
  g.attributes.assign(pred.attributes.size(), 0.0);
  const bool fg = tgt.cls == 1;
  g.rho = fg ? -clamped_log_grad(pred.rho) : clamped_log_grad(1.0 - pred.rho);
  if (!fg) return g;

  for (std::size_t i = 0; i < 4; ++i) {
    const double d = pred.bbox[i] - tgt.bbox[i];
    g.bbox[i] = w.lambda1 * static_cast<double>((d > 0) - (d < 0));
  }
  const std::size_t n = pred.attributes.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double p = pred.attributes[i];
    const double d = tgt.attributes[i] ? -clamped_log_grad(p) : clamped_log_grad(1.0 - p);
    g.attributes[i] = w.lambda2 / static_cast<double>(n) * d;
  }
  return g;
}

// Multinomial cross-entropy averaged over the pixels of a region:
//   -(1/|RoI|) sum_j sum_a Y(j,a) log q(j,a)
// q and y are |RoI| x |A|, rows of q are per-pixel class distributions.
inline double affordance_loss(const Tensor& q, const Tensor& y) {
  detail::check_same_matrix(q, y, "affordance_loss");
  double total = 0.0;
  for (std::size_t j = 0; j < q.rows(); ++j)
    for (std::size_t a = 0; a < q.cols(); ++a)
      if (y(j, a) != 0.0) total -= y(j, a) * detail::clamped_log(q(j, a));
  return total / static_cast<double>(q.rows());
}

inline Tensor affordance_loss_grad(const Tensor& q, const Tensor& y) {
  detail::check_same_matrix(q, y, "affordance_loss_grad");
  Tensor g(q.shape());
  const double inv = 1.0 / static_cast<double>(q.rows());
  for (std::size_t i = 0; i < q.size(); ++i)
    g[i] = -inv * y[i] * detail::clamped_log_grad(q[i]);
  return g;
}

// Mean per-pixel KL(y_j || q_j); terms with y = 0 contribute nothing.
inline double kl_affordance_loss(const Tensor& q, const Tensor& y_dist) {
  detail::check_same_matrix(q, y_dist, "kl_affordance_loss");
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double y = y_dist[i];
    if (y > 0.0) total += y * (std::log(y) - detail::clamped_log(q[i]));
  }
  return total / static_cast<double>(q.rows());
}

// The target entropy term does not depend on q, so the gradient matches
// the cross-entropy one.
inline Tensor kl_affordance_loss_grad(const Tensor& q, const Tensor& y_dist) {
  return affordance_loss_grad(q, y_dist);
}

// The RPN loss is supplied by the caller.
inline double total_loss(double l_det, double l_rpn, double l_aff) { return l_det + l_rpn + l_aff; }

}  // namespace affplan::losses
