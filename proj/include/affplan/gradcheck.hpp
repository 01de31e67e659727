#pragma once

// Seeded finite-difference checks of the attention and loss gradients.

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "affplan/attention.hpp"
#include "affplan/losses.hpp"
#include "affplan/tensor.hpp"

namespace affplan::gradcheck {

inline constexpr double kTolerance = 1e-4;
inline constexpr double kStep = 1e-5;

struct Report {
  std::size_t trials = 0;
  double attention = 0.0;  // max relative error over all attention gradients
  double detection = 0.0;
  double affordance = 0.0;
  double kl = 0.0;

  double worst() const { return std::max({attention, detection, affordance, kl}); }
  bool pass() const { return worst() < kTolerance; }
};

namespace detail {

inline Tensor uniform(std::vector<std::size_t> shape, std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Tensor t(std::move(shape));
  for (auto& x : t.data()) x = dist(rng);
  return t;
}

inline double attention_trial(std::mt19937_64& rng) {
  using namespace attention;
  std::uniform_int_distribution<std::size_t> cdim(1, 4), sdim(1, 5);
  const std::size_t c = cdim(rng), u = sdim(rng), v = sdim(rng);
  const RegionFeature a(uniform({c, u, v}, rng, -1.0, 1.0));
  const RegionFeature g(uniform({c, u, v}, rng, -1.0, 1.0));
  AttentionParams p = AttentionParams::random(c, rng, 0.8);
  p.alpha = std::uniform_real_distribution<double>(0.2, 1.5)(rng);

  const auto grads = attention_backward(a, p, g);
  auto objective = [&](const RegionFeature& x, const AttentionParams& q) {
    return hadamard(attention_forward(x, q).values(), g.values()).sum();
  };

  double worst = max_relative_error(
      grads.input.values(),
      finite_diff_grad([&](const Tensor& x) { return objective(RegionFeature(x), p); },
                       a.values(), kStep));
  for (Tensor AttentionParams::*w : {&AttentionParams::wk, &AttentionParams::wq, &AttentionParams::wv}) {
    const Tensor num = finite_diff_grad(
        [&](const Tensor& x) {
          AttentionParams q = p;
          q.*w = x;
          return objective(a, q);
        },
        p.*w, kStep);
    worst = std::max(worst, max_relative_error(grads.params.*w, num));
  }
  const Tensor alpha_num = finite_diff_grad(
      [&](const Tensor& x) {
        AttentionParams q = p;
        q.alpha = x[0];
        return objective(a, q);
      },
      Tensor({1}, p.alpha), kStep);
  return std::max(worst, relative_error(grads.params.alpha, alpha_num[0]));
}

inline double detection_trial(std::mt19937_64& rng) {
  using namespace losses;
  std::uniform_real_distribution<double> prob(0.05, 0.95), box(-2.0, 2.0), off(0.1, 1.0);
  std::bernoulli_distribution coin;
  DetectionPrediction pred;
  DetectionTarget tgt;
  tgt.cls = coin(rng) ? 1 : 0;
  pred.rho = prob(rng);
  for (std::size_t i = 0; i < 4; ++i) {
    tgt.bbox[i] = box(rng);
    // keep away from the kink of |x|
    pred.bbox[i] = tgt.bbox[i] + (coin(rng) ? 1.0 : -1.0) * off(rng);
  }
  for (std::size_t i = 0; i < kUmdAttributeCount; ++i) {
    pred.attributes.push_back(prob(rng));
    tgt.attributes.push_back(coin(rng) ? 1 : 0);
  }
  const LossWeights w{std::uniform_real_distribution<double>(0.5, 2.0)(rng),
                      std::uniform_real_distribution<double>(0.5, 2.0)(rng)};

  // flatten (rho, bbox, attributes) into one vector
  Tensor x({1 + 4 + kUmdAttributeCount});
  x[0] = pred.rho;
  for (std::size_t i = 0; i < 4; ++i) x[1 + i] = pred.bbox[i];
  for (std::size_t i = 0; i < kUmdAttributeCount; ++i) x[5 + i] = pred.attributes[i];
  auto unpack = [&](const Tensor& t) {
    DetectionPrediction p;
    p.rho = t[0];
    for (std::size_t i = 0; i < 4; ++i) p.bbox[i] = t[1 + i];
    for (std::size_t i = 0; i < kUmdAttributeCount; ++i) p.attributes.push_back(t[5 + i]);
    return p;
  };
  const auto g = detection_loss_grad(pred, tgt, w);
  Tensor analytic(x.shape());
  analytic[0] = g.rho;
  for (std::size_t i = 0; i < 4; ++i) analytic[1 + i] = g.bbox[i];
  for (std::size_t i = 0; i < kUmdAttributeCount; ++i) analytic[5 + i] = g.attributes[i];
  const Tensor num = finite_diff_grad(
      [&](const Tensor& t) { return detection_loss(unpack(t), tgt, w); }, x, kStep);
  return max_relative_error(analytic, num);
}

inline Tensor random_distributions(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  return softmax_rows(uniform({rows, cols}, rng, -2.0, 2.0));
}

inline std::pair<double, double> affordance_trial(std::mt19937_64& rng) {
  using namespace losses;
  std::uniform_int_distribution<std::size_t> rows(1, 12), cols(2, 8);
  const std::size_t n = rows(rng), k = cols(rng);
  const Tensor q = random_distributions(n, k, rng);
  Tensor onehot({n, k});
  std::uniform_int_distribution<std::size_t> cls(0, k - 1);
  for (std::size_t j = 0; j < n; ++j) onehot(j, cls(rng)) = 1.0;
  const Tensor soft = random_distributions(n, k, rng);

  const double ce = max_relative_error(
      affordance_loss_grad(q, onehot),
      finite_diff_grad([&](const Tensor& t) { return affordance_loss(t, onehot); }, q, kStep));
  const double kl = max_relative_error(
      kl_affordance_loss_grad(q, soft),
      finite_diff_grad([&](const Tensor& t) { return kl_affordance_loss(t, soft); }, q, kStep));
  return {ce, kl};
}

}  // namespace detail

inline Report run(std::uint64_t seed, std::size_t trials) {
  if (trials == 0) throw std::invalid_argument("gradient check needs at least one trial");
  std::mt19937_64 rng(seed);
  Report r;
  r.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    r.attention = std::max(r.attention, detail::attention_trial(rng));
    r.detection = std::max(r.detection, detail::detection_trial(rng));
    const auto [ce, kl] = detail::affordance_trial(rng);
    r.affordance = std::max(r.affordance, ce);
    r.kl = std::max(r.kl, kl);
  }
  return r;
}

}  // namespace affplan::gradcheck
