#pragma once

// Region self-attention over a single instance feature map.
//
// A c x u x v feature map is viewed as n = u*v columns of c-vectors.
// Keys, queries and values are per-position channel-mixing maps (1x1
// convolutions without bias):
//
//   K = Wk A,  Q = Wq A,  V = Wv A                 (each c x n)
//   w(j, i) = exp(Q_i . K_j) / sum_i' exp(Q_i' . K_j)
//   B_j = alpha * sum_i w(j, i) V_i + A_j
//
// so row j of the n x n weight matrix tells how much position i feeds
// position j.

#include <cstddef>
#include <random>
#include <string>

#include "affplan/tensor.hpp"

namespace affplan::attention {

// Feature map of shape c x u x v stored row-major (channel-major).
class RegionFeature {
 public:
  RegionFeature(std::size_t channels, std::size_t height, std::size_t width, double fill = 0.0)
      : values_({channels, height, width}, fill) {}

  explicit RegionFeature(Tensor values) : values_(std::move(values)) {
    if (values_.rank() != 3) {
      throw ShapeError("region feature must be c x u x v, got " +
                       Tensor::shape_string(values_.shape()));
    }
  }

  std::size_t channels() const { return values_.dim(0); }
  std::size_t height() const { return values_.dim(1); }
  std::size_t width() const { return values_.dim(2); }
  std::size_t positions() const { return height() * width(); }

  double& at(std::size_t c, std::size_t y, std::size_t x) {
    return values_[(c * height() + y) * width() + x];
  }
  double at(std::size_t c, std::size_t y, std::size_t x) const {
    return values_[(c * height() + y) * width() + x];
  }

  const Tensor& values() const noexcept { return values_; }
  Tensor& values() noexcept { return values_; }

  // c x n view of the same data (copy).
  Tensor as_columns() const { return values_.reshaped({channels(), positions()}); }

  static RegionFeature from_columns(const Tensor& cols, std::size_t height, std::size_t width) {
    return RegionFeature(cols.reshaped({cols.rows(), height, width}));
  }

  friend bool operator==(const RegionFeature&, const RegionFeature&) = default;

 private:
  Tensor values_;
};

struct AttentionParams {
  Tensor wk;
  Tensor wq;
  Tensor wv;
  double alpha = 0.0;

  std::size_t channels() const { return wk.rows(); }

  // Zero-initialised scale; weights drawn uniformly from [-scale, scale].
  template <typename Rng>
  static AttentionParams random(std::size_t channels, Rng& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    auto draw = [&] {
      Tensor t({channels, channels});
      for (auto& x : t.data()) x = dist(rng);
      return t;
    };
    AttentionParams p{draw(), draw(), draw(), 0.0};
    return p;
  }
};

struct AttentionGrads {
  RegionFeature input;
  AttentionParams params;
};

namespace detail {

inline void check_params(const RegionFeature& a, const AttentionParams& p) {
  const std::size_t c = a.channels();
  for (const Tensor* w : {&p.wk, &p.wq, &p.wv}) {
    if (w->rank() != 2 || w->rows() != c || w->cols() != c) {
      throw ShapeError("attention weight shape " + Tensor::shape_string(w->shape()) +
                       " does not match feature channels " + std::to_string(c));
    }
  }
}

struct ForwardCache {
  Tensor a;  // c x n
  Tensor k;
  Tensor q;
  Tensor v;
  Tensor w;  // n x n, row j = softmax over i of Q_i . K_j
  Tensor context;  // c x n, column j = sum_i w(j, i) V_i
};

inline ForwardCache run_forward(const RegionFeature& feature, const AttentionParams& p) {
  check_params(feature, p);
  ForwardCache fc;
  fc.a = feature.as_columns();
  fc.k = matmul(p.wk, fc.a);
  fc.q = matmul(p.wq, fc.a);
  fc.v = matmul(p.wv, fc.a);
  fc.w = softmax_rows(matmul(transpose(fc.k), fc.q));
  fc.context = matmul(fc.v, transpose(fc.w));
  return fc;
}

}  // namespace detail

// n x n attention weights for the given feature map.
inline Tensor attention_weights(const RegionFeature& a, const AttentionParams& p) {
  return detail::run_forward(a, p).w;
}

inline RegionFeature attention_forward(const RegionFeature& a, const AttentionParams& p) {
  auto fc = detail::run_forward(a, p);
  Tensor out = fc.a;
  if (p.alpha != 0.0) out += p.alpha * fc.context;
  return RegionFeature::from_columns(out, a.height(), a.width());
}

// Gradients of sum(upstream * attention_forward(a, p)) with respect to the
// input feature map, the three weight matrices and alpha.
inline AttentionGrads attention_backward(const RegionFeature& a, const AttentionParams& p,
                                         const RegionFeature& upstream) {
  if (upstream.values().shape() != a.values().shape()) {
    throw ShapeError("attention_backward: upstream shape " +
                     Tensor::shape_string(upstream.values().shape()) + " vs input " +
                     Tensor::shape_string(a.values().shape()));
  }
  auto fc = detail::run_forward(a, p);
  const Tensor g = upstream.as_columns();

  const double grad_alpha = hadamard(g, fc.context).sum();

  // context = V W^T
  const Tensor grad_v = p.alpha * matmul(g, fc.w);
  const Tensor grad_w = p.alpha * matmul(transpose(g), fc.v);
  // scores = K^T Q, w = softmax_rows(scores)
  const Tensor grad_scores = softmax_rows_backward(fc.w, grad_w);
  const Tensor grad_k = matmul(fc.q, transpose(grad_scores));
  const Tensor grad_q = matmul(fc.k, grad_scores);

  const Tensor at = transpose(fc.a);
  Tensor grad_a = g;
  grad_a += matmul(transpose(p.wk), grad_k);
  grad_a += matmul(transpose(p.wq), grad_q);
  grad_a += matmul(transpose(p.wv), grad_v);

  return AttentionGrads{
      RegionFeature::from_columns(grad_a, a.height(), a.width()),
      AttentionParams{matmul(grad_k, at), matmul(grad_q, at), matmul(grad_v, at), grad_alpha},
  };
}

}  // namespace affplan::attention
