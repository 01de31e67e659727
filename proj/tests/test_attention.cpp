#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "affplan/attention.hpp"
#include "oracles.hpp"

using namespace affplan;
using namespace affplan::attention;

namespace {

RegionFeature random_feature(std::size_t c, std::size_t u, std::size_t v, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  RegionFeature f(c, u, v);
  for (auto& x : f.values().data()) x = d(rng);
  return f;
}

AttentionParams random_params(std::size_t c, std::mt19937_64& rng, double alpha) {
  auto p = AttentionParams::random(c, rng, 0.8);
  p.alpha = alpha;
  return p;
}

// Moves position perm[k] to position k.
RegionFeature permute(const RegionFeature& a, const std::vector<std::size_t>& perm) {
  RegionFeature out(a.channels(), a.height(), a.width());
  const std::size_t w = a.width();
  for (std::size_t ch = 0; ch < a.channels(); ++ch)
    for (std::size_t k = 0; k < perm.size(); ++k)
      out.at(ch, k / w, k % w) = a.at(ch, perm[k] / w, perm[k] % w);
  return out;
}

std::vector<double> flat(const RegionFeature& f) {
  return {f.values().data().begin(), f.values().data().end()};
}

}  // namespace

TEST(AttentionForward, AlphaZeroIsIdentity) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    const auto a = random_feature(3, 4, 2, rng);
    const auto p = random_params(3, rng, 0.0);
    EXPECT_EQ(attention_forward(a, p), a);
  }
}

TEST(AttentionForward, RandomParamsStartAtAlphaZero) {
  std::mt19937_64 rng(1);
  EXPECT_EQ(AttentionParams::random(4, rng).alpha, 0.0);
}

TEST(AttentionForward, SinglePosition) {
  std::mt19937_64 rng(3);
  const auto a = random_feature(3, 1, 1, rng);
  const auto p = random_params(3, rng, 0.7);
  const Tensor w = attention_weights(a, p);
  EXPECT_EQ(w.shape(), (std::vector<std::size_t>{1, 1}));
  EXPECT_DOUBLE_EQ(w[0], 1.0);
  const Tensor v = matmul(p.wv, a.as_columns());
  const auto out = attention_forward(a, p);
  for (std::size_t ch = 0; ch < 3; ++ch) EXPECT_NEAR(out.at(ch, 0, 0), 0.7 * v[ch] + a.at(ch, 0, 0), 1e-15);
}

TEST(AttentionForward, TwoPositionHandCase) {
  RegionFeature a(1, 1, 2);
  a.at(0, 0, 1) = std::log(2.0);
  const AttentionParams p{Tensor({1, 1}, 1.0), Tensor({1, 1}, 1.0), Tensor({1, 1}, 1.0), 1.0};
  const auto want = oracle::attention(a, p);
  const auto got = attention_forward(a, p);
  const Tensor w = attention_weights(a, p);
  // row 0: logits (0, 0) -> uniform; row 1: logits (0, ln2^2)
  EXPECT_NEAR(w(0, 0), 0.5, 1e-15);
  EXPECT_NEAR(w(1, 1), std::exp(std::pow(std::log(2.0), 2)) / (1 + std::exp(std::pow(std::log(2.0), 2))), 1e-15);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_NEAR(got.values()[i], want.out[i], 1e-14);
}

TEST(AttentionForward, MatchesPerElementOracle) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 40; ++t) {
    std::uniform_int_distribution<std::size_t> cd(1, 4), sd(1, 5);
    const auto a = random_feature(cd(rng), sd(rng), sd(rng), rng);
    const auto p = random_params(a.channels(), rng, 0.9);
    const auto want = oracle::attention(a, p);
    const auto got = attention_forward(a, p);
    const Tensor w = attention_weights(a, p);
    ASSERT_EQ(got.values().shape(), a.values().shape());
    for (std::size_t i = 0; i < want.out.size(); ++i) EXPECT_NEAR(got.values()[i], want.out[i], 1e-12);
    for (std::size_t j = 0; j < a.positions(); ++j)
      for (std::size_t i = 0; i < a.positions(); ++i) EXPECT_NEAR(w(j, i), want.w[j][i], 1e-12);
  }
}

TEST(AttentionForward, WeightsAreRowStochastic) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 100; ++t) {
    std::uniform_int_distribution<std::size_t> cd(1, 4), sd(1, 5);
    const auto a = random_feature(cd(rng), sd(rng), sd(rng), rng);
    auto p = random_params(a.channels(), rng, 1.0);
    p.wk *= 10.0;  // sharp attention too
    const Tensor w = attention_weights(a, p);
    for (std::size_t j = 0; j < w.rows(); ++j) {
      double s = 0;
      for (std::size_t i = 0; i < w.cols(); ++i) {
        EXPECT_GE(w(j, i), 0.0);
        s += w(j, i);
      }
      EXPECT_NEAR(s, 1.0, 1e-9);
    }
  }
}

TEST(AttentionForward, ChannelMismatchThrows) {
  std::mt19937_64 rng(1);
  const auto a = random_feature(3, 2, 2, rng);
  EXPECT_THROW(attention_forward(a, random_params(2, rng, 1.0)), ShapeError);
}

TEST(AttentionForward, PermutationEquivariantOnRandomInputs) {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 50; ++t) {
    const auto a = random_feature(3, 2, 3, rng);
    const auto p = random_params(3, rng, 0.8);
    std::vector<std::size_t> perm(6);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto lhs = flat(attention_forward(permute(a, perm), p));
    const auto rhs = flat(permute(attention_forward(a, p), perm));
    for (std::size_t i = 0; i < lhs.size(); ++i) EXPECT_NEAR(lhs[i], rhs[i], 1e-12);
  }
}

TEST(AttentionForward, PermutationEquivariantExactlyOnIntegerFixture) {
  // Integer features with weights large enough that every softmax row is
  // exactly one-hot, so no rounding depends on summation order.
  RegionFeature a(2, 2, 2);
  const double vals[2][4] = {{1, -2, 3, 0}, {2, 1, -1, -3}};
  for (std::size_t ch = 0; ch < 2; ++ch)
    for (std::size_t k = 0; k < 4; ++k) a.at(ch, k / 2, k % 2) = vals[ch][k];
  const AttentionParams p{30.0 * Tensor::identity(2), 30.0 * Tensor::identity(2),
                          Tensor::matrix({{1, 2}, {-1, 1}}), 2.0};
  const std::vector<std::vector<std::size_t>> perms = {{1, 0, 3, 2}, {3, 2, 1, 0}, {2, 0, 3, 1}};
  for (const auto& perm : perms) {
    EXPECT_EQ(flat(attention_forward(permute(a, perm), p)), flat(permute(attention_forward(a, p), perm)));
  }
}

TEST(AttentionBackward, MatchesFiniteDifferencesOnSmallInstance) {
  std::mt19937_64 rng(17);
  const auto a = random_feature(2, 2, 2, rng);
  const auto g = random_feature(2, 2, 2, rng);
  const auto p = random_params(2, rng, 0.6);
  const auto grads = attention_backward(a, p, g);
  auto objective = [&](const RegionFeature& x, const AttentionParams& q) {
    const auto out = attention_forward(x, q);
    double s = 0;
    for (std::size_t i = 0; i < out.values().size(); ++i) s += out.values()[i] * g.values()[i];
    return s;
  };
  const auto num_a = oracle::numeric_gradient(
      [&](const std::vector<double>& x) {
        return objective(RegionFeature(Tensor(a.values().shape(), x)), p);
      },
      flat(a));
  for (std::size_t i = 0; i < num_a.size(); ++i) EXPECT_LT(oracle::rel_err(grads.input.values()[i], num_a[i]), 1e-4);

  for (Tensor AttentionParams::*w : {&AttentionParams::wk, &AttentionParams::wq, &AttentionParams::wv}) {
    const Tensor& base = p.*w;
    const auto num = oracle::numeric_gradient(
        [&](const std::vector<double>& x) {
          AttentionParams q = p;
          q.*w = Tensor(base.shape(), x);
          return objective(a, q);
        },
        {base.data().begin(), base.data().end()});
    for (std::size_t i = 0; i < num.size(); ++i) EXPECT_LT(oracle::rel_err((grads.params.*w)[i], num[i]), 1e-4);
  }
  const auto num_alpha = oracle::numeric_gradient(
      [&](const std::vector<double>& x) {
        AttentionParams q = p;
        q.alpha = x[0];
        return objective(a, q);
      },
      {p.alpha});
  EXPECT_LT(oracle::rel_err(grads.params.alpha, num_alpha[0]), 1e-4);
}

TEST(AttentionBackward, AlphaZeroWithUnitUpstream) {
  std::mt19937_64 rng(23);
  const auto a = random_feature(3, 2, 2, rng);
  const auto p = random_params(3, rng, 0.0);
  RegionFeature ones(3, 2, 2, 1.0);
  const auto grads = attention_backward(a, p, ones);
  for (std::size_t i = 0; i < ones.values().size(); ++i) EXPECT_DOUBLE_EQ(grads.input.values()[i], 1.0);
  for (Tensor AttentionParams::*w : {&AttentionParams::wk, &AttentionParams::wq, &AttentionParams::wv})
    for (double x : (grads.params.*w).data()) EXPECT_EQ(x, 0.0);
  // d/d alpha = sum of the attention context
  const auto ctx = oracle::attention(a, AttentionParams{p.wk, p.wq, p.wv, 1.0});
  double want = 0;
  for (std::size_t i = 0; i < ctx.out.size(); ++i) want += ctx.out[i] - a.values()[i];
  EXPECT_NEAR(grads.params.alpha, want, 1e-12);
}

TEST(AttentionBackward, ZeroUpstreamGivesZeroGradients) {
  std::mt19937_64 rng(29);
  const auto a = random_feature(2, 3, 2, rng);
  const auto p = random_params(2, rng, 1.3);
  const auto grads = attention_backward(a, p, RegionFeature(2, 3, 2));
  for (double x : grads.input.values().data()) EXPECT_EQ(x, 0.0);
  for (Tensor AttentionParams::*w : {&AttentionParams::wk, &AttentionParams::wq, &AttentionParams::wv})
    for (double x : (grads.params.*w).data()) EXPECT_EQ(x, 0.0);
  EXPECT_EQ(grads.params.alpha, 0.0);
}

TEST(AttentionBackward, UpstreamShapeMismatchThrows) {
  std::mt19937_64 rng(1);
  const auto a = random_feature(2, 2, 2, rng);
  EXPECT_THROW(attention_backward(a, random_params(2, rng, 1.0), RegionFeature(2, 2, 3)), ShapeError);
}
