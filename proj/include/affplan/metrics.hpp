#pragma once

// Weighted F-measure for soft foreground maps and its ranked variant.
//
// Errors on foreground pixels are smoothed by a Gaussian restricted to
// foreground neighbours (the dependency term), and errors on background
// pixels are amplified with distance from the nearest foreground pixel
// (the importance term).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "affplan/grid.hpp"

namespace affplan::metrics {

using GroundTruthMask = Grid<std::uint8_t>;
using PredictionMap = Grid<double>;

struct MetricParams {
  double beta = 1.0;
  double sigma = 5.0;
  double alpha = std::log(0.5) / 5.0;

  void validate() const {
    if (!(beta > 0.0)) throw std::invalid_argument("metric beta must be positive");
    if (!(sigma > 0.0)) throw std::invalid_argument("metric sigma must be positive");
    if (!(alpha < 0.0)) throw std::invalid_argument("metric alpha must be negative");
  }
};

struct ScoreReport {
  double precision = 0.0;
  double recall = 0.0;
  double f = 0.0;
  bool empty_ground_truth = false;
};

struct RankedScore {
  double value = 0.0;
  std::vector<double> weights;
  std::vector<ScoreReport> per_rank;
  bool empty_ground_truth = false;
};

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

namespace detail {

// Squared distance to the lower envelope of parabolas (Felzenszwalb &
// Huttenlocher). Infinite samples contribute no parabola.
inline void edt_1d(const std::vector<double>& f, std::vector<double>& out,
                   std::vector<std::size_t>& v, std::vector<double>& z) {
  const std::size_t n = f.size();
  std::size_t k = 0;
  bool seeded = false;
  for (std::size_t q = 0; q < n; ++q) {
    if (f[q] == kUnreachable) continue;
    if (!seeded) {
      v[0] = q;
      z[0] = -kUnreachable;
      z[1] = kUnreachable;
      seeded = true;
      continue;
    }
    const auto dq = static_cast<double>(q);
    double s = 0.0;
    for (;;) {
      const auto dv = static_cast<double>(v[k]);
      s = ((f[q] + dq * dq) - (f[v[k]] + dv * dv)) / (2.0 * dq - 2.0 * dv);
      if (s > z[k]) break;
      --k;  // z[0] is -inf, so this never underflows
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kUnreachable;
  }
  if (!seeded) {
    std::fill(out.begin(), out.end(), kUnreachable);
    return;
  }
  k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    const auto dq = static_cast<double>(q);
    while (z[k + 1] < dq) ++k;
    const auto dv = static_cast<double>(v[k]);
    out[q] = (dq - dv) * (dq - dv) + f[v[k]];
  }
}

inline std::vector<double> gaussian_taps(double sigma, std::size_t radius) {
  std::vector<double> taps(2 * radius + 1);
  for (std::size_t i = 0; i < taps.size(); ++i) {
    const double d = static_cast<double>(i) - static_cast<double>(radius);
    taps[i] = std::exp(-d * d / (2.0 * sigma * sigma));
  }
  return taps;
}

// Separable zero-padded correlation with a symmetric kernel.
inline Grid<double> convolve_separable(const Grid<double>& in, const std::vector<double>& taps) {
  const std::size_t h = in.height(), w = in.width();
  const auto r = static_cast<std::ptrdiff_t>(taps.size() / 2);
  Grid<double> rows(h, w, 0.0);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t d = -r; d <= r; ++d) {
        const auto xx = static_cast<std::ptrdiff_t>(x) + d;
        if (xx < 0 || xx >= static_cast<std::ptrdiff_t>(w)) continue;
        acc += taps[static_cast<std::size_t>(d + r)] * in(y, static_cast<std::size_t>(xx));
      }
      rows(y, x) = acc;
    }
  }
  Grid<double> out(h, w, 0.0);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      double acc = 0.0;
      for (std::ptrdiff_t d = -r; d <= r; ++d) {
        const auto yy = static_cast<std::ptrdiff_t>(y) + d;
        if (yy < 0 || yy >= static_cast<std::ptrdiff_t>(h)) continue;
        acc += taps[static_cast<std::size_t>(d + r)] * rows(static_cast<std::size_t>(yy), x);
      }
      out(y, x) = acc;
    }
  }
  return out;
}

inline void check_pair(const PredictionMap& d, const GroundTruthMask& g) {
  if (!d.same_shape(g)) {
    throw std::invalid_argument("prediction " + d.shape_string() + " and ground truth " +
                                g.shape_string() + " differ in shape");
  }
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (!(d[i] >= 0.0 && d[i] <= 1.0)) {
      throw std::invalid_argument("prediction values must lie in [0,1]");
    }
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i] > 1) throw std::invalid_argument("ground truth values must be 0 or 1");
  }
}

}  // namespace detail

// Euclidean distance from every pixel to the nearest foreground pixel.
// Foreground pixels get 0; an empty mask yields kUnreachable everywhere.
inline Grid<double> distance_transform(const GroundTruthMask& g) {
  const std::size_t h = g.height(), w = g.width();
  Grid<double> sq(h, w, kUnreachable);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g[i]) sq[i] = 0.0;

  const std::size_t longest = std::max(h, w);
  std::vector<double> f, out;
  std::vector<std::size_t> v(longest);
  std::vector<double> z(longest + 1);

  f.resize(h);
  out.resize(h);
  for (std::size_t x = 0; x < w; ++x) {
    for (std::size_t y = 0; y < h; ++y) f[y] = sq(y, x);
    detail::edt_1d(f, out, v, z);
    for (std::size_t y = 0; y < h; ++y) sq(y, x) = out[y];
  }
  f.resize(w);
  out.resize(w);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) f[x] = sq(y, x);
    detail::edt_1d(f, out, v, z);
    for (std::size_t x = 0; x < w; ++x) sq(y, x) = out[x];
  }
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = std::sqrt(sq[i]);
  return sq;
}

// Half-width of the Gaussian window: ceil(3 sigma).
inline std::size_t smoothing_radius(double sigma) {
  return static_cast<std::size_t>(std::ceil(3.0 * sigma));
}

// Weighted precision and recall. The F field is left at zero; see
// weighted_fmeasure.
inline ScoreReport weighted_pr_rc(const PredictionMap& d, const GroundTruthMask& g,
                                  const MetricParams& p = {}) {
  p.validate();
  detail::check_pair(d, g);
  ScoreReport report;
  std::size_t fg_count = 0;
  for (std::size_t i = 0; i < g.size(); ++i) fg_count += g[i];
  if (fg_count == 0) {
    report.empty_ground_truth = true;
    return report;
  }

  const std::size_t h = g.height(), w = g.width();
  Grid<double> err(h, w), fg_err(h, w), fg(h, w);
  for (std::size_t i = 0; i < g.size(); ++i) {
    err[i] = std::abs(static_cast<double>(g[i]) - d[i]);
    fg[i] = g[i];
    fg_err[i] = g[i] ? err[i] : 0.0;
  }

  // Gaussian-weighted mean of the error over foreground neighbours.
  const auto taps = detail::gaussian_taps(p.sigma, smoothing_radius(p.sigma));
  const auto num = detail::convolve_separable(fg_err, taps);
  const auto den = detail::convolve_separable(fg, taps);
  const auto dist = distance_transform(g);

  double tp = 0.0, fp = 0.0, fn = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g[i]) {
      const double e = std::min(err[i], num[i] / den[i]);
      tp += 1.0 - e;
      fn += e;
    } else {
      fp += err[i] * (2.0 - std::exp(p.alpha * dist[i]));
    }
  }
  report.precision = tp + fp > 0.0 ? std::clamp(tp / (tp + fp), 0.0, 1.0) : 0.0;
  report.recall = tp + fn > 0.0 ? std::clamp(tp / (tp + fn), 0.0, 1.0) : 0.0;
  return report;
}

inline double f_beta(double precision, double recall, double beta) {
  const double b2 = beta * beta;
  const double denom = b2 * precision + recall;
  if (denom <= 0.0) return 0.0;
  return std::clamp((1.0 + b2) * precision * recall / denom, 0.0, 1.0);
}

inline ScoreReport weighted_fmeasure(const PredictionMap& d, const GroundTruthMask& g,
                                     const MetricParams& p = {}) {
  ScoreReport r = weighted_pr_rc(d, g, p);
  r.f = f_beta(r.precision, r.recall, p.beta);
  return r;
}

// Normalised geometric weights 2^-r, rank 1 heaviest.
inline std::vector<double> rank_weights(std::size_t count) {
  if (count == 0) throw std::invalid_argument("rank_weights: count must be at least 1");
  std::vector<double> w(count);
  double total = 0.0;
  for (std::size_t r = 0; r < count; ++r) {
    w[r] = std::ldexp(1.0, -static_cast<int>(r + 1));
    total += w[r];
  }
  for (auto& x : w) x /= total;
  return w;
}

inline constexpr std::size_t kMaxRanks = 3;

inline RankedScore ranked_weighted_fmeasure(
    const std::vector<std::pair<PredictionMap, GroundTruthMask>>& ranks,
    const MetricParams& p = {}) {
  if (ranks.empty()) throw std::invalid_argument("ranked_weighted_fmeasure: no ranks given");
  if (ranks.size() > kMaxRanks) {
    throw std::invalid_argument("ranked_weighted_fmeasure: at most " + std::to_string(kMaxRanks) +
                                " ranks are supported, got " + std::to_string(ranks.size()));
  }
  RankedScore out;
  out.weights = rank_weights(ranks.size());
  for (std::size_t r = 0; r < ranks.size(); ++r) {
    auto s = weighted_fmeasure(ranks[r].first, ranks[r].second, p);
    out.value += out.weights[r] * s.f;
    out.empty_ground_truth = out.empty_ground_truth || s.empty_ground_truth;
    out.per_rank.push_back(s);
  }
  out.value = std::clamp(out.value, 0.0, 1.0);
  return out;
}

inline PredictionMap binarize(const PredictionMap& d, double threshold = 0.5) {
  PredictionMap out(d.height(), d.width(), 0.0);
  for (std::size_t i = 0; i < d.size(); ++i) out[i] = d[i] >= threshold ? 1.0 : 0.0;
  return out;
}

}  // namespace affplan::metrics
