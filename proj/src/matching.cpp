#include "binpose/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace binpose {

Matching hungarian_solve(const CostMatrix& costs) {
  const int n_pred = static_cast<int>(costs.rows());
  const int n_gt = static_cast<int>(costs.cols());
  if (n_pred < 1 || n_gt < 1)
    throw InvalidCost("cost matrix must be at least 1x1");
  for (int i = 0; i < n_pred; ++i)
    for (int j = 0; j < n_gt; ++j) {
      const double c = costs(i, j);
      if (!std::isfinite(c) || c < 0.0)
        throw InvalidCost("cost entries must be finite and nonnegative");
    }

  // Shortest-augmenting-path Kuhn-Munkres with row/column potentials on the
  // implicitly zero-padded square matrix.
  const int n = std::max(n_pred, n_gt);
  const auto cell = [&](int i, int j) {
    return (i < n_pred && j < n_gt) ? costs(i, j) : 0.0;
  };
  constexpr double kInf = std::numeric_limits<double>::infinity();

  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = 0;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cell(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  Matching result;
  for (int j = 1; j <= n; ++j) {
    const int i = match[j] - 1;
    const int col = j - 1;
    if (i < n_pred && col < n_gt) {
      result.pairs.emplace_back(i, col);
      result.total_cost += costs(i, col);
    }
  }
  std::sort(result.pairs.begin(), result.pairs.end());
  return result;
}

double segment_pair_cost(const LineSegment3& pred, const LineSegment3& gt) {
  const auto l1 = [](const Vec3& x, const Vec3& y) {
    return (x - y).cwiseAbs().sum();
  };
  return std::min(l1(pred.a, gt.a) + l1(pred.b, gt.b),
                  l1(pred.a, gt.b) + l1(pred.b, gt.a));
}

double focal_loss(double p, bool target_is_line, double alpha, double gamma) {
  if (alpha <= 0.0 || gamma < 0.0)
    throw InvalidParams("focal loss requires alpha > 0 and gamma >= 0");
  constexpr double kEps = 1e-12;
  p = std::clamp(p, kEps, 1.0);
  const double p_t = std::clamp(target_is_line ? p : 1.0 - p, kEps, 1.0);
  return -alpha * std::pow(1.0 - p_t, gamma) * std::log(p_t);
}

std::pair<Matching, LossBreakdown> match_and_score(
    std::span<const LineSegment3> predictions,
    std::span<const LineSegment3> ground_truths, const LossWeights& weights,
    double alpha, double gamma) {
  if (predictions.empty())
    throw InvalidCost("prediction list must be nonempty");

  Matching matching;
  if (!ground_truths.empty()) {
    CostMatrix costs(predictions.size(), ground_truths.size());
    for (Eigen::Index i = 0; i < costs.rows(); ++i)
      for (Eigen::Index j = 0; j < costs.cols(); ++j)
        costs(i, j) = weights.endpoint *
                          segment_pair_cost(predictions[i], ground_truths[j]) +
                      weights.matching_class * (1.0 - predictions[i].confidence);
    matching = hungarian_solve(costs);
  }

  std::vector<char> matched(predictions.size(), 0);
  LossBreakdown loss;
  loss.weights = weights;
  for (const auto& [i, j] : matching.pairs) {
    matched[static_cast<std::size_t>(i)] = 1;
    loss.endpoint_l1 += segment_pair_cost(predictions[i], ground_truths[j]);
  }
  for (std::size_t i = 0; i < predictions.size(); ++i)
    loss.classification +=
        focal_loss(predictions[i].confidence, matched[i] != 0, alpha, gamma);
  loss.total = weights.endpoint * loss.endpoint_l1 +
               weights.classification * loss.classification;
  return {std::move(matching), loss};
}

}  // namespace binpose
