#pragma once

#include <Eigen/Core>
#include <span>
#include <utility>
#include <vector>

#include "binpose/types.hpp"

namespace binpose {

// Set-prediction matching and loss math, as pure evaluable functions. An
// external trainer owns gradients and schedules; this module only scores.

using CostMatrix = Eigen::MatrixXd;  // n_pred x n_gt, finite, >= 0

struct Matching {
  std::vector<std::pair<int, int>> pairs;  // (prediction, ground truth)
  double total_cost = 0.0;
};

struct LossWeights {
  double endpoint = 1.0;        // L1 term weight in the loss
  double classification = 1.0;  // classification term weight in the loss
  double matching_class = 1.0;  // classification term weight in the cost matrix
};

struct LossBreakdown {
  double endpoint_l1 = 0.0;
  double classification = 0.0;
  double total = 0.0;
  LossWeights weights;
};

// Exact minimum-cost assignment (Kuhn-Munkres, O(n^3)); rectangular inputs
// are zero-padded to square, and the returned pairs have cardinality
// min(n_pred, n_gt).
Matching hungarian_solve(const CostMatrix& costs);

// Sum of coordinate-wise L1 distances over both endpoints, minimized over
// the two ways of pairing the unordered endpoints.
double segment_pair_cost(const LineSegment3& pred, const LineSegment3& gt);

// -alpha * (1 - p_t)^gamma * log(p_t), where p_t is the probability the
// prediction assigns to the target class ("line" with probability p,
// "no-line" with 1 - p). gamma = 0, alpha = 1 is binary cross-entropy.
double focal_loss(double p, bool target_is_line, double alpha, double gamma);

// Builds the matching cost from endpoint distance plus (1 - confidence),
// solves the assignment, and scores L1 over matched pairs plus
// classification over all predictions (matched -> "line", else "no-line").
std::pair<Matching, LossBreakdown> match_and_score(
    std::span<const LineSegment3> predictions,
    std::span<const LineSegment3> ground_truths,
    const LossWeights& weights = {}, double alpha = 1.0, double gamma = 0.0);

}  // namespace binpose
