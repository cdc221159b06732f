// Copyright 2026 The littertrack Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "littertrack/embedding.hpp"
#include "littertrack/geometry.hpp"
#include "littertrack/motion_ukf.hpp"

namespace littertrack::assoc {

// 0.95 quantile of the chi-square distribution with 4 degrees of freedom.
inline constexpr double kChi2Gate4Dof = 9.4877;

struct AssociationConfig {
  double lambda_m = 0.5;
  double lambda_a = 0.5;
  // Gate on the raw squared Mahalanobis distance, before weighting.
  double motion_gate = kChi2Gate4Dof;
  // Maximum cosine distance between detection and track appearance.
  double appearance_gate = 0.3;
  double infeasible_cost = 1e5;

  void validate() const;
};

// Row-major dense matrix, rows = detections, cols = tracklets.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(int rows, int cols, double fill = 0.0, bool feasible = true);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double at(int r, int c) const { return cost_[index(r, c)]; }
  bool feasible(int r, int c) const { return feasible_[index(r, c)] != 0; }
  void set(int r, int c, double cost, bool feasible = true);

 private:
  std::size_t index(int r, int c) const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> cost_;
  std::vector<std::uint8_t> feasible_;
};

struct Assignment {
  // (detection row, tracklet column), sorted by row.
  std::vector<std::pair<int, int>> matches;
  std::vector<int> unmatched_rows;
  std::vector<int> unmatched_cols;

  double total_cost(const CostMatrix& cost) const;
};

struct TrackCandidate {
  ukf::MeasurementPrediction prediction;
  const Embedding* appearance = nullptr;
};

struct DetectionCandidate {
  Measurement measurement;
  const Embedding* embedding = nullptr;
};

// C_ij = lambda_m * d_m + lambda_a * d_a with d_m the squared Mahalanobis
// distance and d_a the cosine distance. Pairs without both embeddings fall
// back to C_ij = d_m. The appearance gate only applies when lambda_a > 0.
CostMatrix build_cost_matrix(std::span<const TrackCandidate> tracks,
                             std::span<const DetectionCandidate> detections,
                             const AssociationConfig& cfg);

// Minimum-cost assignment over feasible pairs with maximal feasible
// cardinality. Rectangular inputs are supported. Ties resolve towards lower
// column indices in row order.
Assignment hungarian(const CostMatrix& cost);

}  // namespace littertrack::assoc
