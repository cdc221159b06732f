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

#include "littertrack/association.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "littertrack/error.hpp"

namespace littertrack::assoc {

void AssociationConfig::validate() const {
  if (lambda_m < 0.0 || lambda_a < 0.0 || !(lambda_m + lambda_a > 0.0)) {
    throw ConfigError(fmt::format(
        "association weights must be >= 0 and not both zero (lambda_m={}, "
        "lambda_a={})",
        lambda_m, lambda_a));
  }
  if (!(motion_gate > 0.0) || !(appearance_gate > 0.0)) {
    throw ConfigError("association gates must be positive");
  }
  const double max_feasible =
      std::max(motion_gate, lambda_m * motion_gate + lambda_a * appearance_gate);
  if (!(infeasible_cost > max_feasible)) {
    throw ConfigError(fmt::format(
        "association.infeasible_cost must exceed every feasible cost ({})",
        max_feasible));
  }
}

CostMatrix::CostMatrix(int rows, int cols, double fill, bool feasible)
    : rows_(rows),
      cols_(cols),
      cost_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill),
      feasible_(cost_.size(), feasible ? 1 : 0) {
  if (rows < 0 || cols < 0) throw InputError("negative cost matrix dimension");
}

void CostMatrix::set(int r, int c, double cost, bool feasible) {
  cost_[index(r, c)] = cost;
  feasible_[index(r, c)] = feasible ? 1 : 0;
}

double Assignment::total_cost(const CostMatrix& cost) const {
  double total = 0.0;
  for (const auto& [r, c] : matches) total += cost.at(r, c);
  return total;
}

CostMatrix build_cost_matrix(std::span<const TrackCandidate> tracks,
                             std::span<const DetectionCandidate> detections,
                             const AssociationConfig& cfg) {
  cfg.validate();
  CostMatrix cost(static_cast<int>(detections.size()),
                  static_cast<int>(tracks.size()), cfg.infeasible_cost, false);
  for (std::size_t i = 0; i < detections.size(); ++i) {
    const auto z = ukf::measurement_vector(detections[i].measurement);
    for (std::size_t j = 0; j < tracks.size(); ++j) {
      const double d_m = ukf::mahalanobis_squared(tracks[j].prediction, z);
      if (!(d_m <= cfg.motion_gate)) continue;

      const Embedding* det_emb = detections[i].embedding;
      const Embedding* trk_emb = tracks[j].appearance;
      double c = 0.0;
      if (det_emb != nullptr && trk_emb != nullptr) {
        if (cfg.lambda_a > 0.0) {
          const double d_a = cosine_distance(*det_emb, *trk_emb);
          if (d_a > cfg.appearance_gate) continue;
          c = cfg.lambda_m * d_m + cfg.lambda_a * d_a;
        } else {
          c = cfg.lambda_m * d_m;
        }
      } else {
        c = d_m;
      }
      cost.set(static_cast<int>(i), static_cast<int>(j), c, true);
    }
  }
  return cost;
}

namespace {

// Shortest augmenting path Hungarian method on an n x m matrix, n <= m.
// Returns for each row the assigned column.
std::vector<int> solve_rows(const std::vector<double>& a, int n, int m) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(m + 1, 0.0);
  std::vector<int> p(m + 1, 0);
  std::vector<int> way(m + 1, 0);
  auto at = [&](int i, int j) {
    return a[static_cast<std::size_t>(i - 1) * m + (j - 1)];
  };

  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(m + 1, inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = at(i0, j) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

}  // namespace

Assignment hungarian(const CostMatrix& cost) {
  const int rows = cost.rows();
  const int cols = cost.cols();
  Assignment out;

  double lo = 0.0;
  double hi = 0.0;
  bool any_feasible = false;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!cost.feasible(r, c)) continue;
      const double x = cost.at(r, c);
      if (!std::isfinite(x)) {
        throw InputError("feasible cost entries must be finite");
      }
      lo = any_feasible ? std::min(lo, x) : x;
      hi = any_feasible ? std::max(hi, x) : x;
      any_feasible = true;
    }
  }

  if (!any_feasible) {
    for (int r = 0; r < rows; ++r) out.unmatched_rows.push_back(r);
    for (int c = 0; c < cols; ++c) out.unmatched_cols.push_back(c);
    return out;
  }

  // Every complete assignment covers exactly min(rows, cols) cells. A penalty
  // larger than any spread of feasible totals makes the solver minimize the
  // number of infeasible cells first and the feasible cost second.
  const int k = std::min(rows, cols);
  const double penalty = k * (std::abs(hi) + std::abs(lo)) + 1.0;

  const bool transpose = rows > cols;
  const int n = transpose ? cols : rows;
  const int m = transpose ? rows : cols;
  std::vector<double> a(static_cast<std::size_t>(n) * m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const int r = transpose ? j : i;
      const int c = transpose ? i : j;
      a[static_cast<std::size_t>(i) * m + j] =
          cost.feasible(r, c) ? cost.at(r, c) : penalty;
    }
  }

  const std::vector<int> assigned = solve_rows(a, n, m);
  std::vector<char> row_used(rows, 0);
  std::vector<char> col_used(cols, 0);
  for (int i = 0; i < n; ++i) {
    const int r = transpose ? assigned[i] : i;
    const int c = transpose ? i : assigned[i];
    if (r < 0 || c < 0 || !cost.feasible(r, c)) continue;
    out.matches.emplace_back(r, c);
    row_used[r] = 1;
    col_used[c] = 1;
  }
  std::sort(out.matches.begin(), out.matches.end());
  for (int r = 0; r < rows; ++r) {
    if (!row_used[r]) out.unmatched_rows.push_back(r);
  }
  for (int c = 0; c < cols; ++c) {
    if (!col_used[c]) out.unmatched_cols.push_back(c);
  }
  return out;
}

}  // namespace littertrack::assoc
