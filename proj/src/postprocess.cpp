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

#include "littertrack/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "littertrack/error.hpp"

namespace littertrack::post {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void GsiConfig::validate() const {
  if (!(length_scale > 0.0)) throw ConfigError("gsi.length_scale must be > 0");
  if (!(noise_variance >= 0.0)) {
    throw ConfigError("gsi.noise_variance must be >= 0");
  }
  if (max_gap < 1) throw ConfigError("gsi.max_gap must be >= 1");
  if (context < 1) throw ConfigError("gsi.context must be >= 1");
}

void AflinkConfig::validate() const {
  if (max_frame_gap < 1) throw ConfigError("aflink.max_frame_gap must be >= 1");
  if (!(max_prediction_error > 0.0)) {
    throw ConfigError("aflink.max_prediction_error must be > 0");
  }
  if (min_tracklet_length < 1) {
    throw ConfigError("aflink.min_tracklet_length must be >= 1");
  }
  if (!(score_threshold >= 0.0 && score_threshold <= 1.0)) {
    throw ConfigError("aflink.score_threshold must lie in [0, 1]");
  }
  if (velocity_window < 2) throw ConfigError("aflink.velocity_window must be >= 2");
}

double rbf_kernel(double x1, double x2, double length_scale) {
  const double d = x1 - x2;
  return std::exp(-(d * d) / (2.0 * length_scale * length_scale));
}

namespace {

// Posterior means for several output columns sharing one training set.
MatrixXd gp_solve(std::span<const double> train_x, const MatrixXd& train_y,
                  std::span<const double> query_x, double length_scale,
                  double noise_variance) {
  const Eigen::Index n = static_cast<Eigen::Index>(train_x.size());
  MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      k(i, j) = rbf_kernel(train_x[i], train_x[j], length_scale);
    }
  }
  k.diagonal().array() += noise_variance;

  Eigen::LLT<MatrixXd> llt(k);
  double jitter = 1e-9;
  while (llt.info() != Eigen::Success && jitter <= 1e-5 * 1.0001) {
    MatrixXd kj = k;
    kj.diagonal().array() += jitter;
    llt.compute(kj);
    jitter *= 10.0;
  }
  if (llt.info() != Eigen::Success) {
    throw NumericalError("kernel matrix is singular despite jitter");
  }
  const MatrixXd weights = llt.solve(train_y);

  MatrixXd k_star(static_cast<Eigen::Index>(query_x.size()), n);
  for (Eigen::Index q = 0; q < k_star.rows(); ++q) {
    for (Eigen::Index j = 0; j < n; ++j) {
      k_star(q, j) = rbf_kernel(query_x[q], train_x[j], length_scale);
    }
  }
  return k_star * weights;
}

}  // namespace

std::vector<double> gp_posterior_mean(std::span<const double> train_x,
                                      std::span<const double> train_y,
                                      std::span<const double> query_x,
                                      double length_scale,
                                      double noise_variance) {
  if (train_x.size() != train_y.size() || train_x.empty()) {
    throw InputError("GP training inputs and outputs must be nonempty and aligned");
  }
  if (!(length_scale > 0.0)) throw InputError("length_scale must be > 0");
  const VectorXd y = Eigen::Map<const VectorXd>(
      train_y.data(), static_cast<Eigen::Index>(train_y.size()));
  const MatrixXd mean =
      gp_solve(train_x, y, query_x, length_scale, noise_variance);
  return {mean.data(), mean.data() + mean.size()};
}

Track gsi_interpolate(const Track& track, const GsiConfig& cfg) {
  cfg.validate();
  std::vector<FrameIndex> observed;
  for (const auto& [frame, entry] : track.history) {
    if (!entry.interpolated) observed.push_back(frame);
  }
  Track out = track;
  if (observed.size() < 2) return out;

  for (std::size_t g = 0; g + 1 < observed.size(); ++g) {
    const FrameIndex a = observed[g];
    const FrameIndex b = observed[g + 1];
    const FrameIndex gap = b - a - 1;
    if (gap < 1 || gap > cfg.max_gap) continue;

    std::vector<double> query;
    for (FrameIndex f = a + 1; f < b; ++f) {
      if (!track.history.contains(f)) query.push_back(static_cast<double>(f));
    }
    if (query.empty()) continue;

    std::vector<double> train_x;
    std::vector<const BoundingBox*> train_boxes;
    for (FrameIndex f : observed) {
      if (f < a - cfg.context || f > b + cfg.context) continue;
      train_x.push_back(static_cast<double>(f));
      train_boxes.push_back(&track.history.at(f).box);
    }
    MatrixXd y(static_cast<Eigen::Index>(train_x.size()), 4);
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      const BoundingBox& box = *train_boxes[static_cast<std::size_t>(i)];
      y.row(i) << box.left, box.top, box.width, box.height;
    }
    const MatrixXd filled =
        gp_solve(train_x, y, query, cfg.length_scale, cfg.noise_variance);
    for (Eigen::Index q = 0; q < filled.rows(); ++q) {
      BoundingBox box{filled(q, 0), filled(q, 1), std::max(filled(q, 2), 1e-3),
                      std::max(filled(q, 3), 1e-3)};
      out.history[static_cast<FrameIndex>(query[static_cast<std::size_t>(q)])] =
          HistoryEntry{box, 0.0, true};
    }
  }
  return out;
}

namespace {

struct Point {
  double x;
  double y;
};

// Least-squares line fit of the trailing centers, evaluated at `frame`.
Point extrapolate_center(const Track& t, FrameIndex frame, int window) {
  std::vector<std::pair<double, Point>> tail;
  for (auto it = t.history.rbegin();
       it != t.history.rend() && static_cast<int>(tail.size()) < window; ++it) {
    tail.push_back({static_cast<double>(it->first),
                    {it->second.box.center_x(), it->second.box.center_y()}});
  }
  const double target = static_cast<double>(frame);
  if (tail.size() == 1) return tail.front().second;

  double mt = 0.0, mx = 0.0, my = 0.0;
  for (const auto& [f, p] : tail) {
    mt += f;
    mx += p.x;
    my += p.y;
  }
  const double n = static_cast<double>(tail.size());
  mt /= n;
  mx /= n;
  my /= n;
  double stt = 0.0, stx = 0.0, sty = 0.0;
  for (const auto& [f, p] : tail) {
    stt += (f - mt) * (f - mt);
    stx += (f - mt) * (p.x - mx);
    sty += (f - mt) * (p.y - my);
  }
  const double vx = stx / stt;
  const double vy = sty / stt;
  return {mx + vx * (target - mt), my + vy * (target - mt)};
}

}  // namespace

std::optional<double> aflink_score(const Track& earlier, const Track& later,
                                   const AflinkConfig& cfg) {
  if (earlier.history.empty() || later.history.empty()) return std::nullopt;
  if (earlier.class_label != later.class_label) return std::nullopt;
  if (earlier.last_frame() >= later.first_frame()) return std::nullopt;
  if (later.first_frame() - earlier.last_frame() > cfg.max_frame_gap) {
    return std::nullopt;
  }
  if (static_cast<int>(earlier.history.size()) < cfg.min_tracklet_length ||
      static_cast<int>(later.history.size()) < cfg.min_tracklet_length) {
    return std::nullopt;
  }

  const Point predicted =
      extrapolate_center(earlier, later.first_frame(), cfg.velocity_window);
  const BoundingBox& first = later.history.begin()->second.box;
  const double error =
      std::hypot(predicted.x - first.center_x(), predicted.y - first.center_y());
  const double height = earlier.history.rbegin()->second.box.height;
  const double score = 1.0 - error / (cfg.max_prediction_error * height);
  return std::clamp(score, 0.0, 1.0);
}

std::vector<Track> link_tracklets(std::vector<Track> tracks,
                                  const AflinkConfig& cfg) {
  cfg.validate();
  std::sort(tracks.begin(), tracks.end(),
            [](const Track& a, const Track& b) { return a.id < b.id; });
  const std::size_t n = tracks.size();

  struct Candidate {
    double score;
    std::size_t earlier;
    std::size_t later;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto score = aflink_score(tracks[i], tracks[j], cfg);
      if (score && *score >= cfg.score_threshold) {
        candidates.push_back({*score, i, j});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.score != b.score) return a.score > b.score;
              return std::tie(a.earlier, a.later) < std::tie(b.earlier, b.later);
            });

  std::vector<std::optional<std::size_t>> successor(n);
  std::vector<std::optional<std::size_t>> predecessor(n);
  for (const Candidate& c : candidates) {
    if (successor[c.earlier] || predecessor[c.later]) continue;
    successor[c.earlier] = c.later;
    predecessor[c.later] = c.earlier;
  }

  std::vector<Track> out;
  for (std::size_t head = 0; head < n; ++head) {
    if (predecessor[head]) continue;
    Track merged = tracks[head];
    std::vector<double> appearance(merged.appearance.begin(),
                                   merged.appearance.end());
    for (auto next = successor[head]; next; next = successor[*next]) {
      const Track& part = tracks[*next];
      merged.history.insert(part.history.begin(), part.history.end());
      if (!part.appearance.empty()) {
        if (appearance.empty()) appearance.assign(part.appearance.size(), 0.0);
        if (appearance.size() == part.appearance.size()) {
          for (std::size_t k = 0; k < appearance.size(); ++k) {
            appearance[k] += part.appearance[k];
          }
        }
      }
    }
    if (!appearance.empty()) {
      Embedding blended(appearance.begin(), appearance.end());
      double sq = 0.0;
      for (double v : appearance) sq += v * v;
      if (sq > 0.0) merged.appearance = normalized(blended);
    }
    out.push_back(std::move(merged));
  }
  std::sort(out.begin(), out.end(),
            [](const Track& a, const Track& b) { return a.id < b.id; });
  return out;
}

}  // namespace littertrack::post
