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

#include <optional>
#include <span>
#include <vector>

#include "littertrack/track.hpp"

namespace littertrack::post {

// Gaussian-process gap filling.
struct GsiConfig {
  double length_scale = 10.0;    // frames
  double noise_variance = 0.25;  // px^2
  FrameIndex max_gap = 30;       // longest interior gap that is filled
  // Observed frames within this distance of a gap form its training set.
  FrameIndex context = 30;

  void validate() const;
};

// Appearance-free tracklet linking by constant-velocity extrapolation.
struct AflinkConfig {
  FrameIndex max_frame_gap = 40;
  // Allowed center error as a multiple of the terminal box height.
  double max_prediction_error = 0.75;
  int min_tracklet_length = 3;
  double score_threshold = 0.6;
  // Trailing observations used for the terminal velocity fit.
  int velocity_window = 5;

  void validate() const;
};

double rbf_kernel(double x1, double x2, double length_scale);

// Zero-mean GP posterior mean y_* = K(x_*, X) (K(X, X) + noise I)^-1 y for
// every query. Factorization retries with jitter 1e-9 .. 1e-5 before
// raising NumericalError.
std::vector<double> gp_posterior_mean(std::span<const double> train_x,
                                      std::span<const double> train_y,
                                      std::span<const double> query_x,
                                      double length_scale,
                                      double noise_variance);

// Fills interior gaps of at most `max_gap` frames; filled entries are flagged
// interpolated and carry confidence 0. Observed entries are untouched.
// Tracks with fewer than two observed frames are returned unchanged.
Track gsi_interpolate(const Track& track, const GsiConfig& cfg);

// Score in [0, 1] for `later` continuing `earlier`, or nullopt when the pair
// is ineligible (temporal overlap, gap too large, class mismatch, too short).
std::optional<double> aflink_score(const Track& earlier, const Track& later,
                                   const AflinkConfig& cfg);

// Greedy highest-score-first linking; chains are relabeled to the id of
// their earliest member. Output is ordered by id.
std::vector<Track> link_tracklets(std::vector<Track> tracks,
                                  const AflinkConfig& cfg);

}  // namespace littertrack::post
