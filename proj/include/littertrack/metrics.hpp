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

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "littertrack/error.hpp"
#include "littertrack/track.hpp"

namespace littertrack::metrics {

// Raised when a metric has no ground truth to be normalized by.
class UndefinedMetricError : public InputError {
 public:
  using InputError::InputError;
};

struct LabeledBox {
  TrackId id = 0;
  BoundingBox box;
};

struct LabeledFrameSet {
  std::map<FrameIndex, std::vector<LabeledBox>> ground_truth;
  std::map<FrameIndex, std::vector<LabeledBox>> predictions;

  std::size_t gt_count() const;
  std::size_t prediction_count() const;
};

LabeledFrameSet make_frame_set(std::span<const Track> ground_truth,
                               std::span<const Track> predictions);

inline constexpr int kHotaAlphaCount = 19;
// 0.05, 0.10, ..., 0.95
std::array<double, kHotaAlphaCount> hota_alphas();

struct ClearResult {
  double mota = 0.0;
  double motp = 0.0;  // mean IoU of matched pairs
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t idsw = 0;
  std::int64_t gt = 0;
};

struct IdResult {
  double idf1 = 0.0;
  double idp = 0.0;
  double idr = 0.0;
  std::int64_t idtp = 0;
  std::int64_t idfp = 0;
  std::int64_t idfn = 0;
};

struct HotaResult {
  double hota = 0.0;
  double deta = 0.0;
  double assa = 0.0;
  std::array<double, kHotaAlphaCount> hota_alpha{};
  std::array<double, kHotaAlphaCount> deta_alpha{};
  std::array<double, kHotaAlphaCount> assa_alpha{};
};

struct MetricReport {
  double mota = 0.0;
  double idf1 = 0.0;
  double hota = 0.0;
  double assa = 0.0;
  double deta = 0.0;
  double motp = 0.0;
  std::int64_t tp = 0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t idsw = 0;
  std::int64_t gt = 0;
};

// CLEAR-MOT. Correspondences of the previous match are kept when still
// valid; the remainder is matched by Hungarian assignment on 1 - IoU.
ClearResult evaluate_clear(const LabeledFrameSet& data, double iou_threshold = 0.5);

// ID measures from the globally optimal identity mapping.
IdResult evaluate_idf1(const LabeledFrameSet& data, double iou_threshold = 0.5);

// HOTA averaged over the 19 localization thresholds.
HotaResult evaluate_hota(const LabeledFrameSet& data);

MetricReport evaluate(const LabeledFrameSet& data, double iou_threshold = 0.5);

}  // namespace littertrack::metrics
