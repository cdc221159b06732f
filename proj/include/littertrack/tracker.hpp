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

#include "littertrack/association.hpp"
#include "littertrack/motion_ukf.hpp"
#include "littertrack/track.hpp"

namespace littertrack {

enum class TrackStatus { kTentative, kConfirmed, kDeleted };

struct Tracklet {
  TrackId id = 0;
  ukf::MotionState state;
  TrackStatus status = TrackStatus::kTentative;
  bool ever_confirmed = false;
  int hits = 0;
  FrameIndex age = 0;
  FrameIndex time_since_update = 0;
  Embedding appearance;
  std::string class_label;
  std::map<FrameIndex, HistoryEntry> history;
};

struct TrackerConfig {
  int n_init = 3;
  int max_age = 30;
  double ema_alpha = 0.9;
  double min_confidence = 0.3;
  assoc::AssociationConfig association;
  ukf::UkfParams ukf;

  void validate() const;
};

struct TrackOutput {
  TrackId id = 0;
  FrameIndex frame = 0;
  BoundingBox box;
  double confidence = 1.0;
  std::string class_label;
  // Set for rows of earlier frames released when a track is confirmed.
  bool backfill = false;
};

// normalize(ema_alpha * old + (1 - ema_alpha) * e); keeps `old` when the
// blend vanishes. An empty `old` adopts `e`.
Embedding update_appearance(const Embedding& old, const Embedding& e,
                            double ema_alpha);

// Single-sequence tracking-by-detection state machine. Not thread-safe;
// independent instances may run concurrently.
class Tracker {
 public:
  explicit Tracker(TrackerConfig cfg);

  // Consumes the detections of one frame. Frames must strictly increase.
  // Returns the confirmed tracks observed at this frame, plus backfill rows
  // for tracks confirmed by this call, ordered by (backfill rows first,
  // id, frame).
  std::vector<TrackOutput> step(FrameIndex frame,
                                std::span<const Detection> detections);

  // Every track that was ever confirmed, observed frames only, ordered by id.
  std::vector<Track> export_tracks() const;

  const std::vector<Tracklet>& live_tracklets() const { return live_; }
  const TrackerConfig& config() const { return cfg_; }
  std::optional<FrameIndex> last_frame() const { return last_frame_; }

 private:
  void associate_class(const std::vector<std::size_t>& track_idx,
                       const std::vector<std::size_t>& det_idx,
                       std::span<const Detection> detections,
                       std::vector<char>& track_matched,
                       std::vector<char>& det_matched,
                       std::vector<TrackOutput>& backfill);

  TrackerConfig cfg_;
  std::vector<Tracklet> live_;
  std::vector<Tracklet> archived_;
  TrackId next_id_ = 1;
  std::optional<FrameIndex> last_frame_;
};

Track to_track(const Tracklet& t);

}  // namespace littertrack
