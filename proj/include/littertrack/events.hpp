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

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "littertrack/track.hpp"

namespace littertrack::events {

enum class EventKind { kLittering, kCleaning };

const char* to_string(EventKind kind);
EventKind parse_event_kind(const std::string& text);

struct OverlapRecord {
  FrameIndex frame = 0;
  double intersection_area = 0.0;  // px^2, person box expanded by the margin
  double centroid_distance = 0.0;  // px
  double litter_centroid_y = 0.0;  // px
};

struct OverlapSeries {
  TrackId person_track = 0;
  TrackId litter_track = 0;
  // One record per frame of the shared frame range where both tracks have a
  // box. Empty when the frame ranges are disjoint.
  std::vector<OverlapRecord> records;

  bool empty() const { return records.empty(); }
};

struct EventRecord {
  EventKind kind = EventKind::kLittering;
  FrameIndex frame = 0;
  TrackId litter_track = 0;
  std::optional<TrackId> person_track;
  std::optional<std::string> identity;
  double confidence = 0.0;
  // Separation slope (px/frame) for littering, vertical shift (px) for
  // cleaning.
  double evidence = 0.0;

  bool attributed() const { return person_track.has_value(); }
};

std::set<std::string> default_litter_classes();

struct EventConfig {
  double zero_area_epsilon = 1.0;     // px^2
  FrameIndex separation_window = 15;  // frames
  double min_separation_slope = 1.0;  // px/frame
  int min_contact_frames = 5;
  double vertical_shift_min = 15.0;   // px
  int debounce_frames = 5;
  double person_margin = 5.0;         // px
  std::string person_class = "person";
  std::set<std::string> litter_classes = default_litter_classes();

  void validate() const;
  // Frames after an event candidate needed before it can be decided.
  FrameIndex decision_delay() const;
};

OverlapSeries overlap_series(const Track& person, const Track& litter,
                             const EventConfig& cfg);

// Falling-overlap events: contact for at least min_contact_frames, zero
// overlap for the whole debounce window, then separation at a least-squares
// slope of at least min_separation_slope over the separation window.
std::vector<EventRecord> detect_littering(const OverlapSeries& series,
                                          const EventConfig& cfg);

// Rising-overlap events followed by a vertical litter displacement of at
// least vertical_shift_min within the separation window.
std::vector<EventRecord> detect_cleaning(const OverlapSeries& series,
                                         const EventConfig& cfg);

// Picks the person with the largest contact-area integral next to the event
// (before it for littering, after it for cleaning). With no contact the event
// stays unattributed.
EventRecord attribute_offender(EventRecord event, std::span<const Track> persons,
                               const Track& litter, const EventConfig& cfg,
                               std::optional<std::string> identity = std::nullopt);

// Batch detection over finished tracks: every person x litter pair, first
// event per (litter track, kind), attributed. Littering candidates need the
// litter clear of all persons over the debounce window, cleaning candidates
// clear of all persons on the frame before contact. Ordered by (frame, litter, kind).
std::vector<EventRecord> detect_events(std::span<const Track> tracks,
                                       const EventConfig& cfg);

// Incremental front end over the same rule. Rows may arrive late (tracker
// backfill); an event is released once its decision window has been seen.
class StreamingEventDetector {
 public:
  explicit StreamingEventDetector(EventConfig cfg);

  void observe(TrackId id, const std::string& class_label, FrameIndex frame,
               const BoundingBox& box);
  // Events decidable with all frames up to `current`, not returned before.
  std::vector<EventRecord> advance(FrameIndex current);
  // Remaining events once the stream has ended.
  std::vector<EventRecord> finish();

 private:
  std::vector<EventRecord> collect(std::optional<FrameIndex> current);

  EventConfig cfg_;
  std::map<TrackId, Track> tracks_;
  std::set<std::pair<TrackId, int>> emitted_;
};

struct EventMatchSummary {
  int true_positives = 0;
  int false_positives = 0;
  int false_negatives = 0;
  double precision() const;
  double recall() const;
};

// Greedy one-to-one matching of detected events to reference events of the
// same kind: frames within `frame_tolerance` and litter boxes overlapping
// with IoU >= `min_iou` at the detected frame.
EventMatchSummary compare_events(std::span<const EventRecord> reference,
                                 std::span<const Track> reference_tracks,
                                 std::span<const EventRecord> detected,
                                 std::span<const Track> detected_tracks,
                                 FrameIndex frame_tolerance, double min_iou,
                                 std::optional<EventKind> kind = std::nullopt);

}  // namespace littertrack::events
