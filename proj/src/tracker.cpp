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

#include "littertrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <fmt/format.h>

#include "littertrack/error.hpp"

namespace littertrack {

void TrackerConfig::validate() const {
  if (n_init < 1) throw ConfigError("tracker.n_init must be >= 1");
  if (max_age < 1) throw ConfigError("tracker.max_age must be >= 1");
  if (!(ema_alpha >= 0.0 && ema_alpha <= 1.0)) {
    throw ConfigError("tracker.ema_alpha must lie in [0, 1]");
  }
  if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
    throw ConfigError("tracker.min_confidence must lie in [0, 1]");
  }
  association.validate();
  ukf.validate(ukf::kStateDim);
}

Embedding update_appearance(const Embedding& old, const Embedding& e,
                            double ema_alpha) {
  if (old.empty()) return normalized(e);
  if (old.size() != e.size()) {
    throw InputError(fmt::format("appearance dimension mismatch ({} vs {})",
                                 old.size(), e.size()));
  }
  std::vector<double> blend(old.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < old.size(); ++i) {
    blend[i] = ema_alpha * old[i] + (1.0 - ema_alpha) * e[i];
    sq += blend[i] * blend[i];
  }
  const double n = std::sqrt(sq);
  if (!(n > 1e-12)) return old;
  Embedding out(old.size());
  for (std::size_t i = 0; i < old.size(); ++i) {
    out[i] = static_cast<float>(blend[i] / n);
  }
  return out;
}

Track to_track(const Tracklet& t) {
  Track out;
  out.id = t.id;
  out.class_label = t.class_label;
  out.history = t.history;
  out.appearance = t.appearance;
  return out;
}

Tracker::Tracker(TrackerConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

namespace {

TrackOutput make_output(const Tracklet& t, FrameIndex frame,
                        const HistoryEntry& entry, bool backfill) {
  return {t.id, frame, entry.box, entry.confidence, t.class_label, backfill};
}

}  // namespace

void Tracker::associate_class(const std::vector<std::size_t>& track_idx,
                              const std::vector<std::size_t>& det_idx,
                              std::span<const Detection> detections,
                              std::vector<char>& track_matched,
                              std::vector<char>& det_matched,
                              std::vector<TrackOutput>& backfill) {
  if (track_idx.empty() || det_idx.empty()) return;

  std::vector<assoc::TrackCandidate> tracks;
  tracks.reserve(track_idx.size());
  for (std::size_t ti : track_idx) {
    const Tracklet& t = live_[ti];
    tracks.push_back({ukf::project(t.state, cfg_.ukf),
                      t.appearance.empty() ? nullptr : &t.appearance});
  }
  std::vector<assoc::DetectionCandidate> dets;
  dets.reserve(det_idx.size());
  for (std::size_t di : det_idx) {
    const Detection& d = detections[di];
    dets.push_back({to_measurement(d.box),
                    d.embedding ? &*d.embedding : nullptr});
  }

  const assoc::CostMatrix cost =
      assoc::build_cost_matrix(tracks, dets, cfg_.association);
  const assoc::Assignment assignment = assoc::hungarian(cost);

  for (const auto& [row, col] : assignment.matches) {
    const std::size_t ti = track_idx[static_cast<std::size_t>(col)];
    const std::size_t di = det_idx[static_cast<std::size_t>(row)];
    Tracklet& t = live_[ti];
    const Detection& d = detections[di];

    t.state = ukf::correct(t.state, tracks[static_cast<std::size_t>(col)].prediction,
                           ukf::measurement_vector(dets[static_cast<std::size_t>(row)].measurement));
    t.state.mean(2) = std::max(t.state.mean(2), cfg_.ukf.min_aspect);
    t.state.mean(3) = std::max(t.state.mean(3), cfg_.ukf.min_height);
    if (d.embedding) {
      t.appearance = update_appearance(t.appearance, *d.embedding, cfg_.ema_alpha);
    }
    t.hits += 1;
    t.time_since_update = 0;
    t.history[d.frame] = HistoryEntry{d.box, d.confidence, false};
    if (t.status == TrackStatus::kTentative && t.hits >= cfg_.n_init) {
      t.status = TrackStatus::kConfirmed;
      t.ever_confirmed = true;
      for (const auto& [f, entry] : t.history) {
        if (f != d.frame) backfill.push_back(make_output(t, f, entry, true));
      }
    }
    track_matched[ti] = 1;
    det_matched[di] = 1;
  }
}

std::vector<TrackOutput> Tracker::step(FrameIndex frame,
                                       std::span<const Detection> detections) {
  if (last_frame_ && frame <= *last_frame_) {
    throw SequencingError(fmt::format(
        "frame {} does not follow previous frame {}", frame, *last_frame_));
  }

  std::vector<Detection> dets(detections.begin(), detections.end());
  for (Detection& d : dets) {
    if (d.frame != frame) {
      throw SequencingError(fmt::format(
          "detection of frame {} passed with frame {}", d.frame, frame));
    }
    if (!is_valid(d.box)) {
      throw InputError(fmt::format("invalid detection box at frame {}", frame));
    }
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
      throw InputError(fmt::format(
          "detection confidence {} outside [0, 1] at frame {}", d.confidence,
          frame));
    }
    if (d.embedding) d.embedding = normalized(*d.embedding);
  }

  const FrameIndex dt = last_frame_ ? frame - *last_frame_ : 1;
  last_frame_ = frame;

  for (Tracklet& t : live_) {
    t.state = ukf::predict(t.state, cfg_.ukf, static_cast<double>(dt));
    t.age += dt;
    t.time_since_update += dt;
  }

  // Each class label is associated independently.
  std::map<std::string, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>>
      groups;
  for (std::size_t i = 0; i < live_.size(); ++i) {
    groups[live_[i].class_label].first.push_back(i);
  }
  for (std::size_t i = 0; i < dets.size(); ++i) {
    groups[dets[i].class_label].second.push_back(i);
  }

  std::vector<char> track_matched(live_.size(), 0);
  std::vector<char> det_matched(dets.size(), 0);
  std::vector<TrackOutput> backfill;
  for (const auto& [label, idx] : groups) {
    associate_class(idx.first, idx.second, dets, track_matched, det_matched,
                    backfill);
  }

  for (std::size_t i = 0; i < live_.size(); ++i) {
    if (track_matched[i]) continue;
    Tracklet& t = live_[i];
    if (t.status == TrackStatus::kTentative ||
        t.time_since_update > cfg_.max_age) {
      t.status = TrackStatus::kDeleted;
    }
  }

  for (std::size_t i = 0; i < dets.size(); ++i) {
    const Detection& d = dets[i];
    if (det_matched[i] || d.confidence < cfg_.min_confidence) continue;
    Tracklet t;
    t.id = next_id_++;
    t.state = ukf::initiate(to_measurement(d.box), cfg_.ukf);
    t.hits = 1;
    t.age = 1;
    t.class_label = d.class_label;
    if (d.embedding) t.appearance = *d.embedding;
    t.history[frame] = HistoryEntry{d.box, d.confidence, false};
    if (cfg_.n_init <= 1) {
      t.status = TrackStatus::kConfirmed;
      t.ever_confirmed = true;
    }
    live_.push_back(std::move(t));
  }

  std::vector<TrackOutput> out;
  for (const Tracklet& t : live_) {
    if (t.status != TrackStatus::kConfirmed || t.time_since_update != 0) continue;
    out.push_back(make_output(t, frame, t.history.at(frame), false));
  }

  auto deleted = std::stable_partition(
      live_.begin(), live_.end(),
      [](const Tracklet& t) { return t.status != TrackStatus::kDeleted; });
  for (auto it = deleted; it != live_.end(); ++it) {
    if (it->ever_confirmed) archived_.push_back(std::move(*it));
  }
  live_.erase(deleted, live_.end());

  auto by_id_frame = [](const TrackOutput& a, const TrackOutput& b) {
    return std::tie(a.id, a.frame) < std::tie(b.id, b.frame);
  };
  std::sort(backfill.begin(), backfill.end(), by_id_frame);
  std::sort(out.begin(), out.end(), by_id_frame);
  backfill.insert(backfill.end(), out.begin(), out.end());
  return backfill;
}

std::vector<Track> Tracker::export_tracks() const {
  std::vector<Track> out;
  for (const Tracklet& t : archived_) out.push_back(to_track(t));
  for (const Tracklet& t : live_) {
    if (t.ever_confirmed) out.push_back(to_track(t));
  }
  std::sort(out.begin(), out.end(),
            [](const Track& a, const Track& b) { return a.id < b.id; });
  return out;
}

}  // namespace littertrack
