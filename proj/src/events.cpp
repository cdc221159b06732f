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

#include "littertrack/events.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <fmt/format.h>

#include "littertrack/error.hpp"

namespace littertrack::events {

const char* to_string(EventKind kind) {
  return kind == EventKind::kLittering ? "littering" : "cleaning";
}

EventKind parse_event_kind(const std::string& text) {
  if (text == "littering") return EventKind::kLittering;
  if (text == "cleaning") return EventKind::kCleaning;
  throw InputError(fmt::format("unknown event kind '{}'", text));
}

std::set<std::string> default_litter_classes() {
  return {"bottle", "handbag", "backpack", "umbrella", "banana",
          "apple",  "cup",     "book",     "wallet",   "suitcase",
          "orange", "sports_ball", "bowl"};
}

void EventConfig::validate() const {
  if (!(zero_area_epsilon > 0.0)) {
    throw ConfigError("events.zero_area_epsilon must be > 0");
  }
  if (separation_window < 2) {
    throw ConfigError("events.separation_window must be >= 2");
  }
  if (!(min_separation_slope > 0.0)) {
    throw ConfigError("events.min_separation_slope must be > 0");
  }
  if (min_contact_frames < 1) {
    throw ConfigError("events.min_contact_frames must be >= 1");
  }
  if (!(vertical_shift_min > 0.0)) {
    throw ConfigError("events.vertical_shift_min must be > 0");
  }
  if (debounce_frames < 1) throw ConfigError("events.debounce_frames must be >= 1");
  if (!(person_margin > 0.0)) throw ConfigError("events.person_margin must be > 0");
  if (litter_classes.empty()) throw ConfigError("events.litter_classes is empty");
  if (litter_classes.contains(person_class)) {
    throw ConfigError("events.person_class must not be a litter class");
  }
}

FrameIndex EventConfig::decision_delay() const {
  return std::max<FrameIndex>(separation_window, debounce_frames) - 1;
}

OverlapSeries overlap_series(const Track& person, const Track& litter,
                             const EventConfig& cfg) {
  OverlapSeries series;
  series.person_track = person.id;
  series.litter_track = litter.id;
  if (person.history.empty() || litter.history.empty()) return series;

  const FrameIndex lo = std::max(person.first_frame(), litter.first_frame());
  const FrameIndex hi = std::min(person.last_frame(), litter.last_frame());
  for (auto it = litter.history.lower_bound(lo);
       it != litter.history.end() && it->first <= hi; ++it) {
    const BoundingBox* pbox = person.box_at(it->first);
    if (pbox == nullptr) continue;
    const BoundingBox& lbox = it->second.box;
    series.records.push_back({it->first,
                              intersection_area(expand(*pbox, cfg.person_margin), lbox),
                              centroid_distance(*pbox, lbox), lbox.center_y()});
  }
  return series;
}

namespace {

// Records with frame in [from, to).
std::pair<std::size_t, std::size_t> frame_range(
    const std::vector<OverlapRecord>& records, FrameIndex from, FrameIndex to) {
  auto by_frame = [](const OverlapRecord& r, FrameIndex f) { return r.frame < f; };
  const auto b = std::lower_bound(records.begin(), records.end(), from, by_frame);
  const auto e = std::lower_bound(records.begin(), records.end(), to, by_frame);
  return {static_cast<std::size_t>(b - records.begin()),
          static_cast<std::size_t>(e - records.begin())};
}

double least_squares_slope(const std::vector<OverlapRecord>& records,
                           std::size_t begin, std::size_t end) {
  const double n = static_cast<double>(end - begin);
  double mt = 0.0, md = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    mt += static_cast<double>(records[i].frame);
    md += records[i].centroid_distance;
  }
  mt /= n;
  md /= n;
  double stt = 0.0, std_ = 0.0;
  for (std::size_t i = begin; i < end; ++i) {
    const double dt = static_cast<double>(records[i].frame) - mt;
    stt += dt * dt;
    std_ += dt * (records[i].centroid_distance - md);
  }
  return stt > 0.0 ? std_ / stt : 0.0;
}

}  // namespace

std::vector<EventRecord> detect_littering(const OverlapSeries& series,
                                          const EventConfig& cfg) {
  const auto& rec = series.records;
  const double eps = cfg.zero_area_epsilon;
  std::vector<EventRecord> out;
  for (std::size_t k = 1; k < rec.size(); ++k) {
    if (!(rec[k].intersection_area <= eps && rec[k - 1].intersection_area > eps)) {
      continue;
    }
    // Zero runs shorter than the debounce window do not end a contact
    // interval; they are box flicker at the separation boundary.
    int contact = 0;
    int zero_run = 0;
    for (std::size_t j = k; j-- > 0;) {
      if (rec[j].intersection_area > eps) {
        ++contact;
        zero_run = 0;
      } else if (++zero_run >= cfg.debounce_frames) {
        break;
      }
    }
    if (contact < cfg.min_contact_frames) continue;

    const FrameIndex f = rec[k].frame;
    const auto [db, de] = frame_range(rec, f, f + cfg.debounce_frames);
    if (static_cast<int>(de - db) < cfg.debounce_frames) continue;
    bool clear = true;
    for (std::size_t i = db; i < de; ++i) clear = clear && rec[i].intersection_area <= eps;
    if (!clear) continue;

    const auto [wb, we] = frame_range(rec, f, f + cfg.separation_window);
    if (we - wb < 2) continue;
    const double slope = least_squares_slope(rec, wb, we);
    if (slope < cfg.min_separation_slope) continue;

    const double coverage = static_cast<double>(we - wb) /
                            static_cast<double>(cfg.separation_window);
    EventRecord e;
    e.kind = EventKind::kLittering;
    e.frame = f;
    e.litter_track = series.litter_track;
    e.person_track = series.person_track;
    e.evidence = slope;
    e.confidence = std::min(1.0, slope / cfg.min_separation_slope * coverage);
    out.push_back(e);
  }
  return out;
}

std::vector<EventRecord> detect_cleaning(const OverlapSeries& series,
                                         const EventConfig& cfg) {
  const auto& rec = series.records;
  const double eps = cfg.zero_area_epsilon;
  std::vector<EventRecord> out;
  for (std::size_t k = 1; k < rec.size(); ++k) {
    if (!(rec[k - 1].intersection_area <= eps && rec[k].intersection_area > eps)) {
      continue;
    }
    const FrameIndex f = rec[k].frame;
    const auto [wb, we] = frame_range(rec, f, f + cfg.separation_window);
    double shift = 0.0;
    for (std::size_t i = wb; i < we; ++i) {
      shift = std::max(shift, std::abs(rec[i].litter_centroid_y - rec[k].litter_centroid_y));
    }
    if (shift < cfg.vertical_shift_min) continue;

    EventRecord e;
    e.kind = EventKind::kCleaning;
    e.frame = f;
    e.litter_track = series.litter_track;
    e.person_track = series.person_track;
    e.evidence = shift;
    e.confidence = std::min(1.0, shift / (2.0 * cfg.vertical_shift_min));
    out.push_back(e);
  }
  return out;
}

EventRecord attribute_offender(EventRecord event, std::span<const Track> persons,
                               const Track& litter, const EventConfig& cfg,
                               std::optional<std::string> identity) {
  const FrameIndex w = cfg.separation_window;
  const FrameIndex from =
      event.kind == EventKind::kLittering ? event.frame - w : event.frame;
  const FrameIndex to =
      event.kind == EventKind::kLittering ? event.frame : event.frame + w;

  std::optional<TrackId> best;
  double best_integral = 0.0;
  for (const Track& person : persons) {
    double integral = 0.0;
    for (auto it = litter.history.lower_bound(from);
         it != litter.history.end() && it->first < to; ++it) {
      const BoundingBox* pbox = person.box_at(it->first);
      if (pbox == nullptr) continue;
      integral += intersection_area(expand(*pbox, cfg.person_margin), it->second.box);
    }
    if (integral > best_integral ||
        (integral == best_integral && integral > 0.0 && best && person.id < *best)) {
      best_integral = integral;
      best = person.id;
    }
  }
  event.person_track = best_integral > 0.0 ? best : std::nullopt;
  event.identity = event.person_track ? std::move(identity) : std::nullopt;
  return event;
}

namespace {

// Expanded-overlap area of the litter box with any person at `frame`.
bool touches_any_person(const std::vector<Track>& persons, const Track& litter,
                        FrameIndex frame, const EventConfig& cfg) {
  const BoundingBox* lbox = litter.box_at(frame);
  if (lbox == nullptr) return false;
  for (const Track& p : persons) {
    const BoundingBox* pbox = p.box_at(frame);
    if (pbox != nullptr &&
        intersection_area(expand(*pbox, cfg.person_margin), *lbox) > cfg.zero_area_epsilon) {
      return true;
    }
  }
  return false;
}

// A drop needs the litter clear of every person during the debounce window;
// a pickup needs it clear of every person just before contact.
bool clear_of_persons(const EventRecord& e, const std::vector<Track>& persons,
                      const Track& litter, const EventConfig& cfg) {
  if (e.kind == EventKind::kCleaning) {
    return !touches_any_person(persons, litter, e.frame - 1, cfg);
  }
  for (FrameIndex f = e.frame; f < e.frame + cfg.debounce_frames; ++f) {
    if (touches_any_person(persons, litter, f, cfg)) return false;
  }
  return true;
}

}  // namespace

std::vector<EventRecord> detect_events(std::span<const Track> tracks,
                                       const EventConfig& cfg) {
  cfg.validate();
  std::vector<Track> persons;
  std::vector<const Track*> litters;
  for (const Track& t : tracks) {
    if (t.history.empty()) continue;
    if (t.class_label == cfg.person_class) persons.push_back(t);
    else if (cfg.litter_classes.contains(t.class_label)) litters.push_back(&t);
  }

  std::vector<EventRecord> out;
  for (const Track* litter : litters) {
    std::optional<EventRecord> first[2];
    for (const Track& person : persons) {
      const OverlapSeries series = overlap_series(person, *litter, cfg);
      if (series.empty()) continue;
      for (auto candidates : {detect_littering(series, cfg), detect_cleaning(series, cfg)}) {
        for (const EventRecord& e : candidates) {
          if (!clear_of_persons(e, persons, *litter, cfg)) continue;
          auto& slot = first[static_cast<int>(e.kind)];
          if (!slot || e.frame < slot->frame ||
              (e.frame == slot->frame && e.confidence > slot->confidence)) {
            slot = e;
          }
        }
      }
    }
    for (auto& slot : first) {
      if (slot) out.push_back(attribute_offender(*slot, persons, *litter, cfg));
    }
  }
  std::sort(out.begin(), out.end(), [](const EventRecord& a, const EventRecord& b) {
    return std::make_tuple(a.frame, a.litter_track, static_cast<int>(a.kind)) <
           std::make_tuple(b.frame, b.litter_track, static_cast<int>(b.kind));
  });
  return out;
}

StreamingEventDetector::StreamingEventDetector(EventConfig cfg)
    : cfg_(std::move(cfg)) {
  cfg_.validate();
}

void StreamingEventDetector::observe(TrackId id, const std::string& class_label,
                                     FrameIndex frame, const BoundingBox& box) {
  Track& t = tracks_[id];
  t.id = id;
  t.class_label = class_label;
  t.history[frame] = HistoryEntry{box, 1.0, false};
}

std::vector<EventRecord> StreamingEventDetector::collect(
    std::optional<FrameIndex> current) {
  std::vector<Track> snapshot;
  snapshot.reserve(tracks_.size());
  for (const auto& [id, t] : tracks_) snapshot.push_back(t);

  std::vector<EventRecord> out;
  for (const EventRecord& e : detect_events(snapshot, cfg_)) {
    if (current && e.frame + cfg_.decision_delay() > *current) continue;
    if (emitted_.insert({e.litter_track, static_cast<int>(e.kind)}).second) {
      out.push_back(e);
    }
  }
  return out;
}

std::vector<EventRecord> StreamingEventDetector::advance(FrameIndex current) {
  return collect(current);
}

std::vector<EventRecord> StreamingEventDetector::finish() {
  return collect(std::nullopt);
}

double EventMatchSummary::precision() const {
  const int d = true_positives + false_positives;
  return d == 0 ? 1.0 : static_cast<double>(true_positives) / d;
}

double EventMatchSummary::recall() const {
  const int d = true_positives + false_negatives;
  return d == 0 ? 1.0 : static_cast<double>(true_positives) / d;
}

namespace {

const Track* find_track(std::span<const Track> tracks, TrackId id) {
  for (const Track& t : tracks) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

bool same_litter(const Track* a, const Track* b, FrameIndex f1, FrameIndex f2,
                 double min_iou) {
  if (a == nullptr || b == nullptr) return false;
  for (FrameIndex f : {f1, f2}) {
    const BoundingBox* ba = a->box_at(f);
    const BoundingBox* bb = b->box_at(f);
    if (ba != nullptr && bb != nullptr) return iou(*ba, *bb) >= min_iou;
  }
  return false;
}

}  // namespace

EventMatchSummary compare_events(std::span<const EventRecord> reference,
                                 std::span<const Track> reference_tracks,
                                 std::span<const EventRecord> detected,
                                 std::span<const Track> detected_tracks,
                                 FrameIndex frame_tolerance, double min_iou,
                                 std::optional<EventKind> kind) {
  std::vector<std::size_t> refs, dets;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    if (!kind || reference[i].kind == *kind) refs.push_back(i);
  }
  for (std::size_t i = 0; i < detected.size(); ++i) {
    if (!kind || detected[i].kind == *kind) dets.push_back(i);
  }

  struct Pair {
    FrameIndex delta;
    std::size_t r;
    std::size_t d;
  };
  std::vector<Pair> pairs;
  for (std::size_t r : refs) {
    for (std::size_t d : dets) {
      const EventRecord& a = reference[r];
      const EventRecord& b = detected[d];
      if (a.kind != b.kind) continue;
      const FrameIndex delta = std::abs(a.frame - b.frame);
      if (delta > frame_tolerance) continue;
      if (!same_litter(find_track(reference_tracks, a.litter_track),
                       find_track(detected_tracks, b.litter_track), b.frame,
                       a.frame, min_iou)) {
        continue;
      }
      pairs.push_back({delta, r, d});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) {
    return std::tie(x.delta, x.r, x.d) < std::tie(y.delta, y.r, y.d);
  });

  std::set<std::size_t> used_r, used_d;
  EventMatchSummary s;
  for (const Pair& p : pairs) {
    if (used_r.contains(p.r) || used_d.contains(p.d)) continue;
    used_r.insert(p.r);
    used_d.insert(p.d);
    ++s.true_positives;
  }
  s.false_negatives = static_cast<int>(refs.size()) - s.true_positives;
  s.false_positives = static_cast<int>(dets.size()) - s.true_positives;
  return s;
}

}  // namespace littertrack::events
