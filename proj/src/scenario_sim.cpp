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

#include "littertrack/scenario_sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>

#include <fmt/format.h>

#include "littertrack/error.hpp"

namespace littertrack::sim {

namespace {

constexpr double kHandHeight = 0.55;  // hand position, fraction of height from top

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Time-parameterized Catmull-Rom evaluation; zero tangents at stops.
Vec2 spline_at(const std::vector<Waypoint>& wp, double t) {
  if (t <= static_cast<double>(wp.front().frame)) return {wp.front().x, wp.front().y};
  if (t >= static_cast<double>(wp.back().frame)) return {wp.back().x, wp.back().y};
  std::size_t i = 0;
  while (i + 1 < wp.size() && static_cast<double>(wp[i + 1].frame) < t) ++i;
  if (static_cast<double>(wp[i + 1].frame) == t) return {wp[i + 1].x, wp[i + 1].y};

  auto tangent = [&wp](std::size_t k) -> Vec2 {
    const auto& p = wp[k];
    const bool stop_before = k > 0 && wp[k - 1].x == p.x && wp[k - 1].y == p.y;
    const bool stop_after = k + 1 < wp.size() && wp[k + 1].x == p.x && wp[k + 1].y == p.y;
    if (stop_before || stop_after) return {0.0, 0.0};
    const auto& a = wp[k > 0 ? k - 1 : k];
    const auto& b = wp[k + 1 < wp.size() ? k + 1 : k];
    const double dt = static_cast<double>(b.frame - a.frame);
    return {(b.x - a.x) / dt, (b.y - a.y) / dt};
  };

  const auto& p0 = wp[i];
  const auto& p1 = wp[i + 1];
  const double h = static_cast<double>(p1.frame - p0.frame);
  const double u = (t - static_cast<double>(p0.frame)) / h;
  const Vec2 m0 = tangent(i);
  const Vec2 m1 = tangent(i + 1);
  const double h00 = 2 * u * u * u - 3 * u * u + 1;
  const double h10 = u * u * u - 2 * u * u + u;
  const double h01 = -2 * u * u * u + 3 * u * u;
  const double h11 = u * u * u - u * u;
  return {h00 * p0.x + h10 * h * m0.x + h01 * p1.x + h11 * h * m1.x,
          h00 * p0.y + h10 * h * m0.y + h01 * p1.y + h11 * h * m1.y};
}

BoundingBox clamp_to_arena(BoundingBox b, const ScenarioSpec& spec) {
  b.left = std::clamp(b.left, 0.0, spec.arena_width - b.width);
  b.top = std::clamp(b.top, 0.0, spec.arena_height - b.height);
  return b;
}

BoundingBox person_box(const PersonScript& p, FrameIndex f, const ScenarioSpec& spec) {
  const Vec2 c = spline_at(p.waypoints, static_cast<double>(f));
  return clamp_to_arena({c.x - p.width / 2.0, c.y - p.height, p.width, p.height}, spec);
}

Vec2 hand_point(const PersonScript& p, FrameIndex f, double dx, const ScenarioSpec& spec) {
  const BoundingBox b = person_box(p, f, spec);
  return {b.center_x() + dx, b.top + kHandHeight * b.height};
}

BoundingBox centered(Vec2 c, double w, double h, const ScenarioSpec& spec) {
  return clamp_to_arena({c.x - w / 2.0, c.y - h / 2.0, w, h}, spec);
}

FrameIndex first_frame(const PersonScript& p) { return p.waypoints.front().frame; }
FrameIndex last_frame(const PersonScript& p) { return p.waypoints.back().frame; }

struct LitterPath {
  Vec2 rest;
  FrameIndex rest_from = 0;
};

LitterPath rest_point(const ScenarioSpec& spec, const LitterDrop& d) {
  const PersonScript& p = spec.persons[static_cast<std::size_t>(d.person)];
  const Vec2 release = hand_point(p, d.drop_frame, d.hand_dx, spec);
  const BoundingBox pb = person_box(p, d.drop_frame, spec);
  return {{release.x + d.throw_dx, pb.bottom() - d.height / 2.0},
          d.drop_frame + d.fall_frames};
}

// Ground-truth center of a litter item at frame f, or nullopt when absent.
std::optional<Vec2> litter_center(const ScenarioSpec& spec, std::size_t index,
                                  FrameIndex f) {
  const LitterDrop& d = spec.litter[index];
  const PersonScript& owner = spec.persons[static_cast<std::size_t>(d.person)];
  if (f < d.appear_frame || f > spec.frame_count) return std::nullopt;
  if (f < d.drop_frame) return hand_point(owner, f, d.hand_dx, spec);

  const LitterPath path = rest_point(spec, d);
  if (f < path.rest_from) {
    // Cubic Hermite arc from the hand (with the hand velocity) to rest.
    const Vec2 p0 = hand_point(owner, d.drop_frame, d.hand_dx, spec);
    const Vec2 prev = hand_point(owner, d.drop_frame - 1, d.hand_dx, spec);
    const Vec2 v0{p0.x - prev.x, p0.y - prev.y};
    const double h = static_cast<double>(d.fall_frames);
    const double u = static_cast<double>(f - d.drop_frame) / h;
    const double h00 = 2 * u * u * u - 3 * u * u + 1;
    const double h10 = u * u * u - 2 * u * u + u;
    const double h01 = -2 * u * u * u + 3 * u * u;
    return Vec2{h00 * p0.x + h10 * h * v0.x + h01 * path.rest.x,
                h00 * p0.y + h10 * h * v0.y + h01 * path.rest.y};
  }

  for (const CleaningPickup& c : spec.cleanings) {
    if (static_cast<std::size_t>(c.drop) != index) continue;
    if (f < c.lift_frame) break;
    const PersonScript& cleaner = spec.persons[static_cast<std::size_t>(c.person)];
    const FrameIndex end = c.lift_frame + c.lift_frames + c.carry_frames;
    if (f > end) return std::nullopt;
    const Vec2 hand = hand_point(cleaner, f, 0.0, spec);
    if (f >= c.lift_frame + c.lift_frames) return hand;
    const double u = static_cast<double>(f - c.lift_frame) / static_cast<double>(c.lift_frames);
    const double s = u * u * (3.0 - 2.0 * u);
    return Vec2{path.rest.x + s * (hand.x - path.rest.x),
                path.rest.y + s * (hand.y - path.rest.y)};
  }
  return path.rest;
}

Embedding random_unit(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<double> n01(0.0, 1.0);
  Embedding v(dim);
  for (float& x : v) x = static_cast<float>(n01(rng));
  return normalized(v);
}

Embedding perturb(const Embedding& base, double noise_rad, std::mt19937_64& rng) {
  if (noise_rad <= 0.0) return base;
  std::normal_distribution<double> n01(0.0, 1.0);
  const double angle = std::abs(n01(rng)) * noise_rad;
  std::vector<double> dir(base.size());
  double along = 0.0;
  for (std::size_t i = 0; i < dir.size(); ++i) {
    dir[i] = n01(rng);
    along += dir[i] * base[i];
  }
  double sq = 0.0;
  for (std::size_t i = 0; i < dir.size(); ++i) {
    dir[i] -= along * base[i];
    sq += dir[i] * dir[i];
  }
  const double inv = 1.0 / std::sqrt(sq);
  Embedding out(base.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<float>(std::cos(angle) * base[i] + std::sin(angle) * dir[i] * inv);
  }
  return normalized(out);
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t lane) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(lane)};
  return std::mt19937_64(seq);
}

}  // namespace

events::EventConfig reference_event_config() { return events::EventConfig{}; }

void ScenarioSpec::validate() const {
  std::vector<std::string> problems;
  if (frame_count < 1) problems.push_back("frame_count must be >= 1");
  if (!(arena_width > 0 && arena_height > 0)) problems.push_back("arena must be positive");
  if (embedding_dim == 0) problems.push_back("embedding_dim must be positive");
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(noise.dropout)) problems.push_back("noise.dropout outside [0, 1]");
  if (noise.false_positive_rate < 0) problems.push_back("noise.false_positive_rate < 0");
  if (noise.box_jitter < 0) problems.push_back("noise.box_jitter < 0");
  if (noise.embedding_noise_deg < 0) problems.push_back("noise.embedding_noise_deg < 0");
  for (std::size_t i = 0; i < persons.size(); ++i) {
    const auto& p = persons[i];
    if (p.waypoints.empty()) {
      problems.push_back(fmt::format("persons[{}].waypoints is empty", i));
      continue;
    }
    if (!(p.width > 0 && p.height > 0)) problems.push_back(fmt::format("persons[{}] size", i));
    for (std::size_t k = 1; k < p.waypoints.size(); ++k) {
      if (p.waypoints[k].frame <= p.waypoints[k - 1].frame) {
        problems.push_back(fmt::format("persons[{}].waypoints not strictly increasing", i));
        break;
      }
    }
    if (p.waypoints.front().frame < 1 || p.waypoints.back().frame > frame_count) {
      problems.push_back(fmt::format("persons[{}] waypoints outside frame range", i));
    }
  }
  for (std::size_t i = 0; i < litter.size(); ++i) {
    const auto& d = litter[i];
    if (d.person < 0 || static_cast<std::size_t>(d.person) >= persons.size()) {
      problems.push_back(fmt::format("litter[{}].person out of range", i));
      continue;
    }
    const auto& p = persons[static_cast<std::size_t>(d.person)];
    if (p.waypoints.empty()) continue;
    if (d.appear_frame < first_frame(p) || d.drop_frame <= d.appear_frame ||
        d.drop_frame > last_frame(p) || d.drop_frame > frame_count) {
      problems.push_back(fmt::format("litter[{}] drop frame outside the carrier's presence", i));
    }
    if (d.fall_frames < 1) problems.push_back(fmt::format("litter[{}].fall_frames < 1", i));
    if (!(d.width > 0 && d.height > 0)) problems.push_back(fmt::format("litter[{}] size", i));
  }
  for (std::size_t i = 0; i < cleanings.size(); ++i) {
    const auto& c = cleanings[i];
    if (c.person < 0 || static_cast<std::size_t>(c.person) >= persons.size()) {
      problems.push_back(fmt::format("cleanings[{}].person out of range", i));
    }
    if (c.drop < 0 || static_cast<std::size_t>(c.drop) >= litter.size()) {
      problems.push_back(fmt::format("cleanings[{}].drop out of range", i));
    } else if (c.lift_frame < litter[static_cast<std::size_t>(c.drop)].drop_frame +
                                  litter[static_cast<std::size_t>(c.drop)].fall_frames) {
      problems.push_back(fmt::format("cleanings[{}] lifts before the litter rests", i));
    }
    if (c.lift_frames < 1) problems.push_back(fmt::format("cleanings[{}].lift_frames < 1", i));
  }
  for (std::size_t i = 0; i < occlusions.size(); ++i) {
    if (occlusions[i].end < occlusions[i].begin || !is_valid(occlusions[i].region)) {
      problems.push_back(fmt::format("occlusions[{}] invalid", i));
    }
  }
  if (!problems.empty()) {
    std::string msg = "invalid scenario '" + name + "':";
    for (const auto& p : problems) msg += " " + p + ";";
    throw InputError(msg);
  }
}

Scenario generate(const ScenarioSpec& spec) {
  spec.validate();
  Scenario out;
  out.spec = spec;
  GroundTruth& truth = out.truth;

  // Identity embeddings with a minimum pairwise angle.
  auto id_rng = stream(spec.seed, 1);
  const double min_cos = std::cos(spec.min_identity_angle_deg * std::numbers::pi / 180.0);
  for (std::size_t i = 0; i < spec.persons.size(); ++i) {
    const std::string label = spec.persons[i].identity.empty()
                                  ? fmt::format("P{:03d}", i + 1)
                                  : spec.persons[i].identity;
    truth.identities[static_cast<int>(i)] = label;
    if (truth.identity_embeddings.contains(label)) continue;
    for (int attempt = 0;; ++attempt) {
      if (attempt > 1000) throw InputError("cannot place identity embeddings");
      Embedding e = random_unit(id_rng, spec.embedding_dim);
      bool ok = true;
      for (const auto& [other, emb] : truth.identity_embeddings) {
        ok = ok && dot(e, emb) <= min_cos;
      }
      if (ok) {
        truth.identity_embeddings[label] = std::move(e);
        break;
      }
    }
  }

  const TrackId person_base = 1;
  const TrackId litter_base = static_cast<TrackId>(spec.persons.size()) + 1;
  for (std::size_t i = 0; i < spec.persons.size(); ++i) {
    Track t;
    t.id = person_base + static_cast<TrackId>(i);
    t.class_label = "person";
    const auto& p = spec.persons[i];
    for (FrameIndex f = first_frame(p); f <= last_frame(p); ++f) {
      t.history[f] = HistoryEntry{person_box(p, f, spec), 1.0, false};
    }
    t.appearance = truth.identity_embeddings.at(truth.identities.at(static_cast<int>(i)));
    truth.tracks.push_back(std::move(t));
  }
  for (std::size_t i = 0; i < spec.litter.size(); ++i) {
    Track t;
    t.id = litter_base + static_cast<TrackId>(i);
    t.class_label = spec.litter[i].litter_class;
    for (FrameIndex f = spec.litter[i].appear_frame; f <= spec.frame_count; ++f) {
      const auto c = litter_center(spec, i, f);
      if (!c) break;
      t.history[f] = HistoryEntry{
          centered(*c, spec.litter[i].width, spec.litter[i].height, spec), 1.0, false};
    }
    truth.tracks.push_back(std::move(t));
  }

  // Injected events: first zero-overlap frame after each drop, first contact
  // frame before each pickup.
  const events::EventConfig ecfg = reference_event_config();
  for (std::size_t i = 0; i < spec.litter.size(); ++i) {
    const auto& d = spec.litter[i];
    const Track& person = truth.tracks[static_cast<std::size_t>(d.person)];
    const Track& litter = truth.tracks[spec.persons.size() + i];
    const auto series = events::overlap_series(person, litter, ecfg);
    std::optional<FrameIndex> frame;
    for (const auto& r : series.records) {
      if (r.frame > d.drop_frame && r.intersection_area <= ecfg.zero_area_epsilon) {
        frame = r.frame;
        break;
      }
    }
    if (!frame) {
      throw InputError(fmt::format(
          "invalid scenario '{}': litter[{}] never separates from its carrier", spec.name, i));
    }
    events::EventRecord e;
    e.kind = events::EventKind::kLittering;
    e.frame = *frame;
    e.litter_track = litter.id;
    e.person_track = person.id;
    e.identity = truth.identities.at(d.person);
    e.confidence = 1.0;
    truth.events.push_back(e);
  }
  for (const auto& c : spec.cleanings) {
    const Track& person = truth.tracks[static_cast<std::size_t>(c.person)];
    const Track& litter = truth.tracks[spec.persons.size() + static_cast<std::size_t>(c.drop)];
    const auto series = events::overlap_series(person, litter, ecfg);
    std::optional<FrameIndex> frame;
    for (std::size_t k = 1; k < series.records.size(); ++k) {
      const auto& r = series.records[k];
      if (r.frame <= c.lift_frame && r.intersection_area > ecfg.zero_area_epsilon &&
          series.records[k - 1].intersection_area <= ecfg.zero_area_epsilon) {
        frame = r.frame;
      }
    }
    if (!frame) {
      throw InputError(fmt::format(
          "invalid scenario '{}': cleaner never reaches litter[{}]", spec.name, c.drop));
    }
    events::EventRecord e;
    e.kind = events::EventKind::kCleaning;
    e.frame = *frame;
    e.litter_track = litter.id;
    e.person_track = person.id;
    e.identity = truth.identities.at(c.person);
    e.confidence = 1.0;
    truth.events.push_back(e);
  }
  std::sort(truth.events.begin(), truth.events.end(),
            [](const events::EventRecord& a, const events::EventRecord& b) {
              return std::make_tuple(a.frame, a.litter_track, static_cast<int>(a.kind)) <
                     std::make_tuple(b.frame, b.litter_track, static_cast<int>(b.kind));
            });

  // The event rule must recover exactly the injected events on clean boxes.
  const auto detected = events::detect_events(truth.tracks, ecfg);
  bool consistent = detected.size() == truth.events.size();
  for (std::size_t i = 0; consistent && i < detected.size(); ++i) {
    consistent = detected[i].kind == truth.events[i].kind &&
                 detected[i].frame == truth.events[i].frame &&
                 detected[i].litter_track == truth.events[i].litter_track &&
                 detected[i].person_track == truth.events[i].person_track;
  }
  if (!consistent) {
    throw InputError(fmt::format(
        "invalid scenario '{}': injected events are not recoverable by the event rule "
        "({} injected, {} detected)",
        spec.name, truth.events.size(), detected.size()));
  }

  // Detection stream.
  auto det_rng = stream(spec.seed, 2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> jitter(0.0, spec.noise.box_jitter > 0 ? spec.noise.box_jitter : 1.0);
  std::poisson_distribution<int> fp_count(spec.noise.false_positive_rate > 0
                                              ? spec.noise.false_positive_rate
                                              : 1.0);
  const double noise_rad = spec.noise.embedding_noise_deg * std::numbers::pi / 180.0;
  const std::vector<std::string> fp_litter = {"bottle", "cup", "handbag", "book"};

  out.detections.reserve(static_cast<std::size_t>(spec.frame_count));
  for (FrameIndex f = 1; f <= spec.frame_count; ++f) {
    FrameDetections fd;
    fd.frame = f;
    for (std::size_t ti = 0; ti < truth.tracks.size(); ++ti) {
      const Track& t = truth.tracks[ti];
      const BoundingBox* gt = t.box_at(f);
      if (gt == nullptr) continue;
      bool hidden = false;
      for (const Occlusion& o : spec.occlusions) {
        if (f >= o.begin && f <= o.end && gt->center_x() >= o.region.left &&
            gt->center_x() <= o.region.right() && gt->center_y() >= o.region.top &&
            gt->center_y() <= o.region.bottom()) {
          hidden = true;
        }
      }
      if (hidden) continue;
      if (spec.noise.dropout > 0 && unit(det_rng) < spec.noise.dropout) continue;

      Detection d;
      d.frame = f;
      d.box = *gt;
      if (spec.noise.box_jitter > 0) {
        d.box.left += jitter(det_rng);
        d.box.top += jitter(det_rng);
        d.box.width = std::max(2.0, d.box.width + jitter(det_rng));
        d.box.height = std::max(2.0, d.box.height + jitter(det_rng));
      }
      d.confidence = 0.6 + 0.4 * unit(det_rng);
      d.class_label = t.class_label;
      if (ti < spec.persons.size()) {
        d.embedding = perturb(t.appearance, noise_rad, det_rng);
      }
      fd.detections.push_back(std::move(d));
    }
    const int spurious = spec.noise.false_positive_rate > 0 ? fp_count(det_rng) : 0;
    for (int k = 0; k < spurious; ++k) {
      Detection d;
      d.frame = f;
      const bool person = unit(det_rng) < 0.7;
      const double h = person ? 80.0 + 50.0 * unit(det_rng) : 24.0;
      const double w = person ? 0.4 * h : 16.0;
      d.box = {unit(det_rng) * (spec.arena_width - w), unit(det_rng) * (spec.arena_height - h), w, h};
      d.confidence = 0.3 + 0.3 * unit(det_rng);
      if (person) {
        d.class_label = "person";
        d.embedding = random_unit(det_rng, spec.embedding_dim);
      } else {
        d.class_label = fp_litter[static_cast<std::size_t>(unit(det_rng) * fp_litter.size()) % fp_litter.size()];
      }
      fd.detections.push_back(std::move(d));
    }
    std::shuffle(fd.detections.begin(), fd.detections.end(), det_rng);
    out.detections.push_back(std::move(fd));
  }
  return out;
}

const char* to_string(Profile p) {
  switch (p) {
    case Profile::kNoiseFree: return "noise-free";
    case Profile::kDefaultNoise: return "default-noise";
    case Profile::kOcclusionHeavy: return "occlusion-heavy";
  }
  return "unknown";
}

Profile parse_profile(const std::string& text) {
  if (text == "noise-free") return Profile::kNoiseFree;
  if (text == "default-noise") return Profile::kDefaultNoise;
  if (text == "occlusion-heavy") return Profile::kOcclusionHeavy;
  throw InputError(fmt::format("unknown scenario profile '{}'", text));
}

namespace {

struct Builder {
  std::mt19937_64 rng;
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
};

// Walk across the arena from one side, wobbling vertically; waypoints every
// `step` frames. Stops at the arena edge or the last frame.
PersonScript walker(Builder& b, const ScenarioSpec& spec, FrameIndex enter, int dir,
                    double y_start, double y_end, double speed, double wobble,
                    double height) {
  PersonScript p;
  p.height = height;
  p.width = 0.4 * height;
  const double margin = p.width / 2.0 + 2.0;
  double x = dir > 0 ? margin : spec.arena_width - margin;
  const double phase = b.uniform(0.0, 2.0 * std::numbers::pi);
  const FrameIndex step = 25;
  const double span = spec.arena_width - 2.0 * margin;
  FrameIndex f = enter;
  for (int k = 0;; ++k) {
    const double progress = dir > 0 ? (x - margin) / span : (spec.arena_width - margin - x) / span;
    double y = y_start + (y_end - y_start) * std::clamp(progress, 0.0, 1.0) +
               wobble * std::sin(phase + 0.8 * k);
    y = std::clamp(y, height + 2.0, spec.arena_height - 2.0);
    p.waypoints.push_back({f, x, y});
    if (f + step > spec.frame_count) break;
    const double next = x + dir * speed * step * (1.0 + 0.25 * std::sin(phase + 1.3 * k));
    if (next < margin || next > spec.arena_width - margin) break;
    x = next;
    f += step;
  }
  return p;
}

// Velocity of the person at frame f (px/frame) from the spline.
Vec2 velocity(const PersonScript& p, FrameIndex f) {
  const Vec2 a = spline_at(p.waypoints, static_cast<double>(f));
  const Vec2 b = spline_at(p.waypoints, static_cast<double>(f + 1));
  return {b.x - a.x, b.y - a.y};
}

// Chooses a drop frame where the carrier keeps walking for a while.
std::optional<FrameIndex> pick_drop_frame(Builder& b, const PersonScript& p) {
  const FrameIndex lo = first_frame(p) + 45;
  const FrameIndex hi = last_frame(p) - 45;
  if (hi <= lo) return std::nullopt;
  for (int attempt = 0; attempt < 20; ++attempt) {
    const FrameIndex f = lo + static_cast<FrameIndex>(b.integer(0, static_cast<int>(hi - lo)));
    bool moving = true;
    for (FrameIndex k = f; k < f + 30; ++k) {
      const Vec2 v = velocity(p, k);
      moving = moving && std::hypot(v.x, v.y) >= 1.8;
    }
    if (moving) return f;
  }
  return std::nullopt;
}

const std::vector<std::string>& litter_choices() {
  static const std::vector<std::string> kClasses = {"bottle", "cup", "banana", "wallet",
                                                    "handbag", "apple", "book"};
  return kClasses;
}

// Adds a person who walks to resting litter `drop`, picks it up and leaves.
bool add_cleaner(Builder& b, ScenarioSpec& spec, int drop, FrameIndex enter, double speed) {
  const LitterDrop& d = spec.litter[static_cast<std::size_t>(drop)];
  const auto rest = rest_point(spec, d);
  const PersonScript& owner = spec.persons[static_cast<std::size_t>(d.person)];
  const int dir = velocity(owner, d.drop_frame).x >= 0 ? 1 : -1;

  PersonScript c;
  c.height = owner.height;
  c.width = owner.width;
  const double feet = rest.rest.y + d.height / 2.0;
  const double stop_x = rest.rest.x - dir * 20.0;
  const double start_x = dir > 0 ? c.width / 2.0 + 2.0 : spec.arena_width - c.width / 2.0 - 2.0;
  const double distance = std::abs(stop_x - start_x);
  const FrameIndex travel = static_cast<FrameIndex>(std::ceil(distance / speed));
  if (enter < rest.rest_from + 10) enter = rest.rest_from + 10;
  const FrameIndex arrive = enter + travel;
  const FrameIndex pause = 14;
  const FrameIndex leave = arrive + pause + 30;
  if (leave > spec.frame_count) return false;

  const double y0 = std::clamp(feet + b.uniform(-20.0, 20.0), c.height + 2.0, spec.arena_height - 2.0);
  c.waypoints.push_back({enter, start_x, y0});
  c.waypoints.push_back({enter + travel / 2, (start_x + stop_x) / 2.0, (y0 + feet) / 2.0});
  c.waypoints.push_back({arrive, stop_x, feet});
  c.waypoints.push_back({arrive + pause, stop_x, feet});
  c.waypoints.push_back({leave, std::clamp(stop_x + dir * 30.0 * speed, c.width, spec.arena_width - c.width), feet});
  spec.persons.push_back(std::move(c));

  CleaningPickup pick;
  pick.person = static_cast<int>(spec.persons.size()) - 1;
  pick.drop = drop;
  pick.lift_frame = arrive;
  spec.cleanings.push_back(pick);
  return true;
}

ScenarioSpec attempt_scenario(Profile profile, std::uint64_t seed, const std::string& name) {
  Builder b{stream(seed, 0)};
  ScenarioSpec spec;
  spec.name = name;
  spec.seed = seed;

  if (profile == Profile::kNoiseFree) {
    spec.frame_count = 300;
    const int persons = b.integer(2, 4);
    std::vector<int> lanes = {0, 1, 2, 3};
    std::shuffle(lanes.begin(), lanes.end(), b.rng);
    for (int i = 0; i < persons; ++i) {
      const double lane_y = 190.0 + 170.0 * lanes[static_cast<std::size_t>(i)];
      const int dir = b.integer(0, 1) ? 1 : -1;
      const FrameIndex enter = b.integer(1, 30);
      spec.persons.push_back(walker(b, spec, enter, dir, lane_y, lane_y, b.uniform(2.6, 3.6),
                                    10.0, b.uniform(90.0, 110.0)));
    }
  } else {
    spec.frame_count = 400;
    const int persons = b.integer(2, 6);
    for (int i = 0; i < persons; ++i) {
      const int dir = b.integer(0, 1) ? 1 : -1;
      const FrameIndex enter = b.integer(1, 120);
      const double h = b.uniform(90.0, 130.0);
      spec.persons.push_back(walker(b, spec, enter, dir, b.uniform(h + 40.0, 700.0),
                                    b.uniform(h + 40.0, 700.0), b.uniform(2.2, 3.8),
                                    b.uniform(10.0, 40.0), h));
    }
  }

  // Litter drops by distinct carriers.
  const int wanted = profile == Profile::kNoiseFree ? b.integer(1, 2) : b.integer(1, 3);
  std::vector<int> order(spec.persons.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::shuffle(order.begin(), order.end(), b.rng);
  for (int who : order) {
    if (static_cast<int>(spec.litter.size()) >= wanted) break;
    const PersonScript& p = spec.persons[static_cast<std::size_t>(who)];
    const auto drop = pick_drop_frame(b, p);
    if (!drop) continue;
    LitterDrop d;
    d.person = who;
    d.drop_frame = *drop;
    d.appear_frame = std::max(first_frame(p), *drop - b.integer(20, 40));
    d.litter_class = litter_choices()[static_cast<std::size_t>(
        b.integer(0, static_cast<int>(litter_choices().size()) - 1))];
    d.hand_dx = velocity(p, *drop).x >= 0 ? 8.0 : -8.0;
    d.throw_dx = b.uniform(-10.0, 10.0);
    spec.litter.push_back(d);
  }

  if (profile != Profile::kOcclusionHeavy && !spec.litter.empty() && b.uniform(0.0, 1.0) < 0.5) {
    const int drop = 0;
    const LitterDrop& d = spec.litter[0];
    add_cleaner(b, spec, drop, d.drop_frame + b.integer(40, 80), b.uniform(2.4, 3.0));
  }

  if (profile != Profile::kNoiseFree) {
    spec.noise = {1.0, 0.05, 0.2, 5.0};
  }
  if (profile == Profile::kOcclusionHeavy) {
    const int count = b.integer(2, 3);
    for (int k = 0; k < count; ++k) {
      const auto& p = spec.persons[static_cast<std::size_t>(b.integer(0, static_cast<int>(spec.persons.size()) - 1))];
      const FrameIndex lo = first_frame(p) + 20;
      const FrameIndex hi = last_frame(p) - 20;
      if (hi <= lo) continue;
      const FrameIndex mid = lo + b.integer(0, static_cast<int>(hi - lo));
      const FrameIndex length = b.integer(15, 45);
      const double cx = spline_at(p.waypoints, static_cast<double>(mid)).x;
      spec.occlusions.push_back(
          {mid - length / 2, mid - length / 2 + length - 1,
           {cx - 80.0, 0.0, 160.0, spec.arena_height}});
    }
  }
  return spec;
}

bool acceptable(Profile profile, const ScenarioSpec& spec) {
  if (spec.litter.empty()) return false;
  if (profile == Profile::kOcclusionHeavy) {
    bool long_occlusion = false;
    for (const auto& o : spec.occlusions) long_occlusion |= (o.end - o.begin + 1) >= 15;
    if (!long_occlusion) return false;
  }
  if (profile != Profile::kNoiseFree && spec.persons.size() < 2) return false;
  try {
    spec.validate();
    // Event consistency is checked by generate(); run it on a noise-free copy
    // so the check does not depend on the detection stream.
    ScenarioSpec clean = spec;
    clean.noise = {};
    clean.occlusions.clear();
    clean.embedding_dim = 8;
    generate(clean);
  } catch (const InputError&) {
    return false;
  }
  return true;
}

}  // namespace

ScenarioSpec make_scenario(Profile profile, std::uint64_t seed, std::string name) {
  for (std::uint64_t attempt = 0; attempt < 200; ++attempt) {
    ScenarioSpec spec = attempt_scenario(profile, seed + attempt * 0x9E3779B97F4A7C15ULL, name);
    if (acceptable(profile, spec)) {
      spec.seed = seed;
      return spec;
    }
  }
  throw InputError(fmt::format("could not build a consistent {} scenario from seed {}",
                               to_string(profile), seed));
}

int suite_size(Profile profile) { return profile == Profile::kNoiseFree ? 10 : 20; }

std::uint64_t suite_seed(Profile profile, int index) {
  const std::uint64_t base = profile == Profile::kNoiseFree      ? 1000
                             : profile == Profile::kDefaultNoise ? 2000
                                                                 : 3000;
  return base + static_cast<std::uint64_t>(index);
}

std::vector<ScenarioSpec> standard_suite(Profile profile) {
  std::vector<ScenarioSpec> out;
  for (int i = 0; i < suite_size(profile); ++i) {
    out.push_back(make_scenario(profile, suite_seed(profile, i),
                                fmt::format("{}-{:02d}", to_string(profile), i)));
  }
  return out;
}

}  // namespace littertrack::sim
