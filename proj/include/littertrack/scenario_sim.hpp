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
#include <map>
#include <string>
#include <vector>

#include "littertrack/events.hpp"
#include "littertrack/track.hpp"

namespace littertrack::sim {

// Person position keyframe: box center x and feet (bottom) y.
struct Waypoint {
  FrameIndex frame = 0;
  double x = 0.0;
  double y = 0.0;
};

// A person walks a Catmull-Rom spline through its waypoints, present from the
// first to the last waypoint frame. Repeating a waypoint makes the person stop.
struct PersonScript {
  std::string identity;
  double width = 40.0;
  double height = 100.0;
  std::vector<Waypoint> waypoints;
};

// Litter carried in the hand of `person` from `appear_frame`, released at
// `drop_frame`, following a C1 arc for `fall_frames` to the ground at
// horizontal offset `throw_dx`, then resting.
struct LitterDrop {
  int person = 0;
  FrameIndex appear_frame = 0;
  FrameIndex drop_frame = 0;
  std::string litter_class = "bottle";
  double width = 16.0;
  double height = 24.0;
  double hand_dx = 8.0;
  double throw_dx = 0.0;
  FrameIndex fall_frames = 16;
};

// `person` lifts resting litter `drop` into the hand starting at
// `lift_frame`, carries it for `carry_frames`, after which it disappears.
struct CleaningPickup {
  int person = 0;
  int drop = 0;
  FrameIndex lift_frame = 0;
  FrameIndex lift_frames = 8;
  FrameIndex carry_frames = 12;
};

struct NoiseSpec {
  double box_jitter = 0.0;           // px std on left, top, width, height
  double dropout = 0.0;              // per-box miss probability
  double false_positive_rate = 0.0;  // expected spurious boxes per frame
  double embedding_noise_deg = 0.0;  // std of the angular perturbation
};

// Detections whose box center lies in `region` during [begin, end] are
// suppressed.
struct Occlusion {
  FrameIndex begin = 0;
  FrameIndex end = 0;
  BoundingBox region;
};

struct ScenarioSpec {
  std::string name;
  std::uint64_t seed = 0;
  FrameIndex frame_count = 300;
  double arena_width = 1280.0;
  double arena_height = 720.0;
  std::vector<PersonScript> persons;
  std::vector<LitterDrop> litter;
  std::vector<CleaningPickup> cleanings;
  NoiseSpec noise;
  std::vector<Occlusion> occlusions;
  std::size_t embedding_dim = 512;
  double min_identity_angle_deg = 30.0;

  // Throws InputError listing every offending field.
  void validate() const;
};

struct GroundTruth {
  // Persons carry ids 1..P in script order, litter P+1.. in drop order.
  std::vector<Track> tracks;
  std::vector<events::EventRecord> events;
  std::map<int, std::string> identities;  // person index -> identity label
  std::map<std::string, Embedding> identity_embeddings;
};

struct FrameDetections {
  FrameIndex frame = 0;
  std::vector<Detection> detections;
};

struct Scenario {
  ScenarioSpec spec;
  GroundTruth truth;
  // One entry per frame 1..frame_count, possibly empty.
  std::vector<FrameDetections> detections;
};

// Event rule used for the injected ground-truth events.
events::EventConfig reference_event_config();

// Deterministic in the scenario description, including its seed.
Scenario generate(const ScenarioSpec& spec);

enum class Profile { kNoiseFree, kDefaultNoise, kOcclusionHeavy };

const char* to_string(Profile p);
Profile parse_profile(const std::string& text);

// Scenario built from a profile template and a seed.
ScenarioSpec make_scenario(Profile profile, std::uint64_t seed, std::string name);

// Fixed published seeds: 10 noise-free, 20 default-noise, 20 occlusion-heavy.
std::vector<ScenarioSpec> standard_suite(Profile profile);
std::uint64_t suite_seed(Profile profile, int index);
int suite_size(Profile profile);

}  // namespace littertrack::sim
