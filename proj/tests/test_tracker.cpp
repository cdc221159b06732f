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


#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "littertrack/error.hpp"
#include "littertrack/scenario_sim.hpp"
#include "littertrack/tracker.hpp"

using namespace littertrack;

namespace {

Detection det(FrameIndex f, BoundingBox b, std::string cls = "person", double conf = 0.9) {
  Detection d;
  d.frame = f;
  d.box = b;
  d.confidence = conf;
  d.class_label = std::move(cls);
  return d;
}

}  // namespace

TEST_CASE("first detection spawns tentative track 1") {
  Tracker t(TrackerConfig{});
  std::vector<Detection> d{det(1, {10, 10, 20, 40})};
  CHECK(t.step(1, d).empty());
  REQUIRE(t.live_tracklets().size() == 1);
  CHECK(t.live_tracklets()[0].id == 1);
  CHECK(t.live_tracklets()[0].status == TrackStatus::kTentative);
}

TEST_CASE("empty frame ages every live track") {
  Tracker t(TrackerConfig{});
  std::vector<Detection> d{det(1, {10, 10, 20, 40}), det(1, {300, 10, 20, 40})};
  t.step(1, d);
  for (FrameIndex f = 2; f <= 3; ++f) {
    std::vector<Detection> df{det(f, {10, 10, 20, 40}), det(f, {300, 10, 20, 40})};
    t.step(f, df);
  }
  t.step(4, {});
  for (const Tracklet& tr : t.live_tracklets()) CHECK(tr.time_since_update == 1);
}

TEST_CASE("stationary object confirms with backfill and exact boxes") {
  Tracker t(TrackerConfig{});
  const BoundingBox b{100, 50, 30, 60};
  std::vector<TrackOutput> all;
  for (FrameIndex f = 1; f <= 10; ++f) {
    std::vector<Detection> d{det(f, b)};
    auto out = t.step(f, d);
    if (f < 3) CHECK(out.empty());
    if (f == 3) {
      REQUIRE(out.size() == 3);
      CHECK(out[0].backfill);
      CHECK(out[0].frame == 1);
      CHECK(out[2].frame == 3);
    }
    all.insert(all.end(), out.begin(), out.end());
  }
  CHECK(all.size() == 10);
  for (const TrackOutput& o : all) {
    CHECK(o.id == 1);
    CHECK(std::abs(o.box.left - b.left) < 1e-6);
    CHECK(std::abs(o.box.height - b.height) < 1e-6);
  }
  const auto tracks = t.export_tracks();
  REQUIRE(tracks.size() == 1);
  CHECK(tracks[0].history.size() == 10);
}

TEST_CASE("tentative track missing a frame is deleted") {
  Tracker t(TrackerConfig{});
  std::vector<Detection> d1{det(1, {10, 10, 20, 40})};
  t.step(1, d1);
  t.step(2, {});
  CHECK(t.live_tracklets().empty());
  CHECK(t.export_tracks().empty());
}

TEST_CASE("confirmed track dies after max_age misses and ids are not reused") {
  TrackerConfig cfg;
  cfg.max_age = 5;
  Tracker t(cfg);
  for (FrameIndex f = 1; f <= 5; ++f) {
    std::vector<Detection> d{det(f, {10, 10, 20, 40})};
    t.step(f, d);
  }
  for (FrameIndex f = 6; f <= 11; ++f) t.step(f, {});
  CHECK(t.live_tracklets().empty());
  std::vector<Detection> d{det(12, {10, 10, 20, 40})};
  t.step(12, d);
  CHECK(t.live_tracklets()[0].id == 2);
  CHECK(t.export_tracks().size() == 1);
}

TEST_CASE("low-confidence detections do not spawn") {
  Tracker t(TrackerConfig{});
  std::vector<Detection> d{det(1, {10, 10, 20, 40}, "person", 0.1)};
  t.step(1, d);
  CHECK(t.live_tracklets().empty());
}

TEST_CASE("classes are associated independently") {
  Tracker t(TrackerConfig{});
  for (FrameIndex f = 1; f <= 5; ++f) {
    std::vector<Detection> d{det(f, {100, 100, 20, 40}, "person"),
                             det(f, {100, 100, 20, 40}, "bottle")};
    t.step(f, d);
  }
  const auto tracks = t.export_tracks();
  REQUIRE(tracks.size() == 2);
  CHECK(tracks[0].class_label != tracks[1].class_label);
  CHECK(tracks[0].history.size() == 5);
  CHECK(tracks[1].history.size() == 5);
}

TEST_CASE("frames must strictly increase") {
  Tracker t(TrackerConfig{});
  t.step(5, {});
  CHECK_THROWS_AS(t.step(5, {}), SequencingError);
  CHECK_THROWS_AS(t.step(4, {}), SequencingError);
  std::vector<Detection> wrong{det(7, {0, 0, 1, 1})};
  CHECK_THROWS_AS(t.step(6, wrong), SequencingError);
}

TEST_CASE("appearance update rule") {
  const Embedding old{1, 0};
  CHECK(update_appearance(old, old, 0.9) == old);
  const Embedding e{0, 1};
  CHECK(update_appearance(old, e, 0.0) == e);
  const Embedding mid = update_appearance(old, e, 0.5);
  CHECK(mid[0] == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(mid[1] == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(update_appearance({}, e, 0.9) == e);
  const Embedding opposite{-1, 0};
  CHECK(update_appearance(old, opposite, 0.5) == old);
}

TEST_CASE("appearance stays unit length") {
  Tracker t(TrackerConfig{});
  for (FrameIndex f = 1; f <= 8; ++f) {
    Detection d = det(f, {50, 50, 20, 40});
    d.embedding = Embedding{static_cast<float>(f), 1.0f, 2.0f};
    std::vector<Detection> v{d};
    t.step(f, v);
  }
  const Tracklet& tr = t.live_tracklets().at(0);
  CHECK(norm(tr.appearance) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("noise-free crossing objects match ground truth") {
  sim::ScenarioSpec spec = sim::make_scenario(sim::Profile::kNoiseFree, 1000, "cross");
  const sim::Scenario sc = sim::generate(spec);
  Tracker t(TrackerConfig{});
  for (const auto& fd : sc.detections) t.step(fd.frame, fd.detections);
  const auto tracks = t.export_tracks();
  REQUIRE(tracks.size() == sc.truth.tracks.size());
  std::set<TrackId> used;
  for (const Track& gt : sc.truth.tracks) {
    const Track* best = nullptr;
    for (const Track& p : tracks)
      if (p.class_label == gt.class_label && p.history.begin()->second.box.left >= 0 &&
          p.box_at(gt.first_frame()) &&
          iou(*p.box_at(gt.first_frame()), gt.history.begin()->second.box) > 0.99)
        best = &p;
    REQUIRE(best != nullptr);
    CHECK(used.insert(best->id).second);
    CHECK(best->history.size() == gt.history.size());
    for (const auto& [f, e] : gt.history) {
      const BoundingBox* b = best->box_at(f);
      REQUIRE(b != nullptr);
      CHECK(std::abs(b->left - e.box.left) < 1e-4);
      CHECK(std::abs(b->top - e.box.top) < 1e-4);
    }
  }
}

TEST_CASE("tracker is deterministic") {
  const sim::Scenario sc = sim::generate(sim::make_scenario(sim::Profile::kDefaultNoise, 7, "d"));
  auto run = [&] {
    Tracker t(TrackerConfig{});
    std::vector<TrackOutput> rows;
    for (const auto& fd : sc.detections) {
      auto out = t.step(fd.frame, fd.detections);
      rows.insert(rows.end(), out.begin(), out.end());
    }
    return rows;
  };
  const auto a = run(), b = run();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == b[i].id);
    CHECK(a[i].frame == b[i].frame);
    CHECK(a[i].box == b[i].box);
  }
}

TEST_CASE("tracker config validation") {
  TrackerConfig cfg;
  cfg.n_init = 0;
  CHECK_THROWS_AS(Tracker{cfg}, ConfigError);
  cfg = TrackerConfig{};
  cfg.ema_alpha = 1.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
