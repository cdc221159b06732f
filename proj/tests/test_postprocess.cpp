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

#include <random>

#include "littertrack/error.hpp"
#include "littertrack/postprocess.hpp"
#include "oracles.hpp"

using namespace littertrack;
using namespace littertrack::post;

namespace {

Track make_track(TrackId id, const std::vector<std::pair<FrameIndex, BoundingBox>>& rows,
                 const std::string& cls = "person") {
  Track t;
  t.id = id;
  t.class_label = cls;
  for (auto& [f, b] : rows) t.history[f] = {b, 0.9, false};
  return t;
}

// Straight constant-velocity walk.
Track walk(TrackId id, FrameIndex from, FrameIndex to, double x0, double vx) {
  Track t;
  t.id = id;
  t.class_label = "person";
  for (FrameIndex f = from; f <= to; ++f)
    t.history[f] = {{x0 + vx * static_cast<double>(f - from), 100, 40, 100}, 0.9, false};
  return t;
}

}  // namespace

TEST_CASE("rbf kernel") {
  CHECK(rbf_kernel(3, 3, 10) == 1.0);
  CHECK(rbf_kernel(0, 10, 10) == doctest::Approx(std::exp(-0.5)));
  CHECK(rbf_kernel(0, 10, 10) == rbf_kernel(10, 0, 10));
}

TEST_CASE("two-point posterior mean") {
  const std::vector<double> x{0, 2}, y{0, 2}, q{1};
  const auto m = gp_posterior_mean(x, y, q, 1.0, 0.0);
  CHECK(std::abs(m[0] - 2 * std::exp(-0.5) / (1 + std::exp(-2.0))) < 1e-12);
}

TEST_CASE("posterior mean matches the direct solve") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> val(-50, 50);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x, y, q;
    for (int i = 0; i < 12; ++i) {
      x.push_back(i * 3.0 + (trial % 3));
      y.push_back(val(rng));
    }
    for (int i = 0; i < 8; ++i) q.push_back(i * 4.5 + 0.5);
    const auto got = gp_posterior_mean(x, y, q, 10.0, 0.25);
    const auto ref = oracle::gp_mean(x, y, q, 10.0, 0.25);
    for (std::size_t i = 0; i < q.size(); ++i) CHECK(std::abs(got[i] - ref[i]) < 1e-9);
  }
}

TEST_CASE("posterior mean input validation") {
  const std::vector<double> x{0, 1}, y{1};
  CHECK_THROWS_AS(gp_posterior_mean(x, y, x, 10, 0.25), InputError);
  CHECK_THROWS(gp_posterior_mean(x, x, x, 0.0, 0.25));
}

TEST_CASE("gsi fills interior gaps only") {
  Track t = make_track(1, {{1, {0, 0, 10, 20}}, {2, {1, 0, 10, 20}}, {6, {5, 0, 10, 20}},
                           {7, {6, 0, 10, 20}}});
  const Track out = gsi_interpolate(t, GsiConfig{});
  CHECK(out.history.size() == 7);
  for (FrameIndex f = 3; f <= 5; ++f) {
    REQUIRE(out.history.count(f));
    CHECK(out.history.at(f).interpolated);
    CHECK(out.history.at(f).confidence == 0.0);
  }
  for (FrameIndex f : {1, 2, 6, 7}) CHECK(out.history.at(f) == t.history.at(f));
  CHECK(out.first_frame() == 1);
  CHECK(out.last_frame() == 7);
}

TEST_CASE("gsi skips gaps longer than max_gap") {
  Track t = make_track(1, {{1, {0, 0, 10, 20}}, {40, {39, 0, 10, 20}}});
  GsiConfig cfg;
  CHECK(gsi_interpolate(t, cfg).history.size() == 2);
  cfg.max_gap = 38;
  CHECK(gsi_interpolate(t, cfg).history.size() == 40);
}

TEST_CASE("gsi leaves short tracks alone") {
  Track t = make_track(1, {{5, {0, 0, 10, 20}}});
  CHECK(gsi_interpolate(t, GsiConfig{}).history.size() == 1);
}

TEST_CASE("aflink links a broken walk and rejects overlap") {
  const Track a = walk(1, 1, 20, 100, 3);
  const Track b = walk(2, 30, 50, 100 + 3 * 29, 3);
  AflinkConfig cfg;
  const auto s = aflink_score(a, b, cfg);
  REQUIRE(s.has_value());
  CHECK(*s >= cfg.score_threshold);
  CHECK(*s <= 1.0);

  const Track overlapping = walk(3, 15, 40, 145, 3);
  CHECK_FALSE(aflink_score(a, overlapping, cfg).has_value());

  const Track far = walk(4, 100, 120, 100 + 3 * 99, 3);
  CHECK_FALSE(aflink_score(a, far, cfg).has_value());

  Track other_class = b;
  other_class.class_label = "bottle";
  CHECK_FALSE(aflink_score(a, other_class, cfg).has_value());

  const Track wrong_place = walk(5, 30, 50, 900, 3);
  const auto w = aflink_score(a, wrong_place, cfg);
  CHECK((!w.has_value() || *w < cfg.score_threshold));
}

TEST_CASE("link_tracklets relabels chains to the earliest id") {
  std::vector<Track> in{walk(7, 30, 50, 100 + 3 * 29, 3), walk(4, 1, 20, 100, 3),
                        walk(9, 1, 50, 800, -2)};
  const auto out = link_tracklets(in, AflinkConfig{});
  REQUIRE(out.size() == 2);
  CHECK(out[0].id == 4);
  CHECK(out[0].history.size() == 41);
  CHECK(out[1].id == 9);
}

TEST_CASE("post-processing config validation") {
  GsiConfig g;
  g.length_scale = 0;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  AflinkConfig a;
  a.score_threshold = 1.5;
  CHECK_THROWS_AS(a.validate(), ConfigError);
}
