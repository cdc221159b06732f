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

#include "littertrack/metrics.hpp"
#include "micro_scenes.hpp"

using namespace littertrack;
using namespace littertrack::metrics;

namespace {

micro::Scene find_scene(const std::string& name) {
  for (auto& s : micro::scenes())
    if (s.name == name) return s;
  FAIL("missing scene " << name);
  return {};
}

micro::Scene transform(micro::Scene s, double scale, double dx, double dy) {
  auto apply = [&](oracle::Frames& fr) {
    for (auto& [f, v] : fr)
      for (auto& o : v) o.box = {o.box.l * scale + dx, o.box.t * scale + dy, o.box.w * scale, o.box.h * scale};
  };
  apply(s.gt);
  apply(s.pred);
  return s;
}

void check_close(const MetricReport& a, const MetricReport& b, double tol) {
  CHECK(std::abs(a.mota - b.mota) < tol);
  CHECK(std::abs(a.idf1 - b.idf1) < tol);
  CHECK(std::abs(a.hota - b.hota) < tol);
  CHECK(std::abs(a.deta - b.deta) < tol);
  CHECK(std::abs(a.assa - b.assa) < tol);
}

}  // namespace

TEST_CASE("micro scenes agree with the from-definition oracle") {
  for (const micro::Scene& s : micro::scenes()) {
    CAPTURE(s.name);
    const MetricReport r = evaluate(micro::to_frame_set(s));
    const oracle::Metrics o = oracle::evaluate(s.gt, s.pred);
    CHECK(std::abs(r.mota - o.mota) < 1e-9);
    CHECK(std::abs(r.idf1 - o.idf1) < 1e-9);
    CHECK(std::abs(r.hota - o.hota) < 1e-9);
    CHECK(std::abs(r.deta - o.deta) < 1e-9);
    CHECK(std::abs(r.assa - o.assa) < 1e-9);
    CHECK(r.tp == o.tp);
    CHECK(r.fp == o.fp);
    CHECK(r.fn == o.fn);
    CHECK(r.idsw == o.idsw);
  }
}

TEST_CASE("hand-computed values") {
  MetricReport r = evaluate(micro::to_frame_set(find_scene("perfect")));
  CHECK(r.mota == 1.0);
  CHECK(r.idf1 == 1.0);
  CHECK(r.hota == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.fp + r.fn + r.idsw == 0);

  r = evaluate(micro::to_frame_set(find_scene("single-miss")));
  CHECK(r.mota == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(r.fn == 1);

  r = evaluate(micro::to_frame_set(find_scene("split-track")));
  CHECK(r.idf1 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.idsw == 1);

  r = evaluate(micro::to_frame_set(find_scene("empty-predictions")));
  CHECK(r.mota == 0.0);
  CHECK(r.fn == 10);
  CHECK(r.idf1 == 0.0);
  CHECK(r.hota == 0.0);
}

TEST_CASE("empty ground truth is undefined") {
  micro::Scene s;
  s.pred[1].push_back({1, {0, 0, 10, 10}});
  CHECK_THROWS_AS(evaluate_clear(micro::to_frame_set(s)), UndefinedMetricError);
  CHECK_THROWS_AS(evaluate_hota(micro::to_frame_set(s)), UndefinedMetricError);
}

TEST_CASE("hota identity per threshold and value ranges") {
  for (const micro::Scene& s : micro::scenes()) {
    const HotaResult h = evaluate_hota(micro::to_frame_set(s));
    double best = 0;
    for (int a = 0; a < kHotaAlphaCount; ++a) {
      CHECK(h.hota_alpha[a] == doctest::Approx(std::sqrt(h.deta_alpha[a] * h.assa_alpha[a])).epsilon(1e-12));
      best = std::max(best, h.deta_alpha[a] * h.assa_alpha[a]);
    }
    CHECK(h.hota * h.hota <= best + 1e-9);
    for (double v : {h.hota, h.deta, h.assa}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    const MetricReport r = evaluate(micro::to_frame_set(s));
    CHECK(r.mota <= 1.0);
    CHECK(r.idf1 >= 0.0);
    CHECK(r.idf1 <= 1.0);
  }
}

TEST_CASE("metrics are invariant under translation, scaling and relabeling") {
  for (const micro::Scene& s : micro::scenes()) {
    CAPTURE(s.name);
    const MetricReport base = evaluate(micro::to_frame_set(s));
    check_close(base, evaluate(micro::to_frame_set(transform(s, 1.0, 37.5, -12.25))), 1e-9);
    check_close(base, evaluate(micro::to_frame_set(transform(s, 2.0, 0.0, 0.0))), 1e-9);
    micro::Scene renamed = s;
    for (auto& [f, v] : renamed.pred)
      for (auto& o : v) o.id = 1000 - o.id;
    check_close(base, evaluate(micro::to_frame_set(renamed)), 1e-12);
  }
}

TEST_CASE("many false positives make MOTA negative") {
  micro::Scene s;
  for (long f = 1; f <= 5; ++f) {
    s.gt[f].push_back({1, micro::walker(1, f)});
    s.pred[f].push_back({1, micro::walker(1, f)});
    for (long k = 0; k < 3; ++k) s.pred[f].push_back({10 + k, {800.0 + 50 * k, 600, 20, 20}});
  }
  const MetricReport r = evaluate(micro::to_frame_set(s));
  CHECK(r.mota == doctest::Approx(-2.0));
}

TEST_CASE("hota alphas") {
  const auto a = hota_alphas();
  CHECK(a.front() == doctest::Approx(0.05));
  CHECK(a.back() == doctest::Approx(0.95));
}
