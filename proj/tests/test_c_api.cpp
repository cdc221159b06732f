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


// Exercises the shared library through its C interface only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <unistd.h>
#include <vector>

#include "littertrack/littertrack.h"

namespace fs = std::filesystem;

namespace {

struct Config {
  lt_config* p = nullptr;
  Config() { REQUIRE(lt_config_create(&p) == LT_OK); }
  ~Config() { lt_config_destroy(p); }
};

fs::path temp_dir(const char* tag) {
  const fs::path p = fs::temp_directory_path() /
                     (std::string("littertrack-capi-") + tag + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("version and error text") {
  CHECK(std::string(lt_version()).find("littertrack") == 0);
  CHECK(lt_last_error() != nullptr);
}

TEST_CASE("config calls") {
  Config c;
  char digest[17];
  REQUIRE(lt_config_digest(c.p, digest, sizeof digest) == LT_OK);
  CHECK(std::strlen(digest) == 16);
  CHECK(lt_config_digest(c.p, digest, 8) == LT_ERR_INPUT);

  CHECK(lt_config_set(c.p, "association.lambda_m", "0.8") == LT_OK);
  CHECK(lt_config_set(c.p, "no.such.key", "1") == LT_ERR_CONFIG);
  CHECK(std::string(lt_last_error()).find("no.such.key") != std::string::npos);
  CHECK(lt_config_set(c.p, nullptr, "1") == LT_ERR_INPUT);

  size_t needed = 0;
  REQUIRE(lt_config_canonical(c.p, nullptr, 0, &needed) == LT_OK);
  std::vector<char> buf(needed);
  REQUIRE(lt_config_canonical(c.p, buf.data(), buf.size(), &needed) == LT_OK);
  CHECK(std::string(buf.data()).find("association.lambda_m = 0.8") != std::string::npos);

  CHECK(lt_config_set(c.p, "streaming", "true") == LT_OK);
  CHECK(lt_config_validate(c.p) == LT_ERR_CONFIG);
  CHECK(lt_config_set(c.p, "mode", "deepsort") == LT_OK);
  CHECK(lt_config_validate(c.p) == LT_OK);
  CHECK(lt_config_load(c.p, "/nonexistent/littertrack.cfg") != LT_OK);
}

TEST_CASE("in-memory tracker") {
  Config c;
  lt_tracker* t = nullptr;
  REQUIRE(lt_tracker_create(c.p, &t) == LT_OK);
  const float emb[3] = {1, 0, 0};
  size_t rows = 0;
  for (int64_t f = 1; f <= 6; ++f) {
    lt_detection d{100.0 + f, 50, 30, 80, 0.9, "person", emb, 3};
    REQUIRE(lt_tracker_step(t, f, &d, 1, &rows) == LT_OK);
    if (f == 3) {
      CHECK(rows == 3);
      std::vector<lt_track_row> out(rows);
      size_t n = 0;
      REQUIRE(lt_tracker_rows(t, out.data(), out.size(), &n) == LT_OK);
      CHECK(out[0].backfill == 1);
      CHECK(out[0].frame == 1);
      CHECK(out[0].class_id == 1);
      lt_track_row small[1];
      CHECK(lt_tracker_rows(t, small, 1, &n) == LT_ERR_INPUT);
    }
  }
  CHECK(lt_tracker_step(t, 6, nullptr, 0, &rows) == LT_ERR_INPUT);
  lt_detection bad{0, 0, -1, 5, 0.9, "person", nullptr, 0};
  CHECK(lt_tracker_step(t, 7, &bad, 1, &rows) == LT_ERR_INPUT);

  size_t count = 0;
  REQUIRE(lt_tracker_export(t, nullptr, 0, &count) == LT_OK);
  CHECK(count == 6);
  std::vector<lt_track_row> all(count);
  REQUIRE(lt_tracker_export(t, all.data(), all.size(), &count) == LT_OK);
  for (const auto& r : all) CHECK(r.id == 1);
  lt_tracker_destroy(t);
}

TEST_CASE("gallery calls") {
  lt_gallery* g = nullptr;
  REQUIRE(lt_gallery_create(2, &g) == LT_OK);
  const float a[2] = {1, 0}, b[2] = {0, 1}, wrong[3] = {1, 0, 0};
  CHECK(lt_gallery_enroll(g, "alice", a, 2, nullptr) == LT_OK);
  CHECK(lt_gallery_enroll(g, "bob", b, 2, "meta") == LT_OK);
  CHECK(lt_gallery_enroll(g, "carol", wrong, 3, nullptr) == LT_ERR_INPUT);
  CHECK(lt_gallery_size(g) == 2);
  CHECK(lt_gallery_dimension(g) == 2);

  lt_match m{};
  const float q[2] = {0.1f, 5.0f};
  REQUIRE(lt_gallery_match(g, nullptr, q, 2, &m) == LT_OK);
  CHECK(m.matched == 1);
  CHECK(std::string(m.label) == "bob");
  CHECK(m.margin_logit == doctest::Approx(lt_arcface_logit(m.similarity, 0.5, 64)));

  const fs::path dir = temp_dir("gallery");
  REQUIRE(lt_gallery_save(g, (dir / "g").c_str()) == LT_OK);
  lt_gallery* back = nullptr;
  REQUIRE(lt_gallery_load((dir / "g").c_str(), &back) == LT_OK);
  CHECK(lt_gallery_size(back) == 2);
  lt_gallery_destroy(back);
  lt_gallery_destroy(g);
  fs::remove_all(dir);
}

TEST_CASE("file-level chain") {
  Config c;
  const fs::path dir = temp_dir("chain");
  REQUIRE(lt_simulate(c.p, LT_PROFILE_NOISE_FREE, 1002, dir.c_str()) == LT_OK);
  const std::string det = (dir / "detections.txt").string();
  const std::string emb = (dir / "embeddings.emb").string();
  const std::string gt = (dir / "gt.txt").string();
  const std::string gal = (dir / "gallery").string();

  lt_metric_report rep{};
  int has = 0;
  REQUIRE(lt_run(c.p, det.c_str(), emb.c_str(), gal.c_str(), gt.c_str(), (dir / "out").c_str(),
                 &rep, &has) == LT_OK);
  CHECK(has == 1);
  CHECK(rep.mota == doctest::Approx(1.0));
  CHECK(fs::exists(dir / "out" / "events.jsonl"));

  const std::string tracks = (dir / "tracks.txt").string();
  REQUIRE(lt_track_files(c.p, det.c_str(), emb.c_str(), tracks.c_str(), nullptr) == LT_OK);
  REQUIRE(lt_events_files(c.p, tracks.c_str(), (dir / "ev.jsonl").c_str(), nullptr, nullptr,
                          "s") == LT_OK);
  const char* preds[] = {tracks.c_str()};
  REQUIRE(lt_eval_files(c.p, gt.c_str(), preds, 1, &rep) == LT_OK);
  CHECK(rep.idf1 == doctest::Approx(1.0));

  CHECK(lt_track_files(c.p, (dir / "missing.txt").c_str(), nullptr, tracks.c_str(), nullptr) ==
        LT_ERR_INPUT);
  fs::remove_all(dir);
}
