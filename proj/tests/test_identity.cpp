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

#include <cmath>
#include <numbers>
#include <random>

#include "littertrack/error.hpp"
#include "littertrack/identity.hpp"

using namespace littertrack;
using namespace littertrack::identity;

namespace {

Embedding random_unit(std::mt19937_64& rng, std::size_t dim) {
  std::normal_distribution<float> g(0, 1);
  Embedding v(dim);
  for (auto& x : v) x = g(rng);
  return normalized(v);
}

}  // namespace

TEST_CASE("arcface logit") {
  CHECK(arcface_logit(1.0, 0.5, 64) == doctest::Approx(64 * std::cos(0.5)));
  CHECK(arcface_logit(0.0, 0.0, 1) == doctest::Approx(0.0).epsilon(1e-12));
  // theta + m is clamped at pi
  CHECK(arcface_logit(-1.0, 0.5, 2) == doctest::Approx(-2.0));
  CHECK(arcface_logit(0.3, 0.0, 10) == doctest::Approx(3.0));
}

TEST_CASE("empty gallery yields no label") {
  IdentityGallery g(4);
  const MatchResult r = match_identity(g, std::vector<float>{1, 0, 0, 0});
  CHECK_FALSE(r.label.has_value());
}

TEST_CASE("enroll normalizes, replaces and checks dimension") {
  IdentityGallery g(3);
  g.enroll("alice", std::vector<float>{3, 0, 0});
  CHECK(g.entries().at("alice")[0] == doctest::Approx(1.0));
  g.enroll("alice", std::vector<float>{0, 2, 0}, "v2");
  CHECK(g.size() == 1);
  CHECK(g.entries().at("alice")[1] == doctest::Approx(1.0));
  CHECK(g.metadata().at("alice") == "v2");
  CHECK_THROWS_AS(g.enroll("bob", std::vector<float>{1, 0}), InputError);
  CHECK_THROWS_AS(g.enroll("bob", std::vector<float>{0, 0, 0}), InputError);
  CHECK_THROWS_AS(match_identity(g, std::vector<float>{1, 0}), InputError);
}

TEST_CASE("threshold and ambiguity") {
  IdentityGallery g(2);
  g.enroll("a", std::vector<float>{1, 0});
  g.enroll("b", std::vector<float>{0, 1});
  const MatchResult hit = match_identity(g, std::vector<float>{1, 0.1f});
  REQUIRE(hit.label.has_value());
  CHECK(*hit.label == "a");
  CHECK_FALSE(hit.ambiguous);

  const MatchResult tie = match_identity(g, std::vector<float>{1, 1});
  REQUIRE(tie.label.has_value());
  CHECK(*tie.label == "a");  // lexicographic tie-break
  CHECK(tie.ambiguous);

  const MatchResult miss = match_identity(g, std::vector<float>{-1, -1});
  CHECK_FALSE(miss.label.has_value());
  CHECK(miss.similarity < kDefaultThreshold);
}

TEST_CASE("matching is scale invariant and finds exact enrollments") {
  std::mt19937_64 rng(41);
  IdentityGallery g(64);
  std::vector<Embedding> protos;
  for (int i = 0; i < 20; ++i) {
    protos.push_back(random_unit(rng, 64));
    g.enroll("id" + std::to_string(100 + i), protos.back());
  }
  for (int i = 0; i < 20; ++i) {
    Embedding scaled = protos[i];
    for (auto& x : scaled) x *= 7.5f;
    const MatchResult a = match_identity(g, protos[i]);
    const MatchResult b = match_identity(g, scaled);
    REQUIRE(a.label.has_value());
    CHECK(*a.label == "id" + std::to_string(100 + i));
    CHECK(a.label == b.label);
    CHECK(a.similarity == doctest::Approx(b.similarity).epsilon(1e-6));
    CHECK(a.margin_logit == doctest::Approx(arcface_logit(a.similarity, 0.5, 64)));
  }
}
