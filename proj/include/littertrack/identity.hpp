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

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "littertrack/embedding.hpp"

namespace littertrack::identity {

inline constexpr std::size_t kDefaultDimension = 512;
inline constexpr double kDefaultThreshold = 0.5;
// Top-2 similarity margins below this are reported as ambiguous.
inline constexpr double kAmbiguityMargin = 0.05;

// s * cos(theta + m) with theta = acos(cos_theta) and theta + m clamped to
// [0, pi].
double arcface_logit(double cos_theta, double margin, double scale);

struct MatchResult {
  std::optional<std::string> label;
  double similarity = -1.0;  // best cosine similarity found
  double margin_logit = 0.0;
  bool ambiguous = false;
};

// Label -> unit embedding. Labels iterate in lexicographic order.
class IdentityGallery {
 public:
  explicit IdentityGallery(std::size_t dimension = kDefaultDimension);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  // Normalizes and stores; replaces an existing label (logged).
  void enroll(const std::string& label, std::span<const float> embedding,
              std::string metadata = {});

  const std::map<std::string, Embedding>& entries() const { return entries_; }
  const std::map<std::string, std::string>& metadata() const { return metadata_; }

 private:
  std::size_t dimension_;
  std::map<std::string, Embedding> entries_;
  std::map<std::string, std::string> metadata_;
};

struct MatchOptions {
  double threshold = kDefaultThreshold;
  double arcface_margin = 0.5;
  double arcface_scale = 64.0;
};

// Exhaustive scan; ties go to the lexicographically smallest label. An empty
// gallery yields a result without label.
MatchResult match_identity(const IdentityGallery& gallery,
                           std::span<const float> query,
                           const MatchOptions& options = {});

}  // namespace littertrack::identity
