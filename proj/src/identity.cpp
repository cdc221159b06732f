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

#include "littertrack/identity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "littertrack/error.hpp"

namespace littertrack::identity {

double arcface_logit(double cos_theta, double margin, double scale) {
  const double theta = std::acos(std::clamp(cos_theta, -1.0, 1.0));
  const double angle = std::clamp(theta + margin, 0.0, std::numbers::pi);
  return scale * std::cos(angle);
}

IdentityGallery::IdentityGallery(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw ConfigError("gallery dimension must be positive");
}

void IdentityGallery::enroll(const std::string& label,
                             std::span<const float> embedding,
                             std::string metadata) {
  if (label.empty()) throw InputError("identity label must not be empty");
  if (embedding.size() != dimension_) {
    throw InputError(fmt::format("embedding dimension {} does not match gallery dimension {}",
                                 embedding.size(), dimension_));
  }
  Embedding unit = normalized(embedding);
  if (entries_.contains(label)) {
    spdlog::info("gallery: replacing existing identity '{}'", label);
  }
  entries_[label] = std::move(unit);
  metadata_[label] = std::move(metadata);
}

MatchResult match_identity(const IdentityGallery& gallery,
                           std::span<const float> query,
                           const MatchOptions& options) {
  if (query.size() != gallery.dimension()) {
    throw InputError(fmt::format("query dimension {} does not match gallery dimension {}",
                                 query.size(), gallery.dimension()));
  }
  const Embedding unit = normalized(query);
  MatchResult result;
  if (gallery.empty()) return result;

  const std::string* best_label = nullptr;
  double best = -2.0;
  double second = -2.0;
  for (const auto& [label, emb] : gallery.entries()) {
    const double sim = std::clamp(dot(unit, emb), -1.0, 1.0);
    // Strict comparison keeps the lexicographically first label on ties.
    if (sim > best) {
      second = best;
      best = sim;
      best_label = &label;
    } else if (sim > second) {
      second = sim;
    }
  }
  result.similarity = best;
  result.margin_logit =
      arcface_logit(best, options.arcface_margin, options.arcface_scale);
  result.ambiguous = gallery.size() > 1 && best - second < kAmbiguityMargin;
  if (best >= options.threshold) result.label = *best_label;
  return result;
}

}  // namespace littertrack::identity
