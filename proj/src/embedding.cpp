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

#include "littertrack/embedding.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "littertrack/error.hpp"

namespace littertrack {

double dot(std::span<const float> u, std::span<const float> v) {
  double acc = 0.0;
  const std::size_t n = std::min(u.size(), v.size());
  for (std::size_t i = 0; i < n; ++i) {
    acc += static_cast<double>(u[i]) * static_cast<double>(v[i]);
  }
  return acc;
}

double norm(std::span<const float> v) { return std::sqrt(dot(v, v)); }

Embedding normalized(std::span<const float> v) {
  const double n = norm(v);
  if (v.empty() || !(n > 0.0) || !std::isfinite(n)) {
    throw InputError("embedding must be a nonzero finite vector");
  }
  Embedding out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = static_cast<float>(static_cast<double>(v[i]) / n);
  }
  return out;
}

double cosine_similarity(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) {
    throw InputError(fmt::format("embedding dimension mismatch ({} vs {})",
                                 u.size(), v.size()));
  }
  const double nu = norm(u);
  const double nv = norm(v);
  if (!(nu > 0.0) || !(nv > 0.0)) {
    throw InputError("cosine similarity of a zero vector is undefined");
  }
  return std::clamp(dot(u, v) / (nu * nv), -1.0, 1.0);
}

double cosine_distance(std::span<const float> u, std::span<const float> v) {
  return std::clamp(1.0 - cosine_similarity(u, v), 0.0, 2.0);
}

}  // namespace littertrack
