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

#include <span>
#include <vector>

namespace littertrack {

// Appearance / face feature vector. Stored as float32 to match the sidecar
// format; arithmetic is carried out in double.
using Embedding = std::vector<float>;

double dot(std::span<const float> u, std::span<const float> v);
double norm(std::span<const float> v);

// Unit-length copy. Throws InputError on an empty, zero or non-finite vector.
Embedding normalized(std::span<const float> v);

// Throws InputError on zero vectors or a dimension mismatch.
double cosine_similarity(std::span<const float> u, std::span<const float> v);

// 1 - cosine similarity, clamped to [0, 2].
double cosine_distance(std::span<const float> u, std::span<const float> v);

}  // namespace littertrack
