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
#include <optional>
#include <string>
#include <vector>

#include "littertrack/embedding.hpp"
#include "littertrack/geometry.hpp"

namespace littertrack {

using FrameIndex = std::int64_t;
using TrackId = std::int64_t;

struct Detection {
  FrameIndex frame = 0;
  BoundingBox box;
  double confidence = 1.0;
  std::string class_label;
  std::optional<Embedding> embedding;
};

struct HistoryEntry {
  BoundingBox box;
  double confidence = 1.0;
  bool interpolated = false;

  bool operator==(const HistoryEntry&) const = default;
};

// A finished (exported) track: identity, class and per-frame boxes. This is
// the unit consumed by post-processing, event detection and the file writers.
struct Track {
  TrackId id = 0;
  std::string class_label;
  std::map<FrameIndex, HistoryEntry> history;
  // Smoothed unit appearance vector; empty when the track never carried one.
  Embedding appearance;

  FrameIndex first_frame() const { return history.begin()->first; }
  FrameIndex last_frame() const { return history.rbegin()->first; }
  const BoundingBox* box_at(FrameIndex frame) const {
    auto it = history.find(frame);
    return it == history.end() ? nullptr : &it->second.box;
  }
};

}  // namespace littertrack
