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
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "littertrack/events.hpp"
#include "littertrack/identity.hpp"
#include "littertrack/track.hpp"

namespace littertrack::io {

// Integer class column <-> class label.
class LabelTable {
 public:
  LabelTable();  // person, bottle, handbag, ... (ids 1..14)

  void set(int id, const std::string& label);
  const std::string& label(int id) const;  // InputError when unknown
  int id(const std::string& label) const;  // InputError when unknown
  const std::map<int, std::string>& entries() const { return by_id_; }

 private:
  std::map<int, std::string> by_id_;
  std::map<std::string, int> by_label_;
};

// "# key: value" lines at the top of a file.
using Header = std::map<std::string, std::string>;

using FrameDetections = std::map<FrameIndex, std::vector<Detection>>;

struct DetectionFile {
  Header header;
  // Within a frame, detections keep file order; that order is the detection
  // index used by embedding files.
  FrameDetections frames;
};

struct TrackFile {
  Header header;
  std::vector<Track> tracks;  // ordered by id
};

// Rows `frame,id,left,top,width,height,conf,class,visibility`. Errors name
// the offending line. Rows out of frame order are reordered with a warning.
DetectionFile parse_detections(const std::filesystem::path& path, const LabelTable& labels);
TrackFile parse_tracks(const std::filesystem::path& path, const LabelTable& labels);

void write_detections(const std::filesystem::path& path, const FrameDetections& frames,
                      const LabelTable& labels, const Header& header = {});
// visibility 1 for observed rows, 0 for interpolated ones.
void write_tracks(const std::filesystem::path& path, std::span<const Track> tracks,
                  const LabelTable& labels, const Header& header = {});

// Binary embedding records keyed by (frame, detection index).
struct EmbeddingFile {
  std::uint32_t dimension = 0;
  bool partial = false;  // not every detection has a record
  std::string meta;
  std::map<std::pair<FrameIndex, std::uint32_t>, Embedding> vectors;
};

// Vectors are normalized on load.
EmbeddingFile load_embeddings(const std::filesystem::path& path);
void write_embeddings(const std::filesystem::path& path, const EmbeddingFile& file);

// Embeddings of every detection that carries one; partial when some do not.
EmbeddingFile collect_embeddings(const FrameDetections& frames, std::uint32_t dimension,
                                 std::string meta = {});
// Moves vectors onto detections. A non-partial file must cover every one.
void attach_embeddings(FrameDetections& frames, const EmbeddingFile& file);

// `<prefix>.emb` holds the vectors, `<prefix>.labels` index, label, metadata.
void save_gallery(const std::filesystem::path& prefix, const identity::IdentityGallery& gallery);
identity::IdentityGallery load_gallery(const std::filesystem::path& prefix);

struct EventContext {
  std::string scenario;
  std::string digest;
  std::string engine;
};

struct EventFile {
  EventContext context;
  std::vector<events::EventRecord> events;
};

// One JSON object per line.
std::string event_line(const events::EventRecord& e, const EventContext& ctx);
void write_events(const std::filesystem::path& path, std::span<const events::EventRecord> events,
                  const EventContext& ctx);
EventFile parse_events(const std::filesystem::path& path);

// Writes to a sibling temporary file, then renames over `path`.
void atomic_write(const std::filesystem::path& path, const std::string& content);

}  // namespace littertrack::io
