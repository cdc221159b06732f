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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "littertrack/events.hpp"
#include "littertrack/identity.hpp"
#include "littertrack/io.hpp"
#include "littertrack/metrics.hpp"
#include "littertrack/postprocess.hpp"
#include "littertrack/scenario_sim.hpp"
#include "littertrack/tracker.hpp"

namespace littertrack::pipeline {

inline constexpr const char* kEngineVersion = "littertrack 1.0.0";

enum class Mode { kSortBaseline, kDeepSort, kImproved };

const char* to_string(Mode mode);
Mode parse_mode(const std::string& text);  // ConfigError when unknown

struct PipelineConfig {
  Mode mode = Mode::kImproved;
  TrackerConfig tracker;
  post::GsiConfig gsi;
  post::AflinkConfig aflink;
  events::EventConfig events;
  identity::MatchOptions identity;
  io::LabelTable labels;
  double iou_threshold = 0.5;  // CLEAR / ID matching
  // Frame-by-frame event release; only valid in the online modes.
  bool streaming = false;

  // Dotted keys such as "association.lambda_m"; unknown keys and bad values
  // raise ConfigError.
  void set(const std::string& key, const std::string& value);
  // `key = value` lines; '#' starts a comment.
  void load(const std::filesystem::path& path);
  void validate() const;

  // Copy with the mode contract applied (sort-baseline has lambda_a = 0).
  PipelineConfig effective() const;
  bool postprocess_enabled() const { return mode == Mode::kImproved; }

  // Sorted `key = value` lines of the effective configuration.
  std::string canonical() const;
  // 64-bit FNV-1a of canonical(), 16 hex digits.
  std::string digest() const;
};

struct RunResult {
  std::vector<Track> tracks;
  std::vector<events::EventRecord> events;
};

// Tracks every frame from the first to the last one present, then applies
// AFLink and GSI when enabled.
std::vector<Track> track_sequence(const PipelineConfig& cfg, const io::FrameDetections& frames);

// Event detection plus identity lookup of attributed persons. `gallery` may
// be null.
std::vector<events::EventRecord> detect_events(const PipelineConfig& cfg, std::span<const Track> tracks,
                                               const identity::IdentityGallery* gallery);

// Full chain. Failures are rethrown with the stage name prefixed.
RunResult run(const PipelineConfig& cfg, const io::FrameDetections& frames,
              const identity::IdentityGallery* gallery);

// ---- file-level operations shared by the C API and the command line ----

struct SimulateOutputs {
  std::filesystem::path detections, embeddings, ground_truth, events, gallery_prefix;
};

// Writes detections.txt, embeddings.emb, gt.txt, gt_events.jsonl and
// gallery.{emb,labels} under `dir`.
SimulateOutputs simulate_to_directory(sim::Profile profile, std::uint64_t seed,
                                      const std::filesystem::path& dir, const PipelineConfig& cfg);

// `appearance`, when given, receives per-track appearance vectors keyed by
// (0, track id).
void track_files(const PipelineConfig& cfg, const std::filesystem::path& detections,
                 const std::optional<std::filesystem::path>& embeddings,
                 const std::filesystem::path& tracks_out,
                 const std::optional<std::filesystem::path>& appearance = std::nullopt);

void events_files(const PipelineConfig& cfg, const std::filesystem::path& tracks,
                  const std::filesystem::path& events_out,
                  const std::optional<std::filesystem::path>& appearance,
                  const std::optional<std::filesystem::path>& gallery_prefix,
                  const std::string& scenario);

// Pools every prediction file against one ground truth. Prediction files
// written under different configuration digests are rejected.
metrics::MetricReport eval_files(const PipelineConfig& cfg, const std::filesystem::path& ground_truth,
                                 std::span<const std::filesystem::path> predictions);

struct RunFiles {
  std::filesystem::path detections;
  std::optional<std::filesystem::path> embeddings;
  std::optional<std::filesystem::path> gallery_prefix;
  std::optional<std::filesystem::path> ground_truth;
  std::filesystem::path output_dir;
  std::string scenario;
};

// Writes tracks.txt, events.jsonl and, with ground truth, metrics.json.
std::optional<metrics::MetricReport> run_files(const PipelineConfig& cfg, const RunFiles& files);

std::string metrics_json(const metrics::MetricReport& report, const std::string& digest);

}  // namespace littertrack::pipeline
