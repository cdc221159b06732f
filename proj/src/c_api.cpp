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


#include "littertrack/littertrack.h"

#include <algorithm>
#include <cstring>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include <cstdlib>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "littertrack/error.hpp"
#include "littertrack/pipeline.hpp"

struct lt_config {
  littertrack::pipeline::PipelineConfig cfg;
};

struct lt_tracker {
  littertrack::io::LabelTable labels;
  littertrack::Tracker tracker;
  std::vector<lt_track_row> last_rows;
};

struct lt_gallery {
  littertrack::identity::IdentityGallery gallery;
};

namespace {

using namespace littertrack;

thread_local std::string g_last_error;

// LITTERTRACK_LOG = trace | debug | info | warn | error | off (default warn).
const bool g_log_configured = [] {
  const char* env = std::getenv("LITTERTRACK_LOG");
  spdlog::set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
  return true;
}();

lt_status fail(lt_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

// Runs `f`, translating exceptions into status codes.
template <typename F>
lt_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return LT_OK;
  } catch (const Error& e) {
    return fail(static_cast<lt_status>(static_cast<int>(e.kind())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(LT_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(LT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(LT_ERR_INTERNAL, "unknown error");
  }
}

void require(const void* p, const char* name) {
  if (p == nullptr) throw InputError(fmt::format("argument '{}' must not be NULL", name));
}

std::optional<std::filesystem::path> opt_path(const char* p) {
  if (p == nullptr || *p == '\0') return std::nullopt;
  return std::filesystem::path(p);
}

void fill_report(const metrics::MetricReport& r, lt_metric_report* out) {
  *out = {r.mota, r.idf1, r.hota, r.deta, r.assa, r.motp, r.tp, r.fp, r.fn, r.idsw, r.gt};
}

lt_track_row make_row(TrackId id, FrameIndex frame, const BoundingBox& b, double conf, int cls,
                      bool backfill) {
  return {id, frame, b.left, b.top, b.width, b.height, conf, cls, backfill ? 1 : 0};
}

void copy_rows(const std::vector<lt_track_row>& src, lt_track_row* rows, size_t capacity,
               size_t* count) {
  require(count, "count");
  *count = src.size();
  if (rows == nullptr) return;
  if (capacity < src.size()) {
    throw InputError(fmt::format("row buffer holds {} rows, {} needed", capacity, src.size()));
  }
  std::copy(src.begin(), src.end(), rows);
}

}  // namespace

extern "C" {

const char* lt_last_error(void) { return g_last_error.c_str(); }

const char* lt_version(void) { return pipeline::kEngineVersion; }

lt_status lt_config_create(lt_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new lt_config{};
  });
}

void lt_config_destroy(lt_config* cfg) { delete cfg; }

lt_status lt_config_load(lt_config* cfg, const char* path) {
  return guarded([&] {
    require(cfg, "cfg");
    require(path, "path");
    cfg->cfg.load(path);
  });
}

lt_status lt_config_set(lt_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg, "cfg");
    require(key, "key");
    require(value, "value");
    cfg->cfg.set(key, value);
  });
}

lt_status lt_config_validate(const lt_config* cfg) {
  return guarded([&] {
    require(cfg, "cfg");
    cfg->cfg.validate();
  });
}

lt_status lt_config_digest(const lt_config* cfg, char* buf, size_t size) {
  return guarded([&] {
    require(cfg, "cfg");
    require(buf, "buf");
    const std::string d = cfg->cfg.digest();
    if (size < d.size() + 1) throw InputError("digest buffer needs 17 bytes");
    std::memcpy(buf, d.c_str(), d.size() + 1);
  });
}

lt_status lt_config_canonical(const lt_config* cfg, char* buf, size_t size, size_t* needed) {
  return guarded([&] {
    require(cfg, "cfg");
    require(needed, "needed");
    const std::string text = cfg->cfg.canonical();
    *needed = text.size() + 1;
    if (buf == nullptr) return;
    if (size < text.size() + 1) throw InputError("canonical configuration buffer too small");
    std::memcpy(buf, text.c_str(), text.size() + 1);
  });
}

lt_status lt_simulate(const lt_config* cfg, lt_profile profile, uint64_t seed, const char* out_dir) {
  return guarded([&] {
    require(cfg, "cfg");
    require(out_dir, "out_dir");
    sim::Profile p;
    switch (profile) {
      case LT_PROFILE_NOISE_FREE: p = sim::Profile::kNoiseFree; break;
      case LT_PROFILE_DEFAULT_NOISE: p = sim::Profile::kDefaultNoise; break;
      case LT_PROFILE_OCCLUSION_HEAVY: p = sim::Profile::kOcclusionHeavy; break;
      default: throw InputError(fmt::format("unknown profile {}", static_cast<int>(profile)));
    }
    pipeline::simulate_to_directory(p, seed, out_dir, cfg->cfg);
  });
}

lt_status lt_track_files(const lt_config* cfg, const char* detections, const char* embeddings,
                         const char* tracks_out, const char* appearance_out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(detections, "detections");
    require(tracks_out, "tracks_out");
    pipeline::track_files(cfg->cfg, detections, opt_path(embeddings), tracks_out,
                          opt_path(appearance_out));
  });
}

lt_status lt_events_files(const lt_config* cfg, const char* tracks, const char* events_out,
                          const char* appearance, const char* gallery_prefix, const char* scenario) {
  return guarded([&] {
    require(cfg, "cfg");
    require(tracks, "tracks");
    require(events_out, "events_out");
    pipeline::events_files(cfg->cfg, tracks, events_out, opt_path(appearance),
                           opt_path(gallery_prefix), scenario == nullptr ? "" : scenario);
  });
}

lt_status lt_eval_files(const lt_config* cfg, const char* ground_truth, const char* const* predictions,
                        size_t prediction_count, lt_metric_report* out) {
  return guarded([&] {
    require(cfg, "cfg");
    require(ground_truth, "ground_truth");
    require(out, "out");
    if (prediction_count > 0) require(predictions, "predictions");
    std::vector<std::filesystem::path> preds;
    for (size_t i = 0; i < prediction_count; ++i) {
      require(predictions[i], "predictions[i]");
      preds.emplace_back(predictions[i]);
    }
    fill_report(pipeline::eval_files(cfg->cfg, ground_truth, preds), out);
  });
}

lt_status lt_run(const lt_config* cfg, const char* detections, const char* embeddings,
                 const char* gallery_prefix, const char* ground_truth, const char* out_dir,
                 lt_metric_report* report, int* has_report) {
  return guarded([&] {
    require(cfg, "cfg");
    require(detections, "detections");
    require(out_dir, "out_dir");
    pipeline::RunFiles files;
    files.detections = detections;
    files.embeddings = opt_path(embeddings);
    files.gallery_prefix = opt_path(gallery_prefix);
    files.ground_truth = opt_path(ground_truth);
    files.output_dir = out_dir;
    const auto r = pipeline::run_files(cfg->cfg, files);
    if (has_report != nullptr) *has_report = r ? 1 : 0;
    if (r && report != nullptr) fill_report(*r, report);
  });
}

lt_status lt_tracker_create(const lt_config* cfg, lt_tracker** out) {
  return guarded([&] {
    require(out, "out");
    const pipeline::PipelineConfig c = cfg ? cfg->cfg.effective() : pipeline::PipelineConfig{};
    *out = new lt_tracker{c.labels, Tracker(c.tracker), {}};
  });
}

void lt_tracker_destroy(lt_tracker* tracker) { delete tracker; }

lt_status lt_tracker_step(lt_tracker* tracker, int64_t frame, const lt_detection* detections,
                          size_t detection_count, size_t* row_count) {
  return guarded([&] {
    require(tracker, "tracker");
    if (detection_count > 0) require(detections, "detections");
    std::vector<Detection> dets;
    dets.reserve(detection_count);
    for (size_t i = 0; i < detection_count; ++i) {
      const lt_detection& d = detections[i];
      require(d.class_label, "class_label");
      Detection out;
      out.frame = frame;
      out.box = {d.left, d.top, d.width, d.height};
      out.confidence = d.confidence;
      out.class_label = d.class_label;
      if (d.embedding != nullptr) out.embedding = Embedding(d.embedding, d.embedding + d.embedding_dim);
      dets.push_back(std::move(out));
    }
    const auto rows = tracker->tracker.step(frame, dets);
    tracker->last_rows.clear();
    for (const TrackOutput& r : rows) {
      tracker->last_rows.push_back(
          make_row(r.id, r.frame, r.box, r.confidence, tracker->labels.id(r.class_label), r.backfill));
    }
    if (row_count != nullptr) *row_count = tracker->last_rows.size();
  });
}

lt_status lt_tracker_rows(const lt_tracker* tracker, lt_track_row* rows, size_t capacity, size_t* count) {
  return guarded([&] {
    require(tracker, "tracker");
    copy_rows(tracker->last_rows, rows, capacity, count);
  });
}

lt_status lt_tracker_export(const lt_tracker* tracker, lt_track_row* rows, size_t capacity, size_t* count) {
  return guarded([&] {
    require(tracker, "tracker");
    std::vector<lt_track_row> all;
    for (const Track& t : tracker->tracker.export_tracks()) {
      const int cls = tracker->labels.id(t.class_label);
      for (const auto& [f, e] : t.history) all.push_back(make_row(t.id, f, e.box, e.confidence, cls, false));
    }
    copy_rows(all, rows, capacity, count);
  });
}

lt_status lt_gallery_create(size_t dimension, lt_gallery** out) {
  return guarded([&] {
    require(out, "out");
    *out = new lt_gallery{identity::IdentityGallery(dimension)};
  });
}

lt_status lt_gallery_load(const char* prefix, lt_gallery** out) {
  return guarded([&] {
    require(prefix, "prefix");
    require(out, "out");
    *out = new lt_gallery{io::load_gallery(prefix)};
  });
}

void lt_gallery_destroy(lt_gallery* gallery) { delete gallery; }

lt_status lt_gallery_save(const lt_gallery* gallery, const char* prefix) {
  return guarded([&] {
    require(gallery, "gallery");
    require(prefix, "prefix");
    io::save_gallery(prefix, gallery->gallery);
  });
}

lt_status lt_gallery_enroll(lt_gallery* gallery, const char* label, const float* embedding,
                            size_t dimension, const char* metadata) {
  return guarded([&] {
    require(gallery, "gallery");
    require(label, "label");
    require(embedding, "embedding");
    gallery->gallery.enroll(label, std::span<const float>(embedding, dimension),
                            metadata == nullptr ? "" : metadata);
  });
}

size_t lt_gallery_size(const lt_gallery* gallery) { return gallery ? gallery->gallery.size() : 0; }

size_t lt_gallery_dimension(const lt_gallery* gallery) {
  return gallery ? gallery->gallery.dimension() : 0;
}

lt_status lt_gallery_match(const lt_gallery* gallery, const lt_config* cfg, const float* query,
                           size_t dimension, lt_match* out) {
  return guarded([&] {
    require(gallery, "gallery");
    require(query, "query");
    require(out, "out");
    const identity::MatchOptions opts = cfg ? cfg->cfg.identity : identity::MatchOptions{};
    const auto m = identity::match_identity(gallery->gallery, std::span<const float>(query, dimension), opts);
    *out = lt_match{};
    out->matched = m.label ? 1 : 0;
    if (m.label) {
      const size_t n = std::min(m.label->size(), sizeof(out->label) - 1);
      std::memcpy(out->label, m.label->data(), n);
      out->label[n] = '\0';
    }
    out->similarity = m.similarity;
    out->margin_logit = m.margin_logit;
    out->ambiguous = m.ambiguous ? 1 : 0;
  });
}

double lt_arcface_logit(double cos_theta, double margin, double scale) {
  return identity::arcface_logit(cos_theta, margin, scale);
}

}  // extern "C"
