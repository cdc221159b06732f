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


#include "littertrack/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>
#include <json.hpp>

#include "littertrack/error.hpp"

namespace littertrack::pipeline {

namespace fs = std::filesystem;

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::kSortBaseline: return "sort-baseline";
    case Mode::kDeepSort: return "deepsort";
    case Mode::kImproved: return "improved";
  }
  return "unknown";
}

Mode parse_mode(const std::string& text) {
  if (text == "sort-baseline") return Mode::kSortBaseline;
  if (text == "deepsort") return Mode::kDeepSort;
  if (text == "improved") return Mode::kImproved;
  throw ConfigError(fmt::format("unknown mode '{}' (expected sort-baseline, deepsort or improved)", text));
}

namespace {

struct Field {
  std::function<std::string(const PipelineConfig&)> get;
  std::function<void(PipelineConfig&, const std::string&)> set;
};

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty()) {
    throw ConfigError(fmt::format("{}: '{}' is not a number", key, v));
  }
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || p != v.data() + v.size() || v.empty()) {
    throw ConfigError(fmt::format("{}: '{}' is not an integer", key, v));
  }
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, v));
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

#define LT_DOUBLE(key, member)                                                             \
  {key, Field{[](const PipelineConfig& c) { return fmt::format("{}", c.member); },         \
              [](PipelineConfig& c, const std::string& v) { c.member = to_double(key, v); }}}
#define LT_INT(key, member)                                                                \
  {key, Field{[](const PipelineConfig& c) { return fmt::format("{}", c.member); },         \
              [](PipelineConfig& c, const std::string& v) {                                \
                c.member = static_cast<decltype(c.member)>(to_integer(key, v));            \
              }}}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> kFields = {
      {"mode", Field{[](const PipelineConfig& c) { return std::string(to_string(c.mode)); },
                     [](PipelineConfig& c, const std::string& v) { c.mode = parse_mode(v); }}},
      {"streaming",
       Field{[](const PipelineConfig& c) { return std::string(c.streaming ? "true" : "false"); },
             [](PipelineConfig& c, const std::string& v) { c.streaming = to_bool("streaming", v); }}},
      LT_INT("tracker.n_init", tracker.n_init),
      LT_INT("tracker.max_age", tracker.max_age),
      LT_DOUBLE("tracker.ema_alpha", tracker.ema_alpha),
      LT_DOUBLE("tracker.min_confidence", tracker.min_confidence),
      LT_DOUBLE("association.lambda_m", tracker.association.lambda_m),
      LT_DOUBLE("association.lambda_a", tracker.association.lambda_a),
      LT_DOUBLE("association.motion_gate", tracker.association.motion_gate),
      LT_DOUBLE("association.appearance_gate", tracker.association.appearance_gate),
      LT_DOUBLE("association.infeasible_cost", tracker.association.infeasible_cost),
      LT_DOUBLE("ukf.alpha", tracker.ukf.alpha),
      LT_DOUBLE("ukf.beta", tracker.ukf.beta),
      LT_DOUBLE("ukf.kappa", tracker.ukf.kappa),
      LT_DOUBLE("ukf.process_position", tracker.ukf.process_position),
      LT_DOUBLE("ukf.process_velocity", tracker.ukf.process_velocity),
      LT_DOUBLE("ukf.measurement_position", tracker.ukf.measurement_position),
      LT_DOUBLE("ukf.process_aspect", tracker.ukf.process_aspect),
      LT_DOUBLE("ukf.process_aspect_velocity", tracker.ukf.process_aspect_velocity),
      LT_DOUBLE("ukf.measurement_aspect", tracker.ukf.measurement_aspect),
      LT_DOUBLE("ukf.min_height", tracker.ukf.min_height),
      LT_DOUBLE("ukf.min_aspect", tracker.ukf.min_aspect),
      LT_DOUBLE("gsi.length_scale", gsi.length_scale),
      LT_DOUBLE("gsi.noise_variance", gsi.noise_variance),
      LT_INT("gsi.max_gap", gsi.max_gap),
      LT_INT("gsi.context", gsi.context),
      LT_INT("aflink.max_frame_gap", aflink.max_frame_gap),
      LT_DOUBLE("aflink.max_prediction_error", aflink.max_prediction_error),
      LT_INT("aflink.min_tracklet_length", aflink.min_tracklet_length),
      LT_DOUBLE("aflink.score_threshold", aflink.score_threshold),
      LT_INT("aflink.velocity_window", aflink.velocity_window),
      LT_DOUBLE("events.zero_area_epsilon", events.zero_area_epsilon),
      LT_INT("events.separation_window", events.separation_window),
      LT_DOUBLE("events.min_separation_slope", events.min_separation_slope),
      LT_INT("events.min_contact_frames", events.min_contact_frames),
      LT_DOUBLE("events.vertical_shift_min", events.vertical_shift_min),
      LT_INT("events.debounce_frames", events.debounce_frames),
      LT_DOUBLE("events.person_margin", events.person_margin),
      {"events.person_class",
       Field{[](const PipelineConfig& c) { return c.events.person_class; },
             [](PipelineConfig& c, const std::string& v) {
               if (v.empty()) throw ConfigError("events.person_class must not be empty");
               c.events.person_class = v;
             }}},
      {"events.litter_classes",
       Field{[](const PipelineConfig& c) {
               std::string out;
               for (const auto& s : c.events.litter_classes) out += (out.empty() ? "" : ",") + s;
               return out;
             },
             [](PipelineConfig& c, const std::string& v) {
               std::set<std::string> classes;
               std::stringstream ss(v);
               std::string item;
               while (std::getline(ss, item, ',')) {
                 item = trim(item);
                 if (!item.empty()) classes.insert(item);
               }
               c.events.litter_classes = std::move(classes);
             }}},
      LT_DOUBLE("identity.threshold", identity.threshold),
      LT_DOUBLE("identity.arcface_margin", identity.arcface_margin),
      LT_DOUBLE("identity.arcface_scale", identity.arcface_scale),
      LT_DOUBLE("metrics.iou_threshold", iou_threshold),
  };
  return kFields;
}

#undef LT_DOUBLE
#undef LT_INT

[[noreturn]] void rethrow(ErrorKind kind, const std::string& msg) {
  switch (kind) {
    case ErrorKind::kInput: throw InputError(msg);
    case ErrorKind::kNumerical: throw NumericalError(msg);
    case ErrorKind::kConfig: throw ConfigError(msg);
    case ErrorKind::kInternal: break;
  }
  throw Error(ErrorKind::kInternal, msg);
}

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    rethrow(e.kind(), fmt::format("{} stage failed: {}", name, e.what()));
  } catch (const std::bad_alloc&) {
    throw;
  } catch (const std::exception& e) {
    rethrow(ErrorKind::kInternal, fmt::format("{} stage failed: {}", name, e.what()));
  }
}

}  // namespace

void PipelineConfig::set(const std::string& key, const std::string& value) {
  const std::string k = trim(key);
  const std::string v = trim(value);
  if (k.rfind("labels.", 0) == 0) {
    labels.set(static_cast<int>(to_integer(k, k.substr(7))), v);
    return;
  }
  auto it = fields().find(k);
  if (it == fields().end()) throw ConfigError(fmt::format("unknown configuration key '{}'", k));
  it->second.set(*this, v);
}

void PipelineConfig::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open configuration file '{}'", path.string()));
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("{}:{}: expected 'key = value'", path.string(), n));
    }
    try {
      set(line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("{}:{}: {}", path.string(), n, e.what()));
    } catch (const InputError& e) {
      throw ConfigError(fmt::format("{}:{}: {}", path.string(), n, e.what()));
    }
  }
}

void PipelineConfig::validate() const {
  tracker.validate();
  gsi.validate();
  aflink.validate();
  events.validate();
  if (!(identity.threshold >= -1.0 && identity.threshold <= 1.0)) {
    throw ConfigError("identity.threshold must lie in [-1, 1]");
  }
  if (!(identity.arcface_scale > 0.0)) throw ConfigError("identity.arcface_scale must be > 0");
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw ConfigError("metrics.iou_threshold must lie in (0, 1]");
  }
  if (streaming && mode == Mode::kImproved) {
    throw ConfigError("streaming requires an online mode (sort-baseline or deepsort); "
                      "improved mode post-processes finished tracks");
  }
}

PipelineConfig PipelineConfig::effective() const {
  PipelineConfig out = *this;
  if (mode == Mode::kSortBaseline) out.tracker.association.lambda_a = 0.0;
  return out;
}

std::string PipelineConfig::canonical() const {
  const PipelineConfig eff = effective();
  std::string out;
  for (const auto& [key, field] : fields()) out += fmt::format("{} = {}\n", key, field.get(eff));
  for (const auto& [id, label] : eff.labels.entries()) out += fmt::format("labels.{} = {}\n", id, label);
  return out;
}

std::string PipelineConfig::digest() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

std::vector<Track> track_sequence(const PipelineConfig& config, const io::FrameDetections& frames) {
  const PipelineConfig cfg = config.effective();
  std::vector<Track> tracks = stage("track", [&] {
    Tracker tracker(cfg.tracker);
    if (!frames.empty()) {
      const std::vector<Detection> none;
      for (FrameIndex f = frames.begin()->first; f <= frames.rbegin()->first; ++f) {
        auto it = frames.find(f);
        tracker.step(f, it == frames.end() ? none : it->second);
      }
    }
    return tracker.export_tracks();
  });
  if (!cfg.postprocess_enabled()) return tracks;
  tracks = stage("aflink", [&] { return post::link_tracklets(std::move(tracks), cfg.aflink); });
  return stage("gsi", [&] {
    std::vector<Track> out;
    out.reserve(tracks.size());
    for (const Track& t : tracks) out.push_back(post::gsi_interpolate(t, cfg.gsi));
    return out;
  });
}

namespace {

void attach_identities(std::vector<events::EventRecord>& evs, std::span<const Track> tracks,
                       const identity::IdentityGallery* gallery, const identity::MatchOptions& opts) {
  if (gallery == nullptr) return;
  for (auto& e : evs) {
    if (!e.person_track) continue;
    const auto it = std::find_if(tracks.begin(), tracks.end(),
                                 [&](const Track& t) { return t.id == *e.person_track; });
    if (it == tracks.end() || it->appearance.empty()) continue;
    if (it->appearance.size() != gallery->dimension()) {
      throw ConfigError(fmt::format("track appearance dimension {} does not match gallery dimension {}",
                                    it->appearance.size(), gallery->dimension()));
    }
    const auto m = identity::match_identity(*gallery, it->appearance, opts);
    e.identity = m.label;
  }
}

void sort_events(std::vector<events::EventRecord>& evs) {
  std::sort(evs.begin(), evs.end(), [](const events::EventRecord& a, const events::EventRecord& b) {
    return std::make_tuple(a.frame, a.litter_track, static_cast<int>(a.kind)) <
           std::make_tuple(b.frame, b.litter_track, static_cast<int>(b.kind));
  });
}

}  // namespace

std::vector<events::EventRecord> detect_events(const PipelineConfig& cfg, std::span<const Track> tracks,
                                               const identity::IdentityGallery* gallery) {
  auto evs = stage("events", [&] { return events::detect_events(tracks, cfg.events); });
  stage("identity", [&] { attach_identities(evs, tracks, gallery, cfg.identity); });
  return evs;
}

RunResult run(const PipelineConfig& config, const io::FrameDetections& frames,
              const identity::IdentityGallery* gallery) {
  stage("config", [&] { config.validate(); });
  const PipelineConfig cfg = config.effective();
  RunResult out;
  if (!cfg.streaming) {
    out.tracks = track_sequence(cfg, frames);
    out.events = detect_events(cfg, out.tracks, gallery);
    return out;
  }

  // Rows of newly confirmed tracks reach back n_init - 1 frames.
  const FrameIndex lag = std::max(0, cfg.tracker.n_init - 1);
  Tracker tracker(cfg.tracker);
  events::StreamingEventDetector detector(cfg.events);
  stage("track", [&] {
    if (frames.empty()) return;
    const std::vector<Detection> none;
    for (FrameIndex f = frames.begin()->first; f <= frames.rbegin()->first; ++f) {
      auto it = frames.find(f);
      for (const TrackOutput& row : tracker.step(f, it == frames.end() ? none : it->second)) {
        detector.observe(row.id, row.class_label, row.frame, row.box);
      }
      auto released = stage("events", [&] { return detector.advance(f - lag); });
      out.events.insert(out.events.end(), released.begin(), released.end());
    }
  });
  auto rest = stage("events", [&] { return detector.finish(); });
  out.events.insert(out.events.end(), rest.begin(), rest.end());
  out.tracks = tracker.export_tracks();
  sort_events(out.events);
  stage("identity", [&] { attach_identities(out.events, out.tracks, gallery, cfg.identity); });
  return out;
}

namespace {

io::Header output_header(const PipelineConfig& cfg, const std::string& source, const std::string& scenario) {
  const PipelineConfig eff = cfg.effective();
  io::Header h;
  h["source"] = source;
  h["engine"] = kEngineVersion;
  h["digest"] = cfg.digest();
  h["mode"] = to_string(cfg.mode);
  h["association.lambda_m"] = fmt::format("{}", eff.tracker.association.lambda_m);
  h["association.lambda_a"] = fmt::format("{}", eff.tracker.association.lambda_a);
  if (!scenario.empty()) h["scenario"] = scenario;
  return h;
}

io::FrameDetections load_detections(const PipelineConfig& cfg, const fs::path& detections,
                                    const std::optional<fs::path>& embeddings, std::string* scenario) {
  return stage("ingest", [&] {
    io::DetectionFile file = io::parse_detections(detections, cfg.labels);
    if (scenario != nullptr && scenario->empty() && file.header.contains("scenario")) {
      *scenario = file.header.at("scenario");
    }
    if (embeddings) io::attach_embeddings(file.frames, io::load_embeddings(*embeddings));
    return std::move(file.frames);
  });
}

void write_appearance(const fs::path& path, std::span<const Track> tracks, const std::string& digest) {
  io::EmbeddingFile file;
  file.meta = digest;
  for (const Track& t : tracks) {
    if (t.appearance.empty()) {
      file.partial = true;
      continue;
    }
    file.dimension = static_cast<std::uint32_t>(t.appearance.size());
    file.vectors[{0, static_cast<std::uint32_t>(t.id)}] = t.appearance;
  }
  if (file.dimension == 0) file.dimension = 1;
  io::write_embeddings(path, file);
}

std::optional<identity::IdentityGallery> load_gallery_opt(const std::optional<fs::path>& prefix) {
  if (!prefix) return std::nullopt;
  return stage("gallery", [&] { return io::load_gallery(*prefix); });
}

}  // namespace

SimulateOutputs simulate_to_directory(sim::Profile profile, std::uint64_t seed, const fs::path& dir,
                                      const PipelineConfig& cfg) {
  const std::string name = fmt::format("{}-seed{}", sim::to_string(profile), seed);
  const sim::Scenario sc = stage("simulate", [&] {
    return sim::generate(sim::make_scenario(profile, seed, name));
  });
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError(fmt::format("cannot create directory '{}'", dir.string()));

  SimulateOutputs out{dir / "detections.txt", dir / "embeddings.emb", dir / "gt.txt",
                      dir / "gt_events.jsonl", dir / "gallery"};
  io::FrameDetections frames;
  for (const auto& fd : sc.detections) {
    if (!fd.detections.empty()) frames[fd.frame] = fd.detections;
  }
  io::Header header;
  header["source"] = "simulate";
  header["engine"] = kEngineVersion;
  header["digest"] = cfg.digest();
  header["scenario"] = name;
  header["profile"] = sim::to_string(profile);
  header["seed"] = fmt::format("{}", seed);
  header["frames"] = fmt::format("{}", sc.spec.frame_count);
  io::write_detections(out.detections, frames, cfg.labels, header);
  io::write_embeddings(out.embeddings, io::collect_embeddings(
                                           frames, static_cast<std::uint32_t>(sc.spec.embedding_dim),
                                           cfg.digest()));
  header["source"] = "ground-truth";
  io::write_tracks(out.ground_truth, sc.truth.tracks, cfg.labels, header);
  io::write_events(out.events, sc.truth.events, {name, cfg.digest(), kEngineVersion});

  identity::IdentityGallery gallery(sc.spec.embedding_dim);
  for (const auto& [label, emb] : sc.truth.identity_embeddings) {
    gallery.enroll(label, emb, "scenario=" + name);
  }
  io::save_gallery(out.gallery_prefix, gallery);
  return out;
}

void track_files(const PipelineConfig& cfg, const fs::path& detections,
                 const std::optional<fs::path>& embeddings, const fs::path& tracks_out,
                 const std::optional<fs::path>& appearance) {
  stage("config", [&] { cfg.validate(); });
  std::string scenario;
  const auto frames = load_detections(cfg, detections, embeddings, &scenario);
  const auto tracks = track_sequence(cfg, frames);
  stage("write", [&] {
    io::write_tracks(tracks_out, tracks, cfg.labels, output_header(cfg, "track", scenario));
    if (appearance) write_appearance(*appearance, tracks, cfg.digest());
  });
}

void events_files(const PipelineConfig& cfg, const fs::path& tracks_path, const fs::path& events_out,
                  const std::optional<fs::path>& appearance, const std::optional<fs::path>& gallery_prefix,
                  const std::string& scenario) {
  stage("config", [&] { cfg.validate(); });
  io::TrackFile file = stage("ingest", [&] {
    io::TrackFile f = io::parse_tracks(tracks_path, cfg.labels);
    if (appearance) {
      const io::EmbeddingFile emb = io::load_embeddings(*appearance);
      for (Track& t : f.tracks) {
        auto it = emb.vectors.find({0, static_cast<std::uint32_t>(t.id)});
        if (it != emb.vectors.end()) t.appearance = it->second;
      }
    }
    return f;
  });
  const auto gallery = load_gallery_opt(gallery_prefix);
  const auto evs = detect_events(cfg, file.tracks, gallery ? &*gallery : nullptr);
  std::string name = scenario;
  if (name.empty() && file.header.contains("scenario")) name = file.header.at("scenario");
  stage("write", [&] { io::write_events(events_out, evs, {name, cfg.digest(), kEngineVersion}); });
}

metrics::MetricReport eval_files(const PipelineConfig& cfg, const fs::path& ground_truth,
                                 std::span<const fs::path> predictions) {
  return stage("eval", [&] {
    if (predictions.empty()) throw InputError("no prediction files given");
    const io::TrackFile gt = io::parse_tracks(ground_truth, cfg.labels);
    std::vector<Track> pooled;
    std::optional<std::string> digest;
    for (const fs::path& p : predictions) {
      io::TrackFile f = io::parse_tracks(p, cfg.labels);
      const std::string d = f.header.contains("digest") ? f.header.at("digest") : "";
      if (digest && *digest != d) {
        throw InputError(fmt::format("'{}' was produced under configuration digest '{}', expected '{}'",
                                     p.string(), d, *digest));
      }
      digest = d;
      pooled.insert(pooled.end(), f.tracks.begin(), f.tracks.end());
    }
    if (predictions.size() > 1) {
      // Several files for the same sequence: ids must not collide.
      std::set<TrackId> ids;
      for (const Track& t : pooled) {
        if (!ids.insert(t.id).second) {
          throw InputError(fmt::format("track id {} appears in more than one prediction file", t.id));
        }
      }
    }
    return metrics::evaluate(metrics::make_frame_set(gt.tracks, pooled), cfg.iou_threshold);
  });
}

std::string metrics_json(const metrics::MetricReport& r, const std::string& digest) {
  nlohmann::ordered_json j;
  j["digest"] = digest;
  j["engine"] = kEngineVersion;
  j["mota"] = r.mota;
  j["idf1"] = r.idf1;
  j["hota"] = r.hota;
  j["deta"] = r.deta;
  j["assa"] = r.assa;
  j["motp"] = r.motp;
  j["tp"] = r.tp;
  j["fp"] = r.fp;
  j["fn"] = r.fn;
  j["idsw"] = r.idsw;
  j["gt"] = r.gt;
  return j.dump(2) + "\n";
}

std::optional<metrics::MetricReport> run_files(const PipelineConfig& cfg, const RunFiles& files) {
  stage("config", [&] { cfg.validate(); });
  std::string scenario = files.scenario;
  const auto frames = load_detections(cfg, files.detections, files.embeddings, &scenario);
  const auto gallery = load_gallery_opt(files.gallery_prefix);
  if (gallery && files.embeddings) {
    const auto dim = io::load_embeddings(*files.embeddings).dimension;
    if (dim != gallery->dimension()) {
      throw ConfigError(fmt::format("embedding dimension {} does not match gallery dimension {}", dim,
                                    gallery->dimension()));
    }
  }
  const RunResult result = run(cfg, frames, gallery ? &*gallery : nullptr);

  std::error_code ec;
  fs::create_directories(files.output_dir, ec);
  if (ec) throw InputError(fmt::format("cannot create directory '{}'", files.output_dir.string()));
  const fs::path tracks_path = files.output_dir / "tracks.txt";
  stage("write", [&] {
    io::write_tracks(tracks_path, result.tracks, cfg.labels, output_header(cfg, "run", scenario));
    write_appearance(files.output_dir / "tracks.emb", result.tracks, cfg.digest());
    io::write_events(files.output_dir / "events.jsonl", result.events,
                     {scenario, cfg.digest(), kEngineVersion});
  });
  if (!files.ground_truth) return std::nullopt;
  const fs::path preds[] = {tracks_path};
  const auto report = eval_files(cfg, *files.ground_truth, preds);
  stage("write", [&] { io::atomic_write(files.output_dir / "metrics.json", metrics_json(report, cfg.digest())); });
  return report;
}

}  // namespace littertrack::pipeline
