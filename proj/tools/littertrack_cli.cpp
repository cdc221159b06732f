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


// Command-line front end over the C API.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "littertrack/littertrack.h"

namespace {

struct ConfigOptions {
  std::string file;
  std::vector<std::string> sets;
};

void add_config_options(CLI::App* app, ConfigOptions& opts) {
  app->add_option("--config", opts.file, "key = value configuration file");
  app->add_option("--set", opts.sets, "override, key=value (repeatable)");
}

int report(lt_status status) {
  if (status != LT_OK) std::fprintf(stderr, "error: %s\n", lt_last_error());
  return static_cast<int>(status);
}

// Owns an lt_config built from --config and --set.
class Config {
 public:
  Config() { status_ = lt_config_create(&cfg_); }
  ~Config() { lt_config_destroy(cfg_); }
  Config(const Config&) = delete;
  Config& operator=(const Config&) = delete;

  lt_status apply(const ConfigOptions& opts) {
    if (status_ != LT_OK) return status_;
    if (!opts.file.empty()) {
      if (lt_status s = lt_config_load(cfg_, opts.file.c_str()); s != LT_OK) return s;
    }
    for (const std::string& kv : opts.sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
        return LT_ERR_USAGE;
      }
      const std::string key = kv.substr(0, eq);
      const std::string value = kv.substr(eq + 1);
      if (lt_status s = lt_config_set(cfg_, key.c_str(), value.c_str()); s != LT_OK) return s;
    }
    return lt_config_validate(cfg_);
  }
  const lt_config* get() const { return cfg_; }

 private:
  lt_config* cfg_ = nullptr;
  lt_status status_ = LT_OK;
};

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

void print_report(const lt_metric_report& r) {
  std::printf("MOTA  %.6f\nIDF1  %.6f\nHOTA  %.6f\nDetA  %.6f\nAssA  %.6f\nMOTP  %.6f\n", r.mota, r.idf1,
              r.hota, r.deta, r.assa, r.motp);
  std::printf("TP %lld  FP %lld  FN %lld  IDSW %lld  GT %lld\n", static_cast<long long>(r.tp),
              static_cast<long long>(r.fp), static_cast<long long>(r.fn), static_cast<long long>(r.idsw),
              static_cast<long long>(r.gt));
}

// Whitespace- or comma-separated floats.
bool read_vector(const std::string& path, std::vector<float>& out) {
  std::ifstream in(path);
  if (!in) {
    std::fprintf(stderr, "error: cannot open '%s'\n", path.c_str());
    return false;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  for (char& c : text) {
    if (c == ',') c = ' ';
  }
  std::istringstream values(text);
  std::string token;
  while (values >> token) {
    char* end = nullptr;
    const float v = std::strtof(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') {
      std::fprintf(stderr, "error: '%s': bad number '%s'\n", path.c_str(), token.c_str());
      return false;
    }
    out.push_back(v);
  }
  if (out.empty()) {
    std::fprintf(stderr, "error: '%s' holds no values\n", path.c_str());
    return false;
  }
  return true;
}

bool file_exists(const std::string& path) { return std::ifstream(path).good(); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Litter event detection and multi-object tracking"};
  app.require_subcommand(1);
  app.set_version_flag("--version", lt_version());
  ConfigOptions copts;

  auto* sim = app.add_subcommand("simulate", "generate a synthetic scenario");
  std::string profile = "default-noise", sim_out;
  std::uint64_t seed = 1;
  sim->add_option("--profile", profile, "noise-free | default-noise | occlusion-heavy")
      ->check(CLI::IsMember({"noise-free", "default-noise", "occlusion-heavy"}));
  sim->add_option("--seed", seed, "scenario seed");
  sim->add_option("--out", sim_out, "output directory")->required();
  add_config_options(sim, copts);

  auto* track = app.add_subcommand("track", "track a detection file");
  std::string detections, embeddings, tracks_out, appearance;
  track->add_option("--detections", detections)->required();
  track->add_option("--embeddings", embeddings, "EMB1 file keyed by (frame, detection index)");
  track->add_option("--out", tracks_out, "tracks file")->required();
  track->add_option("--appearance", appearance, "write per-track appearance vectors here");
  add_config_options(track, copts);

  auto* ev = app.add_subcommand("events", "detect littering and cleaning events in a tracks file");
  std::string ev_tracks, ev_out, ev_appearance, gallery, scenario;
  ev->add_option("--tracks", ev_tracks)->required();
  ev->add_option("--out", ev_out, "events file (JSON lines)")->required();
  ev->add_option("--appearance", ev_appearance, "per-track appearance file from 'track'");
  ev->add_option("--gallery", gallery, "gallery prefix");
  ev->add_option("--scenario", scenario);
  add_config_options(ev, copts);

  auto* eval = app.add_subcommand("eval", "score predicted tracks against ground truth");
  std::string gt;
  std::vector<std::string> preds;
  eval->add_option("--gt", gt)->required();
  eval->add_option("--pred", preds, "prediction tracks file (repeatable)")->required();
  add_config_options(eval, copts);

  auto* gal = app.add_subcommand("gallery", "manage the identity gallery");
  gal->require_subcommand(1);
  auto* enroll = gal->add_subcommand("enroll", "add or replace an identity");
  std::string label, vector_file, metadata;
  enroll->add_option("--gallery", gallery, "gallery prefix")->required();
  enroll->add_option("--label", label)->required();
  enroll->add_option("--vector", vector_file, "text file of floats")->required();
  enroll->add_option("--metadata", metadata);
  auto* match = gal->add_subcommand("match", "look up the closest identity");
  match->add_option("--gallery", gallery, "gallery prefix")->required();
  match->add_option("--vector", vector_file, "text file of floats")->required();
  add_config_options(match, copts);

  auto* run = app.add_subcommand("run", "full pipeline: track, post-process, events, identities");
  std::string run_out;
  run->add_option("--detections", detections)->required();
  run->add_option("--embeddings", embeddings);
  run->add_option("--gallery", gallery, "gallery prefix");
  run->add_option("--gt", gt, "ground truth tracks; writes metrics.json");
  run->add_option("--out", run_out, "output directory")->required();
  add_config_options(run, copts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(LT_ERR_USAGE);
  }

  Config cfg;
  if (lt_status s = cfg.apply(copts); s != LT_OK) return report(s);

  if (*sim) {
    const lt_profile p = profile == "noise-free"      ? LT_PROFILE_NOISE_FREE
                         : profile == "default-noise" ? LT_PROFILE_DEFAULT_NOISE
                                                      : LT_PROFILE_OCCLUSION_HEAVY;
    return report(lt_simulate(cfg.get(), p, seed, sim_out.c_str()));
  }
  if (*track) {
    return report(lt_track_files(cfg.get(), detections.c_str(), opt(embeddings), tracks_out.c_str(),
                                 opt(appearance)));
  }
  if (*ev) {
    return report(lt_events_files(cfg.get(), ev_tracks.c_str(), ev_out.c_str(), opt(ev_appearance),
                                  opt(gallery), opt(scenario)));
  }
  if (*eval) {
    std::vector<const char*> ptrs;
    for (const auto& p : preds) ptrs.push_back(p.c_str());
    lt_metric_report r{};
    const lt_status s = lt_eval_files(cfg.get(), gt.c_str(), ptrs.data(), ptrs.size(), &r);
    if (s == LT_OK) print_report(r);
    return report(s);
  }
  if (*enroll) {
    std::vector<float> v;
    if (!read_vector(vector_file, v)) return LT_ERR_INPUT;
    lt_gallery* g = nullptr;
    lt_status s = file_exists(gallery + ".emb") ? lt_gallery_load(gallery.c_str(), &g)
                                                : lt_gallery_create(v.size(), &g);
    if (s == LT_OK) s = lt_gallery_enroll(g, label.c_str(), v.data(), v.size(), metadata.c_str());
    if (s == LT_OK) s = lt_gallery_save(g, gallery.c_str());
    if (s == LT_OK) std::printf("%zu identities\n", lt_gallery_size(g));
    lt_gallery_destroy(g);
    return report(s);
  }
  if (*match) {
    std::vector<float> v;
    if (!read_vector(vector_file, v)) return LT_ERR_INPUT;
    lt_gallery* g = nullptr;
    lt_status s = lt_gallery_load(gallery.c_str(), &g);
    lt_match m{};
    if (s == LT_OK) s = lt_gallery_match(g, cfg.get(), v.data(), v.size(), &m);
    if (s == LT_OK) {
      std::printf("label       %s\nsimilarity  %.6f\nlogit       %.6f\nambiguous   %s\n",
                  m.matched ? m.label : "(none)", m.similarity, m.margin_logit, m.ambiguous ? "yes" : "no");
    }
    lt_gallery_destroy(g);
    return report(s);
  }
  if (*run) {
    lt_metric_report r{};
    int has_report = 0;
    const lt_status s = lt_run(cfg.get(), detections.c_str(), opt(embeddings), opt(gallery), opt(gt),
                               run_out.c_str(), &r, &has_report);
    if (s == LT_OK && has_report) print_report(r);
    return report(s);
  }
  return LT_ERR_USAGE;
}
