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


// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "littertrack/association.hpp"
#include "littertrack/identity.hpp"
#include "littertrack/motion_ukf.hpp"
#include "littertrack/pipeline.hpp"
#include "littertrack/postprocess.hpp"
#include "micro_scenes.hpp"
#include "oracles.hpp"

using namespace littertrack;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

io::FrameDetections frames_of(const sim::Scenario& sc) {
  io::FrameDetections out;
  for (const auto& fd : sc.detections)
    if (!fd.detections.empty()) out[fd.frame] = fd.detections;
  return out;
}

// ---- 1: assignment ----
Outcome assignment_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> dim(1, 7), num(0, 1024);
  std::bernoulli_distribution infeasible(0.2);
  int mismatches = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const int rows = dim(rng), cols = dim(rng);
    std::vector<std::vector<double>> c(rows, std::vector<double>(cols));
    std::vector<std::vector<bool>> f(rows, std::vector<bool>(cols));
    assoc::CostMatrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int k = 0; k < cols; ++k) {
        // Dyadic costs keep every partial sum exact in double precision.
        c[r][k] = num(rng) / 16.0;
        f[r][k] = !infeasible(rng);
        m.set(r, k, c[r][k], f[r][k]);
      }
    const assoc::Assignment a = assoc::hungarian(m);
    const auto ref = oracle::brute_force_assignment(c, f);
    bool ok = static_cast<int>(a.matches.size()) == ref.cardinality && a.total_cost(m) == ref.cost;
    for (auto [r, k] : a.matches) ok = ok && m.feasible(r, k);
    mismatches += !ok;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 10.0,
          fmt::format("{} matrices up to 7x7, {} mismatches, {:.2f} s", trials, mismatches, secs)};
}

// ---- 2: UKF vs linear KF ----
Outcome ukf_oracle() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(202);
  std::normal_distribution<double> g(0, 1);
  auto spd = [&](int n, double floor) {
    MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = g(rng);
    return MatrixXd(a * a.transpose() + floor * MatrixXd::Identity(n, n));
  };
  const int half = 4, n = 8;
  ukf::UkfParams p;
  const auto model = ukf::TransitionModel::constant_velocity();
  double worst = 0.0, worst_asym = 0.0, min_eig = 1e300;
  const int cycles = 10000;
  // Filter chains of 100 cycles, restarted from fresh random priors.
  ukf::MotionState s;
  oracle::Gaussian k;
  for (int c = 0; c < cycles; ++c) {
    if (c % 100 == 0) {
      VectorXd mean(n);
      for (int i = 0; i < n; ++i) mean(i) = 10 * g(rng);
      const MatrixXd cov = spd(n, 0.5);
      s = {mean, cov};
      k = {mean, cov};
    }
    const MatrixXd q = spd(n, 0.01) * 0.05;
    const MatrixXd r = spd(half, 0.1);
    VectorXd z = oracle::cv_observation(half) * k.mean;
    for (int i = 0; i < half; ++i) z(i) += g(rng);
    const double dt = 1.0 + (c % 3);

    s = ukf::update(ukf::predict(s, model, p, dt, q), z, model, p, r);
    k = oracle::kf_update(oracle::kf_predict(k, oracle::cv_transition(half, dt), q),
                          oracle::cv_observation(half), r, z);
    worst = std::max({worst, (s.mean - k.mean).cwiseAbs().maxCoeff(),
                      (s.covariance - k.cov).cwiseAbs().maxCoeff()});
    worst_asym = std::max(worst_asym, (s.covariance - s.covariance.transpose()).cwiseAbs().maxCoeff());
    min_eig = std::min(min_eig, Eigen::SelfAdjointEigenSolver<MatrixXd>(s.covariance).eigenvalues().minCoeff());
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-8 && worst_asym == 0.0 && min_eig >= 0.0 && secs < 30.0,
          fmt::format("{} cycles, max |UKF-KF| {:.2e}, max asymmetry {:.1e}, min eigenvalue {:.3e}, {:.2f} s",
                      cycles, worst, worst_asym, min_eig, secs)};
}

// ---- 3: GSI ----
Outcome gsi_oracle() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_int_distribution<int> gap_len(1, 30), seg_len(5, 40);
  const post::GsiConfig cfg;
  double worst = 0.0;
  int filled = 0;
  for (int t = 0; t < 100; ++t) {
    Track track;
    track.id = t + 1;
    track.class_label = "person";
    FrameIndex f = 1;
    const double vx = 3 * u(rng), vy = u(rng);
    for (int seg = 0; seg < 3; ++seg) {
      const int len = seg_len(rng);
      for (int i = 0; i < len; ++i, ++f) {
        const double x = 200 + vx * f + 20 * std::sin(0.05 * f) + u(rng);
        const double y = 300 + vy * f + u(rng);
        track.history[f] = {{x, y, 40 + u(rng), 100 + u(rng)}, 0.9, false};
      }
      if (seg < 2) f += gap_len(rng);
    }
    const Track out = post::gsi_interpolate(track, cfg);
    // Oracle: per gap, training frames within the context window.
    std::vector<FrameIndex> observed;
    for (const auto& [fr, e] : track.history) observed.push_back(fr);
    for (std::size_t i = 0; i + 1 < observed.size(); ++i) {
      const FrameIndex a = observed[i], b = observed[i + 1];
      if (b - a <= 1 || b - a - 1 > cfg.max_gap) continue;
      std::vector<double> x, q, l, tp, w, h;
      for (FrameIndex fr : observed) {
        if (fr < a - cfg.context || fr > b + cfg.context) continue;
        const BoundingBox& bb = track.history.at(fr).box;
        x.push_back(static_cast<double>(fr));
        l.push_back(bb.left);
        tp.push_back(bb.top);
        w.push_back(bb.width);
        h.push_back(bb.height);
      }
      for (FrameIndex fr = a + 1; fr < b; ++fr) q.push_back(static_cast<double>(fr));
      const auto ol = oracle::gp_mean(x, l, q, cfg.length_scale, cfg.noise_variance);
      const auto ot = oracle::gp_mean(x, tp, q, cfg.length_scale, cfg.noise_variance);
      const auto ow = oracle::gp_mean(x, w, q, cfg.length_scale, cfg.noise_variance);
      const auto oh = oracle::gp_mean(x, h, q, cfg.length_scale, cfg.noise_variance);
      for (std::size_t j = 0; j < q.size(); ++j) {
        const auto it = out.history.find(static_cast<FrameIndex>(q[j]));
        if (it == out.history.end() || !it->second.interpolated) return {false, "gap frame not filled"};
        const BoundingBox& bb = it->second.box;
        worst = std::max({worst, std::abs(bb.left - ol[j]), std::abs(bb.top - ot[j]),
                          std::abs(bb.width - ow[j]), std::abs(bb.height - oh[j])});
        ++filled;
      }
    }
  }
  const std::vector<double> x2{0, 2}, y2{0, 2}, q2{1};
  const double two_point = post::gp_posterior_mean(x2, y2, q2, 1.0, 0.0)[0];
  const double closed_form = 2 * std::exp(-0.5) / (1 + std::exp(-2.0));
  const double target = 1.06845;
  const bool example_ok = std::abs(two_point - target) <= 1e-5;
  return {worst <= 1e-9 && example_ok,
          fmt::format("100 tracks, {} filled frames, max |GSI-oracle| {:.2e}; 2-point example {:.7f} "
                      "(closed form {:.7f}), |value - {}| = {:.3e} vs tolerance 1e-5",
                      filled, worst, two_point, closed_form, target, std::abs(two_point - target))};
}

// ---- 4: metrics ----
Outcome metrics_oracle() {
  double worst = 0.0;
  int count = 0;
  double split_idf1 = -1, miss_mota = -1;
  for (const micro::Scene& s : micro::scenes()) {
    const auto r = metrics::evaluate(micro::to_frame_set(s));
    const auto o = oracle::evaluate(s.gt, s.pred);
    worst = std::max({worst, std::abs(r.mota - o.mota), std::abs(r.idf1 - o.idf1),
                      std::abs(r.hota - o.hota), std::abs(r.assa - o.assa), std::abs(r.deta - o.deta)});
    if (s.name == "split-track") split_idf1 = r.idf1;
    if (s.name == "single-miss") miss_mota = r.mota;
    ++count;
  }
  const bool ok = count >= 5 && worst <= 1e-9 && std::abs(split_idf1 - 0.5) <= 1e-9 &&
                  std::abs(miss_mota - 0.9) <= 1e-9;
  return {ok, fmt::format("{} micro-scenarios, max deviation {:.2e}, split-track IDF1 {}, single-miss MOTA {}",
                          count, worst, split_idf1, miss_mota)};
}

// ---- 5: noise-free end to end ----
Outcome noise_free_suite() {
  pipeline::PipelineConfig cfg;
  cfg.mode = pipeline::Mode::kImproved;
  double worst = 0.0;
  int tp = 0, fp = 0, fn = 0;
  for (const auto& spec : sim::standard_suite(sim::Profile::kNoiseFree)) {
    const sim::Scenario sc = sim::generate(spec);
    const auto r = pipeline::run(cfg, frames_of(sc), nullptr);
    const auto m = metrics::evaluate(metrics::make_frame_set(sc.truth.tracks, r.tracks));
    worst = std::max({worst, 1.0 - m.mota, 1.0 - m.idf1, 1.0 - m.hota});
    const auto lit = events::compare_events(sc.truth.events, sc.truth.tracks, r.events, r.tracks, 2, 0.3,
                                            events::EventKind::kLittering);
    const auto all = events::compare_events(sc.truth.events, sc.truth.tracks, r.events, r.tracks, 2, 0.3);
    tp += lit.true_positives;
    fn += lit.false_negatives;
    fp += all.false_positives;
  }
  return {worst <= 1e-9 && fn == 0 && fp == 0 && tp > 0,
          fmt::format("10 scenarios, max (1 - metric) {:.2e}, littering matched {}, missed {}, false events {}",
                      worst, tp, fn, fp)};
}

// ---- 6: ordering on the occlusion-heavy suite ----
Outcome occlusion_ordering() {
  struct Sum {
    double hota = 0, idf1 = 0, assa = 0;
    long idsw = 0;
  };
  const std::vector<pipeline::Mode> modes{pipeline::Mode::kImproved, pipeline::Mode::kDeepSort,
                                          pipeline::Mode::kSortBaseline};
  std::vector<Sum> sums(modes.size());
  const auto suite = sim::standard_suite(sim::Profile::kOcclusionHeavy);
  for (const auto& spec : suite) {
    const sim::Scenario sc = sim::generate(spec);
    const auto frames = frames_of(sc);
    for (std::size_t i = 0; i < modes.size(); ++i) {
      pipeline::PipelineConfig cfg;
      cfg.mode = modes[i];
      const auto r = pipeline::run(cfg, frames, nullptr);
      const auto m = metrics::evaluate(metrics::make_frame_set(sc.truth.tracks, r.tracks));
      sums[i].hota += m.hota;
      sums[i].idf1 += m.idf1;
      sums[i].assa += m.assa;
      sums[i].idsw += m.idsw;
    }
  }
  const double n = static_cast<double>(suite.size());
  for (Sum& s : sums) {
    s.hota /= n;
    s.idf1 /= n;
    s.assa /= n;
  }
  const Sum &imp = sums[0], &ds = sums[1], &sort = sums[2];
  const bool ok = imp.hota >= ds.hota && ds.hota >= sort.hota && imp.idf1 >= ds.idf1 &&
                  ds.idf1 >= sort.idf1 && imp.assa >= ds.assa && ds.assa >= sort.assa &&
                  imp.hota > sort.hota && imp.idf1 > sort.idf1 && imp.assa > sort.assa &&
                  imp.idsw < sort.idsw;
  return {ok, fmt::format("HOTA {:.4f}/{:.4f}/{:.4f}, IDF1 {:.4f}/{:.4f}/{:.4f}, AssA {:.4f}/{:.4f}/{:.4f}, "
                          "IDSW {}/{}/{} (improved/deepsort/sort)",
                          imp.hota, ds.hota, sort.hota, imp.idf1, ds.idf1, sort.idf1, imp.assa, ds.assa,
                          sort.assa, imp.idsw, ds.idsw, sort.idsw)};
}

// ---- 7: identity ----
Outcome identity_matching() {
  std::mt19937_64 rng(707);
  std::normal_distribution<double> g(0, 1);
  std::uniform_real_distribution<double> angle(0.0, 10.0 * std::numbers::pi / 180.0);
  const std::size_t dim = 512;
  const double min_sep = std::cos(30.0 * std::numbers::pi / 180.0);
  auto random_unit = [&] {
    std::vector<double> v(dim);
    double s = 0;
    for (double& x : v) s += (x = g(rng)) * x;
    for (double& x : v) x /= std::sqrt(s);
    return v;
  };
  int correct = 0, queries = 0, scale_failures = 0;
  for (int gallery_index = 0; gallery_index < 10; ++gallery_index) {
    identity::IdentityGallery gallery(dim);
    std::vector<std::vector<double>> protos;
    while (protos.size() < 50) {
      auto v = random_unit();
      bool far = true;
      for (const auto& p : protos) {
        double c = 0;
        for (std::size_t i = 0; i < dim; ++i) c += p[i] * v[i];
        far = far && c <= min_sep;
      }
      if (!far) continue;
      gallery.enroll(fmt::format("person-{:02}", protos.size()), Embedding(v.begin(), v.end()));
      protos.push_back(std::move(v));
    }
    for (int qi = 0; qi < 100; ++qi) {
      const std::size_t who = static_cast<std::size_t>(qi) % protos.size();
      const auto& p = protos[who];
      // Rotate the prototype by theta <= 10 degrees towards a random orthogonal direction.
      auto d = random_unit();
      double c = 0;
      for (std::size_t i = 0; i < dim; ++i) c += p[i] * d[i];
      double s = 0;
      for (std::size_t i = 0; i < dim; ++i) s += (d[i] -= c * p[i]) * d[i];
      const double th = angle(rng);
      Embedding q(dim);
      for (std::size_t i = 0; i < dim; ++i)
        q[i] = static_cast<float>(std::cos(th) * p[i] + std::sin(th) * d[i] / std::sqrt(s));
      const auto r = identity::match_identity(gallery, q);
      ++queries;
      correct += r.label && *r.label == fmt::format("person-{:02}", who);
      // Power-of-two scales are exact in float32, so results must agree bit for
      // bit; other scales round the query itself and agree to float precision.
      for (float k : {0.25f, 1024.0f, 0x1p-20f, 3.0f, 0.7f, 12345.0f}) {
        Embedding scaled = q;
        for (float& x : scaled) x *= k;
        const auto rs = identity::match_identity(gallery, scaled);
        const bool exact = std::exp2(std::round(std::log2(k))) == k;
        const bool same = rs.label == r.label && rs.ambiguous == r.ambiguous &&
                          (exact ? rs.similarity == r.similarity
                                 : std::abs(rs.similarity - r.similarity) <= 1e-6);
        scale_failures += !same;
      }
    }
  }
  return {correct == queries && scale_failures == 0,
          fmt::format("top-1 {}/{} over 10 galleries of 50 identities, {} scale-invariance failures "
                      "(power-of-two scales bit-exact, others within 1e-6)", correct,
                      queries, scale_failures)};
}

// ---- 8: event robustness ----
Outcome event_robustness() {
  pipeline::PipelineConfig cfg;
  int tp = 0, fp = 0, fn = 0;
  for (const auto& spec : sim::standard_suite(sim::Profile::kDefaultNoise)) {
    const sim::Scenario sc = sim::generate(spec);
    const auto r = pipeline::run(cfg, frames_of(sc), nullptr);
    const auto s = events::compare_events(sc.truth.events, sc.truth.tracks, r.events, r.tracks, 2, 0.3,
                                          events::EventKind::kLittering);
    tp += s.true_positives;
    fp += s.false_positives;
    fn += s.false_negatives;
  }
  const events::EventMatchSummary total{tp, fp, fn};
  return {total.precision() >= 0.9 && total.recall() >= 0.9,
          fmt::format("littering precision {:.3f}, recall {:.3f} (tp {}, fp {}, fn {})", total.precision(),
                      total.recall(), tp, fp, fn)};
}

// ---- 9: performance ----
Outcome performance() {
  sim::ScenarioSpec spec;
  spec.name = "perf";
  spec.seed = 909;
  spec.frame_count = 1000;
  spec.arena_width = 1920;
  spec.arena_height = 1080;
  spec.noise = {1.0, 0.05, 0.2, 5.0};
  for (int i = 0; i < 20; ++i) {
    sim::PersonScript p;
    p.identity = fmt::format("walker-{:02}", i);
    const double cx = 150.0 + 380.0 * (i % 5);
    const double base_y = 200.0 + 240.0 * (i / 5);
    for (FrameIndex f = 1; f <= 1001; f += 50) {
      const double phase = 0.3 * static_cast<double>(f) / 50.0 + i;
      p.waypoints.push_back({std::min<FrameIndex>(f, 1000), cx + 120.0 * std::sin(phase),
                             base_y + 20.0 * std::cos(1.7 * phase)});
    }
    spec.persons.push_back(p);
  }
  const sim::Scenario sc = sim::generate(spec);
  const auto frames = frames_of(sc);
  std::size_t boxes = 0;
  for (const auto& [f, d] : frames) boxes += d.size();
  pipeline::PipelineConfig cfg;
  cfg.mode = pipeline::Mode::kImproved;
  const auto t0 = Clock::now();
  const auto tracks = pipeline::track_sequence(cfg, frames);
  const double secs = seconds_since(t0);
  return {secs < 5.0, fmt::format("1000 frames, {:.1f} detections/frame, {} tracks, {:.2f} s", 
                                  static_cast<double>(boxes) / 1000.0, tracks.size(), secs)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"assignment oracle", assignment_oracle},
      {"UKF vs linear Kalman filter", ukf_oracle},
      {"GSI vs kernel-solve oracle", gsi_oracle},
      {"metrics vs from-definition oracle", metrics_oracle},
      {"noise-free end to end", noise_free_suite},
      {"occlusion-heavy mode ordering", occlusion_ordering},
      {"identity matching", identity_matching},
      {"littering precision and recall", event_robustness},
      {"tracking throughput", performance},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("[%s] %zu. %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
  return failures == 0 ? 0 : 1;
}
