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

#include "littertrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <fmt/format.h>

#include "littertrack/association.hpp"

namespace littertrack::metrics {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

const std::vector<LabeledBox>& boxes_at(
    const std::map<FrameIndex, std::vector<LabeledBox>>& m, FrameIndex f) {
  static const std::vector<LabeledBox> kEmpty;
  auto it = m.find(f);
  return it == m.end() ? kEmpty : it->second;
}

std::set<FrameIndex> all_frames(const LabeledFrameSet& data) {
  std::set<FrameIndex> frames;
  for (const auto& [f, v] : data.ground_truth) frames.insert(f);
  for (const auto& [f, v] : data.predictions) frames.insert(f);
  return frames;
}

void require_ground_truth(const LabeledFrameSet& data, const char* metric) {
  if (data.gt_count() == 0) {
    throw UndefinedMetricError(
        fmt::format("{} is undefined without ground-truth boxes", metric));
  }
}

// Dense index for arbitrary track ids, in ascending id order.
std::map<TrackId, int> index_ids(
    const std::map<FrameIndex, std::vector<LabeledBox>>& m) {
  std::map<TrackId, int> out;
  for (const auto& [f, boxes] : m) {
    for (const LabeledBox& b : boxes) out.emplace(b.id, 0);
  }
  int next = 0;
  for (auto& [id, idx] : out) idx = next++;
  return out;
}

}  // namespace

std::size_t LabeledFrameSet::gt_count() const {
  std::size_t n = 0;
  for (const auto& [f, v] : ground_truth) n += v.size();
  return n;
}

std::size_t LabeledFrameSet::prediction_count() const {
  std::size_t n = 0;
  for (const auto& [f, v] : predictions) n += v.size();
  return n;
}

LabeledFrameSet make_frame_set(std::span<const Track> ground_truth,
                               std::span<const Track> predictions) {
  LabeledFrameSet out;
  for (const Track& t : ground_truth) {
    for (const auto& [f, e] : t.history) out.ground_truth[f].push_back({t.id, e.box});
  }
  for (const Track& t : predictions) {
    for (const auto& [f, e] : t.history) out.predictions[f].push_back({t.id, e.box});
  }
  return out;
}

std::array<double, kHotaAlphaCount> hota_alphas() {
  std::array<double, kHotaAlphaCount> a{};
  for (int i = 0; i < kHotaAlphaCount; ++i) a[i] = 0.05 + i * 0.05;
  return a;
}

ClearResult evaluate_clear(const LabeledFrameSet& data, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw InputError("iou_threshold must lie in (0, 1)");
  }
  require_ground_truth(data, "MOTA");

  ClearResult r;
  double iou_sum = 0.0;
  // Last prediction each ground-truth object was matched to.
  std::map<TrackId, TrackId> last_match;

  for (FrameIndex f : all_frames(data)) {
    const auto& gt = boxes_at(data.ground_truth, f);
    const auto& pr = boxes_at(data.predictions, f);
    const int ng = static_cast<int>(gt.size());
    const int np = static_cast<int>(pr.size());
    std::vector<double> sim(static_cast<std::size_t>(ng) * np);
    for (int i = 0; i < ng; ++i) {
      for (int j = 0; j < np; ++j) sim[i * np + j] = iou(gt[i].box, pr[j].box);
    }

    std::vector<int> gt_to_pr(ng, -1);
    std::vector<char> pr_used(np, 0);
    for (int i = 0; i < ng; ++i) {
      auto it = last_match.find(gt[i].id);
      if (it == last_match.end()) continue;
      for (int j = 0; j < np; ++j) {
        if (!pr_used[j] && pr[j].id == it->second && sim[i * np + j] >= iou_threshold) {
          gt_to_pr[i] = j;
          pr_used[j] = 1;
          break;
        }
      }
    }

    std::vector<int> free_gt, free_pr;
    for (int i = 0; i < ng; ++i) if (gt_to_pr[i] < 0) free_gt.push_back(i);
    for (int j = 0; j < np; ++j) if (!pr_used[j]) free_pr.push_back(j);
    assoc::CostMatrix cost(static_cast<int>(free_gt.size()),
                           static_cast<int>(free_pr.size()), 0.0, false);
    for (std::size_t a = 0; a < free_gt.size(); ++a) {
      for (std::size_t b = 0; b < free_pr.size(); ++b) {
        const double s = sim[free_gt[a] * np + free_pr[b]];
        if (s >= iou_threshold) {
          cost.set(static_cast<int>(a), static_cast<int>(b), 1.0 - s, true);
        }
      }
    }
    for (const auto& [a, b] : assoc::hungarian(cost).matches) {
      const int i = free_gt[static_cast<std::size_t>(a)];
      const int j = free_pr[static_cast<std::size_t>(b)];
      gt_to_pr[i] = j;
      pr_used[j] = 1;
      auto it = last_match.find(gt[i].id);
      if (it != last_match.end() && it->second != pr[j].id) ++r.idsw;
    }

    for (int i = 0; i < ng; ++i) {
      if (gt_to_pr[i] < 0) {
        ++r.fn;
        continue;
      }
      ++r.tp;
      iou_sum += sim[i * np + gt_to_pr[i]];
      last_match[gt[i].id] = pr[gt_to_pr[i]].id;
    }
    for (int j = 0; j < np; ++j) if (!pr_used[j]) ++r.fp;
    r.gt += ng;
  }

  r.mota = 1.0 - static_cast<double>(r.fn + r.fp + r.idsw) / static_cast<double>(r.gt);
  r.motp = r.tp > 0 ? iou_sum / static_cast<double>(r.tp) : 0.0;
  return r;
}

IdResult evaluate_idf1(const LabeledFrameSet& data, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw InputError("iou_threshold must lie in (0, 1)");
  }
  require_ground_truth(data, "IDF1");

  const auto gt_ids = index_ids(data.ground_truth);
  const auto pr_ids = index_ids(data.predictions);
  const int ng = static_cast<int>(gt_ids.size());
  const int np = static_cast<int>(pr_ids.size());
  std::vector<std::int64_t> overlap(static_cast<std::size_t>(ng) * np, 0);

  for (FrameIndex f : all_frames(data)) {
    const auto& gt = boxes_at(data.ground_truth, f);
    const auto& pr = boxes_at(data.predictions, f);
    for (const LabeledBox& g : gt) {
      for (const LabeledBox& p : pr) {
        if (iou(g.box, p.box) >= iou_threshold) {
          ++overlap[static_cast<std::size_t>(gt_ids.at(g.id)) * np + pr_ids.at(p.id)];
        }
      }
    }
  }

  std::int64_t max_overlap = 0;
  for (std::int64_t v : overlap) max_overlap = std::max(max_overlap, v);
  assoc::CostMatrix cost(ng, np);
  for (int i = 0; i < ng; ++i) {
    for (int j = 0; j < np; ++j) {
      cost.set(i, j, static_cast<double>(max_overlap - overlap[i * np + j]));
    }
  }

  IdResult r;
  for (const auto& [i, j] : assoc::hungarian(cost).matches) {
    r.idtp += overlap[static_cast<std::size_t>(i) * np + j];
  }
  const auto total_gt = static_cast<std::int64_t>(data.gt_count());
  const auto total_pr = static_cast<std::int64_t>(data.prediction_count());
  r.idfn = total_gt - r.idtp;
  r.idfp = total_pr - r.idtp;
  r.idf1 = 2.0 * r.idtp / static_cast<double>(total_gt + total_pr);
  r.idp = total_pr > 0 ? static_cast<double>(r.idtp) / total_pr : 0.0;
  r.idr = static_cast<double>(r.idtp) / total_gt;
  return r;
}

HotaResult evaluate_hota(const LabeledFrameSet& data) {
  require_ground_truth(data, "HOTA");

  const auto gt_ids = index_ids(data.ground_truth);
  const auto pr_ids = index_ids(data.predictions);
  const int ng = static_cast<int>(gt_ids.size());
  const int np = static_cast<int>(pr_ids.size());
  const auto alphas = hota_alphas();
  const auto cell = [np](int g, int p) { return static_cast<std::size_t>(g) * np + p; };

  // Pass 1: soft potential-match counts for the global alignment score.
  std::vector<double> potential(static_cast<std::size_t>(ng) * np, 0.0);
  std::vector<double> gt_count(ng, 0.0);
  std::vector<double> pr_count(np, 0.0);
  const auto frames = all_frames(data);
  for (FrameIndex f : frames) {
    const auto& gt = boxes_at(data.ground_truth, f);
    const auto& pr = boxes_at(data.predictions, f);
    const std::size_t a = gt.size(), b = pr.size();
    std::vector<double> sim(a * b);
    std::vector<double> row_sum(a, 0.0), col_sum(b, 0.0);
    for (std::size_t i = 0; i < a; ++i) {
      for (std::size_t j = 0; j < b; ++j) {
        sim[i * b + j] = iou(gt[i].box, pr[j].box);
        row_sum[i] += sim[i * b + j];
        col_sum[j] += sim[i * b + j];
      }
    }
    for (std::size_t i = 0; i < a; ++i) {
      for (std::size_t j = 0; j < b; ++j) {
        const double denom = row_sum[i] + col_sum[j] - sim[i * b + j];
        if (denom > kEps) {
          potential[cell(gt_ids.at(gt[i].id), pr_ids.at(pr[j].id))] +=
              sim[i * b + j] / denom;
        }
      }
    }
    for (const auto& g : gt) gt_count[gt_ids.at(g.id)] += 1.0;
    for (const auto& p : pr) pr_count[pr_ids.at(p.id)] += 1.0;
  }
  std::vector<double> alignment(potential.size(), 0.0);
  for (int g = 0; g < ng; ++g) {
    for (int p = 0; p < np; ++p) {
      const double pm = potential[cell(g, p)];
      alignment[cell(g, p)] = pm / (gt_count[g] + pr_count[p] - pm);
    }
  }

  // Pass 2: per-frame matching maximizing alignment-weighted similarity.
  std::array<double, kHotaAlphaCount> tp{}, fn{}, fp{};
  std::vector<std::vector<double>> matches(kHotaAlphaCount,
                                           std::vector<double>(potential.size(), 0.0));
  for (FrameIndex f : frames) {
    const auto& gt = boxes_at(data.ground_truth, f);
    const auto& pr = boxes_at(data.predictions, f);
    if (gt.empty()) {
      for (double& x : fp) x += static_cast<double>(pr.size());
      continue;
    }
    if (pr.empty()) {
      for (double& x : fn) x += static_cast<double>(gt.size());
      continue;
    }
    const int a = static_cast<int>(gt.size());
    const int b = static_cast<int>(pr.size());
    std::vector<double> sim(static_cast<std::size_t>(a) * b);
    std::vector<double> score(sim.size());
    double max_score = 0.0;
    for (int i = 0; i < a; ++i) {
      for (int j = 0; j < b; ++j) {
        sim[i * b + j] = iou(gt[i].box, pr[j].box);
        score[i * b + j] =
            alignment[cell(gt_ids.at(gt[i].id), pr_ids.at(pr[j].id))] * sim[i * b + j];
        max_score = std::max(max_score, score[i * b + j]);
      }
    }
    assoc::CostMatrix cost(a, b);
    for (int i = 0; i < a; ++i) {
      for (int j = 0; j < b; ++j) cost.set(i, j, max_score - score[i * b + j]);
    }
    const auto assignment = assoc::hungarian(cost);
    for (int k = 0; k < kHotaAlphaCount; ++k) {
      int matched = 0;
      for (const auto& [i, j] : assignment.matches) {
        if (sim[i * b + j] >= alphas[k] - kEps) {
          ++matched;
          matches[k][cell(gt_ids.at(gt[i].id), pr_ids.at(pr[j].id))] += 1.0;
        }
      }
      tp[k] += matched;
      fn[k] += a - matched;
      fp[k] += b - matched;
    }
  }

  HotaResult r;
  for (int k = 0; k < kHotaAlphaCount; ++k) {
    double ass_sum = 0.0;
    for (int g = 0; g < ng; ++g) {
      for (int p = 0; p < np; ++p) {
        const double m = matches[k][cell(g, p)];
        if (m <= 0.0) continue;
        ass_sum += m * (m / std::max(1.0, gt_count[g] + pr_count[p] - m));
      }
    }
    r.assa_alpha[k] = ass_sum / std::max(1.0, tp[k]);
    r.deta_alpha[k] = tp[k] / std::max(1.0, tp[k] + fn[k] + fp[k]);
    r.hota_alpha[k] = std::sqrt(r.deta_alpha[k] * r.assa_alpha[k]);
    r.hota += r.hota_alpha[k];
    r.deta += r.deta_alpha[k];
    r.assa += r.assa_alpha[k];
  }
  r.hota /= kHotaAlphaCount;
  r.deta /= kHotaAlphaCount;
  r.assa /= kHotaAlphaCount;
  return r;
}

MetricReport evaluate(const LabeledFrameSet& data, double iou_threshold) {
  const ClearResult clear = evaluate_clear(data, iou_threshold);
  const IdResult id = evaluate_idf1(data, iou_threshold);
  const HotaResult hota = evaluate_hota(data);
  MetricReport r;
  r.mota = clear.mota;
  r.motp = clear.motp;
  r.idf1 = id.idf1;
  r.hota = hota.hota;
  r.assa = hota.assa;
  r.deta = hota.deta;
  r.tp = clear.tp;
  r.fp = clear.fp;
  r.fn = clear.fn;
  r.idsw = clear.idsw;
  r.gt = clear.gt;
  return r;
}

}  // namespace littertrack::metrics
