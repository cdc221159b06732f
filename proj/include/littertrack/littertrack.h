/*
 * Copyright 2026 The littertrack Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef LITTERTRACK_LITTERTRACK_H_
#define LITTERTRACK_LITTERTRACK_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define LT_API __declspec(dllexport)
#else
#define LT_API __attribute__((visibility("default")))
#endif

/* Status codes double as command-line exit codes. */
typedef enum lt_status {
  LT_OK = 0,
  LT_ERR_USAGE = 1,
  LT_ERR_INPUT = 2,
  LT_ERR_NUMERICAL = 3,
  LT_ERR_CONFIG = 4,
  LT_ERR_INTERNAL = 5
} lt_status;

typedef enum lt_profile {
  LT_PROFILE_NOISE_FREE = 0,
  LT_PROFILE_DEFAULT_NOISE = 1,
  LT_PROFILE_OCCLUSION_HEAVY = 2
} lt_profile;

typedef struct lt_config lt_config;
typedef struct lt_tracker lt_tracker;
typedef struct lt_gallery lt_gallery;

/* Message of the last failed call on this thread; never NULL. */
LT_API const char* lt_last_error(void);
LT_API const char* lt_version(void);

/* ---- configuration ---- */

LT_API lt_status lt_config_create(lt_config** out);
LT_API void lt_config_destroy(lt_config* cfg);
/* Applies a `key = value` file. */
LT_API lt_status lt_config_load(lt_config* cfg, const char* path);
LT_API lt_status lt_config_set(lt_config* cfg, const char* key, const char* value);
LT_API lt_status lt_config_validate(const lt_config* cfg);
/* 16 hex digits plus terminator; `buf` must hold at least 17 bytes. */
LT_API lt_status lt_config_digest(const lt_config* cfg, char* buf, size_t size);
/* Canonical `key = value` text. With buf == NULL only *needed is set. */
LT_API lt_status lt_config_canonical(const lt_config* cfg, char* buf, size_t size, size_t* needed);

/* ---- file-level stages ---- */

LT_API lt_status lt_simulate(const lt_config* cfg, lt_profile profile, uint64_t seed,
                             const char* out_dir);
/* `embeddings` and `appearance_out` may be NULL. */
LT_API lt_status lt_track_files(const lt_config* cfg, const char* detections,
                                const char* embeddings, const char* tracks_out,
                                const char* appearance_out);
/* `appearance`, `gallery_prefix` and `scenario` may be NULL. */
LT_API lt_status lt_events_files(const lt_config* cfg, const char* tracks, const char* events_out,
                                 const char* appearance, const char* gallery_prefix,
                                 const char* scenario);

typedef struct lt_metric_report {
  double mota;
  double idf1;
  double hota;
  double deta;
  double assa;
  double motp;
  int64_t tp;
  int64_t fp;
  int64_t fn;
  int64_t idsw;
  int64_t gt;
} lt_metric_report;

LT_API lt_status lt_eval_files(const lt_config* cfg, const char* ground_truth,
                               const char* const* predictions, size_t prediction_count,
                               lt_metric_report* out);

/* Full chain into `out_dir`. Optional arguments may be NULL. `has_report`
 * is set to 1 when ground truth was given and `report` filled. */
LT_API lt_status lt_run(const lt_config* cfg, const char* detections, const char* embeddings,
                        const char* gallery_prefix, const char* ground_truth, const char* out_dir,
                        lt_metric_report* report, int* has_report);

/* ---- in-memory tracking ---- */

typedef struct lt_detection {
  double left;
  double top;
  double width;
  double height;
  double confidence;
  const char* class_label;
  const float* embedding; /* NULL when absent */
  size_t embedding_dim;
} lt_detection;

typedef struct lt_track_row {
  int64_t id;
  int64_t frame;
  double left;
  double top;
  double width;
  double height;
  double confidence;
  int32_t class_id; /* from the configuration's label table */
  int32_t backfill;
} lt_track_row;

LT_API lt_status lt_tracker_create(const lt_config* cfg, lt_tracker** out);
LT_API void lt_tracker_destroy(lt_tracker* tracker);
/* Consumes one frame; frames must strictly increase. `row_count` receives
 * the number of output rows, fetched with lt_tracker_rows. */
LT_API lt_status lt_tracker_step(lt_tracker* tracker, int64_t frame, const lt_detection* detections,
                                 size_t detection_count, size_t* row_count);
/* Copies the rows of the last step. With rows == NULL only *count is set. */
LT_API lt_status lt_tracker_rows(const lt_tracker* tracker, lt_track_row* rows, size_t capacity,
                                 size_t* count);
/* Every track that was ever confirmed, one row per observed frame, ordered
 * by (id, frame). With rows == NULL only *count is set. */
LT_API lt_status lt_tracker_export(const lt_tracker* tracker, lt_track_row* rows, size_t capacity,
                                   size_t* count);

/* ---- identity gallery ---- */

LT_API lt_status lt_gallery_create(size_t dimension, lt_gallery** out);
LT_API lt_status lt_gallery_load(const char* prefix, lt_gallery** out);
LT_API void lt_gallery_destroy(lt_gallery* gallery);
LT_API lt_status lt_gallery_save(const lt_gallery* gallery, const char* prefix);
LT_API lt_status lt_gallery_enroll(lt_gallery* gallery, const char* label, const float* embedding,
                                   size_t dimension, const char* metadata);
LT_API size_t lt_gallery_size(const lt_gallery* gallery);
LT_API size_t lt_gallery_dimension(const lt_gallery* gallery);

typedef struct lt_match {
  int matched;      /* 1 when similarity reached the threshold */
  char label[256];  /* truncated if longer; empty when unmatched */
  double similarity;
  double margin_logit;
  int ambiguous;
} lt_match;

/* Uses the identity.* settings of `cfg` (may be NULL for defaults). */
LT_API lt_status lt_gallery_match(const lt_gallery* gallery, const lt_config* cfg,
                                  const float* query, size_t dimension, lt_match* out);

LT_API double lt_arcface_logit(double cos_theta, double margin, double scale);

#ifdef __cplusplus
}
#endif

#endif /* LITTERTRACK_LITTERTRACK_H_ */
