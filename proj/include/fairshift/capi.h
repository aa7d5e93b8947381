/*
 * Copyright 2026 The FairShift Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of the fairness-under-shift audit library. All entry points
 * are exception-free; failures come back as a status code with a detail
 * message retrievable per thread via fairshift_last_error(). */

#ifndef FAIRSHIFT_CAPI_H_
#define FAIRSHIFT_CAPI_H_

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fairshift_status {
  FAIRSHIFT_OK = 0,
  /* Invalid configuration: bad flags, malformed run config, bad schema. */
  FAIRSHIFT_ERROR_CONFIG = 1,
  /* Invalid or unusable data: unreadable files, bad CSV, unknown codes. */
  FAIRSHIFT_ERROR_DATA = 2,
  /* Training failed, or a run finished with skipped contexts. */
  FAIRSHIFT_ERROR_PARTIAL = 3,
  /* Unexpected internal failure. */
  FAIRSHIFT_ERROR_INTERNAL = 4
} fairshift_status;

/* Library version, e.g. "0.1.0". Static storage, never freed. */
const char* fairshift_version(void);

/* Message of the calling thread's most recent failure; "" after success.
 * Valid until the thread's next fairshift_* call. */
const char* fairshift_last_error(void);

/* A loaded audit input: the task schema plus one dataset per context. */
typedef struct fairshift_collection fairshift_collection;

/* Load every *.csv in data_dir as one context per file. schema_path may be
 * NULL to audit the built-in census income task. */
fairshift_status fairshift_collection_open_dir(const char* data_dir,
                                               const char* schema_path,
                                               fairshift_collection** out);

/* Generate a synthetic collection from a generator spec (file or JSON). */
fairshift_status fairshift_collection_from_synth_file(
    const char* spec_path, fairshift_collection** out);
fairshift_status fairshift_collection_from_synth_json(
    const char* spec_json, fairshift_collection** out);

size_t fairshift_collection_size(const fairshift_collection* coll);

/* Context id at the given lexicographic position, or NULL when out of
 * range. Owned by the collection. */
const char* fairshift_collection_context_id(const fairshift_collection* coll,
                                            size_t index);

void fairshift_collection_close(fairshift_collection* coll);

/* Commands write their artifacts into out_dir (created if needed).
 * run_config_json may be NULL for defaults; see the README for keys. */

/* Per-context composition stats -> stats.csv. */
fairshift_status fairshift_run_stats(const fairshift_collection* coll,
                                     const char* run_config_json,
                                     const char* out_dir);

/* Local and global deployment experiments -> cells.csv, summary.csv,
 * run.json. Returns FAIRSHIFT_ERROR_PARTIAL when contexts were skipped. */
fairshift_status fairshift_run_matrix(const fairshift_collection* coll,
                                      const char* run_config_json,
                                      const char* out_dir);

/* Context-similarity analysis -> matrix.csv, matrix_normalized.csv,
 * rowsums.csv, mmd.json, and scatter.csv unless disabled. */
fairshift_status fairshift_run_mmd(const fairshift_collection* coll,
                                   const char* run_config_json,
                                   const char* out_dir);

/* Consolidate prior artifacts in out_dir into report.json. */
fairshift_status fairshift_write_report(const char* out_dir);

/* Generate a synthetic collection and write it as per-context CSV files. */
fairshift_status fairshift_emit_synth_csv(const char* spec_json,
                                          const char* dir);

#ifdef __cplusplus
}
#endif

#endif /* FAIRSHIFT_CAPI_H_ */
