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

#include "fairshift/capi.h"

#include <exception>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fairshift/errors.hpp"
#include "fairshift/pipeline.hpp"
#include "fairshift/version.hpp"

// Opaque handle backing the C interface.
struct fairshift_collection {
  fairshift::AuditData data;
  std::vector<std::string> ids;
};

namespace {

thread_local std::string t_last_error;

fairshift_status fail(fairshift_status status, const std::string& message) {
  t_last_error = message;
  return status;
}

// Runs `fn` and maps the exception taxonomy onto status codes.
template <typename Fn>
fairshift_status guarded(Fn&& fn) {
  try {
    t_last_error.clear();
    return fn();
  } catch (const fairshift::ConfigError& e) {
    return fail(FAIRSHIFT_ERROR_CONFIG, e.what());
  } catch (const fairshift::TrainingError& e) {
    return fail(FAIRSHIFT_ERROR_PARTIAL, e.what());
  } catch (const fairshift::DataError& e) {
    return fail(FAIRSHIFT_ERROR_DATA, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(FAIRSHIFT_ERROR_CONFIG, e.what());
  } catch (const std::exception& e) {
    return fail(FAIRSHIFT_ERROR_INTERNAL, e.what());
  } catch (...) {
    return fail(FAIRSHIFT_ERROR_INTERNAL, "unknown error");
  }
}

fairshift_status require(const void* p, const char* what) {
  if (p != nullptr) return FAIRSHIFT_OK;
  return fail(FAIRSHIFT_ERROR_CONFIG, std::string(what) + " must not be null");
}

nlohmann::json parse_json_arg(const char* text, const char* what) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr,
                                           /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    throw fairshift::ConfigError(std::string("invalid JSON in ") + what);
  }
  return j;
}

fairshift::RunConfig parse_run_config(const char* run_config_json) {
  if (run_config_json == nullptr) {
    return fairshift::RunConfig::from_json(nlohmann::json::object());
  }
  return fairshift::RunConfig::from_json(
      parse_json_arg(run_config_json, "run config"));
}

fairshift_status open_collection(fairshift::AuditData data,
                                 fairshift_collection** out) {
  auto* coll = new fairshift_collection{std::move(data), {}};
  coll->ids = coll->data.contexts.ids();
  *out = coll;
  return FAIRSHIFT_OK;
}

}  // namespace

extern "C" {

const char* fairshift_version(void) { return fairshift::kToolVersion; }

const char* fairshift_last_error(void) { return t_last_error.c_str(); }

fairshift_status fairshift_collection_open_dir(const char* data_dir,
                                               const char* schema_path,
                                               fairshift_collection** out) {
  if (auto s = require(data_dir, "data_dir")) return s;
  if (auto s = require(out, "out")) return s;
  return guarded([&] {
    std::optional<std::filesystem::path> schema;
    if (schema_path != nullptr) schema = schema_path;
    return open_collection(fairshift::load_audit_dir(data_dir, schema), out);
  });
}

fairshift_status fairshift_collection_from_synth_file(
    const char* spec_path, fairshift_collection** out) {
  if (auto s = require(spec_path, "spec_path")) return s;
  if (auto s = require(out, "out")) return s;
  return guarded([&] {
    return open_collection(
        fairshift::load_audit_synth(fairshift::SynthSpec::load(spec_path)),
        out);
  });
}

fairshift_status fairshift_collection_from_synth_json(
    const char* spec_json, fairshift_collection** out) {
  if (auto s = require(spec_json, "spec_json")) return s;
  if (auto s = require(out, "out")) return s;
  return guarded([&] {
    return open_collection(
        fairshift::load_audit_synth(fairshift::SynthSpec::from_json(
            parse_json_arg(spec_json, "synth spec"))),
        out);
  });
}

size_t fairshift_collection_size(const fairshift_collection* coll) {
  return coll == nullptr ? 0 : coll->ids.size();
}

const char* fairshift_collection_context_id(const fairshift_collection* coll,
                                            size_t index) {
  if (coll == nullptr || index >= coll->ids.size()) return nullptr;
  return coll->ids[index].c_str();
}

void fairshift_collection_close(fairshift_collection* coll) { delete coll; }

fairshift_status fairshift_run_stats(const fairshift_collection* coll,
                                     const char* run_config_json,
                                     const char* out_dir) {
  if (auto s = require(coll, "collection")) return s;
  if (auto s = require(out_dir, "out_dir")) return s;
  return guarded([&] {
    fairshift::cmd_stats(coll->data, parse_run_config(run_config_json),
                         out_dir);
    return FAIRSHIFT_OK;
  });
}

fairshift_status fairshift_run_matrix(const fairshift_collection* coll,
                                      const char* run_config_json,
                                      const char* out_dir) {
  if (auto s = require(coll, "collection")) return s;
  if (auto s = require(out_dir, "out_dir")) return s;
  return guarded([&]() -> fairshift_status {
    int code = fairshift::cmd_matrix(
        coll->data, parse_run_config(run_config_json), out_dir);
    if (code == 0) return FAIRSHIFT_OK;
    return fail(FAIRSHIFT_ERROR_PARTIAL,
                "run finished with skipped contexts; see run.json");
  });
}

fairshift_status fairshift_run_mmd(const fairshift_collection* coll,
                                   const char* run_config_json,
                                   const char* out_dir) {
  if (auto s = require(coll, "collection")) return s;
  if (auto s = require(out_dir, "out_dir")) return s;
  return guarded([&] {
    fairshift::cmd_mmd(coll->data, parse_run_config(run_config_json),
                       out_dir);
    return FAIRSHIFT_OK;
  });
}

fairshift_status fairshift_write_report(const char* out_dir) {
  if (auto s = require(out_dir, "out_dir")) return s;
  return guarded([&] {
    fairshift::cmd_report(out_dir);
    return FAIRSHIFT_OK;
  });
}

fairshift_status fairshift_emit_synth_csv(const char* spec_json,
                                          const char* dir) {
  if (auto s = require(spec_json, "spec_json")) return s;
  if (auto s = require(dir, "dir")) return s;
  return guarded([&] {
    fairshift::SynthSpec spec = fairshift::SynthSpec::from_json(
        parse_json_arg(spec_json, "synth spec"));
    spec.finalize();
    fairshift::ContextCollection coll = fairshift::generate_collection(spec);
    fairshift::emit_collection_csv(coll, spec, dir);
    return FAIRSHIFT_OK;
  });
}

}  // extern "C"
