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

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>

#include "fairshift/capi.h"
#include "test_util.hpp"

namespace {

constexpr const char* kSpec = R"({
  "seed": 21,
  "rows_per_context": 200,
  "features": {"numeric": 2},
  "shift_schedule": [0.0, 0.7]
})";

constexpr const char* kRunConfig = R"({"folds": 3, "seed": 4})";

struct Collection {
  fairshift_collection* handle = nullptr;
  ~Collection() { fairshift_collection_close(handle); }
};

}  // namespace

TEST_CASE("the library reports a semantic version") {
  const char* v = fairshift_version();
  REQUIRE(v != nullptr);
  CHECK(std::strlen(v) >= 5);
  CHECK(std::string(v).find('.') != std::string::npos);
}

TEST_CASE("null arguments fail fast with a message") {
  CHECK(fairshift_collection_open_dir(nullptr, nullptr, nullptr) ==
        FAIRSHIFT_ERROR_CONFIG);
  CHECK(std::strlen(fairshift_last_error()) > 0);
  CHECK(fairshift_write_report(nullptr) == FAIRSHIFT_ERROR_CONFIG);
}

TEST_CASE("a missing data directory is a data error") {
  Collection c;
  CHECK(fairshift_collection_open_dir("/nonexistent/dir", nullptr,
                                      &c.handle) == FAIRSHIFT_ERROR_DATA);
  CHECK(std::strlen(fairshift_last_error()) > 0);
}

TEST_CASE("malformed specs and configs are configuration errors") {
  Collection c;
  CHECK(fairshift_collection_from_synth_json("{not json", &c.handle) ==
        FAIRSHIFT_ERROR_CONFIG);
  CHECK(fairshift_collection_from_synth_json(
            R"({"rows_per_context": 0})", &c.handle) ==
        FAIRSHIFT_ERROR_CONFIG);

  Collection good;
  REQUIRE(fairshift_collection_from_synth_json(kSpec, &good.handle) ==
          FAIRSHIFT_OK);
  testutil::TempDir tmp;
  CHECK(fairshift_run_matrix(good.handle, R"({"bogus_key": 1})",
                             tmp.path().c_str()) == FAIRSHIFT_ERROR_CONFIG);
  CHECK(std::string(fairshift_last_error()).find("bogus_key") !=
        std::string::npos);
}

TEST_CASE("synthetic collections expose their contexts in order") {
  Collection c;
  REQUIRE(fairshift_collection_from_synth_json(kSpec, &c.handle) ==
          FAIRSHIFT_OK);
  REQUIRE(fairshift_collection_size(c.handle) == 2);
  CHECK(std::string(fairshift_collection_context_id(c.handle, 0)) == "C00");
  CHECK(std::string(fairshift_collection_context_id(c.handle, 1)) == "C01");
  CHECK(fairshift_collection_context_id(c.handle, 2) == nullptr);
}

TEST_CASE("the full pipeline runs through the C interface") {
  Collection c;
  REQUIRE(fairshift_collection_from_synth_json(kSpec, &c.handle) ==
          FAIRSHIFT_OK);
  testutil::TempDir tmp;
  const std::string out = tmp.path().string();

  CHECK(fairshift_run_stats(c.handle, kRunConfig, out.c_str()) ==
        FAIRSHIFT_OK);
  CHECK(fairshift_run_matrix(c.handle, kRunConfig, out.c_str()) ==
        FAIRSHIFT_OK);
  CHECK(fairshift_run_mmd(c.handle, kRunConfig, out.c_str()) == FAIRSHIFT_OK);
  CHECK(fairshift_write_report(out.c_str()) == FAIRSHIFT_OK);
  CHECK(std::string(fairshift_last_error()).empty());

  for (const char* name : {"stats.csv", "cells.csv", "summary.csv",
                           "run.json", "matrix.csv", "rowsums.csv",
                           "scatter.csv", "report.json"}) {
    CHECK(std::filesystem::exists(tmp / name));
  }
}

TEST_CASE("reports demand their inputs") {
  testutil::TempDir tmp;
  CHECK(fairshift_write_report(tmp.path().c_str()) == FAIRSHIFT_ERROR_DATA);
  CHECK(std::string(fairshift_last_error()).find("cells.csv") !=
        std::string::npos);
}

TEST_CASE("defaults apply when the run config is omitted") {
  Collection c;
  REQUIRE(fairshift_collection_from_synth_json(kSpec, &c.handle) ==
          FAIRSHIFT_OK);
  testutil::TempDir tmp;
  CHECK(fairshift_run_stats(c.handle, nullptr, tmp.path().c_str()) ==
        FAIRSHIFT_OK);
  CHECK(std::filesystem::exists(tmp / "stats.csv"));
}

TEST_CASE("emitted synthetic directories load back through the C interface") {
  testutil::TempDir tmp;
  REQUIRE(fairshift_emit_synth_csv(kSpec, tmp.path().c_str()) ==
          FAIRSHIFT_OK);
  CHECK(std::filesystem::exists(tmp / "C00.csv"));
  CHECK(std::filesystem::exists(tmp / "schema.json"));

  Collection c;
  const std::string schema = (tmp / "schema.json").string();
  REQUIRE(fairshift_collection_open_dir(tmp.path().c_str(), schema.c_str(),
                                        &c.handle) == FAIRSHIFT_OK);
  CHECK(fairshift_collection_size(c.handle) == 2);
}
