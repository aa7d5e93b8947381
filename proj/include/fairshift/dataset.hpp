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

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "fairshift/schema.hpp"

namespace fairshift {

// One schema-selected column. Numeric columns store doubles (NaN marks a
// missing cell); categorical columns store raw strings ("" marks missing).
struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  std::vector<double> num;
  std::vector<std::string> str;

  std::size_t size() const {
    return kind == ColumnKind::Numeric ? num.size() : str.size();
  }
  bool missing(std::size_t row) const;
};

// Parsed context file restricted to the columns a schema needs.
struct RawTable {
  std::size_t rows = 0;
  std::vector<Column> columns;

  const Column* find(std::string_view name) const;
  const Column& at(std::string_view name) const;  // throws DataError
};

// Cleaned, recoded data for one context, ready for encoding.
struct Dataset {
  std::string context;
  std::vector<Column> features;  // schema feature order, cleaned rows only
  std::vector<std::uint8_t> labels;
  std::vector<Group> groups;
  std::vector<double> weights;  // all 1.0 unless a trainer reweighs

  // Ingestion provenance; zero for derived datasets (subsets, pools).
  std::size_t raw_rows = 0;
  std::size_t dropped_missing = 0;

  std::size_t size() const { return labels.size(); }
  Dataset subset(std::span<const std::size_t> rows) const;
  void validate() const;  // equal lengths, positive weights
};

// Sample and group composition of one dataset.
struct GroupStats {
  std::string context;
  std::size_t raw_rows = 0;
  std::size_t rows = 0;
  std::size_t dropped_missing = 0;
  std::array<std::size_t, kGroupCount> group_counts{};
  std::array<double, kGroupCount> group_rates{};
  std::size_t positives = 0;
  std::size_t negatives = 0;
  // Class-imbalance ratio: negatives per positive. A dataset without
  // positives has no finite ratio; that state is flagged, never encoded as
  // a large number.
  double ir = 0.0;
  bool ir_infinite = false;
  std::string ir_label() const;  // "+:-" form, e.g. "1:1.52" or "1.05:1"
};

// Per-context datasets keyed by id, iterated lexicographically. At most one
// member may be designated as the pre-pooled global dataset; it represents
// the union of the locals and is kept out of pooling operations.
class ContextCollection {
 public:
  void add(Dataset ds);  // DataError on empty data or duplicate context id
  void designate_global(const std::string& id);

  bool contains(const std::string& id) const { return members_.count(id) > 0; }
  const Dataset& at(const std::string& id) const;
  std::size_t size() const { return members_.size(); }
  const std::map<std::string, Dataset>& members() const { return members_; }
  const std::optional<std::string>& global_id() const { return global_id_; }

  std::vector<std::string> ids() const;
  // Member ids excluding the designated global, in lexicographic order.
  std::vector<std::string> local_ids() const;

 private:
  std::map<std::string, Dataset> members_;
  std::optional<std::string> global_id_;
};

// --- ingestion pipeline ---

// Parse a context CSV, keeping only schema-selected columns with their
// resolved kinds. Numeric cells that fail to parse raise a DataError naming
// the row; empty cells become missing markers.
RawTable load_csv(const std::filesystem::path& path, const Schema& schema);

struct FilterOutcome {
  RawTable table;
  std::size_t dropped_missing = 0;
  std::size_t dropped_filtered = 0;
};

// Drop rows with a missing cell in any schema-selected column (tallied
// separately), then keep rows passing every strict greater-than filter.
FilterOutcome apply_filters(const RawTable& table, const Schema& schema);

// y = 1 iff label column value > threshold, strictly.
std::vector<std::uint8_t> binarize_labels(const RawTable& table,
                                          const Schema& schema);

// Recode the raw group column through the schema map. Lookup accepts the
// spelled category, the bare code, and float-formatted codes ("1.0").
// Unknown values raise a DataError naming the value.
std::vector<Group> recode_groups(const RawTable& table, const Schema& schema);

// Full pipeline for one file: parse, filter, binarize, recode.
Dataset load_context_csv(const std::filesystem::path& path,
                         const Schema& schema, const std::string& context_id);

// Load every *.csv in a directory as one context per file; the id is the
// uppercased filename stem. A member named "US" is designated global.
ContextCollection load_collection(const std::filesystem::path& dir,
                                  const Schema& schema);

GroupStats compute_group_stats(const Dataset& ds);

// Concatenate the local members except the excluded ids. Excluded ids must
// exist; an empty result is an error.
Dataset build_global(const ContextCollection& coll,
                     const std::set<std::string>& exclude);

// Emit a dataset as a context CSV loadable under the same schema. Labels are
// written as 0/1, so the schema's positive threshold must lie in [0, 1).
void write_context_csv(const Dataset& ds, const Schema& schema,
                       const std::filesystem::path& path);

}  // namespace fairshift
