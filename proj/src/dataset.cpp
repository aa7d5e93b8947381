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

#include "fairshift/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>

#include "fairshift/csv.hpp"
#include "fairshift/errors.hpp"

namespace fairshift {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

bool parse_double(std::string_view s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

// Accepts float-formatted integer codes ("1.0", "02") as their canonical
// integer spelling.
std::optional<std::string> canonical_code(std::string_view s) {
  double v;
  if (!parse_double(s, v)) return std::nullopt;
  if (!std::isfinite(v) || v != std::nearbyint(v) || std::fabs(v) > 1e15) {
    return std::nullopt;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.0f", v);
  return std::string(buf);
}

Column subset_column(const Column& col, std::span<const std::size_t> rows) {
  Column out;
  out.name = col.name;
  out.kind = col.kind;
  if (col.kind == ColumnKind::Numeric) {
    out.num.reserve(rows.size());
    for (std::size_t r : rows) out.num.push_back(col.num[r]);
  } else {
    out.str.reserve(rows.size());
    for (std::size_t r : rows) out.str.push_back(col.str[r]);
  }
  return out;
}

}  // namespace

bool Column::missing(std::size_t row) const {
  if (kind == ColumnKind::Numeric) return !std::isfinite(num[row]);
  return str[row].empty();
}

const Column* RawTable::find(std::string_view name) const {
  for (const auto& c : columns) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

const Column& RawTable::at(std::string_view name) const {
  const Column* c = find(name);
  if (!c) throw DataError("table has no column \"" + std::string(name) + "\"");
  return *c;
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.context = context;
  out.features.reserve(features.size());
  for (const auto& col : features) out.features.push_back(subset_column(col, rows));
  out.labels.reserve(rows.size());
  out.groups.reserve(rows.size());
  out.weights.reserve(rows.size());
  for (std::size_t r : rows) {
    out.labels.push_back(labels[r]);
    out.groups.push_back(groups[r]);
    out.weights.push_back(weights[r]);
  }
  return out;
}

void Dataset::validate() const {
  const std::size_t n = labels.size();
  if (groups.size() != n || weights.size() != n) {
    throw DataError("dataset \"" + context +
                    "\": label, group, and weight vectors differ in length");
  }
  for (const auto& col : features) {
    if (col.size() != n) {
      throw DataError("dataset \"" + context + "\": feature column \"" +
                      col.name + "\" length does not match label vector");
    }
  }
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw DataError("dataset \"" + context + "\": weights must be positive");
    }
  }
}

std::string GroupStats::ir_label() const {
  char buf[64];
  if (positives == 0 && negatives == 0) return "0:0";
  if (positives == 0) return "0:1";
  if (negatives == 0) return "1:0";
  const double pos = static_cast<double>(positives);
  const double neg = static_cast<double>(negatives);
  if (neg >= pos) {
    std::snprintf(buf, sizeof(buf), "1:%.2f", neg / pos);
  } else {
    std::snprintf(buf, sizeof(buf), "%.2f:1", pos / neg);
  }
  return buf;
}

void ContextCollection::add(Dataset ds) {
  if (ds.context.empty()) throw DataError("dataset has an empty context id");
  if (ds.size() == 0) {
    throw DataError("context " + ds.context + " has no rows");
  }
  ds.validate();
  auto [it, inserted] = members_.emplace(ds.context, std::move(ds));
  if (!inserted) {
    throw DataError("duplicate context id: " + it->first);
  }
}

void ContextCollection::designate_global(const std::string& id) {
  if (!contains(id)) {
    throw DataError("cannot designate unknown context as global: " + id);
  }
  global_id_ = id;
}

const Dataset& ContextCollection::at(const std::string& id) const {
  auto it = members_.find(id);
  if (it == members_.end()) throw DataError("unknown context id: " + id);
  return it->second;
}

std::vector<std::string> ContextCollection::ids() const {
  std::vector<std::string> out;
  out.reserve(members_.size());
  for (const auto& [id, ds] : members_) out.push_back(id);
  return out;
}

std::vector<std::string> ContextCollection::local_ids() const {
  std::vector<std::string> out;
  out.reserve(members_.size());
  for (const auto& [id, ds] : members_) {
    if (global_id_ && id == *global_id_) continue;
    out.push_back(id);
  }
  return out;
}

RawTable load_csv(const std::filesystem::path& path, const Schema& schema) {
  const CsvTable csv = read_csv_file(path);
  const auto needed = schema.required_columns();

  std::vector<std::size_t> indices;
  indices.reserve(needed.size());
  for (const auto& [name, kind] : needed) {
    const std::size_t idx = csv.column_index(name);
    if (idx == CsvTable::npos) {
      throw DataError(path.string() + ": required column \"" + name +
                      "\" is missing from the header");
    }
    indices.push_back(idx);
  }

  RawTable table;
  table.rows = csv.rows.size();
  table.columns.resize(needed.size());
  for (std::size_t c = 0; c < needed.size(); ++c) {
    table.columns[c].name = needed[c].first;
    table.columns[c].kind = needed[c].second;
    if (needed[c].second == ColumnKind::Numeric) {
      table.columns[c].num.reserve(table.rows);
    } else {
      table.columns[c].str.reserve(table.rows);
    }
  }

  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    for (std::size_t c = 0; c < needed.size(); ++c) {
      const std::string& cell = row[indices[c]];
      Column& col = table.columns[c];
      if (col.kind == ColumnKind::Numeric) {
        if (cell.empty()) {
          col.num.push_back(kMissing);
          continue;
        }
        double v;
        if (!parse_double(cell, v)) {
          throw DataError(path.string() + ": row " + std::to_string(r + 1) +
                          ", column \"" + col.name +
                          "\": cannot parse numeric value \"" + cell + "\"");
        }
        // Non-finite numerics are unusable downstream; treat as missing.
        col.num.push_back(std::isfinite(v) ? v : kMissing);
      } else {
        col.str.push_back(cell);
      }
    }
  }
  return table;
}

FilterOutcome apply_filters(const RawTable& table, const Schema& schema) {
  std::vector<std::size_t> keep;
  keep.reserve(table.rows);

  std::vector<const Column*> filter_cols;
  filter_cols.reserve(schema.filters.size());
  for (const auto& f : schema.filters) filter_cols.push_back(&table.at(f.column));

  FilterOutcome out;
  for (std::size_t r = 0; r < table.rows; ++r) {
    bool missing = false;
    for (const auto& col : table.columns) {
      if (col.missing(r)) {
        missing = true;
        break;
      }
    }
    if (missing) {
      ++out.dropped_missing;
      continue;
    }
    bool pass = true;
    for (std::size_t f = 0; f < filter_cols.size(); ++f) {
      if (!(filter_cols[f]->num[r] > schema.filters[f].greater_than)) {
        pass = false;
        break;
      }
    }
    if (pass) {
      keep.push_back(r);
    } else {
      ++out.dropped_filtered;
    }
  }

  out.table.rows = keep.size();
  out.table.columns.reserve(table.columns.size());
  for (const auto& col : table.columns) {
    out.table.columns.push_back(subset_column(col, keep));
  }
  return out;
}

std::vector<std::uint8_t> binarize_labels(const RawTable& table,
                                          const Schema& schema) {
  const Column& col = table.at(schema.label.column);
  std::vector<std::uint8_t> y;
  y.reserve(table.rows);
  for (std::size_t r = 0; r < table.rows; ++r) {
    y.push_back(col.num[r] > schema.label.positive_if_greater_than ? 1 : 0);
  }
  return y;
}

std::vector<Group> recode_groups(const RawTable& table, const Schema& schema) {
  const Column& col = table.at(schema.group.column);
  std::vector<Group> g;
  g.reserve(table.rows);
  for (std::size_t r = 0; r < table.rows; ++r) {
    const std::string& raw = col.str[r];
    auto it = schema.group.recode.find(raw);
    if (it == schema.group.recode.end()) {
      if (auto code = canonical_code(raw)) {
        it = schema.group.recode.find(*code);
      }
    }
    if (it == schema.group.recode.end()) {
      throw DataError("group column \"" + schema.group.column +
                      "\" has unknown category value \"" + raw + "\" at row " +
                      std::to_string(r + 1));
    }
    g.push_back(it->second);
  }
  return g;
}

Dataset load_context_csv(const std::filesystem::path& path,
                         const Schema& schema, const std::string& context_id) {
  const RawTable raw = load_csv(path, schema);
  FilterOutcome filtered = apply_filters(raw, schema);

  Dataset ds;
  ds.context = context_id;
  ds.raw_rows = raw.rows;
  ds.dropped_missing = filtered.dropped_missing;
  ds.labels = binarize_labels(filtered.table, schema);
  ds.groups = recode_groups(filtered.table, schema);
  ds.weights.assign(filtered.table.rows, 1.0);
  ds.features.reserve(schema.features.size());
  for (const auto& f : schema.features) {
    for (auto& col : filtered.table.columns) {
      if (col.name == f.name) {
        ds.features.push_back(std::move(col));
        break;
      }
    }
  }
  ds.validate();
  return ds;
}

ContextCollection load_collection(const std::filesystem::path& dir,
                                  const Schema& schema) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError("data directory does not exist: " + dir.string());
  }
  std::vector<std::pair<std::string, std::filesystem::path>> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext != ".csv") continue;
    std::string id = entry.path().stem().string();
    std::transform(id.begin(), id.end(), id.begin(),
                   [](unsigned char c) { return std::toupper(c); });
    files.emplace_back(std::move(id), entry.path());
  }
  if (files.empty()) {
    throw DataError("no context CSV files found in " + dir.string());
  }
  std::sort(files.begin(), files.end());

  ContextCollection coll;
  for (const auto& [id, path] : files) {
    coll.add(load_context_csv(path, schema, id));
  }
  if (coll.contains("US")) coll.designate_global("US");
  return coll;
}

GroupStats compute_group_stats(const Dataset& ds) {
  if (ds.size() == 0) {
    throw DataError("cannot compute stats for empty dataset \"" + ds.context +
                    "\"");
  }
  GroupStats st;
  st.context = ds.context;
  st.raw_rows = ds.raw_rows;
  st.rows = ds.size();
  st.dropped_missing = ds.dropped_missing;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    ++st.group_counts[static_cast<std::size_t>(ds.groups[i])];
    if (ds.labels[i]) {
      ++st.positives;
    } else {
      ++st.negatives;
    }
  }
  for (std::size_t g = 0; g < kGroupCount; ++g) {
    st.group_rates[g] =
        static_cast<double>(st.group_counts[g]) / static_cast<double>(st.rows);
  }
  if (st.positives == 0) {
    st.ir_infinite = true;
    st.ir = std::numeric_limits<double>::infinity();
  } else {
    st.ir = static_cast<double>(st.negatives) / static_cast<double>(st.positives);
  }
  return st;
}

Dataset build_global(const ContextCollection& coll,
                     const std::set<std::string>& exclude) {
  for (const auto& id : exclude) {
    if (!coll.contains(id)) {
      throw DataError("cannot exclude unknown context: " + id);
    }
  }
  std::vector<const Dataset*> parts;
  for (const auto& id : coll.local_ids()) {
    if (exclude.count(id)) continue;
    parts.push_back(&coll.at(id));
  }
  if (parts.empty()) {
    throw DataError("global dataset is empty after exclusions");
  }

  Dataset out;
  out.context = "US";
  std::size_t total = 0;
  for (const auto* p : parts) total += p->size();
  out.labels.reserve(total);
  out.groups.reserve(total);
  out.weights.reserve(total);

  const Dataset& first = *parts.front();
  out.features.resize(first.features.size());
  for (std::size_t c = 0; c < first.features.size(); ++c) {
    out.features[c].name = first.features[c].name;
    out.features[c].kind = first.features[c].kind;
    if (out.features[c].kind == ColumnKind::Numeric) {
      out.features[c].num.reserve(total);
    } else {
      out.features[c].str.reserve(total);
    }
  }

  for (const auto* p : parts) {
    if (p->features.size() != out.features.size()) {
      throw DataError("context \"" + p->context +
                      "\" has a different feature layout; cannot pool");
    }
    for (std::size_t c = 0; c < out.features.size(); ++c) {
      const Column& src = p->features[c];
      Column& dst = out.features[c];
      if (src.name != dst.name || src.kind != dst.kind) {
        throw DataError("context \"" + p->context +
                        "\" has a different feature layout; cannot pool");
      }
      if (src.kind == ColumnKind::Numeric) {
        dst.num.insert(dst.num.end(), src.num.begin(), src.num.end());
      } else {
        dst.str.insert(dst.str.end(), src.str.begin(), src.str.end());
      }
    }
    out.labels.insert(out.labels.end(), p->labels.begin(), p->labels.end());
    out.groups.insert(out.groups.end(), p->groups.begin(), p->groups.end());
    out.weights.insert(out.weights.end(), p->weights.begin(), p->weights.end());
  }
  return out;
}

void write_context_csv(const Dataset& ds, const Schema& schema,
                       const std::filesystem::path& path) {
  if (schema.label.positive_if_greater_than < 0.0 ||
      schema.label.positive_if_greater_than >= 1.0) {
    throw DataError(
        "cannot emit 0/1 labels: schema positive threshold must lie in [0,1)");
  }
  for (const auto& f : schema.filters) {
    if (!schema.find_feature(f.column) && f.column != schema.label.column) {
      throw DataError("cannot emit context CSV: filter column \"" + f.column +
                      "\" is not among the emitted columns");
    }
  }

  std::vector<std::string> header;
  for (const auto& f : schema.features) header.push_back(f.name);
  header.push_back(schema.label.column);
  header.push_back(schema.group.column);

  std::vector<std::vector<std::string>> rows;
  rows.reserve(ds.size());
  for (std::size_t r = 0; r < ds.size(); ++r) {
    std::vector<std::string> row;
    row.reserve(header.size());
    for (const auto& col : ds.features) {
      if (col.kind == ColumnKind::Numeric) {
        row.push_back(format_double(col.num[r]));
      } else {
        row.push_back(col.str[r]);
      }
    }
    row.push_back(ds.labels[r] ? "1" : "0");
    row.push_back(to_string(ds.groups[r]));
    rows.push_back(std::move(row));
  }
  write_csv_file(path, header, rows);
}

}  // namespace fairshift
