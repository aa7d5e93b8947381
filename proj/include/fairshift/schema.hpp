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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace fairshift {

// Protected-attribute groups. W is the reference (non-protected) group.
enum class Group : std::uint8_t { W = 0, B = 1, O = 2 };

inline constexpr std::size_t kGroupCount = 3;

const char* to_string(Group g);
std::optional<Group> group_from_string(std::string_view s);

enum class ColumnKind : std::uint8_t { Numeric, Categorical };

struct FeatureSpec {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
};

struct LabelSpec {
  std::string column;
  double positive_if_greater_than = 0.0;  // strict: y = 1 iff value > threshold
};

struct GroupSpec {
  std::string column;
  // Raw category value -> group. Lookup also accepts numeric-code spellings
  // such as "1.0" for "1".
  std::map<std::string, Group> recode;
};

struct FilterSpec {
  std::string column;
  double greater_than = 0.0;  // strict: keep rows with value > threshold
};

// Declarative description of one tabular prediction task: which columns are
// features (and of what kind), where the label and protected attribute come
// from, and which row filters define the cleaned dataset.
struct Schema {
  std::vector<FeatureSpec> features;
  LabelSpec label;
  GroupSpec group;
  std::optional<std::string> context_column;  // informational only
  std::vector<FilterSpec> filters;
  // Categories rarer than this in the fitting data are dropped from one-hot
  // blocks (rows keep their other columns; the rare value encodes as zeros).
  std::size_t min_category_count = 1;

  // Census income task: 9 person-level features, income > 50000 as the
  // positive label, race recoded to {W, B, O}, and the standard cleaning
  // filters (age > 16, income > 100, weekly hours > 0).
  static Schema default_income();

  static Schema from_json(const nlohmann::json& j);
  static Schema load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  // Enforces: unique feature names, label/group/context columns disjoint
  // from features, filters on numeric columns only, recode targets valid.
  // Throws ConfigError.
  void validate() const;

  const FeatureSpec* find_feature(std::string_view name) const;
  // All columns the loader must materialize, with their resolved kinds.
  std::vector<std::pair<std::string, ColumnKind>> required_columns() const;
};

}  // namespace fairshift
