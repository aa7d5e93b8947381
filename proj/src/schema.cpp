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

#include "fairshift/schema.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "fairshift/errors.hpp"

namespace fairshift {

const char* to_string(Group g) {
  switch (g) {
    case Group::W: return "W";
    case Group::B: return "B";
    case Group::O: return "O";
  }
  return "?";
}

std::optional<Group> group_from_string(std::string_view s) {
  if (s == "W") return Group::W;
  if (s == "B") return Group::B;
  if (s == "O") return Group::O;
  return std::nullopt;
}

namespace {

ColumnKind kind_from_string(const std::string& s) {
  if (s == "numeric") return ColumnKind::Numeric;
  if (s == "categorical") return ColumnKind::Categorical;
  throw ConfigError("unknown feature kind: \"" + s +
                    "\" (expected \"numeric\" or \"categorical\")");
}

const char* kind_to_string(ColumnKind k) {
  return k == ColumnKind::Numeric ? "numeric" : "categorical";
}

// Race categories of the census task with their numeric codes. Codes 3-9
// are merged into one residual group.
const std::pair<const char*, Group> kRaceRecode[] = {
    {"1", Group::W},
    {"2", Group::B},
    {"3", Group::O},
    {"4", Group::O},
    {"5", Group::O},
    {"6", Group::O},
    {"7", Group::O},
    {"8", Group::O},
    {"9", Group::O},
    {"White alone", Group::W},
    {"Black or African American alone", Group::B},
    {"American Indian alone", Group::O},
    {"Alaska Native alone", Group::O},
    {"American Indian and Alaska Native tribes specified, or American Indian "
     "or Alaska Native, not specified and no other races",
     Group::O},
    {"Asian alone", Group::O},
    {"Native Hawaiian and Other Pacific Islander alone", Group::O},
    {"Some Other Race alone", Group::O},
    {"Two or More Races", Group::O},
};

}  // namespace

Schema Schema::default_income() {
  Schema s;
  s.features = {
      {"AGEP", ColumnKind::Numeric},     {"COW", ColumnKind::Categorical},
      {"SCHL", ColumnKind::Numeric},     {"MAR", ColumnKind::Categorical},
      {"OCCP", ColumnKind::Categorical}, {"POBP", ColumnKind::Categorical},
      {"RELP", ColumnKind::Categorical}, {"WKHP", ColumnKind::Numeric},
      {"SEX", ColumnKind::Categorical},
  };
  s.label = {"PINCP", 50000.0};
  s.group.column = "RAC1P";
  for (const auto& [key, g] : kRaceRecode) s.group.recode.emplace(key, g);
  s.filters = {{"AGEP", 16.0}, {"PINCP", 100.0}, {"WKHP", 0.0}};
  return s;
}

Schema Schema::from_json(const nlohmann::json& j) {
  Schema s;
  try {
    if (!j.is_object()) throw ConfigError("schema document must be an object");
    for (const auto& f : j.at("features")) {
      FeatureSpec fs;
      fs.name = f.at("name").get<std::string>();
      fs.kind = kind_from_string(f.at("kind").get<std::string>());
      s.features.push_back(std::move(fs));
    }
    const auto& lbl = j.at("label");
    s.label.column = lbl.at("column").get<std::string>();
    s.label.positive_if_greater_than =
        lbl.at("positive_if_greater_than").get<double>();
    const auto& grp = j.at("group");
    s.group.column = grp.at("column").get<std::string>();
    for (const auto& [key, value] : grp.at("recode").items()) {
      const auto g = group_from_string(value.get<std::string>());
      if (!g) {
        throw ConfigError("recode target for \"" + key +
                          "\" must be one of W, B, O");
      }
      s.group.recode.emplace(key, *g);
    }
    if (j.contains("context")) {
      s.context_column = j.at("context").at("column").get<std::string>();
    }
    if (j.contains("filters")) {
      for (const auto& f : j.at("filters")) {
        FilterSpec fs;
        fs.column = f.at("column").get<std::string>();
        fs.greater_than = f.at("greater_than").get<double>();
        s.filters.push_back(std::move(fs));
      }
    }
    if (j.contains("encoder")) {
      const auto& enc = j.at("encoder");
      if (enc.contains("min_category_count")) {
        s.min_category_count = enc.at("min_category_count").get<std::size_t>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed schema document: ") + e.what());
  }
  s.validate();
  return s;
}

Schema Schema::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open schema file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("schema file " + path.string() +
                      " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

nlohmann::json Schema::to_json() const {
  nlohmann::json j;
  j["features"] = nlohmann::json::array();
  for (const auto& f : features) {
    j["features"].push_back(
        {{"name", f.name}, {"kind", kind_to_string(f.kind)}});
  }
  j["label"] = {{"column", label.column},
                {"positive_if_greater_than", label.positive_if_greater_than}};
  nlohmann::json recode = nlohmann::json::object();
  for (const auto& [key, g] : group.recode) recode[key] = to_string(g);
  j["group"] = {{"column", group.column}, {"recode", recode}};
  if (context_column) j["context"] = {{"column", *context_column}};
  j["filters"] = nlohmann::json::array();
  for (const auto& f : filters) {
    j["filters"].push_back(
        {{"column", f.column}, {"greater_than", f.greater_than}});
  }
  j["encoder"] = {{"min_category_count", min_category_count}};
  return j;
}

const FeatureSpec* Schema::find_feature(std::string_view name) const {
  for (const auto& f : features) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

void Schema::validate() const {
  if (features.empty()) throw ConfigError("schema declares no features");
  std::set<std::string> names;
  for (const auto& f : features) {
    if (f.name.empty()) throw ConfigError("schema has a feature with no name");
    if (!names.insert(f.name).second) {
      throw ConfigError("duplicate feature name: " + f.name);
    }
  }
  if (label.column.empty()) throw ConfigError("schema has no label column");
  if (group.column.empty()) throw ConfigError("schema has no group column");
  if (!std::isfinite(label.positive_if_greater_than)) {
    throw ConfigError("label threshold must be finite");
  }
  for (const auto* col : {&label.column, &group.column}) {
    if (names.count(*col)) {
      throw ConfigError("column \"" + *col +
                        "\" cannot be both a feature and the label or group");
    }
  }
  if (context_column && names.count(*context_column)) {
    throw ConfigError("context column \"" + *context_column +
                      "\" cannot also be a feature");
  }
  if (group.recode.empty()) {
    throw ConfigError("schema group recode map is empty");
  }
  for (const auto& f : filters) {
    const auto* feat = find_feature(f.column);
    if (feat && feat->kind == ColumnKind::Categorical) {
      throw ConfigError("filter column \"" + f.column +
                        "\" is categorical; filters need numeric columns");
    }
    if (f.column == group.column) {
      throw ConfigError("filter column \"" + f.column +
                        "\" is the group column; filters need numeric columns");
    }
    if (!std::isfinite(f.greater_than)) {
      throw ConfigError("filter threshold for \"" + f.column +
                        "\" must be finite");
    }
  }
}

std::vector<std::pair<std::string, ColumnKind>> Schema::required_columns()
    const {
  std::vector<std::pair<std::string, ColumnKind>> cols;
  auto add = [&](const std::string& name, ColumnKind kind) {
    for (const auto& [n, k] : cols) {
      if (n == name) return;  // label/filter overlaps resolve to one column
    }
    cols.emplace_back(name, kind);
  };
  for (const auto& f : features) add(f.name, f.kind);
  add(label.column, ColumnKind::Numeric);
  add(group.column, ColumnKind::Categorical);
  for (const auto& f : filters) add(f.column, ColumnKind::Numeric);
  return cols;
}

}  // namespace fairshift
