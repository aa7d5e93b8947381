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

#include "fairshift/synth.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include "fairshift/errors.hpp"
#include "fairshift/hash.hpp"

namespace fairshift {

namespace {

// Uniform in (0, 1], then Box-Muller; avoids library-specific distribution
// internals so streams are identical across standard libraries.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) : rng_(seed) {}

  double uniform() {
    return 1.0 - static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u = uniform();
    const double v = uniform();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double angle = 2.0 * std::numbers::pi * v;
    spare_ = r * std::sin(angle);
    have_spare_ = true;
    return r * std::cos(angle);
  }

 private:
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

std::array<double, kGroupCount> parse_group_map(const nlohmann::json& j) {
  std::array<double, kGroupCount> out{};
  for (std::size_t h = 0; h < kGroupCount; ++h) {
    out[h] = j.at(to_string(static_cast<Group>(h))).get<double>();
  }
  return out;
}

nlohmann::json group_map_json(const std::array<double, kGroupCount>& values) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t h = 0; h < kGroupCount; ++h) {
    j[to_string(static_cast<Group>(h))] = values[h];
  }
  return j;
}

// Scalar broadcasts over all features; an array must match the count.
Eigen::VectorXd parse_mean(const nlohmann::json& j, std::size_t count) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(count));
  if (j.is_number()) {
    v.setConstant(j.get<double>());
    return v;
  }
  const auto values = j.get<std::vector<double>>();
  if (values.size() != count) {
    throw ConfigError("mean vector length " + std::to_string(values.size()) +
                      " does not match feature count " + std::to_string(count));
  }
  for (std::size_t i = 0; i < count; ++i) {
    v[static_cast<Eigen::Index>(i)] = values[i];
  }
  return v;
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

}  // namespace

SynthSpec SynthSpec::from_json(const nlohmann::json& j) {
  SynthSpec spec;
  try {
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("rows_per_context")) {
      spec.rows_per_context = j.at("rows_per_context").get<std::size_t>();
    }
    if (j.contains("features")) {
      const auto& f = j.at("features");
      if (f.contains("numeric")) {
        spec.numeric_features = f.at("numeric").get<std::size_t>();
      }
      if (f.contains("categorical")) {
        spec.categorical_features = f.at("categorical").get<std::size_t>();
      }
      if (f.contains("categorical_levels")) {
        spec.categorical_levels = f.at("categorical_levels").get<std::size_t>();
      }
    }
    if (j.contains("group_proportions")) {
      spec.group_proportions = parse_group_map(j.at("group_proportions"));
    }
    if (j.contains("base_rates")) {
      spec.base_rates = parse_group_map(j.at("base_rates"));
    }
    if (j.contains("class_means")) {
      for (std::size_t h = 0; h < kGroupCount; ++h) {
        const auto& m = j.at("class_means").at(to_string(static_cast<Group>(h)));
        spec.class_means[h].positive =
            parse_mean(m.at("positive"), spec.feature_count());
        spec.class_means[h].negative =
            parse_mean(m.at("negative"), spec.feature_count());
      }
    }
    if (j.contains("variances")) {
      spec.variances = parse_mean(j.at("variances"), spec.feature_count());
    }
    if (j.contains("shift_schedule")) {
      spec.shift_schedule = j.at("shift_schedule").get<std::vector<double>>();
    } else if (j.contains("contexts")) {
      spec.shift_schedule.assign(j.at("contexts").get<std::size_t>(), 0.0);
    }
    if (j.contains("context_ids")) {
      spec.context_ids = j.at("context_ids").get<std::vector<std::string>>();
    }
    if (j.contains("context_group_proportions")) {
      for (const auto& [id, props] :
           j.at("context_group_proportions").items()) {
        spec.context_group_proportions[id] = parse_group_map(props);
      }
    }
    if (j.contains("shifted_groups")) {
      spec.shifted_groups = {false, false, false};
      for (const auto& name : j.at("shifted_groups")) {
        const auto g = group_from_string(name.get<std::string>());
        if (!g) {
          throw ConfigError("shifted_groups entries must be W, B, or O");
        }
        spec.shifted_groups[static_cast<std::size_t>(*g)] = true;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed synth spec: ") + e.what());
  }
  spec.finalize();
  return spec;
}

SynthSpec SynthSpec::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open synth spec: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("synth spec " + path.string() +
                      " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

nlohmann::json SynthSpec::to_json() const {
  nlohmann::json means = nlohmann::json::object();
  for (std::size_t h = 0; h < kGroupCount; ++h) {
    means[to_string(static_cast<Group>(h))] = {
        {"positive", to_std(class_means[h].positive)},
        {"negative", to_std(class_means[h].negative)}};
  }
  std::vector<std::string> shifted;
  for (std::size_t h = 0; h < kGroupCount; ++h) {
    if (shifted_groups[h]) shifted.push_back(to_string(static_cast<Group>(h)));
  }
  nlohmann::json ctx_props = nlohmann::json::object();
  for (const auto& [id, props] : context_group_proportions) {
    ctx_props[id] = group_map_json(props);
  }
  return {{"seed", seed},
          {"rows_per_context", rows_per_context},
          {"features",
           {{"numeric", numeric_features},
            {"categorical", categorical_features},
            {"categorical_levels", categorical_levels}}},
          {"group_proportions", group_map_json(group_proportions)},
          {"base_rates", group_map_json(base_rates)},
          {"class_means", means},
          {"variances", to_std(variances)},
          {"shift_schedule", shift_schedule},
          {"context_ids", context_ids},
          {"context_group_proportions", ctx_props},
          {"shifted_groups", shifted}};
}

void SynthSpec::finalize() {
  if (rows_per_context == 0) throw ConfigError("rows_per_context must be > 0");
  if (feature_count() == 0) throw ConfigError("spec declares no features");
  if (categorical_features > 0 && categorical_levels < 2) {
    throw ConfigError("categorical_levels must be >= 2");
  }
  if (shift_schedule.empty()) shift_schedule.push_back(0.0);

  if (context_ids.empty()) {
    for (std::size_t c = 0; c < shift_schedule.size(); ++c) {
      std::string id = std::to_string(c);
      if (id.size() < 2) id.insert(0, "0");
      context_ids.push_back("C" + id);
    }
  }
  if (context_ids.size() != shift_schedule.size()) {
    throw ConfigError("context_ids and shift_schedule lengths differ");
  }

  const auto d = static_cast<Eigen::Index>(feature_count());
  for (std::size_t h = 0; h < kGroupCount; ++h) {
    if (class_means[h].positive.size() == 0) {
      class_means[h].positive = Eigen::VectorXd::Constant(d, 1.0);
    }
    if (class_means[h].negative.size() == 0) {
      class_means[h].negative = Eigen::VectorXd::Zero(d);
    }
    if (class_means[h].positive.size() != d ||
        class_means[h].negative.size() != d) {
      throw ConfigError("class mean vectors must have one entry per feature");
    }
  }
  if (variances.size() == 0) variances = Eigen::VectorXd::Ones(d);
  if (variances.size() != d) {
    throw ConfigError("variances must have one entry per feature");
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(variances[i] > 0.0)) throw ConfigError("variances must be > 0");
  }

  auto check_props = [](const std::array<double, kGroupCount>& p,
                        const std::string& what) {
    double sum = 0.0;
    for (const double v : p) {
      if (v < 0.0) throw ConfigError(what + " must be non-negative");
      sum += v;
    }
    if (std::fabs(sum - 1.0) > 1e-9) {
      throw ConfigError(what + " must sum to 1");
    }
  };
  check_props(group_proportions, "group proportions");
  for (const auto& [id, props] : context_group_proportions) {
    check_props(props, "group proportions for context " + id);
  }
  for (const double r : base_rates) {
    if (!(r > 0.0 && r < 1.0)) {
      throw ConfigError("base rates must lie strictly in (0, 1)");
    }
  }
  for (const double s : shift_schedule) {
    if (!std::isfinite(s)) throw ConfigError("shift magnitudes must be finite");
  }
}

Schema synth_schema(const SynthSpec& spec) {
  Schema s;
  for (std::size_t i = 0; i < spec.numeric_features; ++i) {
    s.features.push_back({"x" + std::to_string(i), ColumnKind::Numeric});
  }
  for (std::size_t i = 0; i < spec.categorical_features; ++i) {
    s.features.push_back({"c" + std::to_string(i), ColumnKind::Categorical});
  }
  s.label = {"outcome", 0.5};
  s.group.column = "group";
  s.group.recode = {{"W", Group::W}, {"B", Group::B}, {"O", Group::O}};
  return s;
}

ContextCollection generate_collection(const SynthSpec& spec) {
  SynthSpec checked = spec;
  checked.finalize();

  const std::size_t d = checked.feature_count();
  ContextCollection coll;

  for (std::size_t c = 0; c < checked.context_count(); ++c) {
    const std::string& id = checked.context_ids[c];
    const double shift = checked.shift_schedule[c];
    const auto prop_it = checked.context_group_proportions.find(id);
    const auto& props = prop_it != checked.context_group_proportions.end()
                            ? prop_it->second
                            : checked.group_proportions;

    NormalSampler sampler(derive_seed(checked.seed, "context:" + id));

    Dataset ds;
    ds.context = id;
    ds.raw_rows = checked.rows_per_context;
    ds.features.resize(d);
    for (std::size_t f = 0; f < d; ++f) {
      if (f < checked.numeric_features) {
        ds.features[f].name = "x" + std::to_string(f);
        ds.features[f].kind = ColumnKind::Numeric;
        ds.features[f].num.reserve(checked.rows_per_context);
      } else {
        ds.features[f].name =
            "c" + std::to_string(f - checked.numeric_features);
        ds.features[f].kind = ColumnKind::Categorical;
        ds.features[f].str.reserve(checked.rows_per_context);
      }
    }
    ds.labels.reserve(checked.rows_per_context);
    ds.groups.reserve(checked.rows_per_context);
    ds.weights.assign(checked.rows_per_context, 1.0);

    // Cut points splitting the latent range into equal-width bins over
    // roughly ±1 standard deviation; shifts move mass across them.
    std::vector<double> cuts;
    std::vector<std::string> level_labels;
    for (std::size_t l = 1; l < checked.categorical_levels; ++l) {
      cuts.push_back(-1.0 + 2.0 * static_cast<double>(l) /
                                static_cast<double>(checked.categorical_levels));
    }
    for (std::size_t l = 0; l < checked.categorical_levels; ++l) {
      level_labels.push_back("l" + std::to_string(l));
    }

    for (std::size_t r = 0; r < checked.rows_per_context; ++r) {
      const double ug = sampler.uniform();
      std::size_t h = 0;
      double acc = 0.0;
      for (std::size_t i = 0; i < kGroupCount; ++i) {
        acc += props[i];
        if (ug <= acc || i + 1 == kGroupCount) {
          h = i;
          break;
        }
      }
      const bool positive = sampler.uniform() <= checked.base_rates[h];
      const Eigen::VectorXd& mean = positive ? checked.class_means[h].positive
                                             : checked.class_means[h].negative;
      const double offset = checked.shifted_groups[h] ? shift : 0.0;

      for (std::size_t f = 0; f < d; ++f) {
        const auto fi = static_cast<Eigen::Index>(f);
        const double value = mean[fi] + offset +
                             std::sqrt(checked.variances[fi]) * sampler.normal();
        if (f < checked.numeric_features) {
          ds.features[f].num.push_back(value);
        } else {
          std::size_t level = 0;
          while (level < cuts.size() && value > cuts[level]) ++level;
          ds.features[f].str.push_back(level_labels[level]);
        }
      }
      ds.labels.push_back(positive ? 1 : 0);
      ds.groups.push_back(static_cast<Group>(h));
    }
    coll.add(std::move(ds));
  }
  return coll;
}

void emit_collection_csv(const ContextCollection& coll, const SynthSpec& spec,
                         const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const Schema schema = synth_schema(spec);
  for (const auto& [id, ds] : coll.members()) {
    write_context_csv(ds, schema, dir / (id + ".csv"));
  }
  // The schema that loads these files back; audits of the emitted
  // directory pass it via --schema.
  std::ofstream out(dir / "schema.json", std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write schema.json under " + dir.string());
  out << schema.to_json().dump(2) << "\n";
}

}  // namespace fairshift
