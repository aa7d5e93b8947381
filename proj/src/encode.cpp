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

#include "fairshift/encode.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fairshift/errors.hpp"

namespace fairshift {

namespace {

const Column& feature_column(const Dataset& ds, const std::string& name) {
  for (const auto& col : ds.features) {
    if (col.name == name) return col;
  }
  throw DataError("dataset \"" + ds.context + "\" has no feature column \"" +
                  name + "\"");
}

// Writes the encoding of rows [begin, end) of one feature into columns
// [col0, col0 + width) of out, starting at out row 0.
void encode_block(const FeatureEncoding& enc, const Column& col,
                  std::size_t begin, std::size_t end, std::size_t col0,
                  EncodedMatrix& out) {
  if (enc.kind == ColumnKind::Numeric) {
    for (std::size_t r = begin; r < end; ++r) {
      out(r - begin, col0) = (col.num[r] - enc.mean) / enc.stddev;
    }
    return;
  }
  for (std::size_t r = begin; r < end; ++r) {
    const auto it = std::lower_bound(enc.categories.begin(),
                                     enc.categories.end(), col.str[r]);
    if (it != enc.categories.end() && *it == col.str[r]) {
      const auto pos = static_cast<std::size_t>(it - enc.categories.begin());
      out(r - begin, col0 + pos) = 1.0;
    }
  }
}

}  // namespace

std::size_t EncoderSpec::dim() const {
  std::size_t d = 0;
  for (const auto& f : features) d += f.width();
  return d;
}

nlohmann::json EncoderSpec::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& f : features) {
    nlohmann::json j;
    j["name"] = f.name;
    if (f.kind == ColumnKind::Numeric) {
      j["kind"] = "numeric";
      j["mean"] = f.mean;
      j["stddev"] = f.stddev;
    } else {
      j["kind"] = "categorical";
      j["categories"] = f.categories;
    }
    arr.push_back(std::move(j));
  }
  return nlohmann::json{{"features", arr}, {"dim", dim()}};
}

EncoderSpec EncoderSpec::from_json(const nlohmann::json& j) {
  EncoderSpec spec;
  try {
    for (const auto& f : j.at("features")) {
      FeatureEncoding enc;
      enc.name = f.at("name").get<std::string>();
      const auto kind = f.at("kind").get<std::string>();
      if (kind == "numeric") {
        enc.kind = ColumnKind::Numeric;
        enc.mean = f.at("mean").get<double>();
        enc.stddev = f.at("stddev").get<double>();
      } else if (kind == "categorical") {
        enc.kind = ColumnKind::Categorical;
        enc.categories = f.at("categories").get<std::vector<std::string>>();
      } else {
        throw ConfigError("unknown encoder feature kind: " + kind);
      }
      spec.features.push_back(std::move(enc));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed encoder document: ") + e.what());
  }
  return spec;
}

EncoderSpec fit_encoder(const Dataset& train, const Schema& schema) {
  const Dataset* parts[] = {&train};
  return fit_encoder(parts, schema);
}

EncoderSpec fit_encoder(std::span<const Dataset* const> parts,
                        const Schema& schema) {
  std::size_t total = 0;
  for (const auto* p : parts) total += p->size();
  if (total == 0) throw DataError("cannot fit encoder on empty data");

  EncoderSpec spec;
  spec.features.reserve(schema.features.size());
  for (const auto& f : schema.features) {
    FeatureEncoding enc;
    enc.name = f.name;
    enc.kind = f.kind;
    if (f.kind == ColumnKind::Numeric) {
      double sum = 0.0;
      for (const auto* p : parts) {
        const Column& col = feature_column(*p, f.name);
        for (double v : col.num) sum += v;
      }
      enc.mean = sum / static_cast<double>(total);
      double ss = 0.0;
      for (const auto* p : parts) {
        const Column& col = feature_column(*p, f.name);
        for (double v : col.num) ss += (v - enc.mean) * (v - enc.mean);
      }
      const double var = ss / static_cast<double>(total);
      enc.stddev = var > 0.0 ? std::sqrt(var) : 1.0;
    } else {
      std::map<std::string, std::size_t> counts;
      for (const auto* p : parts) {
        const Column& col = feature_column(*p, f.name);
        for (const auto& v : col.str) ++counts[v];
      }
      for (const auto& [cat, n] : counts) {
        if (n >= schema.min_category_count) enc.categories.push_back(cat);
      }
    }
    spec.features.push_back(std::move(enc));
  }
  return spec;
}

EncodedMatrix transform(const EncoderSpec& spec, const Dataset& ds) {
  const std::size_t m = ds.size();
  const std::size_t d = spec.dim();
  EncodedMatrix out = EncodedMatrix::Zero(static_cast<Eigen::Index>(m),
                                          static_cast<Eigen::Index>(d));
  std::size_t col0 = 0;
  for (const auto& enc : spec.features) {
    const Column& col = feature_column(ds, enc.name);
    encode_block(enc, col, 0, m, col0, out);
    col0 += enc.width();
  }
  return out;
}

EncodedAggregate accumulate_encoded(const EncoderSpec& spec,
                                    const Dataset& ds) {
  constexpr std::size_t kBlock = 8192;
  const std::size_t m = ds.size();
  const std::size_t d = spec.dim();

  EncodedAggregate agg;
  agg.rows = m;
  agg.sum = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));

  std::vector<const Column*> cols;
  cols.reserve(spec.features.size());
  for (const auto& enc : spec.features) {
    cols.push_back(&feature_column(ds, enc.name));
  }

  EncodedMatrix block;
  for (std::size_t begin = 0; begin < m; begin += kBlock) {
    const std::size_t end = std::min(begin + kBlock, m);
    block = EncodedMatrix::Zero(static_cast<Eigen::Index>(end - begin),
                                static_cast<Eigen::Index>(d));
    std::size_t col0 = 0;
    for (std::size_t f = 0; f < spec.features.size(); ++f) {
      encode_block(spec.features[f], *cols[f], begin, end, col0, block);
      col0 += spec.features[f].width();
    }
    agg.sum += block.colwise().sum().transpose();
    agg.sum_sq_norms += block.rowwise().squaredNorm().sum();
  }
  return agg;
}

}  // namespace fairshift
