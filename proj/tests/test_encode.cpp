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

#include <cmath>
#include <string>
#include <vector>

#include "fairshift/encode.hpp"

using namespace fairshift;

namespace {

Schema two_feature_schema(std::size_t min_category_count = 1) {
  Schema s;
  s.features = {{"age", ColumnKind::Numeric},
                {"kind", ColumnKind::Categorical}};
  s.label = {"y", 0.5};
  s.group.column = "g";
  s.group.recode = {{"W", Group::W}, {"B", Group::B}, {"O", Group::O}};
  s.min_category_count = min_category_count;
  return s;
}

Dataset make_ds(std::vector<double> age, std::vector<std::string> kind) {
  Dataset ds;
  ds.context = "T";
  Column a{"age", ColumnKind::Numeric, std::move(age), {}};
  Column k{"kind", ColumnKind::Categorical, {}, std::move(kind)};
  ds.features = {a, k};
  ds.labels.assign(ds.features[0].num.size(), 0);
  ds.groups.assign(ds.labels.size(), Group::W);
  ds.weights.assign(ds.labels.size(), 1.0);
  return ds;
}

}  // namespace

TEST_CASE("standardization uses the population convention") {
  Dataset ds = make_ds({1.0, 2.0, 3.0}, {"a", "a", "a"});
  EncoderSpec enc = fit_encoder(ds, two_feature_schema());
  CHECK(enc.features[0].mean == doctest::Approx(2.0));
  CHECK(enc.features[0].stddev == doctest::Approx(std::sqrt(2.0 / 3.0)));

  EncodedMatrix X = transform(enc, ds);
  CHECK(X(0, 0) == doctest::Approx(-1.0 / std::sqrt(2.0 / 3.0) * 1.0));
  CHECK(X(1, 0) == doctest::Approx(0.0));
  // Standardized column: zero mean, unit population variance.
  CHECK(X.col(0).mean() == doctest::Approx(0.0));
  CHECK(X.col(0).squaredNorm() / 3.0 == doctest::Approx(1.0));
}

TEST_CASE("constant numeric features encode as zero, not NaN") {
  Dataset ds = make_ds({5.0, 5.0, 5.0}, {"a", "b", "a"});
  EncoderSpec enc = fit_encoder(ds, two_feature_schema());
  CHECK(enc.features[0].stddev == 1.0);
  EncodedMatrix X = transform(enc, ds);
  CHECK(X(0, 0) == 0.0);
  CHECK(X.allFinite());
}

TEST_CASE("one-hot columns follow lexicographic category order") {
  Dataset ds = make_ds({1, 2, 3}, {"zeta", "alpha", "mid"});
  EncoderSpec enc = fit_encoder(ds, two_feature_schema());
  CHECK(enc.features[1].categories ==
        std::vector<std::string>{"alpha", "mid", "zeta"});
  CHECK(enc.dim() == 4);

  EncodedMatrix X = transform(enc, ds);
  // Row 0 is "zeta": last one-hot slot.
  CHECK(X(0, 3) == 1.0);
  CHECK(X(0, 1) == 0.0);
  CHECK(X(1, 1) == 1.0);  // "alpha"
  CHECK(X(2, 2) == 1.0);  // "mid"
  for (int r = 0; r < 3; ++r) CHECK(X.row(r).tail(3).sum() == 1.0);
}

TEST_CASE("categories unseen at fit time encode as an all-zero block") {
  Dataset train = make_ds({1, 2}, {"a", "b"});
  EncoderSpec enc = fit_encoder(train, two_feature_schema());
  Dataset deploy = make_ds({1, 2}, {"a", "unseen"});
  EncodedMatrix X = transform(enc, deploy);
  CHECK(X.row(1).tail(2).sum() == 0.0);
  CHECK(X.row(0).tail(2).sum() == 1.0);
}

TEST_CASE("width is one per numeric and one per kept category") {
  Dataset ds = make_ds({1, 2, 3, 4}, {"m", "f", "m", "f"});
  EncoderSpec enc = fit_encoder(ds, two_feature_schema());
  CHECK(enc.dim() == 3);
}

TEST_CASE("rare categories fall below the frequency floor") {
  Dataset ds = make_ds({1, 2, 3, 4, 5}, {"a", "a", "b", "b", "rare"});
  EncoderSpec enc = fit_encoder(ds, two_feature_schema(2));
  CHECK(enc.features[1].categories == std::vector<std::string>{"a", "b"});
  // The dropped category behaves exactly like an unseen one.
  EncodedMatrix X = transform(enc, ds);
  CHECK(X.row(4).tail(2).sum() == 0.0);
}

TEST_CASE("multi-part fits equal a fit on the concatenation") {
  Dataset a = make_ds({1, 2, 3}, {"x", "y", "x"});
  Dataset b = make_ds({10, 20}, {"z", "y"});
  Dataset both = make_ds({1, 2, 3, 10, 20}, {"x", "y", "x", "z", "y"});

  const Dataset* parts[] = {&a, &b};
  EncoderSpec multi = fit_encoder(parts, two_feature_schema());
  EncoderSpec single = fit_encoder(both, two_feature_schema());

  CHECK(multi.features[0].mean ==
        doctest::Approx(single.features[0].mean).epsilon(1e-12));
  CHECK(multi.features[0].stddev ==
        doctest::Approx(single.features[0].stddev).epsilon(1e-12));
  CHECK(multi.features[1].categories == single.features[1].categories);
}

TEST_CASE("encoder specs survive a JSON round trip") {
  Dataset ds = make_ds({1.5, 2.5, 3.5}, {"a", "b", "a"});
  EncoderSpec enc = fit_encoder(ds, two_feature_schema());
  EncoderSpec back = EncoderSpec::from_json(enc.to_json());
  REQUIRE(back.features.size() == enc.features.size());
  CHECK(back.features[0].mean == enc.features[0].mean);
  CHECK(back.features[0].stddev == enc.features[0].stddev);
  CHECK(back.features[1].categories == enc.features[1].categories);
  CHECK(back.dim() == enc.dim());
}

TEST_CASE("aggregates match the materialized matrix") {
  Dataset ds = make_ds({1, 2, 3, 4, 5, 6}, {"a", "b", "c", "a", "b", "c"});
  EncoderSpec enc = fit_encoder(ds, two_feature_schema());
  EncodedMatrix X = transform(enc, ds);
  EncodedAggregate agg = accumulate_encoded(enc, ds);
  CHECK(agg.rows == 6);
  CHECK((agg.sum - X.colwise().sum().transpose()).norm() ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(agg.sum_sq_norms ==
        doctest::Approx(X.rowwise().squaredNorm().sum()).epsilon(1e-12));
}
