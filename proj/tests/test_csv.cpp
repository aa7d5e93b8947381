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

#include <cstdlib>
#include <string>
#include <vector>

#include "fairshift/csv.hpp"
#include "fairshift/errors.hpp"
#include "test_util.hpp"

using namespace fairshift;

TEST_CASE("parses plain rows under either line ending") {
  for (const char* text : {"a,b,c\n1,2,3\n4,5,6\n", "a,b,c\r\n1,2,3\r\n4,5,6",
                           "a,b,c\r\n1,2,3\n4,5,6\r\n"}) {
    CsvTable t = parse_csv(text);
    CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0] == std::vector<std::string>{"1", "2", "3"});
    CHECK(t.rows[1] == std::vector<std::string>{"4", "5", "6"});
  }
}

TEST_CASE("quoted fields carry commas, escaped quotes and newlines") {
  CsvTable t = parse_csv("name,note\n\"Doe, J\",\"said \"\"hi\"\"\"\n"
                         "plain,\"line one\nline two\"\n");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][0] == "Doe, J");
  CHECK(t.rows[0][1] == "said \"hi\"");
  CHECK(t.rows[1][1] == "line one\nline two");
}

TEST_CASE("empty fields and trailing commas are preserved") {
  CsvTable t = parse_csv("a,b,c\n,,\nx,,z\n");
  CHECK(t.rows[0] == std::vector<std::string>{"", "", ""});
  CHECK(t.rows[1] == std::vector<std::string>{"x", "", "z"});
}

TEST_CASE("ragged rows name the row and both widths") {
  CHECK_THROWS_WITH_AS(parse_csv("a,b\n1,2,3\n", "f.csv"),
                       doctest::Contains("row 1 has 3 fields"), DataError);
  CHECK_THROWS_AS(parse_csv("a,b\n1\n"), DataError);
}

TEST_CASE("unbalanced quote and missing header are rejected") {
  CHECK_THROWS_AS(parse_csv("a,b\n\"open,2\n"), DataError);
  CHECK_THROWS_AS(parse_csv(""), DataError);
}

TEST_CASE("column_index resolves names and reports absences") {
  CsvTable t = parse_csv("alpha,beta\n1,2\n");
  CHECK(t.column_index("alpha") == 0);
  CHECK(t.column_index("beta") == 1);
  CHECK(t.column_index("gamma") == CsvTable::npos);
}

TEST_CASE("fields needing quotes are quoted, others stay bare") {
  CHECK(format_csv_field("plain") == "plain");
  CHECK(format_csv_field("a,b") == "\"a,b\"");
  CHECK(format_csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  CHECK(format_csv_field("two\nlines") == "\"two\nlines\"");
  CHECK(format_csv_field("") == "");
}

TEST_CASE("writer output parses back to the same cells") {
  testutil::TempDir tmp;
  std::vector<std::string> header = {"id", "text"};
  std::vector<std::vector<std::string>> rows = {
      {"1", "with, comma"}, {"2", "with \"quote\""}, {"3", "multi\nline"},
      {"4", ""}};
  write_csv_file(tmp / "t.csv", header, rows);
  CsvTable t = read_csv_file(tmp / "t.csv");
  CHECK(t.header == header);
  CHECK(t.rows == rows);
}

TEST_CASE("rows are terminated with CRLF") {
  testutil::TempDir tmp;
  write_csv_file(tmp / "t.csv", {"a"}, {{"1"}});
  CHECK(testutil::read_file(tmp / "t.csv") == "a\r\n1\r\n");
}

TEST_CASE("numeric formatting survives a parse round trip exactly") {
  for (double v : {0.1, 1.0 / 3.0, 1e-17, 1234567890.123456,
                   -2.2250738585072014e-308, 98765.4321e100}) {
    std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_double(1.0) == "1");
}
