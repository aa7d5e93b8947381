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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fairshift {

// Parsed CSV content: a header row plus data rows, all fields as strings.
// Every data row has exactly header.size() fields.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Index of a header column, or npos when absent.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t column_index(std::string_view name) const;
};

// RFC 4180 parser. Accepts quoted fields (with "" escapes), embedded
// separators and line breaks inside quotes, and both LF and CRLF endings.
// Throws DataError on unbalanced quotes or rows whose field count differs
// from the header.
CsvTable parse_csv(std::string_view text, std::string_view origin = "<memory>");
CsvTable read_csv_file(const std::filesystem::path& path);

// RFC 4180 serialization: fields containing separators, quotes or line
// breaks are quoted, quotes doubled, records terminated with CRLF.
std::string format_csv_field(std::string_view field);
std::string format_csv_row(const std::vector<std::string>& fields);
void write_csv_file(const std::filesystem::path& path,
                    const std::vector<std::string>& header,
                    const std::vector<std::vector<std::string>>& rows);

// Shortest round-trip formatting used for every numeric artifact field.
std::string format_double(double value);

}  // namespace fairshift
