// Copyright 2026 The asrfair Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace asrfair {

using Row = std::vector<std::string>;

// Comma-separated rows with RFC 4180 quoting: fields may be wrapped in double
// quotes, embedded quotes are doubled, quoted fields may contain commas and
// newlines. Records end at LF or CRLF.
class DelimitedReader {
 public:
  explicit DelimitedReader(std::istream& in) : in_(in) {}

  // Reads the next record. Returns false at end of input. Throws a parse
  // Error on an unterminated quoted field.
  bool next(Row& row);

  // 1-based physical line on which the last returned record started.
  std::size_t line() const noexcept { return record_line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
};

// Quotes the field only when it contains a comma, quote, CR or LF.
std::string quote_field(std::string_view field);
// Quotes unconditionally.
std::string quote_always(std::string_view field);
void write_row(std::ostream& out, const Row& row);

// Locale-independent fixed-point rendering ('.' separator). Negative zero is
// rendered without a sign.
std::string format_fixed(double value, int decimals);
// Shortest round-trip representation.
std::string format_exact(double value);
std::optional<double> parse_number(std::string_view text);

std::vector<std::string> split_whitespace(std::string_view text);
std::string join(const std::vector<std::string>& tokens, std::string_view sep);
std::string_view trim(std::string_view text);
std::string to_lower_ascii(std::string_view text);

}  // namespace asrfair
