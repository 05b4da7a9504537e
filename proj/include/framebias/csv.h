// Copyright 2026 The Framebias Authors
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

// Minimal RFC 4180 reader/writer. Quoted fields may contain commas, doubled
// quotes and line breaks. CRLF and a leading UTF-8 BOM are accepted.

#ifndef FRAMEBIAS_CSV_H_
#define FRAMEBIAS_CSV_H_

#include <string>
#include <string_view>
#include <vector>

namespace framebias::csv {

struct Record {
  std::vector<std::string> fields;
  // 1-based line on which the record starts.
  int line = 0;
};

// Throws Error(kParse) on an unterminated quote or stray characters after a
// closing quote.
std::vector<Record> Parse(std::string_view text);

// Quotes the field only if it contains a comma, quote, CR or LF.
std::string EscapeField(std::string_view field);

std::string JoinRow(const std::vector<std::string>& fields);

}  // namespace framebias::csv

#endif  // FRAMEBIAS_CSV_H_
