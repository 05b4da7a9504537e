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

// Matrix file formats.
//
// Text: comma-separated. The header row holds a corner label followed by the
// gallery ids; every following row holds a query id and its scores. Values
// are written with 17 significant digits so they re-read bit-exactly.
//
// SIMM binary, all integers little-endian:
//   "SIMM"  u8 version (=1)  u32 rows  u32 cols
//   rows*cols f64 values, row-major
//   row id list:    u32 count (=rows), then per id u32 byte length + UTF-8
//   column id list: u32 count (=cols), then per id u32 byte length + UTF-8

#ifndef FRAMEBIAS_MATRIX_IO_H_
#define FRAMEBIAS_MATRIX_IO_H_

#include <string>
#include <string_view>
#include <vector>

#include "framebias/matrix.h"

namespace framebias {

enum class MatrixFormat { kText, kSimm };

struct MatrixData {
  std::vector<std::string> row_ids;
  std::vector<std::string> col_ids;
  std::vector<double> values;
};

// Detects the format from the leading magic bytes.
MatrixData DecodeMatrix(std::string_view bytes);
std::string EncodeMatrix(const MatrixData& data, MatrixFormat format);

MatrixData ToData(const LabeledMatrix& matrix);

SimilarityMatrix ReadSimilarityMatrix(const std::string& path);
RelevancyMatrix ReadRelevancyMatrix(const std::string& path);

// Format follows the extension: ".simm" is binary, anything else is text.
MatrixFormat FormatForPath(std::string_view path);
void WriteMatrix(const std::string& path, const LabeledMatrix& matrix);

}  // namespace framebias

#endif  // FRAMEBIAS_MATRIX_IO_H_
