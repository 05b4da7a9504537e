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

#include "framebias/matrix.h"

#include <cmath>

#include "framebias/error.h"

namespace framebias {
namespace {

std::unordered_map<std::string, size_t> IndexIds(
    const std::vector<std::string>& ids, std::string_view axis) {
  std::unordered_map<std::string, size_t> pos;
  pos.reserve(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) {
    if (!pos.emplace(ids[i], i).second) {
      Fail(ErrorCode::kValidation, "duplicate " + std::string(axis) +
                                       " id '" + ids[i] + "'");
    }
  }
  return pos;
}

std::string Cell(const LabeledMatrix& m, size_t i) {
  return "(" + m.row_ids()[i / m.cols()] + ", " + m.col_ids()[i % m.cols()] +
         ")";
}

}  // namespace

LabeledMatrix::LabeledMatrix(std::vector<std::string> row_ids,
                             std::vector<std::string> col_ids,
                             std::vector<double> values)
    : row_ids_(std::move(row_ids)),
      col_ids_(std::move(col_ids)),
      values_(std::move(values)) {
  if (values_.size() != row_ids_.size() * col_ids_.size()) {
    Fail(ErrorCode::kShape,
         "matrix has " + std::to_string(values_.size()) + " values for " +
             std::to_string(row_ids_.size()) + " x " +
             std::to_string(col_ids_.size()) + " ids");
  }
  row_pos_ = IndexIds(row_ids_, "row");
  col_pos_ = IndexIds(col_ids_, "column");
}

std::optional<size_t> LabeledMatrix::FindRow(std::string_view id) const {
  const auto it = row_pos_.find(std::string(id));
  if (it == row_pos_.end()) return std::nullopt;
  return it->second;
}

std::optional<size_t> LabeledMatrix::FindCol(std::string_view id) const {
  const auto it = col_pos_.find(std::string(id));
  if (it == col_pos_.end()) return std::nullopt;
  return it->second;
}

std::vector<double> LabeledMatrix::TransposedValues() const {
  std::vector<double> out(values_.size());
  for (size_t r = 0; r < rows(); ++r) {
    for (size_t c = 0; c < cols(); ++c) out[c * rows() + r] = at(r, c);
  }
  return out;
}

SimilarityMatrix::SimilarityMatrix(std::vector<std::string> row_ids,
                                   std::vector<std::string> col_ids,
                                   std::vector<double> values)
    : LabeledMatrix(std::move(row_ids), std::move(col_ids), std::move(values)) {
  for (size_t i = 0; i < this->values().size(); ++i) {
    if (!std::isfinite(this->values()[i])) {
      Fail(ErrorCode::kValidation,
           "similarity value at " + Cell(*this, i) + " is not finite");
    }
  }
}

SimilarityMatrix SimilarityMatrix::Transposed() const {
  return SimilarityMatrix(col_ids(), row_ids(), TransposedValues());
}

RelevancyMatrix::RelevancyMatrix(std::vector<std::string> row_ids,
                                 std::vector<std::string> col_ids,
                                 std::vector<double> values)
    : LabeledMatrix(std::move(row_ids), std::move(col_ids), std::move(values)) {
  for (size_t i = 0; i < this->values().size(); ++i) {
    const double v = this->values()[i];
    if (!(v >= 0.0 && v <= 1.0)) {
      Fail(ErrorCode::kValidation,
           "relevance value at " + Cell(*this, i) + " is outside [0, 1]");
    }
  }
}

RelevancyMatrix RelevancyMatrix::Transposed() const {
  return RelevancyMatrix(col_ids(), row_ids(), TransposedValues());
}

SimilarityMatrix SumSimilarityMatrices(
    std::span<const SimilarityMatrix> matrices, bool mean) {
  if (matrices.empty()) {
    Fail(ErrorCode::kPrecondition, "no similarity matrices to sum");
  }
  const SimilarityMatrix& first = matrices.front();
  std::vector<double> sum = first.values();
  for (size_t m = 1; m < matrices.size(); ++m) {
    const SimilarityMatrix& next = matrices[m];
    if (next.rows() != first.rows() || next.cols() != first.cols()) {
      Fail(ErrorCode::kShape,
           "matrix " + std::to_string(m) + " is " +
               std::to_string(next.rows()) + " x " +
               std::to_string(next.cols()) + ", expected " +
               std::to_string(first.rows()) + " x " +
               std::to_string(first.cols()));
    }
    if (!next.SameLayout(first)) {
      Fail(ErrorCode::kShape,
           "matrix " + std::to_string(m) + " has different row/column ids");
    }
    for (size_t i = 0; i < sum.size(); ++i) sum[i] += next.values()[i];
  }
  if (mean) {
    const double n = static_cast<double>(matrices.size());
    for (double& v : sum) v /= n;
  }
  return SimilarityMatrix(first.row_ids(), first.col_ids(), std::move(sum));
}

}  // namespace framebias
