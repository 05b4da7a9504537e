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

// Dense query x gallery matrices with id labels on both axes.

#ifndef FRAMEBIAS_MATRIX_H_
#define FRAMEBIAS_MATRIX_H_

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace framebias {

// Row-major values with unique row and column ids. Shared storage for the
// two strongly-typed matrices below; not used directly.
class LabeledMatrix {
 public:
  size_t rows() const { return row_ids_.size(); }
  size_t cols() const { return col_ids_.size(); }
  const std::vector<std::string>& row_ids() const { return row_ids_; }
  const std::vector<std::string>& col_ids() const { return col_ids_; }
  const std::vector<double>& values() const { return values_; }

  double at(size_t r, size_t c) const { return values_[r * cols() + c]; }
  std::span<const double> row(size_t r) const {
    return {values_.data() + r * cols(), cols()};
  }

  std::optional<size_t> FindRow(std::string_view id) const;
  std::optional<size_t> FindCol(std::string_view id) const;

  // Same dimensions and identical id lists.
  bool SameLayout(const LabeledMatrix& other) const {
    return row_ids_ == other.row_ids_ && col_ids_ == other.col_ids_;
  }

 protected:
  LabeledMatrix() = default;
  // Throws kShape on a size mismatch and kValidation on duplicate ids.
  LabeledMatrix(std::vector<std::string> row_ids,
                std::vector<std::string> col_ids, std::vector<double> values);

  std::vector<double> TransposedValues() const;

  friend bool operator==(const LabeledMatrix&, const LabeledMatrix&) = default;

 private:
  std::vector<std::string> row_ids_;
  std::vector<std::string> col_ids_;
  std::vector<double> values_;
  std::unordered_map<std::string, size_t> row_pos_;
  std::unordered_map<std::string, size_t> col_pos_;
};

// Retrieval scores; every value finite.
class SimilarityMatrix : public LabeledMatrix {
 public:
  SimilarityMatrix() = default;
  SimilarityMatrix(std::vector<std::string> row_ids,
                   std::vector<std::string> col_ids,
                   std::vector<double> values);

  SimilarityMatrix Transposed() const;

  friend bool operator==(const SimilarityMatrix&,
                         const SimilarityMatrix&) = default;
};

// Graded relevance; every value in [0, 1].
class RelevancyMatrix : public LabeledMatrix {
 public:
  RelevancyMatrix() = default;
  RelevancyMatrix(std::vector<std::string> row_ids,
                  std::vector<std::string> col_ids,
                  std::vector<double> values);

  RelevancyMatrix Transposed() const;

  friend bool operator==(const RelevancyMatrix&,
                         const RelevancyMatrix&) = default;
};

// Elementwise sum of same-layout matrices, optionally divided by their count.
// Throws kPrecondition on an empty list, kShape on any layout mismatch.
SimilarityMatrix SumSimilarityMatrices(
    std::span<const SimilarityMatrix> matrices, bool mean = false);

}  // namespace framebias

#endif  // FRAMEBIAS_MATRIX_H_
