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

// Deliberately naive reference implementations of the ranking metrics, for
// tests only. Nothing here calls into the library: ranking is a repeated
// arg-max scan, the ideal ordering is an insertion sort, and precision at
// each cut is recounted from scratch.

#ifndef FRAMEBIAS_TESTS_ORACLE_NAIVE_METRICS_H_
#define FRAMEBIAS_TESTS_ORACLE_NAIVE_METRICS_H_

#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

namespace framebias::oracle {

// Highest score first; among equal scores the lowest index wins.
inline std::vector<size_t> NaiveRanking(const std::vector<double>& scores) {
  std::vector<bool> taken(scores.size(), false);
  std::vector<size_t> order;
  for (size_t step = 0; step < scores.size(); ++step) {
    std::optional<size_t> best;
    for (size_t i = 0; i < scores.size(); ++i) {
      if (taken[i]) continue;
      if (!best || scores[i] > scores[*best]) best = i;
    }
    taken[*best] = true;
    order.push_back(*best);
  }
  return order;
}

inline double Discount(size_t rank_one_based) {
  return std::log(2.0) / std::log(static_cast<double>(rank_one_based) + 1.0);
}

// nullopt when no relevance is positive.
inline std::optional<double> NaiveNdcg(const std::vector<double>& scores,
                                       const std::vector<double>& rel) {
  std::vector<double> ideal = rel;
  for (size_t i = 1; i < ideal.size(); ++i) {
    for (size_t j = i; j > 0 && ideal[j - 1] < ideal[j]; --j) {
      const double t = ideal[j];
      ideal[j] = ideal[j - 1];
      ideal[j - 1] = t;
    }
  }
  double idcg = 0;
  for (size_t i = 0; i < ideal.size(); ++i) idcg += ideal[i] * Discount(i + 1);
  if (idcg == 0) return std::nullopt;
  const std::vector<size_t> order = NaiveRanking(scores);
  double dcg = 0;
  for (size_t i = 0; i < order.size(); ++i) dcg += rel[order[i]] * Discount(i + 1);
  return dcg / idcg;
}

inline std::optional<double> NaiveAp(const std::vector<double>& scores,
                                     const std::vector<double>& rel,
                                     double threshold) {
  const std::vector<size_t> order = NaiveRanking(scores);
  double total = 0;
  int relevant = 0;
  for (size_t k = 0; k < order.size(); ++k) {
    if (!(rel[order[k]] >= threshold)) continue;
    ++relevant;
    int in_prefix = 0;
    for (size_t i = 0; i <= k; ++i) in_prefix += rel[order[i]] >= threshold;
    total += static_cast<double>(in_prefix) / static_cast<double>(k + 1);
  }
  if (relevant == 0) return std::nullopt;
  return total / relevant;
}

struct NaiveMatrix {
  size_t rows = 0, cols = 0;
  std::vector<double> v;  // row-major
  std::vector<double> Row(size_t r) const {
    return {v.begin() + static_cast<long>(r * cols),
            v.begin() + static_cast<long>((r + 1) * cols)};
  }
  NaiveMatrix T() const {
    NaiveMatrix t{cols, rows, std::vector<double>(v.size())};
    for (size_t r = 0; r < rows; ++r)
      for (size_t c = 0; c < cols; ++c) t.v[c * rows + r] = v[r * cols + c];
    return t;
  }
};

// Mean over queries with a defined value; nullopt if none.
template <typename Scorer>
std::optional<double> NaiveMean(const NaiveMatrix& sim, const NaiveMatrix& rel,
                                Scorer scorer) {
  double total = 0;
  int n = 0;
  for (size_t r = 0; r < sim.rows; ++r) {
    const std::optional<double> s = scorer(sim.Row(r), rel.Row(r));
    if (s) {
      total += *s;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return total / n;
}

}  // namespace framebias::oracle

#endif  // FRAMEBIAS_TESTS_ORACLE_NAIVE_METRICS_H_
