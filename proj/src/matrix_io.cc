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

#include "framebias/matrix_io.h"

#include <bit>
#include <charconv>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "framebias/csv.h"
#include "framebias/dataset.h"
#include "framebias/error.h"

namespace framebias {
namespace {

constexpr std::string_view kMagic = "SIMM";
constexpr uint8_t kVersion = 1;

void PutU32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void PutF64(std::string& out, double v) {
  const auto bits = std::bit_cast<uint64_t>(v);
  for (int i = 0; i < 8; ++i) {
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
  }
}

class ByteReader {
 public:
  explicit ByteReader(std::string_view bytes) : bytes_(bytes) {}

  std::string_view Take(size_t n) {
    if (bytes_.size() - pos_ < n) {
      Fail(ErrorCode::kParse, "SIMM data truncated at byte " +
                                  std::to_string(pos_));
    }
    std::string_view out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
  }
  uint64_t Little(size_t width) {
    const std::string_view b = Take(width);
    uint64_t v = 0;
    for (size_t i = 0; i < width; ++i) {
      v |= static_cast<uint64_t>(static_cast<uint8_t>(b[i])) << (8 * i);
    }
    return v;
  }
  uint32_t U32() { return static_cast<uint32_t>(Little(4)); }
  double F64() { return std::bit_cast<double>(Little(8)); }
  bool AtEnd() const { return pos_ == bytes_.size(); }
  size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::string_view bytes_;
  size_t pos_ = 0;
};

std::vector<std::string> ReadIdList(ByteReader& in, uint32_t expected,
                                    std::string_view axis) {
  const uint32_t count = in.U32();
  if (count != expected) {
    Fail(ErrorCode::kParse, "SIMM " + std::string(axis) + " id count " +
                                std::to_string(count) + " does not match " +
                                std::to_string(expected));
  }
  std::vector<std::string> ids;
  ids.reserve(count);
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t len = in.U32();
    ids.emplace_back(in.Take(len));
  }
  return ids;
}

MatrixData DecodeSimm(std::string_view bytes) {
  ByteReader in(bytes);
  in.Take(kMagic.size());
  const auto version = static_cast<uint8_t>(in.Take(1)[0]);
  if (version != kVersion) {
    Fail(ErrorCode::kParse,
         "unsupported SIMM version " + std::to_string(version));
  }
  const uint32_t rows = in.U32();
  const uint32_t cols = in.U32();
  const uint64_t count = static_cast<uint64_t>(rows) * cols;
  if (count > in.remaining() / 8) {
    Fail(ErrorCode::kParse, "SIMM header declares " + std::to_string(rows) +
                                " x " + std::to_string(cols) +
                                " values but the data is shorter");
  }
  MatrixData data;
  data.values.reserve(count);
  for (uint64_t i = 0; i < count; ++i) data.values.push_back(in.F64());
  data.row_ids = ReadIdList(in, rows, "row");
  data.col_ids = ReadIdList(in, cols, "column");
  if (!in.AtEnd()) Fail(ErrorCode::kParse, "trailing bytes after SIMM data");
  return data;
}

double ParseValue(const std::string& text, int line) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() ||
      (errno == ERANGE && std::isinf(v))) {
    Fail(ErrorCode::kParse, "line " + std::to_string(line) +
                                ": not a number: '" + text + "'");
  }
  return v;
}

MatrixData DecodeText(std::string_view text) {
  const std::vector<csv::Record> records = csv::Parse(text);
  if (records.empty()) Fail(ErrorCode::kParse, "matrix file is empty");
  MatrixData data;
  const auto& header = records.front().fields;
  data.col_ids.assign(header.begin() + 1, header.end());
  const size_t width = header.size();
  for (size_t r = 1; r < records.size(); ++r) {
    const csv::Record& rec = records[r];
    if (rec.fields.size() != width) {
      Fail(ErrorCode::kParse, "line " + std::to_string(rec.line) +
                                  ": expected " + std::to_string(width) +
                                  " fields, got " +
                                  std::to_string(rec.fields.size()));
    }
    data.row_ids.push_back(rec.fields[0]);
    for (size_t c = 1; c < width; ++c) {
      data.values.push_back(ParseValue(rec.fields[c], rec.line));
    }
  }
  return data;
}

// Shortest text that parses back to the same double.
std::string FormatValue(double v) {
  char buf[40];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

}  // namespace

MatrixData DecodeMatrix(std::string_view bytes) {
  if (bytes.starts_with(kMagic)) return DecodeSimm(bytes);
  return DecodeText(bytes);
}

std::string EncodeMatrix(const MatrixData& data, MatrixFormat format) {
  const size_t rows = data.row_ids.size();
  const size_t cols = data.col_ids.size();
  std::string out;
  if (format == MatrixFormat::kSimm) {
    out += kMagic;
    out.push_back(static_cast<char>(kVersion));
    PutU32(out, static_cast<uint32_t>(rows));
    PutU32(out, static_cast<uint32_t>(cols));
    for (double v : data.values) PutF64(out, v);
    for (const auto* ids : {&data.row_ids, &data.col_ids}) {
      PutU32(out, static_cast<uint32_t>(ids->size()));
      for (const std::string& id : *ids) {
        PutU32(out, static_cast<uint32_t>(id.size()));
        out += id;
      }
    }
    return out;
  }
  std::vector<std::string> header = {"query_id"};
  header.insert(header.end(), data.col_ids.begin(), data.col_ids.end());
  out += csv::JoinRow(header) + "\n";
  for (size_t r = 0; r < rows; ++r) {
    out += csv::EscapeField(data.row_ids[r]);
    for (size_t c = 0; c < cols; ++c) {
      out.push_back(',');
      out += FormatValue(data.values[r * cols + c]);
    }
    out.push_back('\n');
  }
  return out;
}

MatrixData ToData(const LabeledMatrix& matrix) {
  return {matrix.row_ids(), matrix.col_ids(), matrix.values()};
}

SimilarityMatrix ReadSimilarityMatrix(const std::string& path) {
  MatrixData d = DecodeMatrix(ReadFile(path));
  return SimilarityMatrix(std::move(d.row_ids), std::move(d.col_ids),
                          std::move(d.values));
}

RelevancyMatrix ReadRelevancyMatrix(const std::string& path) {
  MatrixData d = DecodeMatrix(ReadFile(path));
  return RelevancyMatrix(std::move(d.row_ids), std::move(d.col_ids),
                         std::move(d.values));
}

MatrixFormat FormatForPath(std::string_view path) {
  return path.ends_with(".simm") ? MatrixFormat::kSimm : MatrixFormat::kText;
}

void WriteMatrix(const std::string& path, const LabeledMatrix& matrix) {
  WriteFileAtomic(path, EncodeMatrix(ToData(matrix), FormatForPath(path)));
}

}  // namespace framebias
