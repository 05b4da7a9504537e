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

#include "framebias/dataset.h"

#include <array>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "framebias/csv.h"
#include "framebias/error.h"

namespace framebias {
namespace {

constexpr std::array<std::string_view, 8> kNativeColumns = {
    "clip_id",    "video_id", "split",      "start_frame",
    "stop_frame", "caption",  "verb_class", "noun_class"};

std::string LinePrefix(int line) {
  return "line " + std::to_string(line) + ": ";
}

template <typename Int>
Int ParseInteger(std::string_view text, std::string_view column, int line) {
  Int value{};
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (text.empty() || ec != std::errc() || ptr != end) {
    Fail(ErrorCode::kParse, LinePrefix(line) + "column '" +
                                std::string(column) +
                                "' is not an integer: '" + std::string(text) +
                                "'");
  }
  return value;
}

int ParseClassId(std::string_view text, std::string_view column, int line,
                 std::string_view clip_id) {
  if (text.empty()) {
    Fail(ErrorCode::kValidation, "clip '" + std::string(clip_id) +
                                     "': missing " + std::string(column));
  }
  return ParseInteger<int>(text, column, line);
}

Split ParseSplit(std::string_view text, int line) {
  if (text == "train") return Split::kTrain;
  if (text == "test") return Split::kTest;
  Fail(ErrorCode::kParse, LinePrefix(line) + "split must be 'train' or " +
                              "'test', got '" + std::string(text) + "'");
}

// Column positions for the EK-100 layout, looked up by header name.
struct Ek100Columns {
  size_t narration_id, video_id, start_frame, stop_frame, narration,
      verb_class, noun_class;
};

Ek100Columns LocateEk100Columns(const csv::Record& header) {
  auto find = [&](std::string_view name) {
    for (size_t i = 0; i < header.fields.size(); ++i) {
      if (header.fields[i] == name) return i;
    }
    Fail(ErrorCode::kParse,
         "EK-100 header is missing column '" + std::string(name) + "'");
  };
  return {find("narration_id"), find("video_id"),   find("start_frame"),
          find("stop_frame"),   find("narration"),  find("verb_class"),
          find("noun_class")};
}

void AppendEk100Rows(std::string_view text, Split split,
                     std::vector<ClipRecord>& out) {
  const std::vector<csv::Record> records = csv::Parse(text);
  if (records.empty()) {
    Fail(ErrorCode::kParse, "EK-100 annotation file is empty");
  }
  const Ek100Columns cols = LocateEk100Columns(records.front());
  const size_t width = records.front().fields.size();
  for (size_t r = 1; r < records.size(); ++r) {
    const csv::Record& rec = records[r];
    if (rec.fields.size() != width) {
      Fail(ErrorCode::kParse, LinePrefix(rec.line) + "expected " +
                                  std::to_string(width) + " columns, got " +
                                  std::to_string(rec.fields.size()));
    }
    const auto& f = rec.fields;
    ClipRecord clip;
    clip.clip_id = f[cols.narration_id];
    clip.video_id = f[cols.video_id];
    clip.split = split;
    clip.start_frame =
        ParseInteger<int64_t>(f[cols.start_frame], "start_frame", rec.line);
    clip.stop_frame =
        ParseInteger<int64_t>(f[cols.stop_frame], "stop_frame", rec.line);
    clip.caption = f[cols.narration];
    clip.verb_class =
        ParseClassId(f[cols.verb_class], "verb_class", rec.line, clip.clip_id);
    clip.noun_class =
        ParseClassId(f[cols.noun_class], "noun_class", rec.line, clip.clip_id);
    out.push_back(std::move(clip));
  }
}

}  // namespace

std::string_view SplitName(Split split) {
  return split == Split::kTrain ? "train" : "test";
}

std::string ToString(const ActionClass& action_class) {
  return std::to_string(action_class.verb) + "," +
         std::to_string(action_class.noun);
}

ClassIndex BuildClassIndex(const std::vector<ClipRecord>& clips) {
  ClassIndex index;
  for (size_t i = 0; i < clips.size(); ++i) {
    ClassMembers& members = index[ClassOf(clips[i])];
    (clips[i].split == Split::kTrain ? members.train : members.test)
        .push_back(i);
  }
  return index;
}

Dataset::Dataset(std::vector<ClipRecord> clips) : clips_(std::move(clips)) {
  by_id_.reserve(clips_.size());
  for (size_t i = 0; i < clips_.size(); ++i) {
    const ClipRecord& clip = clips_[i];
    if (clip.start_frame < 0) {
      Fail(ErrorCode::kValidation,
           "clip '" + clip.clip_id + "': start_frame is negative");
    }
    if (clip.stop_frame < clip.start_frame) {
      Fail(ErrorCode::kValidation, "clip '" + clip.clip_id +
                                       "': stop_frame " +
                                       std::to_string(clip.stop_frame) +
                                       " precedes start_frame " +
                                       std::to_string(clip.start_frame));
    }
    if (!by_id_.emplace(clip.clip_id, i).second) {
      Fail(ErrorCode::kValidation,
           "duplicate clip_id '" + clip.clip_id + "'");
    }
  }
  index_ = BuildClassIndex(clips_);
}

std::optional<size_t> Dataset::Find(std::string_view clip_id) const {
  const auto it = by_id_.find(std::string(clip_id));
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

const ClipRecord& Dataset::Get(std::string_view clip_id) const {
  const auto pos = Find(clip_id);
  if (!pos) {
    Fail(ErrorCode::kNotFound, "unknown clip_id '" + std::string(clip_id) + "'");
  }
  return clips_[*pos];
}

const ClassMembers* Dataset::Members(const ActionClass& action_class) const {
  const auto it = index_.find(action_class);
  return it == index_.end() ? nullptr : &it->second;
}

size_t Dataset::CountSplit(Split split) const {
  size_t n = 0;
  for (const ClipRecord& clip : clips_) n += clip.split == split;
  return n;
}

Dataset ParseNativeAnnotations(std::string_view text) {
  const std::vector<csv::Record> records = csv::Parse(text);
  if (records.empty()) {
    Fail(ErrorCode::kParse, "annotation file is empty (missing header)");
  }
  const csv::Record& header = records.front();
  if (header.fields.size() != kNativeColumns.size() ||
      !std::equal(kNativeColumns.begin(), kNativeColumns.end(),
                  header.fields.begin())) {
    Fail(ErrorCode::kParse,
         LinePrefix(header.line) +
             "header must be "
             "clip_id,video_id,split,start_frame,stop_frame,caption,"
             "verb_class,noun_class");
  }

  std::vector<ClipRecord> clips;
  clips.reserve(records.size() - 1);
  for (size_t r = 1; r < records.size(); ++r) {
    const csv::Record& rec = records[r];
    if (rec.fields.size() != kNativeColumns.size()) {
      Fail(ErrorCode::kParse, LinePrefix(rec.line) + "expected " +
                                  std::to_string(kNativeColumns.size()) +
                                  " columns, got " +
                                  std::to_string(rec.fields.size()));
    }
    const auto& f = rec.fields;
    ClipRecord clip;
    clip.clip_id = f[0];
    clip.video_id = f[1];
    clip.split = ParseSplit(f[2], rec.line);
    clip.start_frame = ParseInteger<int64_t>(f[3], "start_frame", rec.line);
    clip.stop_frame = ParseInteger<int64_t>(f[4], "stop_frame", rec.line);
    clip.caption = f[5];
    clip.verb_class = ParseClassId(f[6], "verb_class", rec.line, clip.clip_id);
    clip.noun_class = ParseClassId(f[7], "noun_class", rec.line, clip.clip_id);
    clips.push_back(std::move(clip));
  }
  return Dataset(std::move(clips));
}

Dataset ParseEk100Pair(std::string_view train_text,
                       std::string_view test_text) {
  std::vector<ClipRecord> clips;
  AppendEk100Rows(train_text, Split::kTrain, clips);
  AppendEk100Rows(test_text, Split::kTest, clips);
  return Dataset(std::move(clips));
}

std::string SerializeNative(const Dataset& dataset) {
  std::string out =
      "clip_id,video_id,split,start_frame,stop_frame,caption,verb_class,"
      "noun_class\n";
  for (const ClipRecord& clip : dataset.clips()) {
    out += csv::JoinRow({clip.clip_id, clip.video_id,
                         std::string(SplitName(clip.split)),
                         std::to_string(clip.start_frame),
                         std::to_string(clip.stop_frame), clip.caption,
                         std::to_string(clip.verb_class),
                         std::to_string(clip.noun_class)});
    out.push_back('\n');
  }
  return out;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kIo, "cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) Fail(ErrorCode::kIo, "failed reading '" + path + "'");
  return buffer.str();
}

void WriteFileAtomic(const std::string& path, std::string_view contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) Fail(ErrorCode::kIo, "cannot open '" + tmp + "' for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      out.close();
      std::remove(tmp.c_str());
      Fail(ErrorCode::kIo, "failed writing '" + path + "'");
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::remove(tmp.c_str());
    Fail(ErrorCode::kIo, "cannot move '" + tmp + "' to '" + path +
                             "': " + ec.message());
  }
}

Dataset LoadAnnotations(const std::vector<std::string>& paths,
                        AnnotationFormat format) {
  if (format == AnnotationFormat::kNative) {
    if (paths.size() != 1) {
      Fail(ErrorCode::kPrecondition,
           "native format takes exactly one annotation file");
    }
    return ParseNativeAnnotations(ReadFile(paths[0]));
  }
  if (paths.size() != 2) {
    Fail(ErrorCode::kPrecondition,
         "ek100_pair format takes two annotation files (train, test)");
  }
  return ParseEk100Pair(ReadFile(paths[0]), ReadFile(paths[1]));
}

}  // namespace framebias
