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

// Trimmed-clip annotations: records, action classes and the per-class index.

#ifndef FRAMEBIAS_DATASET_H_
#define FRAMEBIAS_DATASET_H_

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace framebias {

enum class Split { kTrain, kTest };

std::string_view SplitName(Split split);

// A (verb, noun) pair. Ordered lexicographically by verb then noun.
struct ActionClass {
  int verb = 0;
  int noun = 0;

  friend auto operator<=>(const ActionClass&, const ActionClass&) = default;
};

std::string ToString(const ActionClass& action_class);

struct ClipRecord {
  std::string clip_id;
  std::string video_id;
  Split split = Split::kTrain;
  int64_t start_frame = 0;
  int64_t stop_frame = 0;
  std::string caption;
  int verb_class = 0;
  int noun_class = 0;

  friend bool operator==(const ClipRecord&, const ClipRecord&) = default;
};

// Inclusive span length: a clip annotated [k, k] holds one frame.
inline int64_t FrameLength(const ClipRecord& clip) {
  return clip.stop_frame - clip.start_frame + 1;
}

inline ActionClass ClassOf(const ClipRecord& clip) {
  return {clip.verb_class, clip.noun_class};
}

// Positions (into Dataset::clips()) of one class's clips, per split, in
// ingestion order.
struct ClassMembers {
  std::vector<size_t> train;
  std::vector<size_t> test;

  const std::vector<size_t>& of(Split split) const {
    return split == Split::kTrain ? train : test;
  }
  friend bool operator==(const ClassMembers&, const ClassMembers&) = default;
};

using ClassIndex = std::map<ActionClass, ClassMembers>;

// Immutable, validated collection of clips. Construction rejects inverted
// spans, negative frames and duplicate ids.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<ClipRecord> clips);

  const std::vector<ClipRecord>& clips() const { return clips_; }
  const ClassIndex& index() const { return index_; }
  size_t size() const { return clips_.size(); }
  bool empty() const { return clips_.empty(); }

  // Position of the clip with this id, if any.
  std::optional<size_t> Find(std::string_view clip_id) const;
  const ClipRecord& Get(std::string_view clip_id) const;  // kNotFound

  // Nullptr when the class has no clips.
  const ClassMembers* Members(const ActionClass& action_class) const;

  size_t CountSplit(Split split) const;

  friend bool operator==(const Dataset& a, const Dataset& b) {
    return a.clips_ == b.clips_ && a.index_ == b.index_;
  }

 private:
  std::vector<ClipRecord> clips_;
  ClassIndex index_;
  std::unordered_map<std::string, size_t> by_id_;
};

// Recomputes the class index from scratch; equal to Dataset::index() for any
// constructed dataset.
ClassIndex BuildClassIndex(const std::vector<ClipRecord>& clips);

enum class AnnotationFormat { kNative, kEk100Pair };

// Native format: header
//   clip_id,video_id,split,start_frame,stop_frame,caption,verb_class,noun_class
// followed by one row per clip.
Dataset ParseNativeAnnotations(std::string_view text);

// EPIC-KITCHENS-100 retrieval CSVs. Columns are located by header name
// (narration_id, video_id, start_frame, stop_frame, narration, verb_class,
// noun_class); other columns are ignored. Rows of the first file become
// train clips, rows of the second test clips.
Dataset ParseEk100Pair(std::string_view train_text, std::string_view test_text);

std::string SerializeNative(const Dataset& dataset);

// File-level helpers; `paths` holds one file (native) or two (train, test).
Dataset LoadAnnotations(const std::vector<std::string>& paths,
                        AnnotationFormat format);

std::string ReadFile(const std::string& path);
// Writes through a temporary sibling and renames, so a failed write never
// leaves a truncated file at `path`.
void WriteFileAtomic(const std::string& path, std::string_view contents);

}  // namespace framebias

#endif  // FRAMEBIAS_DATASET_H_
