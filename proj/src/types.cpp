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

#include "asrfair/types.hpp"

#include "asrfair/delimited.hpp"

namespace asrfair {

std::string_view to_string(Group g) {
  return g == Group::kNormal ? "normal" : "clp";
}

std::string_view to_string(Severity s) {
  switch (s) {
    case Severity::kNone: return "none";
    case Severity::kMild: return "mild";
    case Severity::kModerate: return "moderate";
    case Severity::kSevere: return "severe";
  }
  return "none";
}

std::string_view to_string(Partition p) {
  switch (p) {
    case Partition::kTrain: return "train";
    case Partition::kDev: return "dev";
    case Partition::kEval: return "eval";
  }
  return "train";
}

std::string_view to_string(Category c) {
  switch (c) {
    case Category::kNormal: return "normal";
    case Category::kMild: return "mild";
    case Category::kModerate: return "moderate";
    case Category::kSevere: return "severe";
  }
  return "normal";
}

std::optional<Group> parse_group(std::string_view text) {
  const std::string t = to_lower_ascii(trim(text));
  if (t == "normal") return Group::kNormal;
  if (t == "clp") return Group::kClp;
  return std::nullopt;
}

std::optional<Severity> parse_severity(std::string_view text) {
  const std::string t = to_lower_ascii(trim(text));
  if (t == "none") return Severity::kNone;
  if (t == "mild") return Severity::kMild;
  if (t == "moderate") return Severity::kModerate;
  if (t == "severe") return Severity::kSevere;
  return std::nullopt;
}

std::optional<Partition> parse_partition(std::string_view text) {
  const std::string t = to_lower_ascii(trim(text));
  if (t == "train") return Partition::kTrain;
  if (t == "dev") return Partition::kDev;
  if (t == "eval" || t == "test") return Partition::kEval;
  return std::nullopt;
}

std::optional<Category> parse_category(std::string_view text) {
  const std::string t = to_lower_ascii(trim(text));
  if (t == "normal" || t == "no") return Category::kNormal;
  if (t == "mild" || t == "mi") return Category::kMild;
  if (t == "moderate" || t == "mo") return Category::kModerate;
  if (t == "severe" || t == "se") return Category::kSevere;
  return std::nullopt;
}

std::optional<Category> category_of(Group g, Severity s) {
  if (g == Group::kNormal) {
    if (s != Severity::kNone) return std::nullopt;
    return Category::kNormal;
  }
  switch (s) {
    case Severity::kMild: return Category::kMild;
    case Severity::kModerate: return Category::kModerate;
    case Severity::kSevere: return Category::kSevere;
    case Severity::kNone: break;
  }
  return std::nullopt;
}

Severity severity_of(Category c) {
  switch (c) {
    case Category::kNormal: return Severity::kNone;
    case Category::kMild: return Severity::kMild;
    case Category::kModerate: return Severity::kModerate;
    case Category::kSevere: return Severity::kSevere;
  }
  return Severity::kNone;
}

}  // namespace asrfair
