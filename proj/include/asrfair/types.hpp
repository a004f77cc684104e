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

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace asrfair {

enum class Group { kNormal, kClp };
enum class Severity { kNone, kMild, kModerate, kSevere };
enum class Partition { kTrain, kDev, kEval };

// Training-composition category: Normal speech or one CLP severity grade.
enum class Category { kNormal, kMild, kModerate, kSevere };

inline constexpr std::array<Category, 4> kAllCategories = {
    Category::kNormal, Category::kMild, Category::kModerate, Category::kSevere};
inline constexpr std::array<Severity, 3> kClpSeverities = {
    Severity::kMild, Severity::kModerate, Severity::kSevere};

std::string_view to_string(Group g);
std::string_view to_string(Severity s);
std::string_view to_string(Partition p);
std::string_view to_string(Category c);

// Parsers accept the lowercase literals used by the file formats and are
// case-insensitive. They return nullopt on unknown literals.
std::optional<Group> parse_group(std::string_view text);
std::optional<Severity> parse_severity(std::string_view text);
std::optional<Partition> parse_partition(std::string_view text);
std::optional<Category> parse_category(std::string_view text);

// Category of an utterance; CLP with severity None has no category.
std::optional<Category> category_of(Group g, Severity s);
Severity severity_of(Category c);

}  // namespace asrfair
