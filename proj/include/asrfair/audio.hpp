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

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace asrfair {

// Mono PCM audio scaled to [-1, 1].
struct AudioSignal {
  std::vector<double> samples;
  int sample_rate = 0;

  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate
                           : 0.0;
  }
};

inline constexpr int kMinSampleRate = 8000;
inline constexpr int kMaxSampleRate = 48000;

// RIFF/WAVE, PCM, 16-bit signed little-endian, mono, 8-48 kHz. Samples are
// divided by 32768. Unknown chunks are skipped. Throws kParse with
// "non-mono", "unsupported encoding" or "truncated file" as appropriate, and
// kIo when the file cannot be opened.
AudioSignal read_wav(std::istream& in);
AudioSignal read_wav(const std::filesystem::path& path);

// Writes 16-bit PCM mono; samples are clamped to [-1, 1] and scaled by 32767
// (-1.0 maps to -32768).
void write_wav(std::ostream& out, const AudioSignal& signal);
void write_wav(const std::filesystem::path& path, const AudioSignal& signal);

}  // namespace asrfair
