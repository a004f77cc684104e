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

#include "asrfair/audio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <string>

#include "asrfair/error.hpp"

namespace asrfair {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<char>((v >> shift) & 0xFF));
  }
}

[[noreturn]] void fail(const std::string& message) {
  throw Error(ErrorKind::kParse, message);
}

}  // namespace

AudioSignal read_wav(std::istream& in) {
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  const auto* data = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t size = bytes.size();
  if (size < 12) fail("truncated file: missing RIFF header");
  if (std::memcmp(data, "RIFF", 4) != 0 || std::memcmp(data + 8, "WAVE", 4) != 0) {
    fail("unsupported encoding: not a RIFF/WAVE file");
  }

  bool have_format = false;
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
  const unsigned char* pcm = nullptr;
  std::size_t pcm_bytes = 0;

  std::size_t pos = 12;
  while (pos + 8 <= size) {
    const unsigned char* chunk = data + pos;
    const std::uint32_t chunk_size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (chunk_size < 16 || body + 16 > size) fail("truncated file: fmt chunk");
      format = read_u16(data + body);
      channels = read_u16(data + body + 2);
      rate = read_u32(data + body + 4);
      bits = read_u16(data + body + 14);
      if (format == kFormatExtensible && chunk_size >= 40 && body + 26 <= size) {
        format = read_u16(data + body + 24);  // sub-format GUID prefix
      }
      have_format = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      if (body + chunk_size > size) fail("truncated file: data chunk");
      pcm = data + body;
      pcm_bytes = chunk_size;
      break;
    }
    pos = body + chunk_size + (chunk_size & 1u);
  }
  if (!have_format) fail("truncated file: no fmt chunk");
  if (pcm == nullptr) fail("truncated file: no data chunk");
  if (channels != 1) {
    fail("non-mono audio (" + std::to_string(channels) + " channels)");
  }
  if (format != kFormatPcm || bits != 16) {
    fail("unsupported encoding: only 16-bit PCM is accepted");
  }
  if (rate < kMinSampleRate || rate > kMaxSampleRate) {
    fail("unsupported sample rate " + std::to_string(rate));
  }
  if (pcm_bytes % 2 != 0) fail("truncated file: partial sample");

  AudioSignal signal;
  signal.sample_rate = static_cast<int>(rate);
  signal.samples.resize(pcm_bytes / 2);
  for (std::size_t i = 0; i < signal.samples.size(); ++i) {
    const auto raw = static_cast<std::int16_t>(read_u16(pcm + 2 * i));
    signal.samples[i] = static_cast<double>(raw) / 32768.0;
  }
  return signal;
}

AudioSignal read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  try {
    return read_wav(in);
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void write_wav(std::ostream& out, const AudioSignal& signal) {
  const auto data_bytes = static_cast<std::uint32_t>(signal.samples.size() * 2);
  const auto rate = static_cast<std::uint32_t>(signal.sample_rate);
  std::string bytes;
  bytes.reserve(44 + data_bytes);
  bytes += "RIFF";
  put_u32(bytes, 36 + data_bytes);
  bytes += "WAVEfmt ";
  put_u32(bytes, 16);
  put_u16(bytes, kFormatPcm);
  put_u16(bytes, 1);
  put_u32(bytes, rate);
  put_u32(bytes, rate * 2);
  put_u16(bytes, 2);
  put_u16(bytes, 16);
  bytes += "data";
  put_u32(bytes, data_bytes);
  for (const double s : signal.samples) {
    const double clamped = std::clamp(s, -1.0, 1.0);
    const long q = clamped <= -1.0 ? -32768 : std::lround(clamped * 32767.0);
    put_u16(bytes, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_wav(const std::filesystem::path& path, const AudioSignal& signal) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  write_wav(out, signal);
}

}  // namespace asrfair
