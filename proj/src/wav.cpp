// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The propsense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "propsense/error.hpp"
#include "propsense/io.hpp"

namespace propsense::io {
namespace {

std::uint32_t le32(const std::uint8_t *p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t le16(const std::uint8_t *p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void put32(std::vector<std::uint8_t> &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put16(std::vector<std::uint8_t> &out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

[[noreturn]] void fail(ParseErrc code, const std::string &what) {
  throw ParseError(code, "", "wav: " + what);
}

bool tag_is(const std::uint8_t *p, const char *tag) { return std::memcmp(p, tag, 4) == 0; }

void check_format(const AudioFile &a) {
  if (a.channels != 1 && a.channels != 2)
    fail(ParseErrc::unsupported_format, std::to_string(a.channels) + " channels (need 1 or 2)");
  if (a.bits != 16 && a.bits != 24)
    fail(ParseErrc::unsupported_format, std::to_string(a.bits) + "-bit PCM (need 16 or 24)");
  if (a.rate == 0)
    fail(ParseErrc::unsupported_format, "zero sample rate");
}

} // namespace

AudioFile parse_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || !tag_is(bytes.data(), "RIFF") || !tag_is(bytes.data() + 8, "WAVE"))
    fail(ParseErrc::malformed_header, "missing RIFF/WAVE signature");

  AudioFile audio;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t *chunk = bytes.data() + pos;
    const std::uint32_t size = le32(chunk + 4);
    const std::size_t body = pos + 8;
    if (tag_is(chunk, "fmt ")) {
      if (size < 16 || body + size > bytes.size())
        fail(ParseErrc::malformed_header, "fmt chunk too short");
      const std::uint16_t tag = le16(bytes.data() + body);
      if (tag != 1)
        fail(ParseErrc::unsupported_format, "format tag " + std::to_string(tag) + " (need PCM = 1)");
      audio.channels = le16(bytes.data() + body + 2);
      audio.rate = le32(bytes.data() + body + 4);
      audio.bits = le16(bytes.data() + body + 14);
      check_format(audio);
      have_fmt = true;
    } else if (tag_is(chunk, "data")) {
      if (!have_fmt)
        fail(ParseErrc::malformed_header, "data chunk before fmt chunk");
      if (body + size > bytes.size())
        fail(ParseErrc::truncated_data, "data chunk declares " + std::to_string(size) +
                                            " bytes, file has " + std::to_string(bytes.size() - body));
      const std::size_t width = audio.bits / 8u;
      const std::size_t block = width * audio.channels;
      if (size % block != 0)
        fail(ParseErrc::truncated_data, "data chunk ends inside a sample frame");
      audio.samples.resize(size / width);
      const std::uint8_t *p = bytes.data() + body;
      for (std::size_t i = 0; i < audio.samples.size(); ++i, p += width) {
        if (width == 2) {
          audio.samples[i] = static_cast<std::int16_t>(le16(p));
        } else {
          const std::uint32_t raw = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                                    (static_cast<std::uint32_t>(p[2]) << 16);
          audio.samples[i] = static_cast<std::int32_t>(raw << 8) >> 8;
        }
      }
      return audio;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt)
    fail(ParseErrc::malformed_header, "no fmt chunk");
  fail(ParseErrc::truncated_data, "no data chunk");
}

std::vector<std::uint8_t> encode_wav(const AudioFile &audio) {
  check_format(audio);
  if (audio.samples.size() % audio.channels != 0)
    throw ConfigError("wav: sample count is not a multiple of the channel count");
  const std::uint32_t width = audio.bits / 8u;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(audio.samples.size()) * width;
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes + 1);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  put32(out, 36 + data_bytes + (data_bytes & 1u));
  out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
  put32(out, 16);
  put16(out, 1);
  put16(out, audio.channels);
  put32(out, audio.rate);
  put32(out, audio.rate * audio.channels * width);
  put16(out, static_cast<std::uint16_t>(audio.channels * width));
  put16(out, audio.bits);
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  put32(out, data_bytes);
  const std::int32_t lo = -(1 << (audio.bits - 1));
  const std::int32_t hi = (1 << (audio.bits - 1)) - 1;
  for (std::int32_t s : audio.samples) {
    if (s < lo || s > hi)
      throw ConfigError("wav: sample " + std::to_string(s) + " outside the " +
                        std::to_string(audio.bits) + "-bit range");
    const auto u = static_cast<std::uint32_t>(s);
    for (std::uint32_t b = 0; b < width; ++b)
      out.push_back(static_cast<std::uint8_t>(u >> (8 * b)));
  }
  if (data_bytes & 1u)
    out.push_back(0);
  return out;
}

AudioFile read_wav(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open '" + path.string() + "' for reading");
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                        std::istreambuf_iterator<char>()};
  return parse_wav(bytes);
}

void write_wav(const std::filesystem::path &path, const AudioFile &audio) {
  const std::vector<std::uint8_t> bytes = encode_wav(audio);
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out)
    throw IoError("short write to '" + path.string() + "'");
}

signal::SampleFrame to_frame(const AudioFile &audio) {
  check_format(audio);
  const double scale = 1.0 / static_cast<double>(1 << (audio.bits - 1));
  std::vector<std::vector<double>> channels(audio.channels, std::vector<double>(audio.frames()));
  for (std::size_t i = 0; i < audio.frames(); ++i)
    for (std::size_t c = 0; c < audio.channels; ++c)
      channels[c][i] = audio.samples[i * audio.channels + c] * scale;
  return signal::SampleFrame(audio.rate, std::move(channels));
}

AudioFile from_frame(const signal::SampleFrame &frame, std::uint16_t bits) {
  AudioFile audio;
  audio.rate = static_cast<std::uint32_t>(std::lround(frame.rate()));
  audio.channels = static_cast<std::uint16_t>(frame.channels());
  audio.bits = bits;
  check_format(audio);
  const double full = static_cast<double>(1 << (bits - 1));
  audio.samples.resize(frame.length() * frame.channels());
  for (std::size_t i = 0; i < frame.length(); ++i)
    for (std::size_t c = 0; c < frame.channels(); ++c) {
      const double v = std::nearbyint(frame.channel(c)[i] * full);
      audio.samples[i * frame.channels() + c] =
          static_cast<std::int32_t>(std::clamp(v, -full, full - 1.0));
    }
  return audio;
}

} // namespace propsense::io
