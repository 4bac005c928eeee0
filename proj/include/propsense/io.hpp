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

// File formats: RIFF/WAVE PCM audio, key-value scene and run configuration
// files, and the CSV / plain-text outputs of the CLI.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "propsense/control.hpp"
#include "propsense/estimators.hpp"
#include "propsense/metrics.hpp"
#include "propsense/signal.hpp"
#include "propsense/simulator.hpp"

namespace propsense::io {

// ---- audio ----------------------------------------------------------------

struct AudioFile {
  std::uint32_t rate = 48000;
  std::uint16_t channels = 2;
  std::uint16_t bits = 16;
  std::vector<std::int32_t> samples; // interleaved

  std::size_t frames() const noexcept { return channels == 0 ? 0 : samples.size() / channels; }
};

// PCM (format tag 1), 1 or 2 channels, 16 or 24 bits. Unknown chunks are
// skipped. Throws ParseError with malformed_header, unsupported_format or
// truncated_data.
AudioFile parse_wav(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_wav(const AudioFile &audio);

AudioFile read_wav(const std::filesystem::path &path);
void write_wav(const std::filesystem::path &path, const AudioFile &audio);

// Samples divided by 2^(bits-1).
signal::SampleFrame to_frame(const AudioFile &audio);
// Rounds x * 2^(bits-1) and saturates to the PCM range.
AudioFile from_frame(const signal::SampleFrame &frame, std::uint16_t bits = 16);

// ---- key-value configuration ------------------------------------------------
//
// One `key = value` per line, '#' starts a comment. Unknown keys, duplicate
// keys, malformed numbers and out-of-range values raise ParseError naming the
// key. See docs/file-formats.md for the schemas.

sim::SimScene parse_scene(std::string_view text);
sim::SimScene read_scene(const std::filesystem::path &path);

struct RunConfig {
  est::EstimatorConfig estimator;
  control::PController controller;
  sim::Plant plant;
};

// Estimator defaults come from `scene` when given (array, rate, sound speed,
// look directions), then keys in the file override them.
RunConfig parse_config(std::string_view text, const sim::SimScene *scene = nullptr);
RunConfig read_config(const std::filesystem::path &path, const sim::SimScene *scene = nullptr);
RunConfig default_config(const sim::SimScene *scene = nullptr);

std::string serialize_scene(const sim::SimScene &scene);

// ---- CSV / tables -------------------------------------------------------------

// Shortest round-trip decimal form with '.', independent of the locale.
std::string format_number(double value);

void write_estimates_csv(std::ostream &out, std::span<const est::OfflineTick> ticks);
void write_delay_series_csv(std::ostream &out, std::span<const est::OfflineTick> ticks);
void write_trace_csv(std::ostream &out, const control::ControlTrace &trace);

// Right-aligned plain-text table with a header rule.
std::string format_table(const std::vector<std::string> &header,
                         const std::vector<std::vector<std::string>> &rows);

std::string read_text(const std::filesystem::path &path);
void write_text(const std::filesystem::path &path, std::string_view text);

} // namespace propsense::io
