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

#include <array>
#include <charconv>
#include <cmath>
#include <ostream>

#include "propsense/error.hpp"
#include "propsense/io.hpp"

namespace propsense {

const char *to_string(ParseErrc code) noexcept {
  switch (code) {
  case ParseErrc::malformed_header: return "malformed header";
  case ParseErrc::unsupported_format: return "unsupported format";
  case ParseErrc::truncated_data: return "truncated data";
  case ParseErrc::syntax: return "syntax error";
  case ParseErrc::missing_key: return "missing key";
  case ParseErrc::unknown_key: return "unknown key";
  case ParseErrc::out_of_range: return "value out of range";
  case ParseErrc::bad_value: return "bad value";
  }
  return "parse error";
}

} // namespace propsense

namespace propsense::io {

std::string format_number(double value) {
  if (std::isnan(value))
    return "nan";
  if (std::isinf(value))
    return value > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ec == std::errc() ? ptr : buf.data());
}

void write_estimates_csv(std::ostream &out, std::span<const est::OfflineTick> ticks) {
  out << "tick,t,distance_m,delay_s,peak_envelope,bin,stale\n";
  for (const auto &tick : ticks) {
    if (!tick.estimate)
      continue;
    const auto &e = *tick.estimate;
    out << tick.tick << ',' << format_number(e.t) << ',' << format_number(e.distance) << ','
        << format_number(e.delay) << ',' << format_number(e.peak_envelope) << ',' << e.bin << ','
        << (e.stale ? 1 : 0) << '\n';
  }
}

void write_delay_series_csv(std::ostream &out, std::span<const est::OfflineTick> ticks) {
  out << "tick,lag_s,value,envelope\n";
  for (const auto &tick : ticks) {
    if (!tick.series)
      continue;
    const auto &s = *tick.series;
    for (std::size_t k = 0; k < s.values.size(); ++k) {
      out << tick.tick << ',' << format_number(s.lag(k)) << ',' << format_number(s.values[k]) << ','
          << format_number(s.has_envelope() ? s.envelope[k] : std::nan("")) << '\n';
    }
  }
}

void write_trace_csv(std::ostream &out, const control::ControlTrace &trace) {
  out << "t,commanded_m,true_m,estimated_m,correction_m,stale\n";
  for (const auto &r : trace.rows) {
    out << format_number(r.t) << ',' << format_number(r.commanded) << ',' << format_number(r.true_distance)
        << ',' << (std::isnan(r.estimated) ? std::string() : format_number(r.estimated)) << ','
        << format_number(r.correction) << ',' << (r.stale ? 1 : 0) << '\n';
  }
}

std::string format_table(const std::vector<std::string> &header,
                         const std::vector<std::vector<std::string>> &rows) {
  std::vector<std::size_t> width(header.size(), 0);
  for (std::size_t c = 0; c < header.size(); ++c)
    width[c] = header[c].size();
  for (const auto &row : rows) {
    if (row.size() != header.size())
      throw ConfigError("format_table: row has " + std::to_string(row.size()) + " cells, header has " +
                        std::to_string(header.size()));
    for (std::size_t c = 0; c < row.size(); ++c)
      width[c] = std::max(width[c], row[c].size());
  }
  std::string out;
  auto emit = [&](const std::vector<std::string> &cells) {
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c > 0)
        out += "  ";
      out.append(width[c] - cells[c].size(), ' ');
      out += cells[c];
    }
    out += '\n';
  };
  emit(header);
  std::size_t total = 0;
  for (std::size_t c = 0; c < width.size(); ++c)
    total += width[c] + (c > 0 ? 2 : 0);
  out.append(total, '-');
  out += '\n';
  for (const auto &row : rows)
    emit(row);
  return out;
}

} // namespace propsense::io
