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

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>

#include "propsense/error.hpp"
#include "propsense/io.hpp"

namespace propsense::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Parsed `key = value` lines; every getter marks its key as used so leftovers
// can be reported as unknown.
class Fields {
public:
  explicit Fields(std::string_view text) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t end = std::min(text.find('\n', pos), text.size());
      std::string_view line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string_view::npos)
        line = line.substr(0, hash);
      line = trim(line);
      if (line.empty())
        continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos)
        throw ParseError(ParseErrc::syntax, "",
                         "line " + std::to_string(line_no) + ": expected 'key = value'");
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (key.empty())
        throw ParseError(ParseErrc::syntax, "", "line " + std::to_string(line_no) + ": empty key");
      if (values_.count(key) != 0)
        throw ParseError(ParseErrc::syntax, key, "duplicate key '" + key + "'");
      values_.emplace(key, Entry{value, line_no});
      order_.push_back(key);
    }
  }

  bool has(const std::string &key) const { return values_.count(key) != 0; }

  const std::vector<std::string> &keys() const { return order_; }

  std::optional<std::string> text(const std::string &key) {
    auto it = values_.find(key);
    if (it == values_.end())
      return std::nullopt;
    used_.insert(key);
    return it->second.value;
  }

  std::optional<double> number(const std::string &key, bool allow_infinite = false) {
    const auto raw = text(key);
    if (!raw)
      return std::nullopt;
    double v = 0.0;
    const char *b = raw->data();
    const char *e = b + raw->size();
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e || std::isnan(v) || (!allow_infinite && std::isinf(v)))
      throw ParseError(ParseErrc::bad_value, key, "'" + key + "': '" + *raw + "' is not a finite number");
    return v;
  }

  std::optional<std::uint64_t> integer(const std::string &key) {
    const auto raw = text(key);
    if (!raw)
      return std::nullopt;
    std::uint64_t v = 0;
    const char *b = raw->data();
    const char *e = b + raw->size();
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e)
      throw ParseError(ParseErrc::bad_value, key, "'" + key + "': '" + *raw + "' is not a non-negative integer");
    return v;
  }

  std::optional<bool> boolean(const std::string &key) {
    const auto raw = text(key);
    if (!raw)
      return std::nullopt;
    if (*raw == "true" || *raw == "1" || *raw == "yes")
      return true;
    if (*raw == "false" || *raw == "0" || *raw == "no")
      return false;
    throw ParseError(ParseErrc::bad_value, key, "'" + key + "': '" + *raw + "' is not a boolean");
  }

  // Required finite number.
  double require(const std::string &key) {
    if (const auto v = number(key))
      return *v;
    throw ParseError(ParseErrc::missing_key, key, "missing required key '" + key + "'");
  }

  void finish() const {
    for (const std::string &key : order_)
      if (used_.count(key) == 0)
        throw ParseError(ParseErrc::unknown_key, key,
                         "unknown key '" + key + "' (line " + std::to_string(values_.at(key).line) + ")");
  }

private:
  struct Entry {
    std::string value;
    std::size_t line;
  };
  std::map<std::string, Entry> values_;
  std::vector<std::string> order_;
  std::set<std::string> used_;
};

template <class Check>
double checked(Fields &f, const std::string &key, double fallback, Check ok, const char *rule,
               bool allow_infinite = false) {
  const auto v = f.number(key, allow_infinite);
  if (!v)
    return fallback;
  if (!ok(*v))
    throw ParseError(ParseErrc::out_of_range, key, "'" + key + "' = " + format_number(*v) + " must be " + rule);
  return *v;
}

bool positive(double v) { return v > 0.0; }
bool non_negative(double v) { return v >= 0.0; }
bool any_value(double) { return true; }

geometry::ScenePoint point(Fields &f, const std::string &prefix, geometry::ScenePoint fallback) {
  const bool hx = f.has(prefix + ".x"), hy = f.has(prefix + ".y");
  if (hx != hy) {
    const std::string missing = prefix + (hx ? ".y" : ".x");
    throw ParseError(ParseErrc::missing_key, missing, "missing required key '" + missing + "'");
  }
  if (!hx)
    return fallback;
  return {f.require(prefix + ".x"), f.require(prefix + ".y")};
}

[[noreturn]] void rethrow_as_range(const std::string &key, const Error &e) {
  throw ParseError(ParseErrc::out_of_range, key, std::string("'") + key + "': " + e.what());
}

} // namespace

sim::SimScene parse_scene(std::string_view text) {
  Fields f(text);
  sim::SimScene scene;
  scene.rate = checked(f, "rate", scene.rate, positive, "positive");
  scene.c = checked(f, "c", scene.c, positive, "positive");
  if (const auto seed = f.integer("seed"))
    scene.seed = *seed;
  scene.wall_y = checked(f, "wall_y", scene.wall_y, any_value, "finite");
  scene.reflection_coeff = checked(f, "reflection_coeff", scene.reflection_coeff,
                                   [](double v) { return v >= 0.0 && v <= 1.0; }, "in [0, 1]");
  scene.ambient_noise_rms =
      checked(f, "ambient_noise_rms", scene.ambient_noise_rms, non_negative, "non-negative");
  if (const auto att = f.text("attenuation")) {
    if (*att == "spherical")
      scene.attenuation = sim::Attenuation::spherical;
    else if (*att == "none")
      scene.attenuation = sim::Attenuation::none;
    else
      throw ParseError(ParseErrc::bad_value, "attenuation",
                       "'attenuation': '" + *att + "' (expected spherical or none)");
  }
  try {
    scene.array = geometry::MicArray(point(f, "mic0", scene.array.mic(0)), point(f, "mic1", scene.array.mic(1)));
  } catch (const GeometryError &e) {
    rethrow_as_range("mic1", e);
  }

  static const std::regex source_key(R"(sources\[(\d+)\]\.(x|y|gain|enabled))");
  std::size_t count = 0;
  for (const std::string &key : f.keys()) {
    std::smatch m;
    if (std::regex_match(key, m, source_key))
      count = std::max<std::size_t>(count, std::stoul(m[1].str()) + 1);
  }
  if (count == 0)
    throw ParseError(ParseErrc::missing_key, "sources[0].x", "scene needs at least one source ('sources[0].x')");
  scene.sources.clear();
  for (std::size_t i = 0; i < count; ++i) {
    const std::string base = "sources[" + std::to_string(i) + "]";
    sim::Source s;
    s.position = {f.require(base + ".x"), f.require(base + ".y")};
    s.gain = checked(f, base + ".gain", s.gain, non_negative, "non-negative");
    if (const auto en = f.boolean(base + ".enabled"))
      s.enabled = *en;
    scene.sources.push_back(s);
  }
  if (const auto ref = f.integer("reference_source")) {
    if (*ref >= count)
      throw ParseError(ParseErrc::out_of_range, "reference_source",
                       "'reference_source' = " + std::to_string(*ref) + " must name an existing source");
    scene.reference_source = static_cast<std::size_t>(*ref);
  }
  f.finish();
  try {
    scene.validate();
  } catch (const ConfigError &e) {
    rethrow_as_range("sources", e);
  }
  return scene;
}

sim::SimScene read_scene(const std::filesystem::path &path) { return parse_scene(read_text(path)); }

RunConfig default_config(const sim::SimScene *scene) {
  RunConfig cfg;
  if (scene != nullptr)
    cfg.estimator = est::EstimatorConfig::for_scene(*scene);
  return cfg;
}

RunConfig parse_config(std::string_view text, const sim::SimScene *scene) {
  Fields f(text);
  RunConfig cfg = default_config(scene);
  est::EstimatorConfig &e = cfg.estimator;
  e.rate = checked(f, "estimator.rate", e.rate, positive, "positive");
  if (const auto n = f.integer("estimator.frame_length")) {
    if (!signal::is_power_of_two(*n) || *n < 8)
      throw ParseError(ParseErrc::out_of_range, "estimator.frame_length",
                       "'estimator.frame_length' = " + std::to_string(*n) + " must be a power of two >= 8");
    e.frame_length = static_cast<std::size_t>(*n);
  }
  if (const auto k = f.integer("estimator.csd_depth")) {
    if (*k == 0)
      throw ParseError(ParseErrc::out_of_range, "estimator.csd_depth", "'estimator.csd_depth' must be >= 1");
    e.csd_depth = static_cast<std::size_t>(*k);
  }
  e.band_lo = checked(f, "estimator.band_lo", e.band_lo, non_negative, "non-negative");
  e.band_hi = checked(f, "estimator.band_hi", e.band_hi, positive, "positive");
  e.tukey_alpha = checked(f, "estimator.tukey_alpha", e.tukey_alpha,
                          [](double v) { return v >= 0.0 && v <= 1.0; }, "in [0, 1]");
  if (const auto w = f.boolean("estimator.whiten"))
    e.whiten = *w;
  e.whiten_eps = checked(f, "estimator.whiten_eps", e.whiten_eps, positive, "positive");
  e.c = checked(f, "estimator.c", e.c, positive, "positive");
  e.output_rate = checked(f, "estimator.output_rate", e.output_rate, positive, "positive");
  e.d_min = checked(f, "estimator.d_min", e.d_min, non_negative, "non-negative");
  e.d_max = checked(f, "estimator.d_max", e.d_max, positive, "positive");
  try {
    e.array = geometry::MicArray(point(f, "estimator.mic0", e.array.mic(0)),
                                 point(f, "estimator.mic1", e.array.mic(1)));
    const auto wall = point(f, "estimator.look_wall", {e.look_wall.ux(), e.look_wall.uy()});
    e.look_wall = geometry::LookDirection(wall.x, wall.y);
  } catch (const GeometryError &err) {
    rethrow_as_range("estimator.look_wall", err);
  }
  try {
    const auto prop = point(f, "estimator.look_prop", {e.look_prop.ux(), e.look_prop.uy()});
    e.look_prop = geometry::LookDirection(prop.x, prop.y);
  } catch (const GeometryError &err) {
    rethrow_as_range("estimator.look_prop", err);
  }

  cfg.controller.kp = checked(f, "controller.kp", cfg.controller.kp, non_negative, "non-negative");
  cfg.controller.rate = checked(f, "controller.rate", cfg.controller.rate, positive, "positive");

  sim::Plant &p = cfg.plant;
  p.position = checked(f, "plant.initial_position", p.position, positive, "positive");
  p.velocity_limit = checked(f, "plant.velocity_limit", p.velocity_limit, positive, "positive", true);
  p.position_noise_rms =
      checked(f, "plant.position_noise_rms", p.position_noise_rms, non_negative, "non-negative");
  p.update_rate = checked(f, "plant.update_rate", p.update_rate, positive, "positive");
  f.finish();

  try {
    e.validate();
  } catch (const ConfigError &err) {
    rethrow_as_range("estimator", err);
  }
  return cfg;
}

RunConfig read_config(const std::filesystem::path &path, const sim::SimScene *scene) {
  return parse_config(read_text(path), scene);
}

std::string serialize_scene(const sim::SimScene &scene) {
  std::ostringstream out;
  out << "rate = " << format_number(scene.rate) << "\n"
      << "c = " << format_number(scene.c) << "\n"
      << "seed = " << scene.seed << "\n"
      << "wall_y = " << format_number(scene.wall_y) << "\n"
      << "reflection_coeff = " << format_number(scene.reflection_coeff) << "\n"
      << "ambient_noise_rms = " << format_number(scene.ambient_noise_rms) << "\n"
      << "attenuation = " << (scene.attenuation == sim::Attenuation::spherical ? "spherical" : "none") << "\n";
  for (std::size_t m = 0; m < 2; ++m)
    out << "mic" << m << ".x = " << format_number(scene.array.mic(m).x) << "\n"
        << "mic" << m << ".y = " << format_number(scene.array.mic(m).y) << "\n";
  out << "reference_source = " << scene.reference_source << "\n";
  for (std::size_t i = 0; i < scene.sources.size(); ++i) {
    const auto &s = scene.sources[i];
    const std::string base = "sources[" + std::to_string(i) + "]";
    out << base << ".x = " << format_number(s.position.x) << "\n"
        << base << ".y = " << format_number(s.position.y) << "\n"
        << base << ".gain = " << format_number(s.gain) << "\n"
        << base << ".enabled = " << (s.enabled ? "true" : "false") << "\n";
  }
  return out.str();
}

std::string read_text(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::filesystem::path &path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out)
    throw IoError("short write to '" + path.string() + "'");
}

} // namespace propsense::io
