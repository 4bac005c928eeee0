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

#include "propsense/cli.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "propsense/geometry.hpp"
#include "propsense/io.hpp"

namespace propsense::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::vector<double> default_sweep_distances() {
  std::vector<double> d;
  for (int cm = 4; cm <= 70; cm += 2)
    d.push_back(cm / 100.0);
  return d;
}

namespace {

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    throw UsageError("not a number: '" + std::string(text) + "'");
  return v;
}

} // namespace

std::vector<double> parse_distances(const std::string &text) {
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::size_t pos = 0;
    while (true) {
      const auto next = text.find(':', pos);
      parts.push_back(parse_double(std::string_view(text).substr(pos, next - pos)));
      if (next == std::string::npos)
        break;
      pos = next + 1;
    }
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
      throw UsageError("distance range must be 'from:to:step' with step > 0 and to >= from");
    const auto n = static_cast<std::size_t>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (std::size_t i = 0; i <= n; ++i)
      out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty())
        out.push_back(parse_double(item));
  }
  if (out.empty())
    throw UsageError("no distances given");
  for (double d : out)
    if (!(d > 0.0))
      throw UsageError("sweep distances must be positive");
  return out;
}

std::vector<SweepRow> run_sweep(const sim::SimScene &scene_template, const est::EstimatorConfig &cfg,
                                const SweepOptions &options) {
  if (!(options.duration > 0.0))
    throw ConfigError("sweep: duration must be positive");
  const auto samples = static_cast<std::size_t>(std::llround(options.duration * scene_template.rate));
  std::vector<SweepRow> rows;
  rows.reserve(options.distances.size());
  for (double d : options.distances) {
    const sim::SimScene scene = scene_template.at_wall_distance(d);
    const signal::SampleFrame audio = sim::render_frame(scene, 0, samples);
    SweepRow row;
    row.distance = d;
    for (est::Method m : {est::Method::beam, est::Method::channel}) {
      std::vector<double> est_d;
      for (const auto &tick : est::estimate_offline(audio, m, cfg))
        if (tick.estimate)
          est_d.push_back(tick.estimate->distance);
      metrics::ErrorStats stats;
      stats.avg = std::numeric_limits<double>::quiet_NaN();
      if (!est_d.empty()) {
        const std::vector<double> truth(est_d.size(), d);
        stats = metrics::open_loop_errors(est_d, truth);
      }
      (m == est::Method::beam ? row.beam : row.channel) = stats;
    }
    rows.push_back(row);
  }
  return rows;
}

std::optional<double> usable_range(const std::vector<SweepRow> &rows, est::Method method, double threshold) {
  std::optional<double> best;
  for (const auto &r : rows) {
    const metrics::ErrorStats &s = method == est::Method::channel ? r.channel : r.beam;
    if (s.count > 0 && s.avg < threshold && (!best || r.distance > *best))
      best = r.distance;
  }
  return best;
}

namespace {

std::string utc_stamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

fs::path prepare_out_dir(const std::string &flag, const std::string &subcommand) {
  fs::path dir;
  if (!flag.empty()) {
    dir = flag;
  } else {
    const char *root = std::getenv("PROPSENSE_OUT_ROOT");
    dir = fs::path(root != nullptr && *root != '\0' ? root : "runs") / (subcommand + "-" + utc_stamp());
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw IoError("cannot create output directory '" + dir.string() + "'");
  return dir;
}

std::ofstream open_out(const fs::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void close_out(std::ofstream &out, const fs::path &path) {
  out.close();
  if (!out)
    throw IoError("short write to '" + path.string() + "'");
}

std::string fmt(double v) { return io::format_number(v); }

std::string fixed(double v, int digits) {
  if (!std::isfinite(v))
    return "n/a";
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

ordered_json estimator_json(const est::EstimatorConfig &c) {
  return {{"rate", c.rate},
          {"frame_length", c.frame_length},
          {"csd_depth", c.csd_depth},
          {"band_hz", {c.band_lo, c.band_hi}},
          {"tukey_alpha", c.tukey_alpha},
          {"whiten", c.whiten},
          {"c", c.c},
          {"output_rate", c.output_rate},
          {"d_range_m", {c.d_min, c.d_max}},
          {"look_wall", {c.look_wall.ux(), c.look_wall.uy()}},
          {"look_prop", {c.look_prop.ux(), c.look_prop.uy()}}};
}

// Options shared by every subcommand.
struct Common {
  std::string scene_path;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

struct Inputs {
  sim::SimScene scene;
  io::RunConfig config;
};

Inputs load_inputs(const Common &c, const sim::SimScene &fallback_scene) {
  Inputs in;
  in.scene = c.scene_path.empty() ? fallback_scene : io::read_scene(c.scene_path);
  if (c.seed)
    in.scene.seed = *c.seed;
  in.config = c.config_path.empty() ? io::default_config(&in.scene) : io::read_config(c.config_path, &in.scene);
  return in;
}

ordered_json manifest_base(const std::string &subcommand, const Common &c, const fs::path &dir) {
  ordered_json m;
  m["subcommand"] = subcommand;
  m["inputs"] = {{"scene", c.scene_path}, {"config", c.config_path}};
  m["output_dir"] = dir.string();
  return m;
}

void write_manifest(const fs::path &dir, const ordered_json &manifest) {
  io::write_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

// ---- subcommands --------------------------------------------------------------

struct SimulateArgs {
  Common common;
  double duration = 0.0;
  int bits = 16;
};

int cmd_simulate(const SimulateArgs &a, std::ostream &out) {
  Inputs in = load_inputs(a.common, sim::reference_scene(true, true));
  const auto samples = static_cast<std::size_t>(std::llround(a.duration * in.scene.rate));
  if (samples == 0)
    throw UsageError("--duration " + fmt(a.duration) + " s yields no audio samples");
  const fs::path dir = prepare_out_dir(a.common.out_dir, "simulate");

  const signal::SampleFrame frame = sim::render_frame(in.scene, 0, samples);
  io::write_wav(dir / "audio.wav", io::from_frame(frame, static_cast<std::uint16_t>(a.bits)));

  const fs::path truth_path = dir / "truth.csv";
  std::ofstream truth = open_out(truth_path);
  const auto center = in.scene.array.center();
  truth << "source,x_m,y_m,gain,enabled,wall_distance_m,reflected_minus_direct_s,round_trip_distance_m\n";
  for (std::size_t i = 0; i < in.scene.sources.size(); ++i) {
    const auto &s = in.scene.sources[i];
    const double delay = geometry::reflected_minus_direct_delay(s.position, center, in.scene.wall_y, in.scene.c);
    truth << i << ',' << fmt(s.position.x) << ',' << fmt(s.position.y) << ',' << fmt(s.gain) << ','
          << (s.enabled ? 1 : 0) << ',' << fmt(in.scene.wall_distance()) << ',' << fmt(delay) << ','
          << fmt(est::delay_to_distance(delay, in.scene.c)) << '\n';
  }
  close_out(truth, truth_path);

  ordered_json m = manifest_base("simulate", a.common, dir);
  m["seed"] = in.scene.seed;
  m["method"] = nullptr;
  m["duration_s"] = a.duration;
  m["samples"] = samples;
  m["bits"] = a.bits;
  m["scene"] = io::serialize_scene(in.scene);
  m["files"] = {"audio.wav", "truth.csv"};
  write_manifest(dir, m);
  out << "wrote " << samples << " frames to " << (dir / "audio.wav").string() << "\n";
  return kOk;
}

struct EstimateArgs {
  Common common;
  std::string audio_path;
  std::string method = "beam";
  bool no_series = false;
};

int cmd_estimate(const EstimateArgs &a, std::ostream &out) {
  const est::Method method = est::parse_method(a.method);
  if (method == est::Method::oracle)
    throw UsageError("--method oracle needs ground truth; estimate accepts beam or channel");
  const io::AudioFile audio = io::read_wav(a.audio_path);
  if (audio.channels != 2)
    throw ConfigError("'" + a.audio_path + "' has " + std::to_string(audio.channels) +
                      " channel(s); the estimators need exactly 2");
  sim::SimScene scene = a.common.scene_path.empty() ? sim::reference_scene(true, true) : io::read_scene(a.common.scene_path);
  scene.rate = audio.rate;
  Common common = a.common;
  common.scene_path.clear();
  Inputs in = load_inputs(common, scene);
  est::EstimatorConfig cfg = in.config.estimator;
  cfg.rate = audio.rate;
  cfg.validate();

  const fs::path dir = prepare_out_dir(a.common.out_dir, "estimate");
  const auto ticks = est::estimate_offline(io::to_frame(audio), method, cfg, !a.no_series);

  const fs::path est_path = dir / "estimates.csv";
  std::ofstream est_out = open_out(est_path);
  io::write_estimates_csv(est_out, ticks);
  close_out(est_out, est_path);
  ordered_json files = {"estimates.csv"};
  if (!a.no_series) {
    const fs::path series_path = dir / "delay_series.csv";
    std::ofstream series_out = open_out(series_path);
    io::write_delay_series_csv(series_out, ticks);
    close_out(series_out, series_path);
    files.push_back("delay_series.csv");
  }

  ordered_json m = manifest_base("estimate", a.common, dir);
  m["inputs"]["audio"] = a.audio_path;
  m["seed"] = nullptr;
  m["method"] = std::string(est::to_string(method));
  m["estimator"] = estimator_json(cfg);
  m["ticks"] = ticks.size();
  m["files"] = files;
  write_manifest(dir, m);
  std::size_t emitted = 0;
  for (const auto &t : ticks)
    emitted += t.estimate ? 1 : 0;
  out << emitted << " estimates (" << est::to_string(method) << ") written to " << est_path.string() << "\n";
  return kOk;
}

struct SweepArgs {
  Common common;
  std::string distances;
  double duration = 10.0;
  double threshold = 0.030;
  std::optional<double> ambient;
};

int cmd_sweep(const SweepArgs &a, std::ostream &out) {
  Inputs in = load_inputs(a.common, sim::vehicle_scene(0.12));
  if (a.ambient)
    in.scene.ambient_noise_rms = *a.ambient;
  SweepOptions opt;
  opt.distances = a.distances.empty() ? default_sweep_distances() : parse_distances(a.distances);
  opt.duration = a.duration;
  opt.threshold = a.threshold;
  const fs::path dir = prepare_out_dir(a.common.out_dir, "sweep");
  const auto rows = run_sweep(in.scene, in.config.estimator, opt);

  const fs::path csv_path = dir / "sweep.csv";
  std::ofstream csv = open_out(csv_path);
  csv << "distance_m,beam_avg_m,beam_std_m,beam_max_m,beam_n,channel_avg_m,channel_std_m,channel_max_m,channel_n\n";
  std::vector<std::vector<std::string>> table;
  for (const auto &r : rows) {
    csv << fmt(r.distance) << ',' << fmt(r.beam.avg) << ',' << fmt(r.beam.std) << ',' << fmt(r.beam.max) << ','
        << r.beam.count << ',' << fmt(r.channel.avg) << ',' << fmt(r.channel.std) << ','
        << fmt(r.channel.max) << ',' << r.channel.count << '\n';
    table.push_back({fixed(r.distance, 2), fixed(1000.0 * r.beam.avg, 1), fixed(1000.0 * r.channel.avg, 1)});
  }
  close_out(csv, csv_path);

  const auto beam = usable_range(rows, est::Method::beam, opt.threshold);
  const auto chan = usable_range(rows, est::Method::channel, opt.threshold);
  std::ostringstream report;
  report << io::format_table({"distance_m", "beam_err_mm", "channel_err_mm"}, table) << "\n";
  report << "usable range (mean |error| < " << fixed(1000.0 * opt.threshold, 1) << " mm)\n";
  report << "  beam:    " << (beam ? fixed(*beam, 2) + " m" : std::string("none")) << "\n";
  report << "  channel: " << (chan ? fixed(*chan, 2) + " m" : std::string("none")) << "\n";
  if (beam && chan)
    report << "  ratio:   " << fixed(*beam / *chan, 2) << "\n";
  io::write_text(dir / "range_report.txt", report.str());

  ordered_json m = manifest_base("sweep", a.common, dir);
  m["seed"] = in.scene.seed;
  m["method"] = {"beam", "channel"};
  m["duration_s"] = opt.duration;
  m["threshold_m"] = opt.threshold;
  m["distances_m"] = opt.distances;
  m["usable_range_m"] = {{"beam", beam ? ordered_json(*beam) : ordered_json(nullptr)},
                         {"channel", chan ? ordered_json(*chan) : ordered_json(nullptr)}};
  m["scene"] = io::serialize_scene(in.scene);
  m["estimator"] = estimator_json(in.config.estimator);
  m["files"] = {"sweep.csv", "range_report.txt"};
  write_manifest(dir, m);
  out << report.str();
  return kOk;
}

struct ClosedLoopArgs {
  Common common;
  std::string method = "beam";
  std::string profile = "square";
  std::optional<double> duration;
  std::size_t repeats = 3;
  std::optional<double> ambient;
};

int cmd_closedloop(const ClosedLoopArgs &a, std::ostream &out) {
  const est::Method method = est::parse_method(a.method);
  Inputs in = load_inputs(a.common, sim::vehicle_scene(0.12));
  if (a.ambient)
    in.scene.ambient_noise_rms = *a.ambient;
  control::ClosedLoopSetup setup;
  setup.scene = in.scene;
  setup.method = method;
  setup.profile = a.profile == "sine" ? control::CommandProfile::sine() : control::CommandProfile::square();
  if (a.duration)
    setup.profile.duration = *a.duration;
  setup.profile.validate();
  setup.controller = in.config.controller;
  setup.plant = in.config.plant;
  setup.estimator = in.config.estimator;
  if (a.repeats == 0)
    throw UsageError("--repeats must be at least 1");

  const fs::path dir = prepare_out_dir(a.common.out_dir, "closedloop");
  const auto traces = control::run_repeats(setup, a.repeats);

  ordered_json files = ordered_json::array();
  const std::string tag(est::to_string(method));
  for (std::size_t r = 0; r < traces.size(); ++r) {
    const std::string name = "trace_" + tag + "_r" + std::to_string(r) + ".csv";
    std::ofstream t = open_out(dir / name);
    io::write_trace_csv(t, traces[r]);
    close_out(t, dir / name);
    files.push_back(name);
  }

  const fs::path metrics_path = dir / "metrics.csv";
  std::ofstream mcsv = open_out(metrics_path);
  std::vector<std::vector<std::string>> table;
  std::vector<std::string> header;
  if (setup.profile.kind == control::ProfileKind::square) {
    header = {"repeat", "seed", "sse_mm", "sse_std_mm", "rise_s", "overshoot_pct", "undefined_rise"};
    mcsv << "repeat,seed,steady_state_error_m,steady_state_std_m,rise_time_s,overshoot_pct,undefined_rise\n";
    std::vector<double> sse, rise, os;
    for (std::size_t r = 0; r < traces.size(); ++r) {
      const auto s = metrics::square_wave_metrics(traces[r], setup.profile);
      const std::uint64_t seed = setup.scene.seed + r;
      mcsv << r << ',' << seed << ',' << fmt(s.steady_state_error) << ',' << fmt(s.steady_state_std) << ','
           << fmt(s.rise_time) << ',' << fmt(s.overshoot_pct) << ',' << s.undefined_rise << '\n';
      table.push_back({std::to_string(r), std::to_string(seed), fixed(1000.0 * s.steady_state_error, 2),
                       fixed(1000.0 * s.steady_state_std, 2), fixed(s.rise_time, 2), fixed(s.overshoot_pct, 1),
                       std::to_string(s.undefined_rise)});
      sse.push_back(s.steady_state_error);
      rise.push_back(s.rise_time);
      os.push_back(s.overshoot_pct);
    }
    table.push_back({"mean", "", fixed(1000.0 * metrics::mean_defined(sse), 2), "",
                     fixed(metrics::mean_defined(rise), 2), fixed(metrics::mean_defined(os), 1), ""});
  } else {
    header = {"repeat", "seed", "avg_mm", "std_mm", "max_mm"};
    mcsv << "repeat,seed,avg_error_m,std_error_m,max_error_m\n";
    std::vector<double> avg;
    for (std::size_t r = 0; r < traces.size(); ++r) {
      const auto s = metrics::tracking_errors(traces[r]);
      const std::uint64_t seed = setup.scene.seed + r;
      mcsv << r << ',' << seed << ',' << fmt(s.avg) << ',' << fmt(s.std) << ',' << fmt(s.max) << '\n';
      table.push_back({std::to_string(r), std::to_string(seed), fixed(1000.0 * s.avg, 2),
                       fixed(1000.0 * s.std, 2), fixed(1000.0 * s.max, 2)});
      avg.push_back(s.avg);
    }
    table.push_back({"mean", "", fixed(1000.0 * metrics::mean_defined(avg), 2), "", ""});
  }
  close_out(mcsv, metrics_path);
  const std::string summary = tag + " / " + a.profile + ", " + std::to_string(traces.size()) + " repeat(s)\n" +
                              io::format_table(header, table);
  io::write_text(dir / "summary.txt", summary);
  files.push_back("metrics.csv");
  files.push_back("summary.txt");

  ordered_json m = manifest_base("closedloop", a.common, dir);
  m["seed"] = setup.scene.seed;
  m["method"] = tag;
  m["profile"] = a.profile;
  m["duration_s"] = setup.profile.duration;
  m["repeats"] = a.repeats;
  m["controller"] = {{"kp", setup.controller.kp}, {"rate", setup.controller.rate}};
  m["plant"] = {{"initial_position", setup.plant.position},
                {"velocity_limit", setup.plant.velocity_limit},
                {"position_noise_rms", setup.plant.position_noise_rms},
                {"update_rate", setup.plant.update_rate}};
  m["scene"] = io::serialize_scene(setup.scene);
  if (method != est::Method::oracle)
    m["estimator"] = estimator_json(setup.estimator);
  m["files"] = files;
  write_manifest(dir, m);
  out << summary;
  return kOk;
}

void add_common(CLI::App *sub, Common &c, bool with_scene = true) {
  if (with_scene)
    sub->add_option("--scene", c.scene_path, "Scene file (key = value)");
  sub->add_option("--config", c.config_path, "Run configuration file (estimator/controller/plant keys)");
  sub->add_option("--out-dir", c.out_dir, "Output directory (default $PROPSENSE_OUT_ROOT/<subcommand>-<time>)");
  sub->add_option("--seed", c.seed, "Override the scene seed");
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"propsense: acoustic wall-distance estimation from propulsion self-noise"};
  app.require_subcommand(1);
  const std::vector<std::string> methods{"beam", "channel", "oracle"};

  SimulateArgs sim_args;
  auto *sim = app.add_subcommand("simulate", "Render two-microphone audio and ground truth for a scene");
  add_common(sim, sim_args.common);
  sim->add_option("--duration", sim_args.duration, "Seconds of audio")->required()->check(CLI::NonNegativeNumber);
  sim->add_option("--bits", sim_args.bits, "PCM width")->check(CLI::IsMember({16, 24}));

  EstimateArgs est_args;
  auto *est = app.add_subcommand("estimate", "Offline distance estimation from a two-channel WAV file");
  add_common(est, est_args.common);
  est->add_option("--audio", est_args.audio_path, "Input WAV")->required();
  est->add_option("--method", est_args.method, "beam | channel")->check(CLI::IsMember(methods));
  est->add_flag("--no-delay-series", est_args.no_series, "Skip delay_series.csv");

  SweepArgs sweep_args;
  auto *sweep = app.add_subcommand("sweep", "Open-loop accuracy of both methods over a list of wall distances");
  add_common(sweep, sweep_args.common);
  sweep->add_option("--distances", sweep_args.distances, "from:to:step or comma list [m] (default 0.04:0.70:0.02)");
  sweep->add_option("--duration", sweep_args.duration, "Seconds of audio per distance")->check(CLI::PositiveNumber);
  sweep->add_option("--threshold", sweep_args.threshold, "Usable-range error bound [m]")->check(CLI::PositiveNumber);
  sweep->add_option("--ambient-noise", sweep_args.ambient, "Override ambient_noise_rms")->check(CLI::NonNegativeNumber);

  ClosedLoopArgs cl_args;
  auto *cl = app.add_subcommand("closedloop", "Closed-loop wall-distance control experiment");
  add_common(cl, cl_args.common);
  cl->add_option("--method", cl_args.method, "beam | channel | oracle")->check(CLI::IsMember(methods));
  cl->add_option("--profile", cl_args.profile, "square | sine")->check(CLI::IsMember({"square", "sine"}));
  cl->add_option("--duration", cl_args.duration, "Override the profile duration [s]")->check(CLI::PositiveNumber);
  cl->add_option("--repeats", cl_args.repeats, "Independent runs (seeds seed..seed+repeats-1)");
  cl->add_option("--ambient-noise", cl_args.ambient, "Override ambient_noise_rms")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (sim->parsed())
      return cmd_simulate(sim_args, out);
    if (est->parsed())
      return cmd_estimate(est_args, out);
    if (sweep->parsed())
      return cmd_sweep(sweep_args, out);
    if (cl->parsed())
      return cmd_closedloop(cl_args, out);
  } catch (const UsageError &e) {
    err << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ParseError &e) {
    err << "parse error (" << to_string(e.code()) << "): " << e.what() << "\n";
    return kParse;
  } catch (const IoError &e) {
    err << "io error: " << e.what() << "\n";
    return kIo;
  } catch (const ConfigError &e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const RangeError &e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << "\n";
    return kOther;
  }
  return kUsage;
}

} // namespace propsense::cli
