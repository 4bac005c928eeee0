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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "propsense/cli.hpp"
#include "propsense/control.hpp"
#include "propsense/estimators.hpp"
#include "propsense/geometry.hpp"
#include "propsense/io.hpp"
#include "propsense/metrics.hpp"
#include "propsense/signal.hpp"
#include "propsense/simulator.hpp"

namespace {

using namespace propsense;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass;
  std::string detail;
};

struct Criterion {
  int id;
  const char *name;
  double budget_s;
  std::function<Outcome()> check;
};

// ---- 1 ------------------------------------------------------------------------

Outcome peak_recovery() {
  std::string detail;
  bool pass = true;
  for (const auto &[label, p0, p3] : {std::tuple{"P0", true, false}, std::tuple{"P3", false, true}}) {
    const auto scene = sim::reference_scene(p0, p3);
    const auto cfg = est::EstimatorConfig::for_scene(scene);
    est::StreamingEstimator beam(est::Method::beam, cfg);
    beam.push(sim::render_frame(scene, 0, cfg.csd_depth * cfg.frame_length));
    const auto series = *beam.delay_series();
    const auto stats = est::peak_stats(series, est::admissible_window(cfg, series.size()));
    const auto &src = scene.sources[scene.reference_source].position;
    const double oracle =
        geometry::reflected_minus_direct_delay(src, scene.array.center(), scene.wall_y, scene.c) * scene.rate;
    const double miss = std::abs(static_cast<double>(stats.argmax) - oracle);
    pass = pass && miss <= 2.0;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%s%s argmax %zu vs oracle %.2f bins (|d| %.2f <= 2)", detail.empty() ? "" : "; ",
                  label, stats.argmax, oracle, miss);
    detail += buf;
  }
  return {pass, detail};
}

// ---- 2, 3 -----------------------------------------------------------------------

struct TickMean {
  double beam_peak = 0.0, beam_ratio = 0.0;
  double chan_peak = 0.0, chan_ratio = 0.0;
};

// Mean in-window peak and peak/median over the 10 Hz ticks of one second.
TickMean tick_mean(const sim::SimScene &scene) {
  const auto cfg = est::EstimatorConfig::for_scene(scene);
  const auto audio = sim::render_frame(scene, 0, static_cast<std::size_t>(scene.rate));
  TickMean out;
  for (est::Method m : {est::Method::beam, est::Method::channel}) {
    double peak = 0.0, ratio = 0.0;
    std::size_t n = 0;
    for (const auto &t : est::estimate_offline(audio, m, cfg, true)) {
      const auto s = est::peak_stats(*t.series, est::admissible_window(cfg, t.series->size()));
      peak += s.peak;
      ratio += s.ratio();
      ++n;
    }
    (m == est::Method::beam ? out.beam_peak : out.chan_peak) = peak / static_cast<double>(n);
    (m == est::Method::beam ? out.beam_ratio : out.chan_ratio) = ratio / static_cast<double>(n);
  }
  return out;
}

struct SeedRuns {
  std::vector<TickMean> single, both;
};

const SeedRuns &seed_runs() {
  static const SeedRuns runs = [] {
    SeedRuns r;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      auto one = sim::reference_scene(true, false);
      auto two = sim::reference_scene(true, true);
      one.seed = two.seed = seed;
      r.single.push_back(tick_mean(one));
      r.both.push_back(tick_mean(two));
    }
    return r;
  }();
  return runs;
}

Outcome snr_ordering() {
  const auto &runs = seed_runs();
  int wins = 0;
  double beam = 0.0, chan = 0.0;
  for (const auto &b : runs.both) {
    wins += b.beam_ratio >= b.chan_ratio ? 1 : 0;
    beam += b.beam_ratio / 50.0;
    chan += b.chan_ratio / 50.0;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "beam ratio >= channel in %d/50 (need >= 45); mean peak/median beam %.1f, channel %.1f",
                wins, beam, chan);
  return {wins >= 45, buf};
}

Outcome multi_source_attenuation() {
  const auto &runs = seed_runs();
  int hits = 0;
  double fb_sum = 0.0, fc_sum = 0.0;
  for (std::size_t i = 0; i < runs.both.size(); ++i) {
    const auto &a = runs.single[i];
    const auto &b = runs.both[i];
    const double fb = 1.0 - b.beam_peak / a.beam_peak;
    const double fc = 1.0 - b.chan_peak / a.chan_peak;
    fb_sum += fb / 50.0;
    fc_sum += fc / 50.0;
    hits += (b.beam_peak < a.beam_peak && fc > fb) ? 1 : 0;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "beam lower and channel attenuates more in %d/50 (need >= 40); mean attenuation beam %.1f%%, channel %.1f%%",
                hits, 100.0 * fb_sum, 100.0 * fc_sum);
  return {hits >= 40, buf};
}

// ---- 4 ------------------------------------------------------------------------

constexpr double kAmbient = 0.045;

Outcome range_ordering() {
  auto scene = sim::vehicle_scene(0.12);
  scene.ambient_noise_rms = kAmbient;
  scene.seed = 7;
  cli::SweepOptions opt;
  opt.distances = cli::default_sweep_distances();
  opt.duration = 10.0;
  opt.threshold = 0.030;
  const auto rows = cli::run_sweep(scene, est::EstimatorConfig::for_scene(scene), opt);
  const auto beam = cli::usable_range(rows, est::Method::beam, opt.threshold);
  const auto chan = cli::usable_range(rows, est::Method::channel, opt.threshold);
  const double b = beam.value_or(0.0);
  const double c = chan.value_or(0.0);
  char buf[160];
  std::snprintf(buf, sizeof buf, "ambient %.3f: usable range beam %.2f m, channel %.2f m (ratio %.2f, need >= 2)",
                kAmbient, b, c, c > 0.0 ? b / c : std::numeric_limits<double>::infinity());
  return {beam.has_value() && b >= 2.0 * c, buf};
}

// ---- 5 ------------------------------------------------------------------------

Outcome closed_loop_ordering() {
  double sse[3], rise[3];
  const est::Method methods[3] = {est::Method::oracle, est::Method::beam, est::Method::channel};
  for (int i = 0; i < 3; ++i) {
    control::ClosedLoopSetup setup;
    setup.scene = sim::vehicle_scene(0.12);
    setup.scene.ambient_noise_rms = kAmbient;
    setup.scene.seed = 100;
    setup.method = methods[i];
    setup.estimator = est::EstimatorConfig::for_scene(setup.scene);
    const auto traces = control::run_repeats(setup, 3);
    std::vector<double> s, r;
    for (const auto &t : traces) {
      const auto m = metrics::square_wave_metrics(t, setup.profile);
      s.push_back(m.steady_state_error);
      r.push_back(std::isnan(m.rise_time) ? std::numeric_limits<double>::infinity() : m.rise_time);
    }
    sse[i] = metrics::mean_defined(s);
    rise[i] = metrics::mean_defined(r);
  }
  char buf[200];
  std::snprintf(buf, sizeof buf, "SSE oracle %.2f < beam %.2f < channel %.2f mm; rise beam %.2f < channel %.2f s",
                1000.0 * sse[0], 1000.0 * sse[1], 1000.0 * sse[2], rise[1], rise[2]);
  return {sse[0] < sse[1] && sse[1] < sse[2] && rise[1] < rise[2], buf};
}

// ---- 6 ------------------------------------------------------------------------

Outcome controller_exactness() {
  double worst_abs = 0.0, worst_ratio = 0.0;
  for (double kp : {0.1, 0.5, 0.8, 1.0}) {
    control::ClosedLoopSetup setup;
    setup.scene = sim::vehicle_scene(0.12);
    setup.method = est::Method::oracle;
    setup.controller.kp = kp;
    setup.plant.velocity_limit = std::numeric_limits<double>::infinity();
    setup.plant.position_noise_rms = 0.0;
    setup.profile = control::CommandProfile::constant(0.20, 2.1);
    setup.estimator = est::EstimatorConfig::for_scene(setup.scene);
    const auto trace = control::run_closed_loop(setup);
    for (std::size_t n = 0; n < 20; ++n) {
      const double e0 = trace.rows[n].commanded - trace.rows[n].true_distance;
      const double e1 = trace.rows[n + 1].commanded - trace.rows[n + 1].true_distance;
      worst_abs = std::max(worst_abs, std::abs(e1 - (1.0 - kp) * e0));
      if (std::abs(e0) > 1e-6)
        worst_ratio = std::max(worst_ratio, std::abs(e1 / e0 - (1.0 - kp)));
    }
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "20 ticks, K_p in {0.1,0.5,0.8,1}: max |e1-(1-K_p)e0| %.2e, max ratio dev %.2e (<= 1e-9)",
                worst_abs, worst_ratio);
  return {worst_abs <= 1e-9 && worst_ratio <= 1e-9, buf};
}

// ---- 7 ------------------------------------------------------------------------

Outcome equations_exact() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t bad = 0;
  control::PController ctrl;
  for (int i = 0; i < 100000; ++i) {
    const double delay = 0.01 * u(rng);
    if (est::delay_to_distance(delay, 343.0) != delay * 343.0 / 2.0)
      ++bad;
    ctrl.kp = 2.0 * u(rng);
    const double target = u(rng), measured = u(rng);
    if (control::control_step(ctrl, target, measured) != ctrl.kp * (target - measured))
      ++bad;
  }
  return {bad == 0, std::to_string(bad) + " mismatches over 100000 random delay and control inputs"};
}

// ---- 8 ------------------------------------------------------------------------

std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> x(n);
  for (double &v : x)
    v = g(rng);
  return x;
}

Outcome dsp_properties() {
  std::vector<std::string> failed;
  auto require = [&](bool ok, const char *what) {
    if (!ok)
      failed.push_back(what);
  };

  double parseval = 0.0, round_trip = 0.0;
  for (std::size_t n = 2; n <= 4096; n *= 2) {
    const auto x = gaussian(n, n);
    const auto s = signal::forward_dft(x, 1000.0);
    double et = 0.0, ef = 0.0;
    for (double v : x)
      et += v * v;
    for (std::size_t k = 0; k < s.bins.size(); ++k)
      ef += (k == 0 || k == n / 2 ? 1.0 : 2.0) * std::norm(s.bins[k]);
    parseval = std::max(parseval, std::abs(et - ef / static_cast<double>(n)) / et);
    const auto back = signal::inverse_dft(s.bins, 1000.0, n);
    for (std::size_t i = 0; i < n; ++i)
      round_trip = std::max(round_trip, std::abs(back.values[i] - x[i]));
  }
  require(parseval <= 1e-6, "Parseval");
  require(round_trip <= 1e-9, "DFT round trip");

  double wk = 0.0;
  for (std::size_t n : {16u, 64u, 256u}) {
    constexpr std::size_t depth = 4;
    signal::CsdEstimate csd(n / 2 + 1, depth);
    std::vector<double> direct(n, 0.0);
    const auto w = signal::hann_coefficients(n);
    for (std::size_t f = 0; f < depth; ++f) {
      auto a = gaussian(n, 10 * n + f), b = gaussian(n, 20 * n + f);
      for (std::size_t i = 0; i < n; ++i) {
        a[i] *= w[i];
        b[i] *= w[i];
      }
      const std::vector<signal::Spectrum> sp{signal::forward_dft(a, 1.0), signal::forward_dft(b, 1.0)};
      csd.update(sp);
      for (std::size_t lag = 0; lag < n; ++lag) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          acc += a[(i + lag) % n] * a[i];
        direct[lag] += acc / depth;
      }
    }
    const std::vector<signal::cplx> s11(csd.averaged().s11.begin(), csd.averaged().s11.end());
    const auto r = signal::inverse_dft(s11, 1.0, n);
    for (std::size_t lag = 0; lag < n; ++lag)
      wk = std::max(wk, std::abs(r.values[lag] - direct[lag]) / std::abs(direct[0]));
  }
  require(wk <= 1e-5, "Wiener-Khinchin");

  signal::DelaySeries series;
  series.rate = 1.0;
  series.values = gaussian(1024, 5);
  const auto env = signal::hilbert_envelope(series);
  bool dominant = true;
  for (std::size_t i = 0; i < env.size(); ++i)
    dominant = dominant && env.envelope[i] + 1e-9 >= std::abs(env.values[i]);
  require(dominant, "envelope dominance");

  signal::CsdEstimate csd(513, 8);
  for (std::size_t f = 0; f < 11; ++f) {
    const std::vector<signal::Spectrum> sp{signal::forward_dft(gaussian(1024, 100 + f), 48000.0),
                                           signal::forward_dft(gaussian(1024, 200 + f), 48000.0)};
    csd = signal::update_csd(std::move(csd), sp);
  }
  const auto norm = signal::normalize_csd_trace(csd.averaged());
  double herm = 0.0, trace = 0.0;
  for (const auto *m : {&csd.averaged(), &norm})
    for (std::size_t b = 0; b < m->bins(); ++b)
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          herm = std::max(herm, std::abs(m->at(b, i, j) - std::conj(m->at(b, j, i))));
  for (std::size_t b = 0; b < norm.bins(); ++b)
    trace = std::max(trace, std::abs(norm.trace(b) - 1.0));
  require(herm < 1e-9, "CSD Hermitian");
  require(trace <= 1e-9, "trace normalization");

  bool wav = true;
  std::mt19937_64 rng(9);
  for (std::uint16_t bits : {16, 24}) {
    io::AudioFile a;
    a.bits = bits;
    a.channels = 2;
    std::uniform_int_distribution<std::int32_t> u(-(1 << (bits - 1)), (1 << (bits - 1)) - 1);
    a.samples.resize(20002);
    for (auto &s : a.samples)
      s = u(rng);
    const auto b = io::parse_wav(io::encode_wav(a));
    wav = wav && b.samples == a.samples && b.rate == a.rate && b.bits == a.bits;
  }
  require(wav, "WAV round trip");

  auto scene = sim::reference_scene(true, true);
  scene.ambient_noise_rms = 0.01;
  scene.seed = 3;
  const auto r1 = sim::render_frame(scene, 1000, 8192);
  const auto r2 = sim::render_frame(scene, 1000, 8192);
  bool same = true;
  for (std::size_t c = 0; c < 2; ++c)
    same = same && std::equal(r1.channel(c).begin(), r1.channel(c).end(), r2.channel(c).begin());
  require(same, "render reproducibility");

  char buf[200];
  std::snprintf(buf, sizeof buf, "Parseval %.1e, round trip %.1e, W-K %.1e, Hermitian %.1e, trace %.1e, %s", parseval,
                round_trip, wk, herm, trace, failed.empty() ? "all properties hold" : "failed:");
  std::string detail = buf;
  for (const auto &f : failed)
    detail += " " + f;
  return {failed.empty(), detail};
}

// ---- 9 ------------------------------------------------------------------------

Outcome cadence() {
  auto scene = sim::vehicle_scene(0.15);
  scene.ambient_noise_rms = 0.01;
  const auto cfg = est::EstimatorConfig::for_scene(scene);
  const auto audio = sim::render_frame(scene, 0, static_cast<std::size_t>(100.0 * scene.rate));
  bool pass = true;
  std::string detail;
  for (est::Method m : {est::Method::beam, est::Method::channel}) {
    std::size_t emitted = 0;
    for (const auto &t : est::estimate_offline(audio, m, cfg))
      emitted += t.estimate ? 1 : 0;
    const long diff = static_cast<long>(emitted) - 1000;
    pass = pass && std::abs(diff) <= 1;
    detail += (detail.empty() ? "" : ", ") + std::string(est::to_string(m)) + " " + std::to_string(emitted);
  }
  return {pass, detail + " estimates over 100 s (expect 1000 +- 1)"};
}

} // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "geometric peak recovery", 10.0, peak_recovery},
      {2, "beam vs channel peak-to-median", 120.0, snr_ordering},
      {3, "multi-source attenuation", 120.0, multi_source_attenuation},
      {4, "distance-sweep range ordering", 300.0, range_ordering},
      {5, "closed-loop ordering", 600.0, closed_loop_ordering},
      {6, "controller exactness", 60.0, controller_exactness},
      {7, "distance and control equations", 60.0, equations_exact},
      {8, "DSP property suite", 60.0, dsp_properties},
      {9, "10 Hz cadence", 60.0, cadence},
  };
  int failures = 0;
  for (const auto &c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failures += pass ? 0 : 1;
    std::printf("%s  %d  %-32s %s [%.1f s, budget %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
