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

// Delay estimation from two-microphone audio.
//
//  * Beam cross-correlation: moving-average CSD, trace normalization, a wall
//    beam and a propeller (reference) beam, the cross-beam spectrum
//    w_wall^H S w_prop, band window + magnitude whitening, inverse transform.
//  * Channel autocorrelation difference: each channel's latest power spectrum
//    normalized by the squared mean magnitude over both channels (averaged
//    over the same moving window), differenced and inverse transformed. The
//    normalization is reconstructed from a prose description of the method.
//
// Both feed the same tracker: top three envelope bins in an admissible lag
// window, pick the one closest to the previous pick, d = delay * c / 2.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "propsense/geometry.hpp"
#include "propsense/signal.hpp"
#include "propsense/simulator.hpp"

namespace propsense::est {

using geometry::LookDirection;
using geometry::MicArray;
using signal::cplx;

enum class Method { beam, channel, oracle };

std::string_view to_string(Method m) noexcept;
// Throws ConfigError for anything but "beam", "channel", "oracle".
Method parse_method(std::string_view text);

struct EstimatorConfig {
  double rate = 48000.0;
  std::size_t frame_length = 1024;
  std::size_t csd_depth = 8;
  double band_lo = 500.0;
  double band_hi = 8000.0;
  double tukey_alpha = 0.25;
  bool whiten = true;
  double whiten_eps = 1e-12;
  MicArray array{{0.0, -0.1475}, {0.0, -0.1625}};
  LookDirection look_wall{0.0, 1.0};
  LookDirection look_prop{-0.1375, -0.1};
  double c = 343.0;
  double output_rate = 10.0;
  double d_min = 0.03;
  double d_max = 1.0;

  void validate() const;
  std::size_t bins() const noexcept { return frame_length / 2 + 1; }
  double bin_width() const noexcept { return rate / static_cast<double>(frame_length); }

  // Array, rate, sound speed and look directions taken from a scene: the wall
  // beam along the wall normal, the reference beam at the scene's reference
  // source.
  static EstimatorConfig for_scene(const sim::SimScene &scene);
};

struct SteeringVector {
  LookDirection look;
  std::vector<cplx> w1; // per bin, microphone 0
  std::vector<cplx> w2; // per bin, microphone 1
};

// Far-field plane-wave weights w_m(f) = exp(j 2 pi f (look . r_m) / c) / sqrt(2),
// r_m relative to the array center, so that w^H x adds a wave arriving from
// `look` coherently.
SteeringVector steering_vector(const LookDirection &look, const MicArray &array, double c,
                               std::size_t bins, double bin_width);

// Cross-beam spectrum w_wall^H S w_prop per bin (before windowing).
std::vector<cplx> cross_beam_spectrum(const signal::CsdMatrices &csd, const SteeringVector &wall,
                                      const SteeringVector &prop);

// `csd` must already be trace-normalized.
signal::DelaySeries beam_delay_series(const signal::CsdMatrices &csd, const EstimatorConfig &cfg);

// Channel-method state: per-channel power of the latest frame and the mean
// magnitude (|X1| + |X2|) / 2 averaged over a moving window.
class ChannelHistory {
public:
  ChannelHistory(std::size_t bins, std::size_t depth);

  void update(std::span<const signal::Spectrum> spectra);

  std::size_t bins() const noexcept { return power1_.size(); }
  std::size_t filled() const noexcept { return filled_; }
  bool empty() const noexcept { return filled_ == 0; }

  const std::vector<double> &power1() const noexcept { return power1_; }
  const std::vector<double> &power2() const noexcept { return power2_; }
  // Average over the filled part of the window.
  const std::vector<double> &mean_magnitude() const noexcept { return magnitude_; }

private:
  void recompute();

  std::vector<std::vector<double>> ring_;
  std::size_t next_ = 0;
  std::size_t filled_ = 0;
  std::vector<double> power1_, power2_, magnitude_;
};

signal::DelaySeries channel_delay_series(const ChannelHistory &history, const EstimatorConfig &cfg);

struct DistanceEstimate {
  double t = 0.0;
  double distance = 0.0;
  double delay = 0.0;
  double peak_envelope = 0.0;
  std::size_t bin = 0;
  std::vector<std::size_t> candidate_bins;
  bool stale = false;
};

// d = delay * c / 2
double delay_to_distance(double delay, double c) noexcept;

struct LagWindow {
  std::size_t first = 0; // inclusive
  std::size_t last = 0;  // inclusive
  bool empty() const noexcept { return last < first; }
};

// Positive-lag bins in [2 d_min / c, 2 d_max / c].
LagWindow admissible_window(const EstimatorConfig &cfg, std::size_t series_length);

// nullopt when the window is empty or carries no energy.
std::optional<DistanceEstimate> track_distance(const signal::DelaySeries &series,
                                               const std::optional<DistanceEstimate> &previous,
                                               const EstimatorConfig &cfg, double t = 0.0);

struct PeakStats {
  std::size_t argmax = 0;
  double peak = 0.0;
  double median = 0.0;
  double ratio() const noexcept { return median > 0.0 ? peak / median : 0.0; }
};

// Envelope peak and median over a lag window.
PeakStats peak_stats(const signal::DelaySeries &series, const LagWindow &window);

// Frames incoming audio, keeps the moving-average state of one method and the
// previous estimate. Single-threaded per instance.
class StreamingEstimator {
public:
  StreamingEstimator(Method method, EstimatorConfig cfg);

  Method method() const noexcept { return method_; }
  const EstimatorConfig &config() const noexcept { return cfg_; }

  // Appends audio (2 channels, any length); complete frames are processed.
  void push(const signal::SampleFrame &block);

  std::size_t frames_processed() const noexcept { return frames_; }
  std::int64_t samples_consumed() const noexcept { return consumed_; }

  // Delay series from the current moving-average state; nullopt before the
  // first complete frame.
  std::optional<signal::DelaySeries> delay_series() const;

  // Runs the tracker on the current state. Falls back to the previous
  // estimate flagged stale; nullopt only if there has never been one.
  std::optional<DistanceEstimate> estimate(double t);

  // Estimate from an already computed series (same fallback as estimate()).
  std::optional<DistanceEstimate> estimate(const signal::DelaySeries &series, double t);

private:
  void process_frame(std::span<const double> ch0, std::span<const double> ch1);

  Method method_;
  EstimatorConfig cfg_;
  std::vector<double> window_;
  signal::CsdEstimate csd_;
  ChannelHistory channel_;
  SteeringVector wall_;
  SteeringVector prop_;
  std::array<std::vector<double>, 2> pending_;
  std::size_t frames_ = 0;
  std::int64_t consumed_ = 0;
  std::optional<DistanceEstimate> previous_;
};

struct OfflineTick {
  std::size_t tick;
  std::optional<DistanceEstimate> estimate;
  std::optional<signal::DelaySeries> series;
};

// Runs a beam or channel estimator over a whole recording and emits one tick
// every 1 / output_rate seconds; tick k covers audio up to (k + 1) / output_rate.
std::vector<OfflineTick> estimate_offline(const signal::SampleFrame &audio, Method method,
                                          const EstimatorConfig &cfg, bool keep_series = false);

} // namespace propsense::est
