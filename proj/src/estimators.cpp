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

#include "propsense/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "propsense/error.hpp"
#include "propsense/kernels.hpp"

namespace propsense::est {

std::string_view to_string(Method m) noexcept {
  switch (m) {
  case Method::beam:
    return "beam";
  case Method::channel:
    return "channel";
  case Method::oracle:
    return "oracle";
  }
  return "unknown";
}

Method parse_method(std::string_view text) {
  if (text == "beam")
    return Method::beam;
  if (text == "channel")
    return Method::channel;
  if (text == "oracle")
    return Method::oracle;
  throw ConfigError("unknown method '" + std::string(text) + "' (expected beam, channel or oracle)");
}

void EstimatorConfig::validate() const {
  if (!(rate > 0.0))
    throw ConfigError("estimator: rate must be positive");
  if (!signal::is_power_of_two(frame_length) || frame_length < 8)
    throw ConfigError("estimator: frame_length must be a power of two >= 8");
  if (csd_depth == 0)
    throw ConfigError("estimator: csd_depth must be at least 1");
  if (!(band_lo >= 0.0 && band_lo < band_hi && band_hi <= rate / 2.0))
    throw ConfigError("estimator: band must satisfy 0 <= band_lo < band_hi <= rate/2");
  if (!(tukey_alpha >= 0.0 && tukey_alpha <= 1.0))
    throw ConfigError("estimator: tukey_alpha must be in [0, 1]");
  if (!(c > 0.0))
    throw ConfigError("estimator: sound speed must be positive");
  if (!(output_rate > 0.0 && output_rate <= rate / static_cast<double>(frame_length)))
    throw ConfigError("estimator: output_rate must be in (0, rate / frame_length]");
  if (!(d_min >= 0.0 && d_min < d_max))
    throw ConfigError("estimator: need 0 <= d_min < d_max");
  if (!(whiten_eps > 0.0))
    throw ConfigError("estimator: whiten_eps must be positive");
}

EstimatorConfig EstimatorConfig::for_scene(const sim::SimScene &scene) {
  EstimatorConfig cfg;
  cfg.rate = scene.rate;
  cfg.c = scene.c;
  cfg.array = scene.array;
  const auto center = scene.array.center();
  cfg.look_wall = LookDirection(0.0, scene.wall_y >= center.y ? 1.0 : -1.0);
  cfg.look_prop =
      geometry::look_direction_to(center, scene.sources.at(scene.reference_source).position);
  const double nyquist = scene.rate / 2.0;
  cfg.band_hi = std::min(cfg.band_hi, nyquist);
  cfg.band_lo = std::min(cfg.band_lo, 0.5 * cfg.band_hi);
  return cfg;
}

SteeringVector steering_vector(const LookDirection &look, const MicArray &array, double c,
                               std::size_t bins, double bin_width) {
  SteeringVector sv{look, std::vector<cplx>(bins), std::vector<cplx>(bins)};
  const auto center = array.center();
  const double advance0 = look.dot(array.mic(0).x - center.x, array.mic(0).y - center.y) / c;
  const double advance1 = look.dot(array.mic(1).x - center.x, array.mic(1).y - center.y) / c;
  const double amp = 1.0 / std::numbers::sqrt2;
  for (std::size_t k = 0; k < bins; ++k) {
    const double omega = 2.0 * std::numbers::pi * static_cast<double>(k) * bin_width;
    sv.w1[k] = std::polar(amp, omega * advance0);
    sv.w2[k] = std::polar(amp, omega * advance1);
  }
  return sv;
}

std::vector<cplx> cross_beam_spectrum(const signal::CsdMatrices &csd, const SteeringVector &wall,
                                      const SteeringVector &prop) {
  const std::size_t n = csd.bins();
  if (wall.w1.size() != n || prop.w1.size() != n)
    throw ConfigError("beam: steering vectors do not match the CSD bin count");
  std::vector<cplx> out(n);
  kernels::active().bilinear_form(csd.s11.data(), csd.s22.data(), csd.s12.data(), wall.w1.data(),
                                  wall.w2.data(), prop.w1.data(), prop.w2.data(), out.data(), n);
  return out;
}

namespace {

signal::DelaySeries finish_series(std::vector<cplx> spectrum, const std::vector<double> &band,
                                  bool whiten, double eps, const EstimatorConfig &cfg) {
  const auto &k = kernels::active();
  if (whiten) {
    k.whiten(spectrum.data(), band.data(), eps, spectrum.size());
  } else {
    for (std::size_t i = 0; i < spectrum.size(); ++i)
      spectrum[i] *= band[i];
  }
  return signal::hilbert_envelope(signal::inverse_dft(spectrum, cfg.rate, cfg.frame_length));
}

} // namespace

signal::DelaySeries beam_delay_series(const signal::CsdMatrices &csd, const EstimatorConfig &cfg) {
  if (csd.bins() != cfg.bins())
    throw ConfigError("beam: CSD has " + std::to_string(csd.bins()) + " bins, config expects " +
                      std::to_string(cfg.bins()));
  const SteeringVector wall =
      steering_vector(cfg.look_wall, cfg.array, cfg.c, cfg.bins(), cfg.bin_width());
  const SteeringVector prop =
      steering_vector(cfg.look_prop, cfg.array, cfg.c, cfg.bins(), cfg.bin_width());
  const std::vector<double> band =
      signal::tukey_band_weights(cfg.bins(), cfg.bin_width(), cfg.band_lo, cfg.band_hi, cfg.tukey_alpha);
  return finish_series(cross_beam_spectrum(csd, wall, prop), band, cfg.whiten, cfg.whiten_eps, cfg);
}

ChannelHistory::ChannelHistory(std::size_t bins, std::size_t depth)
    : power1_(bins), power2_(bins), magnitude_(bins) {
  if (depth == 0)
    throw ConfigError("channel history depth must be at least 1");
  ring_.assign(depth, std::vector<double>(bins));
}

void ChannelHistory::update(std::span<const signal::Spectrum> spectra) {
  if (spectra.size() != 2)
    throw ConfigError("channel method: exactly two channels required");
  const auto &x1 = spectra[0].bins;
  const auto &x2 = spectra[1].bins;
  if (x1.size() != bins() || x2.size() != bins())
    throw ConfigError("channel method: spectrum size does not match history");
  std::vector<double> &mag = ring_[next_];
  for (std::size_t k = 0; k < bins(); ++k) {
    power1_[k] = std::norm(x1[k]);
    power2_[k] = std::norm(x2[k]);
    mag[k] = 0.5 * (std::abs(x1[k]) + std::abs(x2[k]));
  }
  next_ = (next_ + 1) % ring_.size();
  filled_ = std::min(filled_ + 1, ring_.size());
  recompute();
}

void ChannelHistory::recompute() {
  std::fill(magnitude_.begin(), magnitude_.end(), 0.0);
  const auto &k = kernels::active();
  for (std::size_t i = 0; i < filled_; ++i)
    k.accumulate(ring_[i].data(), magnitude_.data(), bins());
  const double count = static_cast<double>(filled_);
  for (double &m : magnitude_)
    m /= count;
}

signal::DelaySeries channel_delay_series(const ChannelHistory &history, const EstimatorConfig &cfg) {
  if (history.bins() != cfg.bins())
    throw ConfigError("channel: history has " + std::to_string(history.bins()) +
                      " bins, config expects " + std::to_string(cfg.bins()));
  const auto &mag = history.mean_magnitude();
  double max_norm = 0.0;
  for (double m : mag)
    max_norm = std::max(max_norm, m * m);
  const double floor = std::max(1e-12 * max_norm, std::numeric_limits<double>::min());
  std::vector<cplx> diff(history.bins());
  for (std::size_t b = 0; b < history.bins(); ++b) {
    const double norm = std::max(mag[b] * mag[b], floor);
    diff[b] = (history.power1()[b] - history.power2()[b]) / norm;
  }
  const std::vector<double> band =
      signal::tukey_band_weights(cfg.bins(), cfg.bin_width(), cfg.band_lo, cfg.band_hi, cfg.tukey_alpha);
  for (std::size_t b = 0; b < diff.size(); ++b)
    diff[b] *= band[b];
  return signal::hilbert_envelope(signal::inverse_dft(diff, cfg.rate, cfg.frame_length));
}

double delay_to_distance(double delay, double c) noexcept { return delay * c / 2.0; }

LagWindow admissible_window(const EstimatorConfig &cfg, std::size_t series_length) {
  const double lo = std::ceil(2.0 * cfg.d_min / cfg.c * cfg.rate);
  const double hi = std::floor(2.0 * cfg.d_max / cfg.c * cfg.rate);
  const double positive_end = series_length / 2 == 0 ? 0.0 : static_cast<double>(series_length / 2 - 1);
  LagWindow w;
  w.first = static_cast<std::size_t>(std::max(lo, 0.0));
  const double last = std::min(hi, positive_end);
  if (last < static_cast<double>(w.first) || series_length < 2) {
    w.first = 1;
    w.last = 0;
    return w;
  }
  w.last = static_cast<std::size_t>(last);
  return w;
}

std::optional<DistanceEstimate> track_distance(const signal::DelaySeries &series,
                                               const std::optional<DistanceEstimate> &previous,
                                               const EstimatorConfig &cfg, double t) {
  if (!series.has_envelope())
    throw ConfigError("track_distance: series has no envelope");
  const LagWindow window = admissible_window(cfg, series.size());
  if (window.empty())
    return std::nullopt;
  std::vector<std::size_t> bins;
  for (std::size_t k = window.first; k <= window.last; ++k)
    bins.push_back(k);
  const auto &env = series.envelope;
  const std::size_t top = std::min<std::size_t>(3, bins.size());
  std::partial_sort(bins.begin(), bins.begin() + static_cast<std::ptrdiff_t>(top), bins.end(),
                    [&](std::size_t a, std::size_t b) {
                      return env[a] != env[b] ? env[a] > env[b] : a < b;
                    });
  bins.resize(top);
  if (!(env[bins.front()] > 0.0))
    return std::nullopt;

  std::size_t chosen = bins.front();
  if (previous) {
    const auto gap = [&](std::size_t b) {
      return b > previous->bin ? b - previous->bin : previous->bin - b;
    };
    for (std::size_t b : bins) {
      if (gap(b) < gap(chosen) || (gap(b) == gap(chosen) && env[b] > env[chosen]))
        chosen = b;
    }
  }
  DistanceEstimate e;
  e.t = t;
  e.bin = chosen;
  e.delay = series.lag(chosen);
  e.distance = delay_to_distance(e.delay, cfg.c);
  e.peak_envelope = env[chosen];
  e.candidate_bins = std::move(bins);
  return e;
}

PeakStats peak_stats(const signal::DelaySeries &series, const LagWindow &window) {
  if (!series.has_envelope() || window.empty() || window.last >= series.size())
    throw ConfigError("peak_stats: need an envelope and a non-empty window inside the series");
  PeakStats stats;
  std::vector<double> values(series.envelope.begin() + static_cast<std::ptrdiff_t>(window.first),
                             series.envelope.begin() + static_cast<std::ptrdiff_t>(window.last) + 1);
  const auto it = std::max_element(values.begin(), values.end());
  stats.argmax = window.first + static_cast<std::size_t>(it - values.begin());
  stats.peak = *it;
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  stats.median = values[mid];
  if (values.size() % 2 == 0) {
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    stats.median = 0.5 * (stats.median + lower);
  }
  return stats;
}

StreamingEstimator::StreamingEstimator(Method method, EstimatorConfig cfg)
    : method_(method), cfg_(std::move(cfg)), csd_((cfg_.validate(), cfg_.bins()), cfg_.csd_depth),
      channel_(cfg_.bins(), cfg_.csd_depth),
      wall_(steering_vector(cfg_.look_wall, cfg_.array, cfg_.c, cfg_.bins(), cfg_.bin_width())),
      prop_(steering_vector(cfg_.look_prop, cfg_.array, cfg_.c, cfg_.bins(), cfg_.bin_width())) {
  if (method_ == Method::oracle)
    throw ConfigError("the oracle method has no audio estimator");
  window_ = signal::hann_coefficients(cfg_.frame_length);
}

void StreamingEstimator::push(const signal::SampleFrame &block) {
  if (block.channels() != 2)
    throw ConfigError("estimator: expected 2 channels, got " + std::to_string(block.channels()));
  if (block.rate() != cfg_.rate)
    throw ConfigError("estimator: audio rate does not match configuration");
  for (std::size_t c = 0; c < 2; ++c)
    pending_[c].insert(pending_[c].end(), block.channel(c).begin(), block.channel(c).end());
  consumed_ += static_cast<std::int64_t>(block.length());
  const std::size_t n = cfg_.frame_length;
  std::size_t offset = 0;
  while (pending_[0].size() - offset >= n) {
    process_frame(std::span<const double>(pending_[0]).subspan(offset, n),
                  std::span<const double>(pending_[1]).subspan(offset, n));
    offset += n;
  }
  for (auto &p : pending_)
    p.erase(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(offset));
}

void StreamingEstimator::process_frame(std::span<const double> ch0, std::span<const double> ch1) {
  const auto &k = kernels::active();
  std::vector<double> w0(ch0.size()), w1(ch1.size());
  k.multiply(ch0.data(), window_.data(), w0.data(), w0.size());
  k.multiply(ch1.data(), window_.data(), w1.data(), w1.size());
  const std::array<signal::Spectrum, 2> spectra{signal::forward_dft(w0, cfg_.rate),
                                                signal::forward_dft(w1, cfg_.rate)};
  if (method_ == Method::beam)
    csd_.update(spectra);
  else
    channel_.update(spectra);
  ++frames_;
}

std::optional<signal::DelaySeries> StreamingEstimator::delay_series() const {
  if (frames_ == 0)
    return std::nullopt;
  if (method_ == Method::beam) {
    const signal::CsdMatrices normalized = signal::normalize_csd_trace(csd_.averaged());
    const std::vector<double> band = signal::tukey_band_weights(
        cfg_.bins(), cfg_.bin_width(), cfg_.band_lo, cfg_.band_hi, cfg_.tukey_alpha);
    return finish_series(cross_beam_spectrum(normalized, wall_, prop_), band, cfg_.whiten,
                         cfg_.whiten_eps, cfg_);
  }
  return channel_delay_series(channel_, cfg_);
}

std::optional<DistanceEstimate> StreamingEstimator::estimate(const signal::DelaySeries &series,
                                                             double t) {
  std::optional<DistanceEstimate> e = track_distance(series, previous_, cfg_, t);
  if (!e) {
    if (!previous_)
      return std::nullopt;
    e = *previous_;
    e->t = t;
    e->stale = true;
  }
  previous_ = e;
  return e;
}

std::optional<DistanceEstimate> StreamingEstimator::estimate(double t) {
  const std::optional<signal::DelaySeries> series = delay_series();
  if (!series) {
    if (!previous_)
      return std::nullopt;
    DistanceEstimate e = *previous_;
    e.t = t;
    e.stale = true;
    previous_ = e;
    return e;
  }
  return estimate(*series, t);
}

std::vector<OfflineTick> estimate_offline(const signal::SampleFrame &audio, Method method,
                                          const EstimatorConfig &cfg, bool keep_series) {
  if (audio.channels() != 2)
    throw ConfigError("estimate: expected 2-channel audio, got " + std::to_string(audio.channels()));
  StreamingEstimator est(method, cfg);
  const double duration = static_cast<double>(audio.length()) / audio.rate();
  const auto ticks = static_cast<std::size_t>(std::floor(duration * cfg.output_rate + 1e-9));
  std::vector<OfflineTick> out;
  out.reserve(ticks);
  std::size_t cursor = 0;
  for (std::size_t tick = 0; tick < ticks; ++tick) {
    const double t = static_cast<double>(tick + 1) / cfg.output_rate;
    const auto end = std::min(audio.length(), static_cast<std::size_t>(std::llround(t * audio.rate())));
    if (end > cursor) {
      std::vector<std::vector<double>> chunk(2);
      for (std::size_t c = 0; c < 2; ++c)
        chunk[c].assign(audio.channel(c).begin() + static_cast<std::ptrdiff_t>(cursor),
                        audio.channel(c).begin() + static_cast<std::ptrdiff_t>(end));
      est.push(signal::SampleFrame(audio.rate(), std::move(chunk)));
      cursor = end;
    }
    OfflineTick row{tick, std::nullopt, std::nullopt};
    std::optional<signal::DelaySeries> series = est.delay_series();
    if (series) {
      row.estimate = est.estimate(*series, t);
      if (keep_series)
        row.series = std::move(series);
    } else {
      row.estimate = est.estimate(t);
    }
    out.push_back(std::move(row));
  }
  return out;
}

} // namespace propsense::est
