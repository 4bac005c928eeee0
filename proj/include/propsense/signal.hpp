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

// Framing, windowing, transforms, analytic envelopes and moving-average
// cross-spectral density for two-channel audio.
//
// Transform convention: forward DFT unnormalized, X[k] = sum_n x[n] e^{-j2pi kn/N};
// inverse scaled by 1/N. Real transforms keep the N/2+1 non-negative bins.

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace propsense::signal {

using cplx = std::complex<double>;

bool is_power_of_two(std::size_t n) noexcept;

// A block of multichannel samples sharing one rate. Any length is allowed; the
// transforms additionally require a power of two.
class SampleFrame {
public:
  SampleFrame() = default;
  SampleFrame(double rate, std::vector<std::vector<double>> channels);

  static SampleFrame zeros(double rate, std::size_t channels, std::size_t length);

  double rate() const noexcept { return rate_; }
  std::size_t channels() const noexcept { return data_.size(); }
  std::size_t length() const noexcept { return data_.empty() ? 0 : data_.front().size(); }
  bool empty() const noexcept { return length() == 0; }

  std::span<const double> channel(std::size_t c) const { return data_.at(c); }
  std::span<double> channel(std::size_t c) { return data_.at(c); }

private:
  double rate_ = 0.0;
  std::vector<std::vector<double>> data_;
};

struct Spectrum {
  std::vector<cplx> bins; // frame_length / 2 + 1 values
  double rate = 0.0;
  std::size_t frame_length = 0;

  double bin_width() const noexcept { return rate / static_cast<double>(frame_length); }
  double frequency(std::size_t k) const noexcept { return static_cast<double>(k) * bin_width(); }
};

// Correlation as a function of lag k / rate, k = 0 .. N-1 (circular, so lags
// past N/2 are negative delays).
struct DelaySeries {
  double rate = 0.0;
  std::vector<double> values;
  std::vector<double> envelope; // empty until hilbert_envelope runs

  std::size_t size() const noexcept { return values.size(); }
  bool has_envelope() const noexcept { return envelope.size() == values.size() && !values.empty(); }
  double lag(std::size_t k) const noexcept { return static_cast<double>(k) / rate; }
  std::vector<double> lags() const;
};

// Per-bin Hermitian 2x2 matrices [[s11, s12], [conj(s12), s22]]. Storing the
// upper triangle keeps every matrix Hermitian by construction.
struct CsdMatrices {
  std::vector<double> s11;
  std::vector<double> s22;
  std::vector<cplx> s12;

  CsdMatrices() = default;
  explicit CsdMatrices(std::size_t bins) : s11(bins), s22(bins), s12(bins) {}

  std::size_t bins() const noexcept { return s11.size(); }
  cplx at(std::size_t bin, int row, int col) const;
  double trace(std::size_t bin) const noexcept { return s11[bin] + s22[bin]; }
};

// Simple moving average over the last `depth` instantaneous CSD snapshots.
// One instance must not be updated from two threads at once.
class CsdEstimate {
public:
  CsdEstimate(std::size_t bins, std::size_t depth);

  std::size_t bins() const noexcept { return averaged_.bins(); }
  std::size_t depth() const noexcept { return ring_.size(); }
  std::size_t filled() const noexcept { return filled_; }
  bool empty() const noexcept { return filled_ == 0; }

  void update(std::span<const Spectrum> spectra);
  void push(CsdMatrices snapshot);

  const CsdMatrices &averaged() const noexcept { return averaged_; }

private:
  void recompute();

  std::vector<CsdMatrices> ring_;
  std::size_t next_ = 0;
  std::size_t filled_ = 0;
  CsdMatrices averaged_;
};

// out[n] = x[n] * 0.5 (1 - cos(2 pi n / (N - 1))).
std::vector<double> hann_coefficients(std::size_t n);
SampleFrame hann_window(const SampleFrame &frame);

Spectrum forward_dft(std::span<const double> samples, double rate);
std::vector<Spectrum> forward_dft(const SampleFrame &frame);

// Real-valued time series from a one-sided spectrum of a length-N frame,
// N = 2 (bins - 1). Throws ConfigError unless N is a power of two, or, in the
// second form, when the spectrum disagrees with the expected frame length.
DelaySeries inverse_dft(std::span<const cplx> one_sided, double rate);
DelaySeries inverse_dft(std::span<const cplx> one_sided, double rate, std::size_t frame_length);

// Magnitude of the analytic signal of series.values (circular FFT method).
DelaySeries hilbert_envelope(DelaySeries series);

// Instantaneous snapshot X_i conj(X_j) of a channel pair.
CsdMatrices cross_spectral_snapshot(const Spectrum &x1, const Spectrum &x2);

CsdEstimate update_csd(CsdEstimate state, std::span<const Spectrum> spectra);

// Divides each matrix by its trace. Bins whose trace is below
// floor_ratio * (largest trace) become zero matrices.
CsdMatrices normalize_csd_trace(const CsdMatrices &csd, double floor_ratio = 1e-12);

// Tukey(alpha) weights over the bins with frequency in [f_lo, f_hi], zero elsewhere.
std::vector<double> tukey_band_weights(std::size_t bins, double bin_width, double f_lo,
                                       double f_hi, double alpha);

} // namespace propsense::signal
