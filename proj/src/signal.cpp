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

#include "propsense/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "propsense/error.hpp"
#include "propsense/kernels.hpp"

namespace propsense::signal {

bool is_power_of_two(std::size_t n) noexcept { return n != 0 && (n & (n - 1)) == 0; }

SampleFrame::SampleFrame(double rate, std::vector<std::vector<double>> channels)
    : rate_(rate), data_(std::move(channels)) {
  if (!(rate_ > 0.0))
    throw ConfigError("sample frame: rate must be positive");
  if (data_.empty())
    throw ConfigError("sample frame: at least one channel required");
  for (const auto &ch : data_)
    if (ch.size() != data_.front().size())
      throw ConfigError("sample frame: channels differ in length");
}

SampleFrame SampleFrame::zeros(double rate, std::size_t channels, std::size_t length) {
  return SampleFrame(rate, std::vector<std::vector<double>>(channels, std::vector<double>(length, 0.0)));
}

std::vector<double> DelaySeries::lags() const {
  std::vector<double> out(values.size());
  for (std::size_t k = 0; k < out.size(); ++k)
    out[k] = lag(k);
  return out;
}

cplx CsdMatrices::at(std::size_t bin, int row, int col) const {
  if (row == 0 && col == 0)
    return s11.at(bin);
  if (row == 1 && col == 1)
    return s22.at(bin);
  if (row == 0 && col == 1)
    return s12.at(bin);
  if (row == 1 && col == 0)
    return std::conj(s12.at(bin));
  throw RangeError("csd matrix index out of range");
}

CsdEstimate::CsdEstimate(std::size_t bins, std::size_t depth) : averaged_(bins) {
  if (depth == 0)
    throw ConfigError("csd moving-average depth must be at least 1");
  if (bins == 0)
    throw ConfigError("csd needs at least one bin");
  ring_.assign(depth, CsdMatrices(bins));
}

void CsdEstimate::update(std::span<const Spectrum> spectra) {
  if (spectra.size() != 2)
    throw ConfigError("update_csd: exactly two channels required, got " +
                      std::to_string(spectra.size()));
  push(cross_spectral_snapshot(spectra[0], spectra[1]));
}

void CsdEstimate::push(CsdMatrices snapshot) {
  if (snapshot.bins() != bins())
    throw ConfigError("update_csd: snapshot has " + std::to_string(snapshot.bins()) +
                      " bins, estimate has " + std::to_string(bins()));
  ring_[next_] = std::move(snapshot);
  next_ = (next_ + 1) % ring_.size();
  filled_ = std::min(filled_ + 1, ring_.size());
  recompute();
}

namespace {

// Pairwise sum of ring entries [lo, hi) into out (which is overwritten).
void pairwise_sum(const std::vector<const CsdMatrices *> &items, std::size_t lo,
                  std::size_t hi, CsdMatrices &out) {
  if (hi - lo == 1) {
    out = *items[lo];
    return;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  CsdMatrices right;
  pairwise_sum(items, lo, mid, out);
  pairwise_sum(items, mid, hi, right);
  const auto &k = kernels::active();
  const std::size_t n = out.bins();
  k.accumulate(right.s11.data(), out.s11.data(), n);
  k.accumulate(right.s22.data(), out.s22.data(), n);
  k.accumulate(reinterpret_cast<const double *>(right.s12.data()),
               reinterpret_cast<double *>(out.s12.data()), 2 * n);
}

} // namespace

void CsdEstimate::recompute() {
  // Entries filled so far are 0 .. filled_-1 until the ring wraps, then all.
  std::vector<const CsdMatrices *> items;
  items.reserve(filled_);
  for (std::size_t i = 0; i < filled_; ++i)
    items.push_back(&ring_[i]);
  pairwise_sum(items, 0, items.size(), averaged_);
  const double count = static_cast<double>(filled_);
  for (std::size_t b = 0; b < averaged_.bins(); ++b) {
    averaged_.s11[b] /= count;
    averaged_.s22[b] /= count;
    averaged_.s12[b] = {averaged_.s12[b].real() / count, averaged_.s12[b].imag() / count};
  }
}

std::vector<double> hann_coefficients(std::size_t n) {
  if (n == 1)
    return {1.0};
  std::vector<double> w(n);
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / denom));
  return w;
}

SampleFrame hann_window(const SampleFrame &frame) {
  if (frame.empty())
    throw ConfigError("hann_window: empty frame");
  const std::vector<double> w = hann_coefficients(frame.length());
  SampleFrame out = SampleFrame::zeros(frame.rate(), frame.channels(), frame.length());
  const auto &k = kernels::active();
  for (std::size_t c = 0; c < frame.channels(); ++c)
    k.multiply(frame.channel(c).data(), w.data(), out.channel(c).data(), w.size());
  return out;
}

Spectrum forward_dft(std::span<const double> samples, double rate) {
  if (!is_power_of_two(samples.size()))
    throw ConfigError("forward_dft: length " + std::to_string(samples.size()) +
                      " is not a power of two");
  Spectrum s;
  s.rate = rate;
  s.frame_length = samples.size();
  s.bins.resize(samples.size() / 2 + 1);
  fft::forward_real(samples, s.bins);
  return s;
}

std::vector<Spectrum> forward_dft(const SampleFrame &frame) {
  std::vector<Spectrum> out;
  out.reserve(frame.channels());
  for (std::size_t c = 0; c < frame.channels(); ++c)
    out.push_back(forward_dft(frame.channel(c), frame.rate()));
  return out;
}

DelaySeries inverse_dft(std::span<const cplx> one_sided, double rate) {
  if (one_sided.size() < 2)
    throw ConfigError("inverse_dft: spectrum needs at least two bins");
  const std::size_t n = 2 * (one_sided.size() - 1);
  if (!is_power_of_two(n))
    throw ConfigError("inverse_dft: implied frame length " + std::to_string(n) +
                      " is not a power of two");
  DelaySeries out;
  out.rate = rate;
  out.values.resize(n);
  fft::inverse_real(one_sided, out.values);
  return out;
}

DelaySeries inverse_dft(std::span<const cplx> one_sided, double rate, std::size_t frame_length) {
  if (one_sided.size() != frame_length / 2 + 1)
    throw ConfigError("inverse_dft: " + std::to_string(one_sided.size()) +
                      " bins do not match frame length " + std::to_string(frame_length));
  return inverse_dft(one_sided, rate);
}

DelaySeries hilbert_envelope(DelaySeries series) {
  const std::size_t n = series.values.size();
  if (n == 0)
    throw ConfigError("hilbert_envelope: empty series");
  std::vector<cplx> half(n / 2 + 1);
  fft::forward_real(series.values, half);
  // Analytic spectrum: keep DC (and Nyquist for even n), double positive
  // frequencies, zero negative ones.
  std::vector<cplx> analytic(n, cplx{0.0, 0.0});
  analytic[0] = half[0];
  const std::size_t positive_end = (n % 2 == 0) ? n / 2 : (n + 1) / 2;
  for (std::size_t k = 1; k < positive_end; ++k)
    analytic[k] = 2.0 * half[k];
  if (n % 2 == 0 && n > 1)
    analytic[n / 2] = half[n / 2];
  std::vector<cplx> z(n);
  fft::inverse_complex(analytic, z);
  series.envelope.resize(n);
  kernels::active().magnitude(z.data(), series.envelope.data(), n);
  return series;
}

CsdMatrices cross_spectral_snapshot(const Spectrum &x1, const Spectrum &x2) {
  if (x1.bins.size() != x2.bins.size())
    throw ConfigError("cross spectra: channel spectra differ in size");
  CsdMatrices out(x1.bins.size());
  kernels::active().cross_spectra(x1.bins.data(), x2.bins.data(), out.s11.data(),
                                  out.s22.data(), out.s12.data(), out.bins());
  return out;
}

CsdEstimate update_csd(CsdEstimate state, std::span<const Spectrum> spectra) {
  state.update(spectra);
  return state;
}

CsdMatrices normalize_csd_trace(const CsdMatrices &csd, double floor_ratio) {
  CsdMatrices out(csd.bins());
  double max_trace = 0.0;
  for (std::size_t b = 0; b < csd.bins(); ++b)
    max_trace = std::max(max_trace, std::abs(csd.trace(b)));
  const double floor = floor_ratio * max_trace;
  for (std::size_t b = 0; b < csd.bins(); ++b) {
    const double tr = csd.trace(b);
    if (!(std::abs(tr) > floor))
      continue; // zero matrix
    out.s11[b] = csd.s11[b] / tr;
    out.s22[b] = csd.s22[b] / tr;
    out.s12[b] = {csd.s12[b].real() / tr, csd.s12[b].imag() / tr};
  }
  return out;
}

std::vector<double> tukey_band_weights(std::size_t bins, double bin_width, double f_lo,
                                       double f_hi, double alpha) {
  if (!(f_hi > f_lo) || alpha < 0.0 || alpha > 1.0)
    throw ConfigError("tukey band: need f_lo < f_hi and alpha in [0, 1]");
  std::vector<double> w(bins, 0.0);
  const double span = f_hi - f_lo;
  for (std::size_t k = 0; k < bins; ++k) {
    const double f = static_cast<double>(k) * bin_width;
    if (f < f_lo || f > f_hi)
      continue;
    const double u = (f - f_lo) / span;
    if (alpha > 0.0 && u < alpha / 2.0)
      w[k] = 0.5 * (1.0 + std::cos(std::numbers::pi * (2.0 * u / alpha - 1.0)));
    else if (alpha > 0.0 && u > 1.0 - alpha / 2.0)
      w[k] = 0.5 * (1.0 + std::cos(std::numbers::pi * (2.0 * u / alpha - 2.0 / alpha + 1.0)));
    else
      w[k] = 1.0;
  }
  return w;
}

} // namespace propsense::signal
