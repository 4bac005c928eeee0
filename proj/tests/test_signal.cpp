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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "propsense/error.hpp"
#include "propsense/signal.hpp"

namespace {

using namespace propsense;
using namespace propsense::signal;

std::vector<double> noise(std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (double &x : v)
    x = g(rng);
  return v;
}

TEST(SampleFrame, RejectsRaggedChannels) {
  EXPECT_THROW(SampleFrame(48000.0, {{1.0, 2.0}, {1.0}}), ConfigError);
  EXPECT_THROW(SampleFrame(0.0, {{1.0}}), ConfigError);
  const auto z = SampleFrame::zeros(48000.0, 2, 4800);
  EXPECT_EQ(z.channels(), 2u);
  EXPECT_EQ(z.length(), 4800u);
}

TEST(Hann, EndpointsAndPeak) {
  const auto w = hann_coefficients(9);
  EXPECT_DOUBLE_EQ(w.front(), 0.0);
  EXPECT_NEAR(w.back(), 0.0, 1e-15);
  EXPECT_DOUBLE_EQ(w[4], 1.0);
  EXPECT_EQ(hann_coefficients(1), std::vector<double>{1.0});
}

TEST(Hann, ConstantFrameBecomesWindow) {
  const SampleFrame ones(8000.0, {std::vector<double>(64, 1.0), std::vector<double>(64, 1.0)});
  const auto w = hann_window(ones);
  const auto h = hann_coefficients(64);
  for (std::size_t n = 0; n < 64; ++n) {
    EXPECT_DOUBLE_EQ(w.channel(0)[n], h[n]);
    EXPECT_NEAR(h[n], 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * n / 63.0)), 1e-15);
  }
}

TEST(Dft, RequiresPowerOfTwo) {
  const std::vector<double> x(1000, 0.0);
  EXPECT_THROW(forward_dft(x, 48000.0), ConfigError);
  const std::vector<cplx> spec(501);
  EXPECT_THROW(inverse_dft(spec, 48000.0), ConfigError);
}

TEST(Dft, ImpulseIsFlatAndDcIsSingleBin) {
  std::vector<double> x(16, 0.0);
  x[0] = 1.0;
  for (const cplx &b : forward_dft(x, 16.0).bins)
    EXPECT_NEAR(std::abs(b - cplx(1.0, 0.0)), 0.0, 1e-15);
  std::fill(x.begin(), x.end(), 1.0);
  const auto s = forward_dft(x, 16.0);
  EXPECT_NEAR(s.bins[0].real(), 16.0, 1e-12);
  for (std::size_t k = 1; k < s.bins.size(); ++k)
    EXPECT_NEAR(std::abs(s.bins[k]), 0.0, 1e-12);
  EXPECT_DOUBLE_EQ(s.bin_width(), 1.0);
}

TEST(Dft, SinusoidLandsInItsBin) {
  constexpr std::size_t n = 1024;
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i)
    x[i] = std::cos(2.0 * std::numbers::pi * 37.0 * i / n);
  const auto s = forward_dft(x, 48000.0);
  EXPECT_NEAR(std::abs(s.bins[37]), n / 2.0, 1e-9);
  EXPECT_NEAR(s.frequency(37), 37.0 * 48000.0 / n, 1e-12);
}

class DftProperties : public ::testing::TestWithParam<std::size_t> {};

TEST_P(DftProperties, Parseval) {
  const std::size_t n = GetParam();
  const auto x = noise(n, static_cast<unsigned>(n));
  const auto s = forward_dft(x, 48000.0);
  double time = 0.0;
  for (double v : x)
    time += v * v;
  double freq = std::norm(s.bins.front()) + std::norm(s.bins.back());
  for (std::size_t k = 1; k + 1 < s.bins.size(); ++k)
    freq += 2.0 * std::norm(s.bins[k]);
  freq /= static_cast<double>(n);
  EXPECT_NEAR(freq / time, 1.0, 1e-6);
}

TEST_P(DftProperties, RoundTrip) {
  const std::size_t n = GetParam();
  const auto x = noise(n, static_cast<unsigned>(n) + 1u);
  const auto back = inverse_dft(forward_dft(x, 48000.0).bins, 48000.0, n);
  ASSERT_EQ(back.values.size(), n);
  for (std::size_t i = 0; i < n; ++i)
    EXPECT_NEAR(back.values[i], x[i], 1e-9);
}

INSTANTIATE_TEST_SUITE_P(Sizes, DftProperties, ::testing::Values(2, 8, 64, 256, 1024, 4096));

TEST(WienerKhinchin, AveragedAutoSpectrumMatchesDirectAutocorrelation) {
  for (std::size_t n : {16u, 64u, 256u}) {
    constexpr std::size_t depth = 4;
    CsdEstimate csd(n / 2 + 1, depth);
    std::vector<double> direct(n, 0.0);
    const auto window = hann_coefficients(n);
    for (std::size_t f = 0; f < depth; ++f) {
      auto a = noise(n, 100u + static_cast<unsigned>(f));
      auto b = noise(n, 200u + static_cast<unsigned>(f));
      for (std::size_t i = 0; i < n; ++i) {
        a[i] *= window[i];
        b[i] *= window[i];
      }
      const std::vector<Spectrum> spectra{forward_dft(a, 1000.0), forward_dft(b, 1000.0)};
      csd.update(spectra);
      for (std::size_t lag = 0; lag < n; ++lag) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i)
          acc += a[(i + lag) % n] * a[i];
        direct[lag] += acc / depth;
      }
    }
    std::vector<cplx> s11(csd.averaged().s11.begin(), csd.averaged().s11.end());
    const auto series = inverse_dft(s11, 1000.0, n);
    for (std::size_t lag = 0; lag < n; ++lag)
      EXPECT_NEAR(series.values[lag], direct[lag], 1e-5 * std::abs(direct[0])) << "n=" << n << " lag=" << lag;
  }
}

TEST(Envelope, DominatesSignal) {
  DelaySeries s;
  s.rate = 1000.0;
  s.values = noise(512, 9);
  const auto e = hilbert_envelope(s);
  ASSERT_TRUE(e.has_envelope());
  for (std::size_t i = 0; i < s.values.size(); ++i)
    EXPECT_GE(e.envelope[i] + 1e-12, std::abs(e.values[i]));
}

TEST(Envelope, RecoversGaussianBurst) {
  constexpr std::size_t n = 1024;
  DelaySeries s;
  s.rate = 48000.0;
  s.values.resize(n);
  const double center = 300.0, width = 25.0, carrier = 0.2;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = std::exp(-0.5 * std::pow((i - center) / width, 2.0));
    s.values[i] = g * std::cos(2.0 * std::numbers::pi * carrier * i);
  }
  const auto e = hilbert_envelope(s);
  for (std::size_t i = 250; i <= 350; ++i) {
    const double g = std::exp(-0.5 * std::pow((i - center) / width, 2.0));
    EXPECT_NEAR(e.envelope[i], g, 0.05 * g) << i;
  }
}

TEST(Csd, IdenticalChannelsAreFullyCoherent) {
  const auto x = noise(256, 3);
  const auto s = forward_dft(x, 48000.0);
  const auto m = cross_spectral_snapshot(s, s);
  for (std::size_t b = 0; b < m.bins(); ++b) {
    EXPECT_DOUBLE_EQ(m.s11[b], m.s22[b]);
    EXPECT_NEAR(m.s12[b].real(), m.s11[b], 1e-12 * (1.0 + m.s11[b]));
    EXPECT_NEAR(m.s12[b].imag(), 0.0, 1e-12 * (1.0 + m.s11[b]));
  }
}

TEST(Csd, HermitianAfterAveraging) {
  CsdEstimate csd(129, 8);
  for (unsigned f = 0; f < 11; ++f) {
    const std::vector<Spectrum> spectra{forward_dft(noise(256, f), 1.0), forward_dft(noise(256, 50 + f), 1.0)};
    csd = update_csd(std::move(csd), spectra);
  }
  const auto &a = csd.averaged();
  for (std::size_t b = 0; b < a.bins(); ++b) {
    EXPECT_EQ(a.at(b, 1, 0), std::conj(a.at(b, 0, 1)));
    EXPECT_EQ(a.at(b, 0, 0).imag(), 0.0);
    EXPECT_GE(a.at(b, 0, 0).real(), 0.0);
    EXPECT_GE(a.at(b, 1, 1).real(), 0.0);
  }
}

TEST(Csd, MovingAverageKeepsLastDepthSnapshots) {
  CsdEstimate csd(1, 3);
  for (double v : {100.0, 1.0, 2.0, 3.0}) {
    CsdMatrices m(1);
    m.s11[0] = v;
    m.s22[0] = 2.0 * v;
    m.s12[0] = cplx(v, -v);
    csd.push(m);
  }
  EXPECT_EQ(csd.filled(), 3u);
  EXPECT_DOUBLE_EQ(csd.averaged().s11[0], 2.0);
  EXPECT_DOUBLE_EQ(csd.averaged().s22[0], 4.0);
  EXPECT_EQ(csd.averaged().s12[0], cplx(2.0, -2.0));
}

TEST(Csd, PartialWindowAveragesFilledSnapshots) {
  CsdEstimate csd(1, 8);
  for (double v : {1.0, 3.0}) {
    CsdMatrices m(1);
    m.s11[0] = v;
    m.s22[0] = v;
    csd.push(m);
  }
  EXPECT_DOUBLE_EQ(csd.averaged().s11[0], 2.0);
}

TEST(Csd, RejectsWrongChannelCount) {
  CsdEstimate csd(5, 2);
  const auto s = forward_dft(noise(8, 1), 1.0);
  const std::vector<Spectrum> one{s};
  const std::vector<Spectrum> three{s, s, s};
  EXPECT_THROW(csd.update(one), ConfigError);
  EXPECT_THROW(update_csd(csd, three), ConfigError);
  EXPECT_THROW(CsdEstimate(5, 0), ConfigError);
}

TEST(Csd, TraceNormalizationGivesUnitTrace) {
  CsdEstimate csd(513, 8);
  for (unsigned f = 0; f < 8; ++f) {
    const std::vector<Spectrum> spectra{forward_dft(noise(1024, f), 1.0), forward_dft(noise(1024, 90 + f), 1.0)};
    csd.update(spectra);
  }
  const auto n = normalize_csd_trace(csd.averaged());
  for (std::size_t b = 0; b < n.bins(); ++b)
    EXPECT_NEAR(n.trace(b), 1.0, 1e-12);
}

TEST(Csd, TraceNormalizationZeroesBinsBelowFloor) {
  CsdMatrices m(3);
  m.s11 = {1.0, 1e-20, 0.0};
  m.s22 = {1.0, 1e-20, 0.0};
  m.s12 = {cplx(0.5, 0.5), cplx(1e-20, 0.0), cplx(0.0, 0.0)};
  const auto n = normalize_csd_trace(m);
  EXPECT_DOUBLE_EQ(n.trace(0), 1.0);
  EXPECT_EQ(n.s12[0], cplx(0.25, 0.25));
  EXPECT_EQ(n.trace(1), 0.0);
  EXPECT_EQ(n.trace(2), 0.0);
  EXPECT_EQ(n.s12[2], cplx(0.0, 0.0));
}

TEST(BandWeights, TukeyShape) {
  const auto w = tukey_band_weights(513, 48000.0 / 1024.0, 500.0, 8000.0, 0.25);
  const double bw = 48000.0 / 1024.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double f = k * bw;
    if (f < 500.0 || f > 8000.0)
      EXPECT_EQ(w[k], 0.0) << k;
    else
      EXPECT_GE(w[k], 0.0);
    EXPECT_LE(w[k], 1.0);
  }
  EXPECT_DOUBLE_EQ(w[static_cast<std::size_t>(4250.0 / bw)], 1.0);
  const auto rect = tukey_band_weights(513, bw, 500.0, 8000.0, 0.0);
  for (std::size_t k = 0; k < rect.size(); ++k) {
    const double f = k * bw;
    EXPECT_EQ(rect[k], (f >= 500.0 && f <= 8000.0) ? 1.0 : 0.0) << k;
  }
}

} // namespace
