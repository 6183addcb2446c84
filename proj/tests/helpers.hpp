/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cmath>
#include <random>
#include <span>
#include <vector>

#include "xbarsim/tile.hpp"

namespace testutil {

// Independent mat-vec oracles (plain loops, separate from the library path).
inline std::vector<double> oracle_matvec(const xbarsim::Matrix &w, std::span<const double> x) {
  std::vector<double> y(w.rows(), 0.0);
  for (int i = 0; i < w.rows(); ++i) {
    for (int j = 0; j < w.cols(); ++j) {
      y[i] += w(i, j) * x[j];
    }
  }
  return y;
}

inline std::vector<double> oracle_matvec_t(const xbarsim::Matrix &w, std::span<const double> d) {
  std::vector<double> y(w.cols(), 0.0);
  for (int j = 0; j < w.cols(); ++j) {
    for (int i = 0; i < w.rows(); ++i) {
      y[j] += w(i, j) * d[i];
    }
  }
  return y;
}

inline double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) {
    s += x;
  }
  return s / static_cast<double>(v.size());
}

inline double sample_std(std::span<const double> v) {
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) {
    acc += (x - m) * (x - m);
  }
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

// IO that goes through the full analog path but with every non-ideality off.
inline xbarsim::IOParams io_off() {
  xbarsim::IOParams io;
  io.dac_bits = 0;
  io.adc_bits = 0;
  io.input_bound = 1e9;
  io.output_bound = 1e9;
  io.sigma_inp = 0.0;
  io.sigma_out = 0.0;
  io.sigma_w = 0.0;
  io.noise_management = xbarsim::NoiseManagement::none;
  io.is_perfect = false;
  return io;
}

inline xbarsim::DeviceParams quiet_device(double dw_min = 0.001, double bound = 1.0) {
  xbarsim::DeviceParams d;
  d.kind = xbarsim::DeviceKind::constant_step;
  d.dw_min = dw_min;
  d.w_max = bound;
  d.w_min = -bound;
  return d;
}

inline xbarsim::TileSettings quiet_settings(double dw_min = 0.001, double bound = 1.0) {
  xbarsim::TileSettings s;
  s.device = quiet_device(dw_min, bound);
  s.forward_io = io_off();
  s.backward_io = io_off();
  return s;
}

inline xbarsim::Matrix random_matrix(int rows, int cols, double scale, uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  xbarsim::Matrix w(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      w(i, j) = dist(gen);
    }
  }
  return w;
}

inline std::vector<double> random_vector(int n, double scale, uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  std::vector<double> v(n);
  for (double &x : v) {
    x = dist(gen);
  }
  return v;
}

// one-sided sign test: P(X >= wins) for X ~ Binomial(n, 1/2)
inline double sign_test_p_value(int wins, int n) {
  double p = 0.0;
  for (int k = wins; k <= n; ++k) {
    double log_c = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    p += std::exp(log_c - n * std::log(2.0));
  }
  return p;
}

} // namespace testutil
