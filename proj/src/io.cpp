/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "xbarsim/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace xbarsim {

void IOParams::validate(const std::string &context) const {
  if (dac_bits < 0) {
    throw Error(context + ".dac_bits: must be >= 0");
  }
  if (adc_bits < 0) {
    throw Error(context + ".adc_bits: must be >= 0");
  }
  if (!(input_bound > 0.0)) {
    throw Error(context + ".input_bound: must be > 0");
  }
  if (!(output_bound > 0.0)) {
    throw Error(context + ".output_bound: must be > 0");
  }
  if (sigma_inp < 0.0 || sigma_out < 0.0 || sigma_w < 0.0) {
    throw Error(context + ": noise sigmas must be >= 0");
  }
}

IOParams perfect_io() {
  IOParams io;
  io.is_perfect = true;
  io.dac_bits = 0;
  io.adc_bits = 0;
  io.sigma_out = 0.0;
  io.noise_management = NoiseManagement::none;
  return io;
}

double quantize_uniform(double v, double bound, int bits) {
  if (v == 0.0) {
    return 0.0; // exact zero encodes "no pulse" and passes every converter
  }
  v = std::clamp(v, -bound, bound);
  if (bits <= 0) {
    return v;
  }
  const double levels = std::exp2(bits);
  const double step = 2.0 * bound / levels;
  // grid points at -bound + step/2 + k*step, k = 0..levels-1
  double k = std::round((v + bound - 0.5 * step) / step);
  k = std::clamp(k, 0.0, levels - 1.0);
  return -bound + (k + 0.5) * step;
}

std::vector<double> apply_dac(std::span<const double> x, const IOParams &io) {
  std::vector<double> out(x.size());
  for (size_t j = 0; j < x.size(); ++j) {
    out[j] = quantize_uniform(x[j], io.input_bound, io.dac_bits);
  }
  return out;
}

std::vector<double> apply_adc(std::span<const double> y, const IOParams &io) {
  std::vector<double> out(y.size());
  for (size_t i = 0; i < y.size(); ++i) {
    out[i] = quantize_uniform(y[i], io.output_bound, io.adc_bits);
  }
  return out;
}

IOParams with_extra_weight_noise(const IOParams &io, double extra_sigma) {
  IOParams out = io;
  if (extra_sigma <= 0.0) {
    return out;
  }
  if (out.is_perfect) {
    out = IOParams{};
    out.dac_bits = 0;
    out.adc_bits = 0;
    out.input_bound = std::numeric_limits<double>::infinity();
    out.output_bound = std::numeric_limits<double>::infinity();
    out.sigma_out = 0.0;
    out.noise_management = NoiseManagement::none;
  }
  out.is_perfect = false;
  out.sigma_w = std::hypot(out.sigma_w, extra_sigma);
  return out;
}

std::vector<double> analog_matvec(const Matrix &weights, std::span<const double> in,
                                  const IOParams &io, RngStream &rng, bool transposed) {
  const int in_size = transposed ? weights.rows() : weights.cols();
  const int out_size = transposed ? weights.cols() : weights.rows();
  if (static_cast<int>(in.size()) != in_size) {
    throw Error("analog_matvec: input length " + std::to_string(in.size()) +
                " does not match tile dimension " + std::to_string(in_size));
  }

  if (io.is_perfect) {
    return transposed ? matvec_transposed(weights, in) : matvec(weights, in);
  }

  // zero input drives no lines at all: only output noise can appear
  if (max_abs(in) == 0.0) {
    std::vector<double> y(out_size, 0.0);
    if (io.sigma_out > 0.0) {
      for (int i = 0; i < out_size; ++i) {
        y[i] = quantize_uniform(io.sigma_out * rng.gauss(), io.output_bound, io.adc_bits);
      }
    }
    return y;
  }

  double alpha = 1.0;
  if (io.noise_management == NoiseManagement::abs_max) {
    alpha = max_abs(in);
  }

  // input conversion: scale, clip, discretize, input noise
  std::vector<double> x(in_size);
  for (int j = 0; j < in_size; ++j) {
    double v = quantize_uniform(in[j] / alpha, io.input_bound, io.dac_bits);
    if (io.sigma_inp > 0.0) {
      v += io.sigma_inp * rng.gauss();
    }
    x[j] = v;
  }

  // analog sum with transient weight noise, then output noise and the ADC
  std::vector<double> y(out_size);
  for (int i = 0; i < out_size; ++i) {
    double acc = 0.0;
    for (int j = 0; j < in_size; ++j) {
      double w = transposed ? weights(j, i) : weights(i, j);
      if (io.sigma_w > 0.0) {
        w += io.sigma_w * rng.gauss();
      }
      acc += w * x[j];
    }
    if (io.sigma_out > 0.0) {
      acc += io.sigma_out * rng.gauss();
    }
    y[i] = alpha * quantize_uniform(acc, io.output_bound, io.adc_bits);
  }
  return y;
}

} // namespace xbarsim
