/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <span>
#include <string>
#include <vector>

#include "xbarsim/matrix.hpp"
#include "xbarsim/rng.hpp"

namespace xbarsim {

enum class NoiseManagement { none, abs_max };

/// Peripheral model of one mat-vec direction: converter resolutions, bounds
/// and the Gaussian noise injected on inputs, weights and outputs.
struct IOParams {
  int dac_bits = 7;           // input levels = 2^dac_bits, 0 = no discretization
  int adc_bits = 9;           // output levels = 2^adc_bits, 0 = no discretization
  double input_bound = 1.0;   // clip of converted inputs, normalized units
  double output_bound = 12.0; // clip of analog outputs before the ADC
  double sigma_inp = 0.0;     // additive Gaussian on converted inputs
  double sigma_out = 0.06;    // additive Gaussian on analog outputs
  double sigma_w = 0.0;       // additive Gaussian per weight per use (transient)
  NoiseManagement noise_management = NoiseManagement::abs_max;
  bool is_perfect = false; // bypass every non-ideality

  void validate(const std::string &context) const;
};

/// All non-idealities off; forward is the exact float mat-vec.
IOParams perfect_io();

/// Clip to [-input_bound, input_bound], then quantize onto the uniform
/// mid-rise grid of 2^dac_bits levels. dac_bits = 0 clips only.
std::vector<double> apply_dac(std::span<const double> x, const IOParams &io);

/// Same quantizer on the output side (output_bound, adc_bits).
std::vector<double> apply_adc(std::span<const double> y, const IOParams &io);

/// Symmetric uniform mid-rise quantizer on [-bound, bound] with 2^bits levels.
double quantize_uniform(double v, double bound, int bits);

/// io with additional transient per-use weight noise folded in (variances
/// add). A perfect io degrades to a plain pass-through plus that noise.
IOParams with_extra_weight_noise(const IOParams &io, double extra_sigma);

/// Noisy analog mat-vec:
///   y_i = f_adc( sum_j (w_ij + sigma_w xi_ij) (f_dac(x_j) + sigma_inp xi_j)
///                + sigma_out xi_i )
/// with fresh unit Gaussians per element per call. Under abs_max noise
/// management the input is divided by alpha = max_j |x_j| before conversion
/// and the output multiplied by alpha afterwards (alpha = 1 for x = 0).
/// transposed = true computes the same contract on W^T.
std::vector<double> analog_matvec(const Matrix &weights, std::span<const double> in,
                                  const IOParams &io, RngStream &rng, bool transposed);

} // namespace xbarsim
