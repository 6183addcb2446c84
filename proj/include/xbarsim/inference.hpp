/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <span>
#include <string>
#include <vector>

#include "xbarsim/nn.hpp"
#include "xbarsim/tile.hpp"

namespace xbarsim {

/// PCM-style inference statistics: conductance-dependent programming noise
/// sigma_prog(|w|) = scale * (c0 + c1 |w| + c2 w^2), transient read noise,
/// and per-device power-law conductance drift w(t) = w(t0) (t/t0)^-nu.
/// Values are overridable configuration, not hardware ground truth.
struct InferenceNoiseModel {
  double prog_noise_scale = 1.0;
  double prog_c0 = 0.26;
  double prog_c1 = 1.66;
  double prog_c2 = 0.33;
  double read_noise_scale = 0.0;
  double nu_mean = 0.06;
  double nu_std = 0.03; // relative per-device spread of nu
  double t0 = 20.0;     // seconds; programming instant, shared by all devices
  double nu_min = 0.0;
  double nu_max = 1.0;
  int compensation_probes = 10;

  double prog_sigma(double w) const;
  void validate(const std::string &context) const;
};

/// Drift state recorded at programming time: the post-programming weights and
/// the per-device exponents, both fixed until the next program().
struct ProgrammedState {
  Matrix w0;
  Matrix nu;
  double t0 = 0.0;
  double t = 0.0;
};

/// Write W_target onto the tile with conductance-dependent Gaussian noise and
/// sample each device's drift exponent. Defines t = t0 for the whole tile.
ProgrammedState program(AnalogTile &tile, const Matrix &w_target,
                        const InferenceNoiseModel &model, RngStream &rng);

/// Evolve the stored weights to time t >= t0 with the per-device power law,
/// always computed from the programmed state (exact semigroup in t/t0).
void drift_to(AnalogTile &tile, ProgrammedState &state, double t);

/// Forward pass with the model's transient read noise on every weight use.
std::vector<double> forward_with_read_noise(AnalogTile &tile, std::span<const double> x,
                                            const InferenceNoiseModel &model);

/// Global drift compensation: an all-ones probe readout recorded at t0 and
/// re-measured later; digital outputs get multiplied by baseline / current.
struct DriftCompensation {
  double baseline_readout = 0.0;
};

DriftCompensation calibrate_compensation(AnalogTile &tile, const InferenceNoiseModel &model);
double drift_compensation_factor(AnalogTile &tile, const DriftCompensation &comp,
                                 const InferenceNoiseModel &model);

enum class Metric { accuracy, mse };

struct DriftEvalRow {
  double time_s = 0.0;
  int seed = 0;
  double metric = 0.0;
  double alpha = 1.0; // mean compensation factor over layers (1 when off)
};

struct DriftEvalSummary {
  double time_s = 0.0;
  double metric_mean = 0.0;
  double metric_std = 0.0;
};

/// For each seed, re-program every layer of a copy of the trained network,
/// then walk the evaluation times: drift, optionally compensate, and score
/// the metric under read noise. Layers must host plain analog tiles.
std::vector<DriftEvalRow> evaluate_over_time(const Network &net, const Dataset &eval_set,
                                             std::span<const double> times,
                                             const InferenceNoiseModel &model, Metric metric,
                                             int n_seeds, bool compensation, uint64_t seed);

std::vector<DriftEvalSummary> summarize_drift_eval(std::span<const DriftEvalRow> rows);

} // namespace xbarsim
