/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "xbarsim/device.hpp"
#include "xbarsim/io.hpp"
#include "xbarsim/matrix.hpp"
#include "xbarsim/pulsed.hpp"
#include "xbarsim/rng.hpp"

namespace xbarsim {

/// Per-mini-batch temporal processes: multiplicative decay toward the reset
/// value (0), Gaussian diffusion and random reset, each with a fixed
/// per-crosspoint spread. All parameters zero is the identity.
struct TemporalParams {
  double decay_rate = 0.0;
  double decay_dtod = 0.0;
  double diffusion_sigma = 0.0;
  double diffusion_dtod = 0.0;
  double reset_prob = 0.0;
  double reset_dtod = 0.0;

  bool any() const {
    return decay_rate > 0.0 || diffusion_sigma > 0.0 || reset_prob > 0.0;
  }
  void validate(const std::string &context) const;
};

struct TileSettings {
  DeviceParams device;
  IOParams forward_io;
  IOParams backward_io;
  UpdateParams update;
  TemporalParams temporal;
};

/// Common surface of plain and compound tiles, as seen by network layers.
class TileBase {
public:
  virtual ~TileBase() = default;

  virtual int d_out() const = 0;
  virtual int d_in() const = 0;

  virtual std::vector<double> forward(std::span<const double> x) = 0;
  virtual std::vector<double> backward(std::span<const double> d) = 0;
  virtual void update(std::span<const double> x, std::span<const double> d, double lr) = 0;

  /// Forward with extra transient per-use weight noise (inference read noise).
  virtual std::vector<double> forward_noisy(std::span<const double> x,
                                            double extra_weight_sigma) = 0;

  virtual Matrix get_weights() const = 0;
  virtual void set_weights(const Matrix &w) = 0;

  /// Called once per mini-batch by the trainer: temporal processes, and for
  /// compounds any per-mini-batch bookkeeping (e.g. transfer counting).
  virtual void end_minibatch() = 0;

  virtual std::unique_ptr<TileBase> clone() const = 0;
};

/// One crossbar array: a stored weight matrix with noisy quantized mat-vec in
/// both directions, stochastic pulsed rank-1 updates and temporal processes.
/// Single-owner mutable state; determinism is per tile given (config, seed).
class AnalogTile : public TileBase {
public:
  AnalogTile(int d_out, int d_in, const TileSettings &settings, uint64_t seed);

  int d_out() const override { return d_out_; }
  int d_in() const override { return d_in_; }

  std::vector<double> forward(std::span<const double> x) override;
  std::vector<double> backward(std::span<const double> d) override;
  void update(std::span<const double> x, std::span<const double> d, double lr) override;
  std::vector<double> forward_noisy(std::span<const double> x,
                                    double extra_weight_sigma) override;

  Matrix get_weights() const override { return weights_; }
  void set_weights(const Matrix &w) override;
  void end_minibatch() override;
  std::unique_ptr<TileBase> clone() const override { return std::make_unique<AnalogTile>(*this); }

  /// Forward with an IO override (same stored weights and noise stream);
  /// used for inference read noise and transfer reads.
  std::vector<double> forward_with_io(std::span<const double> x, const IOParams &io);

  /// Temporal step with explicit nominal parameters; the fixed per-crosspoint
  /// variation draws were sampled at construction.
  void apply_temporal_step(const TemporalParams &tp);

  /// Apply already-generated pulse trains to this tile's devices.
  /// flip_direction inverts every pulse (for negative unit-cell gains).
  void apply_pulse_trains(const PulseTrains &trains, std::span<const int> sign_x,
                          std::span<const int> sign_d, bool flip_direction);

  const TileSettings &settings() const { return settings_; }
  const DeviceMatrix &device() const { return device_; }
  const Matrix &stored_weights() const { return weights_; }

  double learning_rate() const { return learning_rate_; }
  void set_learning_rate(double lr);

private:
  void check_input(std::span<const double> v, int expected, const char *what) const;
  void clip_to_bounds();

  int d_out_ = 0;
  int d_in_ = 0;
  TileSettings settings_;
  DeviceMatrix device_;
  Matrix weights_;
  double learning_rate_ = 0.01;

  RngStream rng_forward_;
  RngStream rng_backward_;
  RngStream rng_update_;
  RngStream rng_temporal_;

  // fixed unit-Gaussian draws behind the temporal d2d spreads
  Matrix xi_decay_, xi_diffusion_, xi_reset_;
};

} // namespace xbarsim
