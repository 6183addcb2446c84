/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "xbarsim/matrix.hpp"
#include "xbarsim/rng.hpp"

namespace xbarsim {

enum class DeviceKind { constant_step, linear_step, soft_bounds, exp_step };
enum class PulseDirection { up, down };

/// Nominal pulse-response parameters of one resistive device model.
/// *_dtod fields are relative device-to-device spreads sampled once per
/// crosspoint; dw_min_std is the relative cycle-to-cycle write noise applied
/// fresh on every pulse.
struct DeviceParams {
  DeviceKind kind = DeviceKind::constant_step;
  double dw_min = 0.001; // mean step size at w = 0
  double dw_min_dtod = 0.0;
  double dw_min_std = 0.0;
  double up_down = 0.0; // mean up/down step-size asymmetry
  double up_down_dtod = 0.0;
  double w_max = 1.0;
  double w_min = -1.0;
  double w_max_dtod = 0.0;
  double w_min_dtod = 0.0;
  double slope = 1.0; // linear_step: up step shrinks as (1 - slope*w)
  double gamma = 2.0; // exp_step decay exponent across the weight range

  void validate(const std::string &context) const;
};

/// Per-crosspoint sampled parameters, fixed after realization.
struct DeviceRealization {
  double dw_min_up = 0.0;
  double dw_min_down = 0.0;
  double w_max = 0.0;
  double w_min = 0.0;
  double slope = 0.0;
  double gamma = 0.0;
};

/// Single up/down pulse through the device response law, with cycle-to-cycle
/// write noise and bound clipping. dw_min_std = 0 makes this a pure function
/// of (w, direction).
double apply_pulse(const DeviceRealization &cell, double w, PulseDirection dir, DeviceKind kind,
                   double dw_min_std, RngStream &rng);

/// The realized device array of one tile: nominal params plus the sampled
/// per-crosspoint values.
class DeviceMatrix {
public:
  DeviceMatrix() = default;
  DeviceMatrix(const DeviceParams &params, int rows, int cols, RngStream &rng);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const DeviceParams &params() const { return params_; }
  const DeviceRealization &at(int i, int j) const {
    return cells_[static_cast<size_t>(i) * cols_ + j];
  }

  double clip(int i, int j, double w) const;
  double apply_pulse(int i, int j, double w, PulseDirection dir, RngStream &rng) const;

private:
  DeviceParams params_;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<DeviceRealization> cells_;
};

/// Sample one crosspoint realization (the unit used by DeviceMatrix).
DeviceRealization realize_cell(const DeviceParams &params, RngStream &rng);

/// Hardware-flavored parameter presets: "ideal", "reram_sb", "reram_es".
/// Values are representative, overridable configuration.
DeviceParams device_preset(std::string_view name);

/// Weight traces of n_devices independent realizations driven from w = 0 by
/// n_up up pulses followed by n_down down pulses; one row per pulse, one
/// column per device.
Matrix pulse_response_trace(const DeviceParams &params, int n_devices, int n_up, int n_down,
                            RngStream &rng);

} // namespace xbarsim
