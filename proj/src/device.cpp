/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "xbarsim/device.hpp"

#include <algorithm>
#include <cmath>

namespace xbarsim {

void DeviceParams::validate(const std::string &context) const {
  if (!(dw_min > 0.0)) {
    throw Error(context + ".dw_min: must be > 0");
  }
  if (!(w_min < 0.0 && 0.0 < w_max)) {
    throw Error(context + ": requires w_min < 0 < w_max");
  }
  if (dw_min_dtod < 0.0 || dw_min_std < 0.0 || up_down_dtod < 0.0 || w_max_dtod < 0.0 ||
      w_min_dtod < 0.0) {
    throw Error(context + ": dtod/std spreads must be >= 0");
  }
}

DeviceRealization realize_cell(const DeviceParams &p, RngStream &rng) {
  // one draw per varied quantity, whether or not its spread is zero, so the
  // stream layout does not depend on parameter values
  const double xi_dw = rng.gauss();
  const double xi_ud = rng.gauss();
  const double xi_max = rng.gauss();
  const double xi_min = rng.gauss();

  const double floor = 0.01 * p.dw_min;
  const double dw = std::max(p.dw_min * (1.0 + p.dw_min_dtod * xi_dw), floor);
  const double bias = p.up_down + p.up_down_dtod * xi_ud;

  DeviceRealization cell;
  cell.dw_min_up = std::max(dw * (1.0 + bias), floor);
  cell.dw_min_down = std::max(dw * (1.0 - bias), floor);
  cell.w_max = std::max(p.w_max * (1.0 + p.w_max_dtod * xi_max), 0.01 * p.w_max);
  cell.w_min = std::min(p.w_min * (1.0 + p.w_min_dtod * xi_min), 0.01 * p.w_min);
  cell.slope = p.slope;
  cell.gamma = p.gamma;
  return cell;
}

double apply_pulse(const DeviceRealization &cell, double w, PulseDirection dir, DeviceKind kind,
                   double dw_min_std, RngStream &rng) {
  double step = 0.0;
  switch (kind) {
  case DeviceKind::constant_step:
    step = (dir == PulseDirection::up) ? cell.dw_min_up : cell.dw_min_down;
    break;
  case DeviceKind::soft_bounds:
    // step vanishes linearly toward the approached bound
    step = (dir == PulseDirection::up) ? cell.dw_min_up * (1.0 - w / cell.w_max)
                                       : cell.dw_min_down * (1.0 - w / cell.w_min);
    break;
  case DeviceKind::linear_step:
    step = (dir == PulseDirection::up) ? cell.dw_min_up * (1.0 - cell.slope * w)
                                       : cell.dw_min_down * (1.0 + cell.slope * w);
    break;
  case DeviceKind::exp_step: {
    const double range = cell.w_max - cell.w_min;
    step = (dir == PulseDirection::up)
               ? cell.dw_min_up * std::exp(-cell.gamma * (w - cell.w_min) / range)
               : cell.dw_min_down * std::exp(-cell.gamma * (cell.w_max - w) / range);
    break;
  }
  }
  if (dw_min_std > 0.0) {
    step *= 1.0 + dw_min_std * rng.gauss();
  }
  w += (dir == PulseDirection::up) ? step : -step;
  return std::clamp(w, cell.w_min, cell.w_max);
}

DeviceMatrix::DeviceMatrix(const DeviceParams &params, int rows, int cols, RngStream &rng)
    : params_(params), rows_(rows), cols_(cols) {
  params_.validate("device");
  cells_.reserve(static_cast<size_t>(rows) * cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      cells_.push_back(realize_cell(params_, rng));
    }
  }
}

double DeviceMatrix::clip(int i, int j, double w) const {
  const DeviceRealization &c = at(i, j);
  return std::clamp(w, c.w_min, c.w_max);
}

double DeviceMatrix::apply_pulse(int i, int j, double w, PulseDirection dir,
                                 RngStream &rng) const {
  return xbarsim::apply_pulse(at(i, j), w, dir, params_.kind, params_.dw_min_std, rng);
}

DeviceParams device_preset(std::string_view name) {
  DeviceParams p;
  if (name == "ideal") {
    p.kind = DeviceKind::constant_step;
    p.dw_min = 1e-6;
    p.w_max = 1.0;
    p.w_min = -1.0;
    return p;
  }
  if (name == "reram_sb") {
    p.kind = DeviceKind::soft_bounds;
    p.dw_min = 0.002;
    p.dw_min_dtod = 0.3;
    p.dw_min_std = 0.3;
    p.w_max = 0.6;
    p.w_min = -0.6;
    p.up_down_dtod = 0.01;
    return p;
  }
  if (name == "reram_es") {
    p.kind = DeviceKind::exp_step;
    p.dw_min = 0.001;
    p.dw_min_dtod = 0.3;
    p.dw_min_std = 0.3;
    p.w_max = 0.6;
    p.w_min = -0.6;
    p.up_down = 0.1;
    p.up_down_dtod = 0.01;
    p.gamma = 2.0;
    return p;
  }
  throw Error("device preset: unknown name '" + std::string(name) + "'");
}

Matrix pulse_response_trace(const DeviceParams &params, int n_devices, int n_up, int n_down,
                            RngStream &rng) {
  if (n_up < 0 || n_down < 0) {
    throw Error("pulse_response_trace: pulse counts must be >= 0");
  }
  const int n_pulses = n_up + n_down;
  Matrix trace(n_pulses, n_devices);
  for (int dev = 0; dev < n_devices; ++dev) {
    DeviceRealization cell = realize_cell(params, rng);
    double w = 0.0;
    for (int t = 0; t < n_pulses; ++t) {
      PulseDirection dir = (t < n_up) ? PulseDirection::up : PulseDirection::down;
      w = apply_pulse(cell, w, dir, params.kind, params.dw_min_std, rng);
      trace(t, dev) = w;
    }
  }
  return trace;
}

} // namespace xbarsim
