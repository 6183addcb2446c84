/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "xbarsim/pulsed.hpp"

#include <algorithm>
#include <cmath>

namespace xbarsim {

void UpdateParams::validate(const std::string &context) const {
  if (bl < 1) {
    throw Error(context + ".bl: must be >= 1");
  }
}

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

} // namespace

PulsePlan translate(std::span<const double> x, std::span<const double> d, double lr,
                    double dw_min, const UpdateParams &up) {
  if (!(lr > 0.0)) {
    throw Error("translate: learning rate must be > 0");
  }
  if (!(dw_min > 0.0)) {
    throw Error("translate: dw_min must be > 0");
  }

  const double x_amax = max_abs(x);
  const double d_amax = max_abs(d);

  PulsePlan plan;
  plan.bl = up.bl;
  if (up.bl_management) {
    // shrink toward the number of dw_min quanta the largest update needs
    const double quanta = lr * x_amax * d_amax / dw_min;
    plan.bl = std::max(1, static_cast<int>(std::ceil(up.bl * std::min(1.0, quanta))));
  }

  const double amp = std::sqrt(lr / (dw_min * plan.bl));
  double x_scale = 1.0;
  double d_scale = 1.0;
  if (x_amax > 0.0 && d_amax > 0.0) {
    x_scale = std::sqrt(d_amax / x_amax);
    d_scale = 1.0 / x_scale;
  }

  plan.prob_x.resize(x.size());
  plan.sign_x.resize(x.size());
  for (size_t j = 0; j < x.size(); ++j) {
    plan.prob_x[j] = std::min(1.0, amp * std::fabs(x[j]) * x_scale);
    plan.sign_x[j] = sign_of(x[j]);
  }
  plan.prob_d.resize(d.size());
  plan.sign_d.resize(d.size());
  for (size_t i = 0; i < d.size(); ++i) {
    plan.prob_d[i] = std::min(1.0, amp * std::fabs(d[i]) * d_scale);
    plan.sign_d[i] = sign_of(d[i]);
  }
  return plan;
}

PulseTrains generate_trains(const PulsePlan &plan, RngStream &rng) {
  PulseTrains trains;
  trains.bl = plan.bl;
  trains.x_lines = static_cast<int>(plan.prob_x.size());
  trains.d_lines = static_cast<int>(plan.prob_d.size());
  trains.x_bits.resize(static_cast<size_t>(plan.bl) * trains.x_lines);
  trains.d_bits.resize(static_cast<size_t>(plan.bl) * trains.d_lines);
  for (int t = 0; t < plan.bl; ++t) {
    for (int j = 0; j < trains.x_lines; ++j) {
      trains.x_bits[static_cast<size_t>(t) * trains.x_lines + j] =
          rng.bernoulli(plan.prob_x[j]) ? 1 : 0;
    }
  }
  for (int t = 0; t < plan.bl; ++t) {
    for (int i = 0; i < trains.d_lines; ++i) {
      trains.d_bits[static_cast<size_t>(t) * trains.d_lines + i] =
          rng.bernoulli(plan.prob_d[i]) ? 1 : 0;
    }
  }
  return trains;
}

void apply_coincidences(Matrix &weights, const DeviceMatrix &device, const PulseTrains &trains,
                        std::span<const int> sign_x, std::span<const int> sign_d,
                        RngStream &rng) {
  if (trains.d_lines != weights.rows() || trains.x_lines != weights.cols()) {
    throw Error("apply_coincidences: trains do not conform to tile shape");
  }
  for (int t = 0; t < trains.bl; ++t) {
    for (int i = 0; i < trains.d_lines; ++i) {
      if (!trains.d_bit(t, i)) {
        continue;
      }
      for (int j = 0; j < trains.x_lines; ++j) {
        if (!trains.x_bit(t, j)) {
          continue;
        }
        const int s = sign_d[i] * sign_x[j];
        if (s == 0) {
          continue;
        }
        const PulseDirection dir = (s > 0) ? PulseDirection::up : PulseDirection::down;
        weights(i, j) = device.apply_pulse(i, j, weights(i, j), dir, rng);
      }
    }
  }
}

void pulsed_update(Matrix &weights, const DeviceMatrix &device, std::span<const double> x,
                   std::span<const double> d, double lr, const UpdateParams &up, RngStream &rng) {
  if (static_cast<int>(x.size()) != weights.cols() ||
      static_cast<int>(d.size()) != weights.rows()) {
    throw Error("pulsed_update: x/d lengths do not match tile shape");
  }
  if (lr == 0.0 || max_abs(x) == 0.0 || max_abs(d) == 0.0) {
    return;
  }

  PulsePlan plan = translate(x, d, lr, device.params().dw_min, up);

  if (up.pulse_type == PulseType::deterministic_implicit) {
    // debugging mode: apply the rounded expected coincidence count per pair
    for (int i = 0; i < weights.rows(); ++i) {
      for (int j = 0; j < weights.cols(); ++j) {
        const int s = plan.sign_d[i] * plan.sign_x[j];
        if (s == 0) {
          continue;
        }
        const long count = std::lround(plan.bl * plan.prob_d[i] * plan.prob_x[j]);
        const PulseDirection dir = (s > 0) ? PulseDirection::up : PulseDirection::down;
        for (long k = 0; k < count; ++k) {
          weights(i, j) = device.apply_pulse(i, j, weights(i, j), dir, rng);
        }
      }
    }
    return;
  }

  PulseTrains trains = generate_trains(plan, rng);
  apply_coincidences(weights, device, trains, plan.sign_x, plan.sign_d, rng);
}

} // namespace xbarsim
