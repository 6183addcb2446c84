/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xbarsim/device.hpp"
#include "xbarsim/matrix.hpp"
#include "xbarsim/rng.hpp"

namespace xbarsim {

enum class PulseType { stochastic, deterministic_implicit };

struct UpdateParams {
  int bl = 31;               // pulse-train bit length
  bool bl_management = false; // shrink the train when amplitudes are small
  PulseType pulse_type = PulseType::stochastic;

  void validate(const std::string &context) const;
};

/// Per-line pulse probabilities and signs for one rank-1 update. Scaled so
/// that, absent clipping, E[#coincidences_ij] * dw_min = lr * |d_i * x_j|.
struct PulsePlan {
  int bl = 0;
  std::vector<double> prob_x, prob_d; // in [0, 1]
  std::vector<int> sign_x, sign_d;    // -1, 0, +1
};

/// Bernoulli pulse trains, slot-major.
struct PulseTrains {
  int bl = 0;
  int x_lines = 0;
  int d_lines = 0;
  std::vector<uint8_t> x_bits, d_bits;

  bool x_bit(int slot, int line) const {
    return x_bits[static_cast<size_t>(slot) * x_lines + line] != 0;
  }
  bool d_bit(int slot, int line) const {
    return d_bits[static_cast<size_t>(slot) * d_lines + line] != 0;
  }
};

/// Split the rank-1 amplitude lr*d*x^T into per-line pulse probabilities with
/// the common amplitude A = sqrt(lr / (dw_min * BL)), rebalanced by
/// sqrt(max|d| / max|x|) so both sides saturate together.
PulsePlan translate(std::span<const double> x, std::span<const double> d, double lr,
                    double dw_min, const UpdateParams &up);

/// Independent Bernoulli bits per slot per line, P(bit) = plan probability.
PulseTrains generate_trains(const PulsePlan &plan, RngStream &rng);

/// Walk the trains slot by slot and fire one device pulse per coincidence,
/// strictly sequential in the slot index so nonlinearity and bounds act per
/// pulse, never on an accumulated sum.
void apply_coincidences(Matrix &weights, const DeviceMatrix &device, const PulseTrains &trains,
                        std::span<const int> sign_x, std::span<const int> sign_d, RngStream &rng);

/// translate + generate + apply as one unit. Callers invoke this once per
/// sample (or conv patch); there is no digital gradient accumulation path.
void pulsed_update(Matrix &weights, const DeviceMatrix &device, std::span<const double> x,
                   std::span<const double> d, double lr, const UpdateParams &up, RngStream &rng);

} // namespace xbarsim
