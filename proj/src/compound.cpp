/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "xbarsim/compound.hpp"

#include <cmath>

namespace xbarsim {

void UnitCellSettings::validate(const std::string &context) const {
  if (devices.empty()) {
    throw Error(context + ".devices: need at least one device");
  }
  if (gains.size() != devices.size()) {
    throw Error(context + ".gains: length must match devices");
  }
  for (double g : gains) {
    if (!std::isfinite(g)) {
      throw Error(context + ".gains: entries must be finite");
    }
  }
  for (size_t k = 0; k < devices.size(); ++k) {
    devices[k].validate(context + ".devices[" + std::to_string(k) + "]");
  }
}

namespace {

TileSettings member_settings(const DeviceParams &device, const IOParams &fwd, const IOParams &bwd,
                             const UpdateParams &update, const TemporalParams &temporal) {
  TileSettings s;
  s.device = device;
  s.forward_io = fwd;
  s.backward_io = bwd;
  s.update = update;
  s.temporal = temporal;
  return s;
}

// member 0 shares the compound's seed so a single-device cell reduces
// bit-identically to a plain tile
uint64_t member_seed(uint64_t seed, int k) {
  return k == 0 ? seed : RngStream(seed).derive("cell_member", k).base_seed();
}

} // namespace

UnitCellTile::UnitCellTile(int d_out, int d_in, const UnitCellSettings &settings, uint64_t seed)
    : d_out_(d_out), d_in_(d_in), gains_(settings.gains), policy_(settings.policy),
      update_(settings.update), rng_forward_(RngStream(seed).derive("forward")),
      rng_backward_(RngStream(seed).derive("backward")),
      rng_update_(RngStream(seed).derive("update")) {
  settings.validate("unit_cell");
  members_.reserve(settings.devices.size());
  for (size_t k = 0; k < settings.devices.size(); ++k) {
    members_.emplace_back(d_out, d_in,
                          member_settings(settings.devices[k], settings.forward_io,
                                          settings.backward_io, settings.update,
                                          settings.temporal),
                          member_seed(seed, static_cast<int>(k)));
  }
}

const Matrix &UnitCellTile::effective() const {
  if (dirty_) {
    effective_ = Matrix(d_out_, d_in_, 0.0);
    for (size_t k = 0; k < members_.size(); ++k) {
      const Matrix &w = members_[k].stored_weights();
      for (int i = 0; i < d_out_; ++i) {
        for (int j = 0; j < d_in_; ++j) {
          effective_(i, j) += gains_[k] * w(i, j);
        }
      }
    }
    dirty_ = false;
  }
  return effective_;
}

std::vector<double> UnitCellTile::forward(std::span<const double> x) {
  if (static_cast<int>(x.size()) != d_in_) {
    throw Error("forward: length " + std::to_string(x.size()) + ", expected " +
                std::to_string(d_in_));
  }
  return analog_matvec(effective(), x, members_[0].settings().forward_io, rng_forward_, false);
}

std::vector<double> UnitCellTile::backward(std::span<const double> d) {
  if (static_cast<int>(d.size()) != d_out_) {
    throw Error("backward: length " + std::to_string(d.size()) + ", expected " +
                std::to_string(d_out_));
  }
  return analog_matvec(effective(), d, members_[0].settings().backward_io, rng_backward_, true);
}

std::vector<double> UnitCellTile::forward_noisy(std::span<const double> x,
                                                double extra_weight_sigma) {
  if (static_cast<int>(x.size()) != d_in_) {
    throw Error("forward: length " + std::to_string(x.size()) + ", expected " +
                std::to_string(d_in_));
  }
  const IOParams io =
      with_extra_weight_noise(members_[0].settings().forward_io, extra_weight_sigma);
  return analog_matvec(effective(), x, io, rng_forward_, false);
}

void UnitCellTile::update(std::span<const double> x, std::span<const double> d, double lr) {
  if (static_cast<int>(x.size()) != d_in_ || static_cast<int>(d.size()) != d_out_) {
    throw Error("update: x/d lengths do not match tile shape");
  }
  if (lr == 0.0 || max_abs(x) == 0.0 || max_abs(d) == 0.0) {
    return;
  }
  dirty_ = true;

  if (policy_ == UnitCellPolicy::round_robin) {
    const int k = next_member_;
    next_member_ = (next_member_ + 1) % static_cast<int>(members_.size());
    const double grain = std::fabs(gains_[k]) * members_[k].device().params().dw_min;
    if (grain == 0.0) {
      return; // zero-gain member: this event is a no-op
    }
    PulsePlan plan = translate(x, d, lr, grain, update_);
    PulseTrains trains = generate_trains(plan, rng_update_);
    members_[k].apply_pulse_trains(trains, plan.sign_x, plan.sign_d, gains_[k] < 0.0);
    return;
  }

  // all_together: every member fires on the same trains; the effective step
  // per coincidence is sum_k |g_k| dw_min_k
  double grain = 0.0;
  for (size_t k = 0; k < members_.size(); ++k) {
    grain += std::fabs(gains_[k]) * members_[k].device().params().dw_min;
  }
  if (grain == 0.0) {
    return;
  }
  PulsePlan plan = translate(x, d, lr, grain, update_);
  PulseTrains trains = generate_trains(plan, rng_update_);
  for (size_t k = 0; k < members_.size(); ++k) {
    if (gains_[k] != 0.0) {
      members_[k].apply_pulse_trains(trains, plan.sign_x, plan.sign_d, gains_[k] < 0.0);
    }
  }
}

Matrix UnitCellTile::get_weights() const { return effective(); }

void UnitCellTile::set_weights(const Matrix &w) {
  if (gains_[0] == 0.0) {
    throw Error("set_weights: unit cell with zero first gain cannot be programmed");
  }
  Matrix scaled(w.rows(), w.cols());
  for (int i = 0; i < w.rows(); ++i) {
    for (int j = 0; j < w.cols(); ++j) {
      scaled(i, j) = w(i, j) / gains_[0];
    }
  }
  members_[0].set_weights(scaled);
  Matrix zeros(d_out_, d_in_, 0.0);
  for (size_t k = 1; k < members_.size(); ++k) {
    members_[k].set_weights(zeros);
  }
  dirty_ = true;
}

void UnitCellTile::end_minibatch() {
  for (AnalogTile &m : members_) {
    m.end_minibatch();
  }
  dirty_ = true;
}

void TransferSettings::validate(const std::string &context) const {
  fast_device.validate(context + ".fast_device");
  slow_device.validate(context + ".slow_device");
  if (transfer_every < 0) {
    throw Error(context + ".transfer_every: must be >= 0 (0 disables transfer)");
  }
  if (!(transfer_lr > 0.0)) {
    throw Error(context + ".transfer_lr: must be > 0");
  }
  if (columns_per_event < 1) {
    throw Error(context + ".columns_per_event: must be >= 1");
  }
  if (gamma < 0.0) {
    throw Error(context + ".gamma: must be >= 0");
  }
}

TransferTile::TransferTile(int d_out, int d_in, const TransferSettings &settings, uint64_t seed)
    : d_out_(d_out), d_in_(d_in), settings_(settings),
      fast_(d_out, d_in,
            member_settings(settings.fast_device, settings.forward_io, settings.backward_io,
                            settings.update, settings.temporal),
            RngStream(seed).derive("fast").base_seed()),
      slow_(d_out, d_in,
            member_settings(settings.slow_device, settings.forward_io, settings.backward_io,
                            settings.update, settings.temporal),
            RngStream(seed).derive("slow").base_seed()) {
  settings_.validate("transfer");
}

std::vector<double> TransferTile::forward(std::span<const double> x) {
  std::vector<double> y = slow_.forward(x);
  if (settings_.gamma != 0.0) {
    std::vector<double> ya = fast_.forward(x);
    for (int i = 0; i < d_out_; ++i) {
      y[i] += settings_.gamma * ya[i];
    }
  }
  return y;
}

std::vector<double> TransferTile::backward(std::span<const double> d) {
  std::vector<double> g = slow_.backward(d);
  if (settings_.gamma != 0.0) {
    std::vector<double> ga = fast_.backward(d);
    for (int j = 0; j < d_in_; ++j) {
      g[j] += settings_.gamma * ga[j];
    }
  }
  return g;
}

std::vector<double> TransferTile::forward_noisy(std::span<const double> x,
                                                double extra_weight_sigma) {
  std::vector<double> y = slow_.forward_noisy(x, extra_weight_sigma);
  if (settings_.gamma != 0.0) {
    std::vector<double> ya = fast_.forward_noisy(x, extra_weight_sigma);
    for (int i = 0; i < d_out_; ++i) {
      y[i] += settings_.gamma * ya[i];
    }
  }
  return y;
}

void TransferTile::update(std::span<const double> x, std::span<const double> d, double lr) {
  fast_.update(x, d, lr);
  if (!settings_.units_in_mbatch) {
    tick();
  }
}

void TransferTile::tick() {
  ++counter_;
  if (settings_.transfer_every > 0 && counter_ % settings_.transfer_every == 0) {
    ++events_;
    for (int n = 0; n < settings_.columns_per_event; ++n) {
      transfer_step();
    }
  }
}

void TransferTile::transfer_step() {
  std::vector<double> onehot(d_in_, 0.0);
  onehot[next_column_] = 1.0;
  const IOParams &read_io =
      settings_.transfer_io ? *settings_.transfer_io : settings_.forward_io;
  std::vector<double> readout = fast_.forward_with_io(onehot, read_io);
  if (max_abs(readout) > 0.0) {
    slow_.update(onehot, readout, settings_.transfer_lr);
  }
  next_column_ = (next_column_ + 1) % d_in_;
}

Matrix TransferTile::get_weights() const {
  Matrix w = slow_.get_weights();
  if (settings_.gamma != 0.0) {
    const Matrix &a = fast_.stored_weights();
    for (int i = 0; i < d_out_; ++i) {
      for (int j = 0; j < d_in_; ++j) {
        w(i, j) += settings_.gamma * a(i, j);
      }
    }
  }
  return w;
}

void TransferTile::set_weights(const Matrix &w) {
  slow_.set_weights(w);
  fast_.set_weights(Matrix(d_out_, d_in_, 0.0));
}

void TransferTile::end_minibatch() {
  if (settings_.units_in_mbatch) {
    tick();
  }
  fast_.end_minibatch();
  slow_.end_minibatch();
}

} // namespace xbarsim
