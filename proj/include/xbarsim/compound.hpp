/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <optional>
#include <vector>

#include "xbarsim/tile.hpp"

namespace xbarsim {

enum class UnitCellPolicy { round_robin, all_together };

/// A crosspoint made of several devices whose gain-weighted sum forms the
/// effective weight, e.g. gains {+1, -1} for a uni-directional pair.
struct UnitCellSettings {
  std::vector<DeviceParams> devices;
  std::vector<double> gains;
  UnitCellPolicy policy = UnitCellPolicy::all_together;
  IOParams forward_io;
  IOParams backward_io;
  UpdateParams update;
  TemporalParams temporal;

  void validate(const std::string &context) const;
};

class UnitCellTile : public TileBase {
public:
  UnitCellTile(int d_out, int d_in, const UnitCellSettings &settings, uint64_t seed);

  int d_out() const override { return d_out_; }
  int d_in() const override { return d_in_; }

  std::vector<double> forward(std::span<const double> x) override;
  std::vector<double> backward(std::span<const double> d) override;
  void update(std::span<const double> x, std::span<const double> d, double lr) override;
  std::vector<double> forward_noisy(std::span<const double> x,
                                    double extra_weight_sigma) override;

  Matrix get_weights() const override;
  void set_weights(const Matrix &w) override;
  void end_minibatch() override;
  std::unique_ptr<TileBase> clone() const override {
    return std::make_unique<UnitCellTile>(*this);
  }

  int n_members() const { return static_cast<int>(members_.size()); }
  const AnalogTile &member(int k) const { return members_[k]; }

private:
  const Matrix &effective() const;

  int d_out_ = 0;
  int d_in_ = 0;
  std::vector<double> gains_;
  UnitCellPolicy policy_;
  UpdateParams update_;
  std::vector<AnalogTile> members_;
  int next_member_ = 0; // round-robin cursor, persists across mini-batches

  RngStream rng_forward_;
  RngStream rng_backward_;
  RngStream rng_update_;

  mutable Matrix effective_;
  mutable bool dirty_ = true;
};

/// Coupled fast/slow tile pair: gradient updates land on the fast tile A and
/// columns of A are periodically read out (through the analog forward path)
/// and transferred onto the slow tile C by a pulsed update.
struct TransferSettings {
  DeviceParams fast_device;
  DeviceParams slow_device;
  IOParams forward_io;
  IOParams backward_io;
  UpdateParams update;
  TemporalParams temporal;
  int transfer_every = 1;       // counted units between transfer events, 0 = never
  bool units_in_mbatch = false; // count mini-batches instead of updates
  double transfer_lr = 0.1;
  int columns_per_event = 1;
  double gamma = 0.0; // forward mixing weight of A
  std::optional<IOParams> transfer_io;

  void validate(const std::string &context) const;
};

class TransferTile : public TileBase {
public:
  TransferTile(int d_out, int d_in, const TransferSettings &settings, uint64_t seed);

  int d_out() const override { return d_out_; }
  int d_in() const override { return d_in_; }

  std::vector<double> forward(std::span<const double> x) override;
  std::vector<double> backward(std::span<const double> d) override;
  void update(std::span<const double> x, std::span<const double> d, double lr) override;
  std::vector<double> forward_noisy(std::span<const double> x,
                                    double extra_weight_sigma) override;

  Matrix get_weights() const override;
  void set_weights(const Matrix &w) override;
  void end_minibatch() override;
  std::unique_ptr<TileBase> clone() const override {
    return std::make_unique<TransferTile>(*this);
  }

  /// Read one column of A and push it onto C; advances the column cursor.
  void transfer_step();

  long transfer_events() const { return events_; }
  AnalogTile &fast_tile() { return fast_; }
  AnalogTile &slow_tile() { return slow_; }

private:
  void tick();

  int d_out_ = 0;
  int d_in_ = 0;
  TransferSettings settings_;
  AnalogTile fast_;
  AnalogTile slow_;
  long counter_ = 0;
  long events_ = 0;
  int next_column_ = 0;
};

} // namespace xbarsim
