/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <string>
#include <vector>

#include "xbarsim/compound.hpp"
#include "xbarsim/inference.hpp"
#include "xbarsim/nn.hpp"
#include "xbarsim/tile.hpp"

namespace xbarsim {

enum class TileFamily { single, unit_cell, transfer, inference };

struct DatasetSpec {
  enum class Kind { blobs, regression, csv };
  Kind kind = Kind::blobs;
  int samples = 100;
  int features = 4;
  int classes = 2;
  int outputs = 1;
  double spread = 0.15;
  double noise = 0.0;
  std::string path;
  bool classification = true;
};

struct LayerSpec {
  enum class Kind { linear, conv2d };
  Kind kind = Kind::linear;
  int in = 4;
  int out = 2;
  BiasMode bias = BiasMode::digital;
  Activation activation = Activation::identity;
  // conv2d
  int in_channels = 1;
  int out_channels = 1;
  int kernel = 3;
  int stride = 1;
  int padding = 0;
  int in_h = 0;
  int in_w = 0;
};

/// The full experiment description: one tile configuration plus network,
/// training and dataset specs. Everything is defaulted; parsing overlays a
/// JSON document and rejects unknown keys.
struct ExperimentConfig {
  uint64_t seed = 1234;
  TileFamily family = TileFamily::single;

  IOParams forward_io;
  IOParams backward_io;
  UpdateParams update;
  TemporalParams temporal;

  DeviceParams device; // single / inference families; defaults to preset(ideal)

  std::vector<DeviceParams> cell_devices;
  std::vector<double> cell_gains;
  UnitCellPolicy cell_policy = UnitCellPolicy::all_together;

  DeviceParams fast_device;
  DeviceParams slow_device;
  int transfer_every = 1;
  bool units_in_mbatch = false;
  double transfer_lr = 0.1;
  int transfer_columns_per_event = 1;
  double transfer_gamma = 0.0;

  InferenceNoiseModel inference;

  std::vector<LayerSpec> layers;
  Loss loss = Loss::mse;
  HwAwareParams hw_aware;
  double lr = 0.1;
  double lr_decay = 1.0;
  int epochs = 30;
  int batch_size = 10;
  DatasetSpec dataset;

  ExperimentConfig();
};

/// Parse and validate a JSON experiment document. Unknown keys and domain
/// violations raise Error with the field path; syntax errors carry the line.
ExperimentConfig parse_config(const std::string &text);

/// Fully resolved JSON echo; parse_config(echo_config(c)) reproduces c.
std::string echo_config(const ExperimentConfig &config);

std::unique_ptr<TileBase> build_tile(const ExperimentConfig &config, int d_out, int d_in,
                                     uint64_t seed);
Network build_network(const ExperimentConfig &config);
Dataset build_dataset(const ExperimentConfig &config, uint64_t salt = 0);
TrainConfig build_train_config(const ExperimentConfig &config);

} // namespace xbarsim
