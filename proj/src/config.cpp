/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "xbarsim/config.hpp"

#include <algorithm>
#include <initializer_list>

#include <json.hpp>

namespace xbarsim {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string &path, const std::string &msg) {
  throw Error(path + ": " + msg);
}

void check_keys(const json &j, const std::string &path,
                std::initializer_list<const char *> allowed) {
  if (!j.is_object()) {
    fail(path, "expected an object");
  }
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char *k) { return it.key() == k; }) == allowed.end()) {
      fail(path + "." + it.key(), "unknown key");
    }
  }
}

template <typename T> void read(const json &j, const std::string &path, const char *key, T &out) {
  if (!j.contains(key)) {
    return;
  }
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception &) {
    fail(path + "." + key, "wrong type");
  }
}

void read_enum(const json &j, const std::string &path, const char *key, const char *a,
               const char *b, int &out) {
  if (!j.contains(key)) {
    return;
  }
  const std::string v = j.at(key).get<std::string>();
  if (v == a) {
    out = 0;
  } else if (v == b) {
    out = 1;
  } else {
    fail(path + "." + key, "must be '" + std::string(a) + "' or '" + b + "'");
  }
}

/* string tables */

std::string to_string(DeviceKind k) {
  switch (k) {
  case DeviceKind::constant_step:
    return "constant_step";
  case DeviceKind::linear_step:
    return "linear_step";
  case DeviceKind::soft_bounds:
    return "soft_bounds";
  case DeviceKind::exp_step:
    return "exp_step";
  }
  return "constant_step";
}

DeviceKind device_kind_from(const std::string &s, const std::string &path) {
  if (s == "constant_step") {
    return DeviceKind::constant_step;
  }
  if (s == "linear_step") {
    return DeviceKind::linear_step;
  }
  if (s == "soft_bounds") {
    return DeviceKind::soft_bounds;
  }
  if (s == "exp_step") {
    return DeviceKind::exp_step;
  }
  fail(path, "unknown device kind '" + s + "'");
}

std::string to_string(Activation a) {
  switch (a) {
  case Activation::identity:
    return "identity";
  case Activation::tanh_act:
    return "tanh";
  case Activation::relu:
    return "relu";
  case Activation::sigmoid:
    return "sigmoid";
  }
  return "identity";
}

Activation activation_from(const std::string &s, const std::string &path) {
  if (s == "identity") {
    return Activation::identity;
  }
  if (s == "tanh") {
    return Activation::tanh_act;
  }
  if (s == "relu") {
    return Activation::relu;
  }
  if (s == "sigmoid") {
    return Activation::sigmoid;
  }
  fail(path, "unknown activation '" + s + "'");
}

std::string to_string(BiasMode b) {
  switch (b) {
  case BiasMode::none:
    return "none";
  case BiasMode::digital:
    return "digital";
  case BiasMode::analog:
    return "analog";
  }
  return "digital";
}

BiasMode bias_from(const std::string &s, const std::string &path) {
  if (s == "none") {
    return BiasMode::none;
  }
  if (s == "digital") {
    return BiasMode::digital;
  }
  if (s == "analog") {
    return BiasMode::analog;
  }
  fail(path, "unknown bias mode '" + s + "'");
}

std::string to_string(TileFamily f) {
  switch (f) {
  case TileFamily::single:
    return "single";
  case TileFamily::unit_cell:
    return "unit_cell";
  case TileFamily::transfer:
    return "transfer";
  case TileFamily::inference:
    return "inference";
  }
  return "single";
}

TileFamily family_from(const std::string &s, const std::string &path) {
  if (s == "single") {
    return TileFamily::single;
  }
  if (s == "unit_cell") {
    return TileFamily::unit_cell;
  }
  if (s == "transfer") {
    return TileFamily::transfer;
  }
  if (s == "inference") {
    return TileFamily::inference;
  }
  fail(path, "unknown tile family '" + s + "'");
}

/* section parsers */

void parse_io(const json &j, const std::string &path, IOParams &io) {
  check_keys(j, path,
             {"dac_bits", "adc_bits", "input_bound", "output_bound", "sigma_inp", "sigma_out",
              "sigma_w", "noise_management", "is_perfect"});
  read(j, path, "dac_bits", io.dac_bits);
  read(j, path, "adc_bits", io.adc_bits);
  read(j, path, "input_bound", io.input_bound);
  read(j, path, "output_bound", io.output_bound);
  read(j, path, "sigma_inp", io.sigma_inp);
  read(j, path, "sigma_out", io.sigma_out);
  read(j, path, "sigma_w", io.sigma_w);
  int nm = io.noise_management == NoiseManagement::none ? 0 : 1;
  read_enum(j, path, "noise_management", "none", "abs_max", nm);
  io.noise_management = nm == 0 ? NoiseManagement::none : NoiseManagement::abs_max;
  read(j, path, "is_perfect", io.is_perfect);
  io.validate(path);
}

void parse_device(const json &j, const std::string &path, DeviceParams &dev) {
  check_keys(j, path,
             {"preset", "kind", "dw_min", "dw_min_dtod", "dw_min_std", "up_down", "up_down_dtod",
              "w_max", "w_min", "w_max_dtod", "w_min_dtod", "slope", "gamma"});
  if (j.contains("preset")) {
    dev = device_preset(j.at("preset").get<std::string>());
  }
  if (j.contains("kind")) {
    dev.kind = device_kind_from(j.at("kind").get<std::string>(), path + ".kind");
  }
  read(j, path, "dw_min", dev.dw_min);
  read(j, path, "dw_min_dtod", dev.dw_min_dtod);
  read(j, path, "dw_min_std", dev.dw_min_std);
  read(j, path, "up_down", dev.up_down);
  read(j, path, "up_down_dtod", dev.up_down_dtod);
  read(j, path, "w_max", dev.w_max);
  read(j, path, "w_min", dev.w_min);
  read(j, path, "w_max_dtod", dev.w_max_dtod);
  read(j, path, "w_min_dtod", dev.w_min_dtod);
  read(j, path, "slope", dev.slope);
  read(j, path, "gamma", dev.gamma);
  dev.validate(path);
}

void parse_update(const json &j, const std::string &path, UpdateParams &up) {
  check_keys(j, path, {"bl", "bl_management", "pulse_type"});
  read(j, path, "bl", up.bl);
  read(j, path, "bl_management", up.bl_management);
  int pt = up.pulse_type == PulseType::stochastic ? 0 : 1;
  read_enum(j, path, "pulse_type", "stochastic", "deterministic_implicit", pt);
  up.pulse_type = pt == 0 ? PulseType::stochastic : PulseType::deterministic_implicit;
  up.validate(path);
}

void parse_temporal(const json &j, const std::string &path, TemporalParams &tp) {
  check_keys(j, path,
             {"decay_rate", "decay_dtod", "diffusion_sigma", "diffusion_dtod", "reset_prob",
              "reset_dtod"});
  read(j, path, "decay_rate", tp.decay_rate);
  read(j, path, "decay_dtod", tp.decay_dtod);
  read(j, path, "diffusion_sigma", tp.diffusion_sigma);
  read(j, path, "diffusion_dtod", tp.diffusion_dtod);
  read(j, path, "reset_prob", tp.reset_prob);
  read(j, path, "reset_dtod", tp.reset_dtod);
  tp.validate(path);
}

void parse_inference(const json &j, const std::string &path, InferenceNoiseModel &m) {
  check_keys(j, path,
             {"prog_noise_scale", "c0", "c1", "c2", "read_noise_scale", "nu_mean", "nu_std", "t0",
              "nu_min", "nu_max", "compensation_probes"});
  read(j, path, "prog_noise_scale", m.prog_noise_scale);
  read(j, path, "c0", m.prog_c0);
  read(j, path, "c1", m.prog_c1);
  read(j, path, "c2", m.prog_c2);
  read(j, path, "read_noise_scale", m.read_noise_scale);
  read(j, path, "nu_mean", m.nu_mean);
  read(j, path, "nu_std", m.nu_std);
  read(j, path, "t0", m.t0);
  read(j, path, "nu_min", m.nu_min);
  read(j, path, "nu_max", m.nu_max);
  read(j, path, "compensation_probes", m.compensation_probes);
  m.validate(path);
}

void parse_layer(const json &j, const std::string &path, LayerSpec &layer) {
  check_keys(j, path,
             {"type", "in", "out", "bias", "activation", "in_channels", "out_channels", "kernel",
              "stride", "padding", "in_h", "in_w"});
  if (j.contains("type")) {
    const std::string t = j.at("type").get<std::string>();
    if (t == "linear") {
      layer.kind = LayerSpec::Kind::linear;
    } else if (t == "conv2d") {
      layer.kind = LayerSpec::Kind::conv2d;
    } else {
      fail(path + ".type", "must be 'linear' or 'conv2d'");
    }
  }
  read(j, path, "in", layer.in);
  read(j, path, "out", layer.out);
  if (j.contains("bias")) {
    layer.bias = bias_from(j.at("bias").get<std::string>(), path + ".bias");
  }
  if (j.contains("activation")) {
    layer.activation = activation_from(j.at("activation").get<std::string>(), path + ".activation");
  }
  read(j, path, "in_channels", layer.in_channels);
  read(j, path, "out_channels", layer.out_channels);
  read(j, path, "kernel", layer.kernel);
  read(j, path, "stride", layer.stride);
  read(j, path, "padding", layer.padding);
  read(j, path, "in_h", layer.in_h);
  read(j, path, "in_w", layer.in_w);
}

void parse_dataset(const json &j, const std::string &path, DatasetSpec &ds) {
  check_keys(j, path,
             {"kind", "samples", "features", "classes", "outputs", "spread", "noise", "path",
              "classification"});
  if (j.contains("kind")) {
    const std::string k = j.at("kind").get<std::string>();
    if (k == "blobs") {
      ds.kind = DatasetSpec::Kind::blobs;
    } else if (k == "regression") {
      ds.kind = DatasetSpec::Kind::regression;
    } else if (k == "csv") {
      ds.kind = DatasetSpec::Kind::csv;
    } else {
      fail(path + ".kind", "must be 'blobs', 'regression' or 'csv'");
    }
  }
  read(j, path, "samples", ds.samples);
  read(j, path, "features", ds.features);
  read(j, path, "classes", ds.classes);
  read(j, path, "outputs", ds.outputs);
  read(j, path, "spread", ds.spread);
  read(j, path, "noise", ds.noise);
  read(j, path, "path", ds.path);
  read(j, path, "classification", ds.classification);
  if (ds.samples < 1 || ds.features < 1) {
    fail(path, "samples and features must be >= 1");
  }
  if (ds.kind == DatasetSpec::Kind::blobs && ds.classes < 2) {
    fail(path + ".classes", "must be >= 2");
  }
  if (ds.kind == DatasetSpec::Kind::csv && ds.path.empty()) {
    fail(path + ".path", "required for csv datasets");
  }
}

} // namespace

ExperimentConfig::ExperimentConfig()
    : device(device_preset("ideal")), fast_device(device_preset("ideal")),
      slow_device(device_preset("ideal")) {
  cell_devices = {device_preset("ideal")};
  cell_gains = {1.0};
  layers = {LayerSpec{}};
}

ExperimentConfig parse_config(const std::string &text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error &e) {
    // translate the byte offset into a line number
    size_t line = 1;
    for (size_t i = 0; i < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
      }
    }
    throw Error("config: syntax error at line " + std::to_string(line) + ": " + e.what());
  }

  ExperimentConfig c;
  check_keys(j, "config", {"seed", "tile", "network", "training"});
  read(j, "config", "seed", c.seed);

  if (j.contains("tile")) {
    const json &jt = j.at("tile");
    check_keys(jt, "tile",
               {"family", "forward_io", "backward_io", "update", "temporal", "device",
                "unit_cell", "transfer", "inference"});
    if (jt.contains("family")) {
      c.family = family_from(jt.at("family").get<std::string>(), "tile.family");
    }
    if (jt.contains("forward_io")) {
      parse_io(jt.at("forward_io"), "tile.forward_io", c.forward_io);
    }
    if (jt.contains("backward_io")) {
      parse_io(jt.at("backward_io"), "tile.backward_io", c.backward_io);
    }
    if (jt.contains("update")) {
      parse_update(jt.at("update"), "tile.update", c.update);
    }
    if (jt.contains("temporal")) {
      parse_temporal(jt.at("temporal"), "tile.temporal", c.temporal);
    }
    if (jt.contains("device")) {
      parse_device(jt.at("device"), "tile.device", c.device);
    }
    if (jt.contains("unit_cell")) {
      const json &ju = jt.at("unit_cell");
      check_keys(ju, "tile.unit_cell", {"devices", "gains", "policy"});
      if (ju.contains("devices")) {
        c.cell_devices.clear();
        int k = 0;
        for (const json &jd : ju.at("devices")) {
          DeviceParams dev = device_preset("ideal");
          parse_device(jd, "tile.unit_cell.devices[" + std::to_string(k) + "]", dev);
          c.cell_devices.push_back(dev);
          ++k;
        }
      }
      if (ju.contains("gains")) {
        c.cell_gains = ju.at("gains").get<std::vector<double>>();
      } else if (ju.contains("devices")) {
        c.cell_gains.assign(c.cell_devices.size(), 1.0);
      }
      int pol = c.cell_policy == UnitCellPolicy::round_robin ? 0 : 1;
      read_enum(ju, "tile.unit_cell", "policy", "round_robin", "all_together", pol);
      c.cell_policy = pol == 0 ? UnitCellPolicy::round_robin : UnitCellPolicy::all_together;
      if (c.cell_gains.size() != c.cell_devices.size()) {
        fail("tile.unit_cell.gains", "length must match devices");
      }
    }
    if (jt.contains("transfer")) {
      const json &jx = jt.at("transfer");
      check_keys(jx, "tile.transfer",
                 {"devices", "transfer_every", "units_in_mbatch", "transfer_lr",
                  "columns_per_event", "gamma"});
      if (jx.contains("devices")) {
        const json &jd = jx.at("devices");
        if (!jd.is_array() || jd.size() != 2) {
          fail("tile.transfer.devices", "expected [fast, slow]");
        }
        c.fast_device = device_preset("ideal");
        c.slow_device = device_preset("ideal");
        parse_device(jd[0], "tile.transfer.devices[0]", c.fast_device);
        parse_device(jd[1], "tile.transfer.devices[1]", c.slow_device);
      }
      read(jx, "tile.transfer", "transfer_every", c.transfer_every);
      read(jx, "tile.transfer", "units_in_mbatch", c.units_in_mbatch);
      read(jx, "tile.transfer", "transfer_lr", c.transfer_lr);
      read(jx, "tile.transfer", "columns_per_event", c.transfer_columns_per_event);
      read(jx, "tile.transfer", "gamma", c.transfer_gamma);
      if (c.transfer_every < 0) {
        fail("tile.transfer.transfer_every", "must be >= 0 (0 disables transfer)");
      }
    }
    if (jt.contains("inference")) {
      parse_inference(jt.at("inference"), "tile.inference", c.inference);
    }
  }

  if (j.contains("network")) {
    const json &jn = j.at("network");
    check_keys(jn, "network", {"layers", "loss"});
    if (jn.contains("layers")) {
      c.layers.clear();
      int i = 0;
      for (const json &jl : jn.at("layers")) {
        LayerSpec spec;
        parse_layer(jl, "network.layers[" + std::to_string(i) + "]", spec);
        c.layers.push_back(spec);
        ++i;
      }
      if (c.layers.empty()) {
        fail("network.layers", "need at least one layer");
      }
    }
    int lo = c.loss == Loss::mse ? 0 : 1;
    read_enum(jn, "network", "loss", "mse", "cross_entropy", lo);
    c.loss = lo == 0 ? Loss::mse : Loss::cross_entropy;
  }

  if (j.contains("training")) {
    const json &jr = j.at("training");
    check_keys(jr, "training",
               {"lr", "lr_decay", "epochs", "batch_size", "hw_aware", "dataset"});
    read(jr, "training", "lr", c.lr);
    read(jr, "training", "lr_decay", c.lr_decay);
    read(jr, "training", "epochs", c.epochs);
    read(jr, "training", "batch_size", c.batch_size);
    if (jr.contains("hw_aware")) {
      const json &jh = jr.at("hw_aware");
      check_keys(jh, "training.hw_aware",
                 {"perfect_backward", "perfect_update", "weight_noise_sigma"});
      read(jh, "training.hw_aware", "perfect_backward", c.hw_aware.perfect_backward);
      read(jh, "training.hw_aware", "perfect_update", c.hw_aware.perfect_update);
      read(jh, "training.hw_aware", "weight_noise_sigma", c.hw_aware.weight_noise_sigma);
      if (c.hw_aware.weight_noise_sigma < 0.0) {
        fail("training.hw_aware.weight_noise_sigma", "must be >= 0");
      }
    }
    if (jr.contains("dataset")) {
      parse_dataset(jr.at("dataset"), "training.dataset", c.dataset);
    }
    if (!(c.lr >= 0.0)) {
      fail("training.lr", "must be >= 0");
    }
    if (c.epochs < 0 || c.batch_size < 1) {
      fail("training", "epochs must be >= 0 and batch_size >= 1");
    }
  }

  // cross-field checks
  if (c.family == TileFamily::unit_cell && c.cell_devices.empty()) {
    fail("tile.unit_cell.devices", "need at least one device");
  }
  return c;
}

namespace {

json io_to_json(const IOParams &io) {
  json j;
  j["dac_bits"] = io.dac_bits;
  j["adc_bits"] = io.adc_bits;
  j["input_bound"] = io.input_bound;
  j["output_bound"] = io.output_bound;
  j["sigma_inp"] = io.sigma_inp;
  j["sigma_out"] = io.sigma_out;
  j["sigma_w"] = io.sigma_w;
  j["noise_management"] = io.noise_management == NoiseManagement::none ? "none" : "abs_max";
  j["is_perfect"] = io.is_perfect;
  return j;
}

json device_to_json(const DeviceParams &d) {
  json j;
  j["kind"] = to_string(d.kind);
  j["dw_min"] = d.dw_min;
  j["dw_min_dtod"] = d.dw_min_dtod;
  j["dw_min_std"] = d.dw_min_std;
  j["up_down"] = d.up_down;
  j["up_down_dtod"] = d.up_down_dtod;
  j["w_max"] = d.w_max;
  j["w_min"] = d.w_min;
  j["w_max_dtod"] = d.w_max_dtod;
  j["w_min_dtod"] = d.w_min_dtod;
  j["slope"] = d.slope;
  j["gamma"] = d.gamma;
  return j;
}

} // namespace

std::string echo_config(const ExperimentConfig &c) {
  json j;
  j["seed"] = c.seed;

  json jt;
  jt["family"] = to_string(c.family);
  jt["forward_io"] = io_to_json(c.forward_io);
  jt["backward_io"] = io_to_json(c.backward_io);
  jt["update"]["bl"] = c.update.bl;
  jt["update"]["bl_management"] = c.update.bl_management;
  jt["update"]["pulse_type"] =
      c.update.pulse_type == PulseType::stochastic ? "stochastic" : "deterministic_implicit";
  jt["temporal"]["decay_rate"] = c.temporal.decay_rate;
  jt["temporal"]["decay_dtod"] = c.temporal.decay_dtod;
  jt["temporal"]["diffusion_sigma"] = c.temporal.diffusion_sigma;
  jt["temporal"]["diffusion_dtod"] = c.temporal.diffusion_dtod;
  jt["temporal"]["reset_prob"] = c.temporal.reset_prob;
  jt["temporal"]["reset_dtod"] = c.temporal.reset_dtod;
  jt["device"] = device_to_json(c.device);

  json ju;
  ju["devices"] = json::array();
  for (const DeviceParams &d : c.cell_devices) {
    ju["devices"].push_back(device_to_json(d));
  }
  ju["gains"] = c.cell_gains;
  ju["policy"] = c.cell_policy == UnitCellPolicy::round_robin ? "round_robin" : "all_together";
  jt["unit_cell"] = ju;

  json jx;
  jx["devices"] = json::array({device_to_json(c.fast_device), device_to_json(c.slow_device)});
  jx["transfer_every"] = c.transfer_every;
  jx["units_in_mbatch"] = c.units_in_mbatch;
  jx["transfer_lr"] = c.transfer_lr;
  jx["columns_per_event"] = c.transfer_columns_per_event;
  jx["gamma"] = c.transfer_gamma;
  jt["transfer"] = jx;

  json ji;
  ji["prog_noise_scale"] = c.inference.prog_noise_scale;
  ji["c0"] = c.inference.prog_c0;
  ji["c1"] = c.inference.prog_c1;
  ji["c2"] = c.inference.prog_c2;
  ji["read_noise_scale"] = c.inference.read_noise_scale;
  ji["nu_mean"] = c.inference.nu_mean;
  ji["nu_std"] = c.inference.nu_std;
  ji["t0"] = c.inference.t0;
  ji["nu_min"] = c.inference.nu_min;
  ji["nu_max"] = c.inference.nu_max;
  ji["compensation_probes"] = c.inference.compensation_probes;
  jt["inference"] = ji;
  j["tile"] = jt;

  json jn;
  jn["layers"] = json::array();
  for (const LayerSpec &l : c.layers) {
    json jl;
    jl["type"] = l.kind == LayerSpec::Kind::linear ? "linear" : "conv2d";
    jl["bias"] = to_string(l.bias);
    jl["activation"] = to_string(l.activation);
    if (l.kind == LayerSpec::Kind::linear) {
      jl["in"] = l.in;
      jl["out"] = l.out;
    } else {
      jl["in_channels"] = l.in_channels;
      jl["out_channels"] = l.out_channels;
      jl["kernel"] = l.kernel;
      jl["stride"] = l.stride;
      jl["padding"] = l.padding;
      jl["in_h"] = l.in_h;
      jl["in_w"] = l.in_w;
    }
    jn["layers"].push_back(jl);
  }
  jn["loss"] = c.loss == Loss::mse ? "mse" : "cross_entropy";
  j["network"] = jn;

  json jr;
  jr["lr"] = c.lr;
  jr["lr_decay"] = c.lr_decay;
  jr["epochs"] = c.epochs;
  jr["batch_size"] = c.batch_size;
  jr["hw_aware"]["perfect_backward"] = c.hw_aware.perfect_backward;
  jr["hw_aware"]["perfect_update"] = c.hw_aware.perfect_update;
  jr["hw_aware"]["weight_noise_sigma"] = c.hw_aware.weight_noise_sigma;
  json jd;
  switch (c.dataset.kind) {
  case DatasetSpec::Kind::blobs:
    jd["kind"] = "blobs";
    break;
  case DatasetSpec::Kind::regression:
    jd["kind"] = "regression";
    break;
  case DatasetSpec::Kind::csv:
    jd["kind"] = "csv";
    break;
  }
  jd["samples"] = c.dataset.samples;
  jd["features"] = c.dataset.features;
  jd["classes"] = c.dataset.classes;
  jd["outputs"] = c.dataset.outputs;
  jd["spread"] = c.dataset.spread;
  jd["noise"] = c.dataset.noise;
  jd["path"] = c.dataset.path;
  jd["classification"] = c.dataset.classification;
  jr["dataset"] = jd;
  j["training"] = jr;

  return j.dump(2) + "\n";
}

std::unique_ptr<TileBase> build_tile(const ExperimentConfig &c, int d_out, int d_in,
                                     uint64_t seed) {
  switch (c.family) {
  case TileFamily::single:
  case TileFamily::inference: {
    TileSettings s;
    s.device = c.device;
    s.forward_io = c.forward_io;
    s.backward_io = c.backward_io;
    s.update = c.update;
    s.temporal = c.temporal;
    return std::make_unique<AnalogTile>(d_out, d_in, s, seed);
  }
  case TileFamily::unit_cell: {
    UnitCellSettings s;
    s.devices = c.cell_devices;
    s.gains = c.cell_gains;
    s.policy = c.cell_policy;
    s.forward_io = c.forward_io;
    s.backward_io = c.backward_io;
    s.update = c.update;
    s.temporal = c.temporal;
    return std::make_unique<UnitCellTile>(d_out, d_in, s, seed);
  }
  case TileFamily::transfer: {
    TransferSettings s;
    s.fast_device = c.fast_device;
    s.slow_device = c.slow_device;
    s.forward_io = c.forward_io;
    s.backward_io = c.backward_io;
    s.update = c.update;
    s.temporal = c.temporal;
    s.transfer_every = c.transfer_every;
    s.units_in_mbatch = c.units_in_mbatch;
    s.transfer_lr = c.transfer_lr;
    s.columns_per_event = c.transfer_columns_per_event;
    s.gamma = c.transfer_gamma;
    return std::make_unique<TransferTile>(d_out, d_in, s, seed);
  }
  }
  throw Error("build_tile: unknown family");
}

Network build_network(const ExperimentConfig &c) {
  Network net;
  RngStream seeds(c.seed);
  for (size_t l = 0; l < c.layers.size(); ++l) {
    const LayerSpec &spec = c.layers[l];
    const uint64_t tile_seed = seeds.derive("tile", l).base_seed();
    if (spec.kind == LayerSpec::Kind::linear) {
      const int tile_in = spec.bias == BiasMode::analog ? spec.in + 1 : spec.in;
      auto tile = build_tile(c, spec.out, tile_in, tile_seed);
      net.add(std::make_unique<AnalogDenseLayer>(std::move(tile), spec.in, spec.out, spec.bias,
                                                 spec.activation, c.hw_aware));
    } else {
      const int tile_in = spec.in_channels * spec.kernel * spec.kernel;
      auto tile = build_tile(c, spec.out_channels, tile_in, tile_seed);
      net.add(std::make_unique<AnalogConv2DLayer>(
          std::move(tile), spec.in_channels, spec.out_channels, spec.kernel, spec.stride,
          spec.padding, spec.in_h, spec.in_w, spec.bias, spec.activation, c.hw_aware));
    }
  }
  initialize_network(net, RngStream(c.seed).derive("net_init").base_seed());
  return net;
}

Dataset build_dataset(const ExperimentConfig &c, uint64_t salt) {
  // the same distribution (centers, regression matrix) for every salt;
  // salt > 0 draws a held-out split
  const uint64_t seed = RngStream(c.seed).derive("dataset").base_seed();
  switch (c.dataset.kind) {
  case DatasetSpec::Kind::blobs:
    return make_blobs(c.dataset.samples, c.dataset.features, c.dataset.classes, c.dataset.spread,
                      seed, salt);
  case DatasetSpec::Kind::regression:
    return make_regression(c.dataset.samples, c.dataset.features, c.dataset.outputs,
                           c.dataset.noise, seed, salt);
  case DatasetSpec::Kind::csv:
    return load_csv_dataset(c.dataset.path, c.dataset.classification);
  }
  throw Error("build_dataset: unknown kind");
}

TrainConfig build_train_config(const ExperimentConfig &c) {
  TrainConfig t;
  t.loss = c.loss;
  t.lr = c.lr;
  t.lr_decay = c.lr_decay;
  t.epochs = c.epochs;
  t.batch_size = c.batch_size;
  t.seed = RngStream(c.seed).derive("train").base_seed();
  return t;
}

} // namespace xbarsim
