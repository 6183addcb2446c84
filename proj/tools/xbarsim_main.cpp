/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "xbarsim/config.hpp"
#include "xbarsim/csv.hpp"
#include "xbarsim/inference.hpp"

namespace fs = std::filesystem;
using namespace xbarsim;

namespace {

std::string read_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open config file '" + path + "'");
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig load_config(const std::string &path, bool seed_set, uint64_t seed) {
  ExperimentConfig cfg = parse_config(read_file(path));
  if (seed_set) {
    cfg.seed = seed;
  }
  return cfg;
}

void ensure_dir(const std::string &dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw Error("cannot create output directory '" + dir + "': " + ec.message());
  }
}

void write_resolved_config(const ExperimentConfig &cfg, const std::string &out_dir) {
  std::ofstream out(out_dir + "/resolved_config.json");
  if (!out) {
    throw Error("cannot write resolved config in '" + out_dir + "'");
  }
  out << echo_config(cfg);
}

int cmd_train(const std::string &config_path, const std::string &out_dir, bool seed_set,
              uint64_t seed) {
  ExperimentConfig cfg = load_config(config_path, seed_set, seed);
  ensure_dir(out_dir);

  Dataset data = build_dataset(cfg);
  Network net = build_network(cfg);
  if (net.in_size() != data.n_features) {
    throw Error("network input " + std::to_string(net.in_size()) + " does not match dataset (" +
                std::to_string(data.n_features) + " features)");
  }
  if (net.out_size() != data.n_outputs) {
    throw Error("network output " + std::to_string(net.out_size()) +
                " does not match dataset (" + std::to_string(data.n_outputs) + " outputs)");
  }

  std::vector<EpochStats> history = train(net, data, build_train_config(cfg));

  CsvWriter csv(out_dir + "/history.csv");
  csv.row({"epoch", "loss", "accuracy"});
  for (const EpochStats &e : history) {
    csv.row({std::to_string(e.epoch), fmt_double(e.loss), fmt_double(e.accuracy)});
  }
  write_resolved_config(cfg, out_dir);
  return 0;
}

int cmd_device_response(const std::string &config_path, const std::string &out_dir, int devices,
                        int pulses_up, int pulses_down, bool seed_set, uint64_t seed) {
  ExperimentConfig cfg = load_config(config_path, seed_set, seed);
  ensure_dir(out_dir);

  DeviceParams dev = cfg.device;
  if (cfg.family == TileFamily::unit_cell) {
    dev = cfg.cell_devices.front();
  } else if (cfg.family == TileFamily::transfer) {
    dev = cfg.fast_device;
  }

  RngStream rng = RngStream(cfg.seed).derive("device_response");
  Matrix trace = pulse_response_trace(dev, devices, pulses_up, pulses_down, rng);

  CsvWriter csv(out_dir + "/device_response.csv");
  std::vector<std::string> header = {"pulse"};
  for (int d = 0; d < devices; ++d) {
    header.push_back("dev" + std::to_string(d));
  }
  csv.row(header);
  for (int t = 0; t < trace.rows(); ++t) {
    std::vector<std::string> cells = {std::to_string(t + 1)};
    for (int d = 0; d < devices; ++d) {
      cells.push_back(fmt_double(trace(t, d)));
    }
    csv.row(cells);
  }
  write_resolved_config(cfg, out_dir);
  return 0;
}

int cmd_infer_eval(const std::string &config_path, const std::string &out_dir,
                   const std::string &times_str, const std::string &compensation, int n_seeds,
                   bool seed_set, uint64_t seed) {
  ExperimentConfig cfg = load_config(config_path, seed_set, seed);
  ensure_dir(out_dir);
  if (compensation != "on" && compensation != "off") {
    throw Error("--drift-compensation: expected 'on' or 'off'");
  }

  std::vector<double> times;
  std::stringstream ss(times_str);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    times.push_back(std::stod(cell));
  }
  if (times.empty()) {
    throw Error("--times: need at least one evaluation time");
  }

  Dataset train_set = build_dataset(cfg);
  Dataset eval_set = cfg.dataset.kind == DatasetSpec::Kind::csv ? train_set
                                                                : build_dataset(cfg, 1);
  Network net = build_network(cfg);
  train(net, train_set, build_train_config(cfg));

  const Metric metric = eval_set.classification ? Metric::accuracy : Metric::mse;
  std::vector<DriftEvalRow> rows =
      evaluate_over_time(net, eval_set, times, cfg.inference, metric, n_seeds,
                         compensation == "on", RngStream(cfg.seed).derive("infer_eval").base_seed());

  CsvWriter csv(out_dir + "/drift_eval.csv");
  csv.row({"time_s", "seed", "metric", "alpha"});
  for (const DriftEvalRow &r : rows) {
    csv.row({fmt_double(r.time_s), std::to_string(r.seed), fmt_double(r.metric),
             fmt_double(r.alpha)});
  }

  CsvWriter summary(out_dir + "/drift_eval_summary.csv");
  summary.row({"time_s", "metric_mean", "metric_std"});
  for (const DriftEvalSummary &s : summarize_drift_eval(rows)) {
    summary.row({fmt_double(s.time_s), fmt_double(s.metric_mean), fmt_double(s.metric_std)});
  }
  write_resolved_config(cfg, out_dir);
  return 0;
}

int cmd_matvec_bench(int size, int reps, const std::string &out_dir, uint64_t seed) {
  ensure_dir(out_dir);

  TileSettings settings;
  settings.device = device_preset("ideal");
  AnalogTile tile(size, size, settings, seed);

  RngStream rng = RngStream(seed).derive("bench");
  Matrix w(size, size);
  std::vector<double> x(size);
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      w(i, j) = rng.gauss() * 0.1;
    }
    x[i] = rng.gauss();
  }
  tile.set_weights(w);

  using clock = std::chrono::steady_clock;
  double checksum_analog = 0.0;
  auto t0 = clock::now();
  for (int r = 0; r < reps; ++r) {
    std::vector<double> y = tile.forward(x);
    for (double v : y) {
      checksum_analog += v;
    }
  }
  auto t1 = clock::now();
  double checksum_digital = 0.0;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> y = matvec(w, x);
    for (double v : y) {
      checksum_digital += v;
    }
  }
  auto t2 = clock::now();

  const double analog_s = std::chrono::duration<double>(t1 - t0).count();
  const double digital_s = std::chrono::duration<double>(t2 - t1).count();

  CsvWriter csv(out_dir + "/matvec_bench.csv");
  csv.comment("relative, informational only; timings vary between runs");
  csv.comment("analog_elapsed_s=" + fmt_double(analog_s));
  csv.comment("digital_elapsed_s=" + fmt_double(digital_s));
  csv.comment("analog_over_digital=" +
              fmt_double(digital_s > 0.0 ? analog_s / digital_s : 0.0));
  csv.row({"size", "reps", "checksum_analog", "checksum_digital"});
  csv.row({std::to_string(size), std::to_string(reps), fmt_double(checksum_analog),
           fmt_double(checksum_digital)});
  return 0;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"analog crossbar array training and inference simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  uint64_t seed = 0;
  bool seed_set = false;

  auto add_seed = [&](CLI::App *cmd) {
    cmd->add_option("--seed", seed, "override the config seed")->each([&](const std::string &) {
      seed_set = true;
    });
  };

  CLI::App *train_cmd = app.add_subcommand("train", "train a network and write the history CSV");
  train_cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
  train_cmd->add_option("--out", out_dir, "output directory")->required();
  add_seed(train_cmd);

  int devices = 50;
  int pulses_up = 100;
  int pulses_down = 100;
  CLI::App *dev_cmd =
      app.add_subcommand("device-response", "emit pulse-response traces as CSV");
  dev_cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
  dev_cmd->add_option("--out", out_dir, "output directory")->required();
  dev_cmd->add_option("--devices", devices, "number of device realizations");
  dev_cmd->add_option("--pulses-up", pulses_up, "up pulses from w = 0");
  dev_cmd->add_option("--pulses-down", pulses_down, "down pulses after the up phase");
  add_seed(dev_cmd);

  std::string times_str = "1,1e2,1e4,1e6";
  std::string compensation = "off";
  int n_seeds = 10;
  CLI::App *infer_cmd =
      app.add_subcommand("infer-eval", "train, then evaluate inference accuracy over time");
  infer_cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
  infer_cmd->add_option("--out", out_dir, "output directory")->required();
  infer_cmd->add_option("--times", times_str, "comma-separated evaluation times in seconds");
  infer_cmd->add_option("--drift-compensation", compensation, "on|off");
  infer_cmd->add_option("--seeds", n_seeds, "number of re-programming seeds");
  add_seed(infer_cmd);

  int size = 256;
  int reps = 100;
  uint64_t bench_seed = 1234;
  CLI::App *bench_cmd =
      app.add_subcommand("matvec-bench", "informational analog vs digital mat-vec timing");
  bench_cmd->add_option("--size", size, "tile dimension");
  bench_cmd->add_option("--reps", reps, "repetitions");
  bench_cmd->add_option("--out", out_dir, "output directory");
  bench_cmd->add_option("--seed", bench_seed, "seed for weights and inputs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) {
      return cmd_train(config_path, out_dir, seed_set, seed);
    }
    if (dev_cmd->parsed()) {
      return cmd_device_response(config_path, out_dir, devices, pulses_up, pulses_down, seed_set,
                                 seed);
    }
    if (infer_cmd->parsed()) {
      return cmd_infer_eval(config_path, out_dir, times_str, compensation, n_seeds, seed_set,
                            seed);
    }
    if (bench_cmd->parsed()) {
      return cmd_matvec_bench(size, reps, out_dir, bench_seed);
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
