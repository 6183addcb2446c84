/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

// End-to-end acceptance suite. Each criterion prints one PASS/FAIL line with
// the measured quantity next to its threshold; the binary exits nonzero if
// any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "xbarsim/compound.hpp"
#include "xbarsim/inference.hpp"
#include "xbarsim/nn.hpp"
#include "xbarsim/tile.hpp"

namespace fs = std::filesystem;
using namespace xbarsim;
using namespace testutil;
using clock_type = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int id, const std::string &name, bool pass, const std::string &detail) {
  std::printf("[%s] %d. %s (%s)\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) {
    ++g_failures;
  }
}

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

/* ------------------------------------------------------------------ */
/* criterion 1: perfect-mode training matches a digital SGD reference  */

struct DigitalRef {
  Matrix w1, w2;
  std::vector<double> b1, b2;

  void sgd_step(const std::vector<std::vector<double>> &xs,
                const std::vector<std::vector<double>> &ts, double lr) {
    const double inv_b = 1.0 / xs.size();
    Matrix g1(w1.rows(), w1.cols(), 0.0), g2(w2.rows(), w2.cols(), 0.0);
    std::vector<double> gb1(b1.size(), 0.0), gb2(b2.size(), 0.0);
    for (size_t s = 0; s < xs.size(); ++s) {
      std::vector<double> z1 = oracle_matvec(w1, xs[s]);
      std::vector<double> h(z1.size());
      for (size_t i = 0; i < z1.size(); ++i) {
        z1[i] += b1[i];
        h[i] = std::tanh(z1[i]);
      }
      std::vector<double> y = oracle_matvec(w2, h);
      std::vector<double> gy(y.size());
      for (size_t i = 0; i < y.size(); ++i) {
        y[i] += b2[i];
        gy[i] = 2.0 * (y[i] - ts[s][i]) / y.size();
      }
      for (int i = 0; i < w2.rows(); ++i) {
        gb2[i] += gy[i];
        for (int j = 0; j < w2.cols(); ++j) {
          g2(i, j) += gy[i] * h[j];
        }
      }
      std::vector<double> gh = oracle_matvec_t(w2, gy);
      for (size_t i = 0; i < gh.size(); ++i) {
        const double th = std::tanh(z1[i]);
        gh[i] *= 1.0 - th * th;
        gb1[i] += gh[i];
      }
      for (int i = 0; i < w1.rows(); ++i) {
        for (int j = 0; j < w1.cols(); ++j) {
          g1(i, j) += gh[i] * xs[s][j];
        }
      }
    }
    for (int i = 0; i < w1.rows(); ++i) {
      for (int j = 0; j < w1.cols(); ++j) {
        w1(i, j) -= lr * inv_b * g1(i, j);
      }
    }
    for (int i = 0; i < w2.rows(); ++i) {
      for (int j = 0; j < w2.cols(); ++j) {
        w2(i, j) -= lr * inv_b * g2(i, j);
      }
    }
    for (size_t i = 0; i < b1.size(); ++i) {
      b1[i] -= lr * inv_b * gb1[i];
    }
    for (size_t i = 0; i < b2.size(); ++i) {
      b2[i] -= lr * inv_b * gb2[i];
    }
  }
};

std::unique_ptr<AnalogTile> make_perfect_tile(int rows, int cols, uint64_t seed) {
  TileSettings s = quiet_settings(0.001, 4.0);
  s.forward_io = perfect_io();
  s.backward_io = perfect_io();
  return std::make_unique<AnalogTile>(rows, cols, s, seed);
}

void criterion_1() {
  const auto t0 = clock_type::now();

  HwAwareParams hw;
  hw.perfect_backward = true;
  hw.perfect_update = true;
  Network net;
  net.add(std::make_unique<AnalogDenseLayer>(make_perfect_tile(8, 4, 1001), 4, 8,
                                             BiasMode::digital, Activation::tanh_act, hw));
  net.add(std::make_unique<AnalogDenseLayer>(make_perfect_tile(2, 8, 1002), 8, 2,
                                             BiasMode::digital, Activation::identity, hw));
  initialize_network(net, 1003);

  DigitalRef ref;
  ref.w1 = net.layer(0).tile().get_weights();
  ref.w2 = net.layer(1).tile().get_weights();
  ref.b1.assign(8, 0.0);
  ref.b2.assign(2, 0.0);

  Dataset data = make_blobs(50, 4, 2, 0.1, 1004);
  const double lr = 0.1;
  const int batch = 10;
  const int steps = 100;

  RngStream dummy(0);
  int cursor = 0;
  for (int step = 0; step < steps; ++step) {
    std::vector<std::vector<double>> xs, ts;
    net.begin_minibatch(dummy);
    for (int k = 0; k < batch; ++k) {
      const size_t idx = (cursor + k) % data.size();
      auto y = net.forward(data.inputs[idx], true);
      auto lg = loss_mse(y, data.target_of(idx));
      net.backward(lg.grad);
      xs.push_back(data.inputs[idx]);
      ts.push_back(data.target_of(idx));
    }
    cursor = (cursor + batch) % static_cast<int>(data.size());
    net.remove_weight_noise();
    net.apply_updates(lr, batch);
    net.end_minibatch();
    ref.sgd_step(xs, ts, lr);
  }

  double max_rel = 0.0;
  const Matrix w1 = net.layer(0).tile().get_weights();
  const Matrix w2 = net.layer(1).tile().get_weights();
  for (int i = 0; i < w1.rows(); ++i) {
    for (int j = 0; j < w1.cols(); ++j) {
      max_rel = std::max(max_rel, std::fabs(w1(i, j) - ref.w1(i, j)) /
                                      std::max(1.0, std::fabs(ref.w1(i, j))));
    }
  }
  for (int i = 0; i < w2.rows(); ++i) {
    for (int j = 0; j < w2.cols(); ++j) {
      max_rel = std::max(max_rel, std::fabs(w2(i, j) - ref.w2(i, j)) /
                                      std::max(1.0, std::fabs(ref.w2(i, j))));
    }
  }
  const double elapsed = seconds_since(t0);
  report(1, "ideal-limit equivalence of perfect-mode training",
         max_rel <= 1e-5 && elapsed < 10.0,
         "max rel weight error " + fmt(max_rel) + " <= 1e-5 after 100 steps, " + fmt(elapsed) +
             " s < 10 s");
}

/* ------------------------------------------------------------------ */
/* criterion 2: pulsed-update unbiasedness on a 4x4 tile               */

void criterion_2() {
  const auto t0 = clock_type::now();
  TileSettings s = quiet_settings(0.001, 10.0);
  AnalogTile tile(4, 4, s, 2001);
  const std::vector<double> x = {1.0, -0.8, 0.6, 0.4};
  const std::vector<double> d = {0.9, -0.7, 0.5, 0.3};
  const double lr = 0.01;

  const int n = 100000;
  Matrix acc(4, 4, 0.0);
  Matrix zeros(4, 4, 0.0);
  for (int t = 0; t < n; ++t) {
    tile.set_weights(zeros);
    tile.update(x, d, lr);
    const Matrix &w = tile.stored_weights();
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        acc(i, j) += w(i, j);
      }
    }
  }
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      if (std::fabs(d[i] * x[j]) > 0.1) {
        const double expect = lr * d[i] * x[j];
        worst = std::max(worst, std::fabs(acc(i, j) / n - expect) / std::fabs(expect));
      }
    }
  }
  const double elapsed = seconds_since(t0);
  report(2, "pulsed-update unbiasedness E[dW] = lr d x^T", worst <= 0.02 && elapsed < 60.0,
         "worst rel error " + fmt(worst) + " <= 0.02 over 1e5 trials, " + fmt(elapsed) +
             " s < 60 s");
}

/* ------------------------------------------------------------------ */
/* criterion 3: soft-bounds closed form                                */

void criterion_3() {
  DeviceParams p;
  p.kind = DeviceKind::soft_bounds;
  p.dw_min = 0.01;
  p.w_max = 0.6;
  p.w_min = -0.6;
  RngStream rng(3001);
  DeviceRealization cell = realize_cell(p, rng);

  double w = 0.0;
  double worst = 0.0;
  for (int n = 1; n <= 1000; ++n) {
    w = apply_pulse(cell, w, PulseDirection::up, p.kind, 0.0, rng);
    const double closed = p.w_max - p.w_max * std::pow(1.0 - p.dw_min / p.w_max, n);
    worst = std::max(worst, std::fabs(w - closed));
  }
  report(3, "soft-bounds pulse iteration matches the closed form", worst <= 1e-6,
         "max abs deviation " + fmt(worst) + " <= 1e-6 for n <= 1000");
}

/* ------------------------------------------------------------------ */
/* criterion 4: analog vs digital gradient accumulation                */

void criterion_4() {
  const int n_seeds = 50;
  std::vector<double> signed_gaps;
  bool all_positive = true;

  for (int sd = 0; sd < n_seeds; ++sd) {
    TileSettings s;
    s.device.kind = DeviceKind::soft_bounds;
    s.device.dw_min = 0.01;
    s.device.w_max = 0.6;
    s.device.w_min = -0.6;
    s.forward_io = io_off();
    s.backward_io = io_off();
    AnalogTile tile(4, 4, s, 4001 + sd);
    Matrix w0(4, 4, 0.42); // sits in the saturating regime
    tile.set_weights(w0);

    RngStream data_rng = RngStream(4100).derive("batch", sd);
    std::vector<std::vector<double>> xs, ds;
    for (int k = 0; k < 8; ++k) {
      std::vector<double> xv(4), dv(4);
      for (int j = 0; j < 4; ++j) {
        xv[j] = 0.3 + 0.7 * data_rng.uniform(); // positive: drive toward w_max
        dv[j] = 0.3 + 0.7 * data_rng.uniform();
      }
      xs.push_back(xv);
      ds.push_back(dv);
    }

    const double lr = 0.1;
    for (int k = 0; k < 8; ++k) {
      tile.update(xs[k], ds[k], lr);
    }

    Matrix digital = w0; // digitally-accumulated oracle: one summed update
    for (int k = 0; k < 8; ++k) {
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          digital(i, j) += lr * ds[k][i] * xs[k][j];
        }
      }
    }
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        digital(i, j) = std::clamp(digital(i, j), -0.6, 0.6);
      }
    }

    const Matrix analog = tile.get_weights();
    all_positive = all_positive && frobenius_distance(analog, digital) > 0.0;
    double gap = 0.0; // saturation shortfall of the per-pulse analog path
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        gap += digital(i, j) - analog(i, j);
      }
    }
    signed_gaps.push_back(gap / 16.0);
  }

  const double m = mean(signed_gaps);
  const double se = sample_std(signed_gaps) / std::sqrt(static_cast<double>(n_seeds));
  const double t_stat = m / se;
  report(4, "analog per-sample accumulation separates from a digital batch update",
         all_positive && m > 0.0 && t_stat > 3.0,
         "mean signed gap " + fmt(m) + " > 0, t = " + fmt(t_stat) + " > 3 over 50 paired seeds");
}

/* ------------------------------------------------------------------ */
/* criterion 5: drift-law recovery and compensation factor             */

void criterion_5() {
  const auto t0 = clock_type::now();

  const int rows = 100, cols = 100;
  TileSettings s = quiet_settings(0.001, 100.0);
  s.forward_io = perfect_io();
  s.backward_io = perfect_io();
  AnalogTile tile(rows, cols, s, 5001);
  InferenceNoiseModel m;
  m.prog_noise_scale = 0.0;
  m.read_noise_scale = 0.0;
  m.nu_mean = 0.06;
  m.nu_std = 0.3;
  m.t0 = 1.0;
  Matrix target(rows, cols, 0.5);
  RngStream rng(5002);
  ProgrammedState state = program(tile, target, m, rng);

  const std::vector<double> times = {1.0, 10.0, 100.0, 1000.0};
  std::vector<Matrix> snapshots;
  for (double t : times) {
    drift_to(tile, state, t);
    snapshots.push_back(tile.get_weights());
  }
  double lt_mean = 0.0;
  for (double t : times) {
    lt_mean += std::log(t);
  }
  lt_mean /= static_cast<double>(times.size());
  double lt_var = 0.0;
  for (double t : times) {
    lt_var += (std::log(t) - lt_mean) * (std::log(t) - lt_mean);
  }
  double nu_sum = 0.0;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      double lw_mean = 0.0;
      for (size_t k = 0; k < times.size(); ++k) {
        lw_mean += std::log(snapshots[k](i, j));
      }
      lw_mean /= static_cast<double>(times.size());
      double cov = 0.0;
      for (size_t k = 0; k < times.size(); ++k) {
        cov += (std::log(times[k]) - lt_mean) * (std::log(snapshots[k](i, j)) - lw_mean);
      }
      nu_sum += -cov / lt_var;
    }
  }
  const double nu_fit = nu_sum / (rows * cols);
  const double nu_err = std::fabs(nu_fit - m.nu_mean) / m.nu_mean;

  // uniform-drift compensation factor against (t/t0)^nu
  AnalogTile small(4, 4, s, 5003);
  InferenceNoiseModel mu = m;
  mu.nu_std = 0.0;
  Matrix tgt = random_matrix(4, 4, 0.5, 5004);
  RngStream rng2(5005);
  ProgrammedState st = program(small, tgt, mu, rng2);
  DriftCompensation comp = calibrate_compensation(small, mu);
  drift_to(small, st, 1e4);
  const double alpha = drift_compensation_factor(small, comp, mu);
  const double alpha_err =
      std::fabs(alpha - std::pow(1e4, mu.nu_mean)) / std::pow(1e4, mu.nu_mean);

  const double elapsed = seconds_since(t0);
  report(5, "drift-law recovery and global compensation factor",
         nu_err <= 0.05 && alpha_err <= 0.01 && elapsed < 30.0,
         "fitted nu off by " + fmt(100.0 * nu_err) + "% <= 5%, alpha off by " +
             fmt(100.0 * alpha_err) + "% <= 1%, " + fmt(elapsed) + " s < 30 s");
}

/* ------------------------------------------------------------------ */
/* criterion 6: inference degradation and drift compensation           */

void criterion_6() {
  HwAwareParams hw;
  hw.perfect_backward = true;
  hw.perfect_update = true;
  Network net;
  {
    TileSettings s = quiet_settings(0.001, 2.0);
    s.forward_io = perfect_io();
    s.backward_io = perfect_io();
    net.add(std::make_unique<AnalogDenseLayer>(std::make_unique<AnalogTile>(12, 6, s, 6001), 6,
                                               12, BiasMode::digital, Activation::tanh_act, hw));
    net.add(std::make_unique<AnalogDenseLayer>(std::make_unique<AnalogTile>(3, 12, s, 6002), 12,
                                               3, BiasMode::digital, Activation::identity, hw));
  }
  initialize_network(net, 6003);

  Dataset train_set = make_blobs(300, 6, 3, 0.25, 6004);
  Dataset eval_set = make_blobs(300, 6, 3, 0.25, 6004, 1); // held-out samples, same centers
  TrainConfig cfg;
  cfg.loss = Loss::cross_entropy;
  cfg.lr = 0.1;
  cfg.epochs = 40;
  cfg.batch_size = 10;
  cfg.seed = 6006;
  train(net, train_set, cfg);
  const double clean_acc = evaluate_accuracy(net, eval_set);

  InferenceNoiseModel model;
  model.prog_noise_scale = 0.02;
  model.read_noise_scale = 0.02;
  model.nu_mean = 0.1;
  model.nu_std = 0.3;
  model.t0 = 1.0;

  const std::vector<double> times = {1.0, 1e6};
  const int n_seeds = 25;
  auto rows_off =
      evaluate_over_time(net, eval_set, times, model, Metric::accuracy, n_seeds, false, 6007);
  auto rows_on =
      evaluate_over_time(net, eval_set, times, model, Metric::accuracy, n_seeds, true, 6007);

  double acc_early = 0.0, acc_late_off = 0.0;
  std::vector<double> late_off(n_seeds, 0.0), late_on(n_seeds, 0.0);
  for (const DriftEvalRow &r : rows_off) {
    if (r.time_s == 1.0) {
      acc_early += r.metric / n_seeds;
    } else {
      acc_late_off += r.metric / n_seeds;
      late_off[r.seed] = r.metric;
    }
  }
  for (const DriftEvalRow &r : rows_on) {
    if (r.time_s != 1.0) {
      late_on[r.seed] = r.metric;
    }
  }

  int wins = 0, ties = 0;
  for (int sd = 0; sd < n_seeds; ++sd) {
    if (late_on[sd] > late_off[sd]) {
      ++wins;
    } else if (late_on[sd] == late_off[sd]) {
      ++ties;
    }
  }
  const double p = sign_test_p_value(wins, n_seeds - ties);

  report(6, "inference accuracy degrades with drift and compensation recovers it",
         acc_late_off <= acc_early && p < 0.05,
         "clean " + fmt(clean_acc) + ", t=1s " + fmt(acc_early) + " >= t=1e6s " +
             fmt(acc_late_off) + " (off); on>off wins " + std::to_string(wins) + "/" +
             std::to_string(n_seeds - ties) + ", sign-test p " + fmt(p) + " < 0.05");
}

/* ------------------------------------------------------------------ */
/* criteria 7 and 9 drive the command-line tool                        */

int run_cli(const std::string &args) {
  const std::string cmd = std::string("\"") + XBARSIM_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

std::vector<std::vector<std::string>> read_csv(const fs::path &path) {
  std::ifstream in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cells.push_back(cell);
    }
    rows.push_back(cells);
  }
  return rows;
}

std::string csv_body(const fs::path &path) {
  std::ifstream in(path);
  std::stringstream body;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] == '#') {
      continue; // informational comment lines are exempt from bytewise equality
    }
    body << line << "\n";
  }
  return body.str();
}

void write_file(const fs::path &path, const std::string &text) {
  std::ofstream out(path);
  out << text;
}

void criterion_7(const fs::path &dir) {
  const std::string config = R"({
    "seed": 7001,
    "tile": {"device": {"preset": "reram_sb"}}
  })";
  write_file(dir / "reram.json", config);

  const int n_dev = 50, n_up = 30, n_down = 30;
  const int rc = run_cli("device-response --config " + (dir / "reram.json").string() + " --out " +
                         (dir / "resp").string() +
                         " --devices 50 --pulses-up 30 --pulses-down 30");
  if (rc != 0) {
    report(7, "reram pulse-response traces saturate with the configured device spread", false,
           "CLI execution failed");
    return;
  }
  auto rows = read_csv(dir / "resp" / "device_response.csv");
  if (rows.size() != static_cast<size_t>(n_up + n_down + 1)) {
    report(7, "reram pulse-response traces saturate with the configured device spread", false,
           "unexpected CSV shape");
    return;
  }

  // mean trace across devices, one value per pulse
  std::vector<double> mean_trace(n_up + n_down, 0.0);
  std::vector<double> endpoints;
  for (int t = 0; t < n_up + n_down; ++t) {
    for (int dev = 0; dev < n_dev; ++dev) {
      mean_trace[t] += std::stod(rows[t + 1][dev + 1]) / n_dev;
    }
  }
  for (int dev = 0; dev < n_dev; ++dev) {
    endpoints.push_back(std::stod(rows[n_up][dev + 1]));
  }

  bool monotone = true;
  for (int t = 1; t < n_up; ++t) {
    monotone = monotone && mean_trace[t] >= mean_trace[t - 1];
  }
  for (int t = n_up + 1; t < n_up + n_down; ++t) {
    monotone = monotone && mean_trace[t] <= mean_trace[t - 1];
  }
  // saturating: the mean up-step shrinks as the devices charge up
  const double early_step = mean_trace[4] - mean_trace[0];
  const double late_step = mean_trace[n_up - 1] - mean_trace[n_up - 5];
  const bool saturating = late_step < early_step;

  const double cv = sample_std(endpoints) / mean(endpoints);
  const double cv_err = std::fabs(cv - 0.3) / 0.3;
  report(7, "reram pulse-response traces saturate with the configured device spread",
         monotone && saturating && cv_err <= 0.10,
         "mean trace monotone-saturating, endpoint CV " + fmt(cv) + " within " +
             fmt(100.0 * cv_err) + "% <= 10% of dw_min_dtod 0.3");
}

/* ------------------------------------------------------------------ */
/* criterion 8: transfer compound reduction and convergence            */

double train_toy(std::unique_ptr<TileBase> tile, uint64_t train_seed, const Dataset &data) {
  Network net;
  net.add(std::make_unique<AnalogDenseLayer>(std::move(tile), 4, 2, BiasMode::digital,
                                             Activation::identity, HwAwareParams{}));
  initialize_network(net, train_seed + 17);
  TrainConfig cfg;
  cfg.loss = Loss::mse;
  cfg.lr = 0.05;
  cfg.epochs = 60;
  cfg.batch_size = 10;
  cfg.seed = train_seed;
  return train(net, data, cfg).back().loss;
}

void criterion_8() {
  Dataset data = make_blobs(100, 4, 2, 0.05, 8001);

  TileSettings plain;
  plain.device = quiet_device(0.001, 1.0);
  plain.forward_io = io_off();
  plain.backward_io = io_off();

  TransferSettings disabled;
  disabled.fast_device = quiet_device(0.001, 1.0);
  disabled.slow_device = quiet_device(0.001, 1.0);
  disabled.forward_io = io_off();
  disabled.backward_io = io_off();
  disabled.transfer_every = 0; // never transfer
  disabled.gamma = 1.0;        // forward reads C + A = A while C stays zero

  TransferSettings enabled = disabled;
  enabled.transfer_every = 1;
  enabled.transfer_lr = 0.1;
  enabled.gamma = 1.0;

  const int n_seeds = 5;
  std::vector<double> plain_losses, reduced_losses, enabled_losses;
  for (int sd = 0; sd < n_seeds; ++sd) {
    plain_losses.push_back(
        train_toy(std::make_unique<AnalogTile>(2, 4, plain, 8100 + sd), 8200 + sd, data));
    reduced_losses.push_back(
        train_toy(std::make_unique<TransferTile>(2, 4, disabled, 8100 + sd), 8200 + sd, data));
    enabled_losses.push_back(
        train_toy(std::make_unique<TransferTile>(2, 4, enabled, 8300 + sd), 8400 + sd, data));
  }

  const double m_plain = mean(plain_losses);
  const double m_reduced = mean(reduced_losses);
  const double se = std::sqrt(sample_std(plain_losses) * sample_std(plain_losses) +
                              sample_std(reduced_losses) * sample_std(reduced_losses)) /
                    std::sqrt(static_cast<double>(n_seeds));
  const bool reduction_ok = std::fabs(m_plain - m_reduced) <= 4.0 * se + 0.005;

  const double worst_enabled = *std::max_element(enabled_losses.begin(), enabled_losses.end());
  report(8, "transfer compound: plain-SGD reduction and converging transfer",
         reduction_ok && worst_enabled < 0.05,
         "disabled-transfer loss " + fmt(m_reduced) + " vs plain " + fmt(m_plain) +
             " (tol 4se+0.005 = " + fmt(4.0 * se + 0.005) + "); enabled worst final loss " +
             fmt(worst_enabled) + " < 0.05 over 5 seeds");
}

/* ------------------------------------------------------------------ */
/* criterion 9: byte-identical CLI reruns                              */

void criterion_9(const fs::path &dir) {
  const std::string train_config = R"({
    "seed": 9001,
    "tile": {"device": {"preset": "reram_sb"}},
    "network": {"layers": [{"type": "linear", "in": 4, "out": 2}], "loss": "mse"},
    "training": {"lr": 0.05, "epochs": 3, "batch_size": 10,
                 "dataset": {"kind": "blobs", "samples": 40, "features": 4, "classes": 2}}
  })";
  const std::string infer_config = R"({
    "seed": 9002,
    "tile": {"family": "inference",
             "forward_io": {"is_perfect": true}, "backward_io": {"is_perfect": true},
             "inference": {"prog_noise_scale": 0.02, "read_noise_scale": 0.02,
                            "nu_mean": 0.1, "nu_std": 0.3, "t0": 1.0}},
    "network": {"layers": [{"type": "linear", "in": 4, "out": 2}], "loss": "cross_entropy"},
    "training": {"lr": 0.1, "epochs": 5, "batch_size": 10,
                 "hw_aware": {"perfect_backward": true, "perfect_update": true},
                 "dataset": {"kind": "blobs", "samples": 40, "features": 4, "classes": 2}}
  })";
  write_file(dir / "train.json", train_config);
  write_file(dir / "infer.json", infer_config);

  struct Cmd {
    std::string args_template;
    std::vector<std::string> outputs;
  };
  const std::vector<Cmd> commands = {
      {"train --config " + (dir / "train.json").string() + " --out OUT", {"history.csv"}},
      {"device-response --config " + (dir / "train.json").string() +
           " --out OUT --devices 10 --pulses-up 20 --pulses-down 20",
       {"device_response.csv"}},
      {"infer-eval --config " + (dir / "infer.json").string() +
           " --out OUT --times 1,1e4 --drift-compensation on --seeds 2",
       {"drift_eval.csv", "drift_eval_summary.csv"}},
      {"matvec-bench --size 16 --reps 3 --out OUT --seed 9003", {"matvec_bench.csv"}},
  };

  bool all_ok = true;
  std::string detail;
  for (size_t c = 0; c < commands.size(); ++c) {
    const fs::path out1 = dir / ("run" + std::to_string(c) + "a");
    const fs::path out2 = dir / ("run" + std::to_string(c) + "b");
    for (const fs::path &out : {out1, out2}) {
      std::string args = commands[c].args_template;
      args.replace(args.find("OUT"), 3, out.string());
      if (run_cli(args) != 0) {
        all_ok = false;
        detail = "command " + std::to_string(c) + " failed";
      }
    }
    for (const std::string &file : commands[c].outputs) {
      if (csv_body(out1 / file) != csv_body(out2 / file) || csv_body(out1 / file).empty()) {
        all_ok = false;
        detail = file + " differs between reruns";
      }
    }
  }
  if (all_ok) {
    detail = "4 commands x 2 runs, all CSV bodies byte-identical";
  }
  report(9, "CLI reruns with the same seed are byte-identical", all_ok, detail);
}

} // namespace

int main() {
  const fs::path dir = fs::temp_directory_path() / "xbarsim_acceptance";
  std::error_code ec;
  fs::remove_all(dir, ec);
  fs::create_directories(dir);

  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7(dir);
  criterion_8();
  criterion_9(dir);

  if (g_failures == 0) {
    std::printf("acceptance: all 9 criteria passed\n");
  } else {
    std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
  }
  return g_failures == 0 ? 0 : 1;
}
