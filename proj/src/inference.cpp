/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "xbarsim/inference.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace xbarsim {

double InferenceNoiseModel::prog_sigma(double w) const {
  const double a = std::fabs(w);
  return prog_noise_scale * (prog_c0 + prog_c1 * a + prog_c2 * a * a);
}

void InferenceNoiseModel::validate(const std::string &context) const {
  if (!(t0 > 0.0)) {
    throw Error(context + ".t0: must be > 0");
  }
  if (prog_noise_scale < 0.0 || read_noise_scale < 0.0 || nu_mean < 0.0 || nu_std < 0.0) {
    throw Error(context + ": noise scales and nu must be >= 0");
  }
  if (nu_min < 0.0 || nu_max > 1.0 || nu_min > nu_max) {
    throw Error(context + ": nu clip must satisfy 0 <= nu_min <= nu_max <= 1");
  }
  if (compensation_probes < 1) {
    throw Error(context + ".compensation_probes: must be >= 1");
  }
}

ProgrammedState program(AnalogTile &tile, const Matrix &w_target,
                        const InferenceNoiseModel &model, RngStream &rng) {
  if (w_target.rows() != tile.d_out() || w_target.cols() != tile.d_in()) {
    throw Error("program: target shape does not match tile");
  }
  model.validate("inference");

  Matrix programmed(w_target.rows(), w_target.cols());
  for (int i = 0; i < w_target.rows(); ++i) {
    for (int j = 0; j < w_target.cols(); ++j) {
      programmed(i, j) = w_target(i, j) + model.prog_sigma(w_target(i, j)) * rng.gauss();
    }
  }
  tile.set_weights(programmed); // clips into device bounds

  ProgrammedState state;
  state.w0 = tile.get_weights();
  state.nu = Matrix(w_target.rows(), w_target.cols());
  for (int i = 0; i < w_target.rows(); ++i) {
    for (int j = 0; j < w_target.cols(); ++j) {
      const double nu = model.nu_mean * (1.0 + model.nu_std * rng.gauss());
      state.nu(i, j) = std::clamp(nu, model.nu_min, model.nu_max);
    }
  }
  state.t0 = model.t0;
  state.t = model.t0;
  return state;
}

void drift_to(AnalogTile &tile, ProgrammedState &state, double t) {
  if (t < state.t0) {
    throw Error("drift_to: t < t0");
  }
  const double ratio = t / state.t0;
  Matrix w(state.w0.rows(), state.w0.cols());
  for (int i = 0; i < w.rows(); ++i) {
    for (int j = 0; j < w.cols(); ++j) {
      w(i, j) = state.w0(i, j) * std::pow(ratio, -state.nu(i, j));
    }
  }
  tile.set_weights(w);
  state.t = t;
}

std::vector<double> forward_with_read_noise(AnalogTile &tile, std::span<const double> x,
                                            const InferenceNoiseModel &model) {
  return tile.forward_noisy(x, model.read_noise_scale);
}

namespace {

double probe_readout(AnalogTile &tile, const InferenceNoiseModel &model) {
  const std::vector<double> probe(tile.d_in(), 1.0);
  double acc = 0.0;
  for (int r = 0; r < model.compensation_probes; ++r) {
    std::vector<double> y = tile.forward_noisy(probe, model.read_noise_scale);
    for (double v : y) {
      acc += std::fabs(v);
    }
  }
  return acc / model.compensation_probes;
}

} // namespace

DriftCompensation calibrate_compensation(AnalogTile &tile, const InferenceNoiseModel &model) {
  return DriftCompensation{probe_readout(tile, model)};
}

double drift_compensation_factor(AnalogTile &tile, const DriftCompensation &comp,
                                 const InferenceNoiseModel &model) {
  const double current = probe_readout(tile, model);
  if (current <= 1e-12) {
    throw Error("drift_compensation_factor: degenerate readout (all-zero tile?)");
  }
  return comp.baseline_readout / current;
}

namespace {

double eval_metric(Network &net, const Dataset &data, Metric metric, double read_noise,
                   std::span<const double> alphas) {
  if (metric == Metric::accuracy) {
    long correct = 0;
    for (size_t s = 0; s < data.size(); ++s) {
      std::vector<double> y = net.forward_eval(data.inputs[s], read_noise, alphas);
      const auto arg = std::distance(y.begin(), std::max_element(y.begin(), y.end()));
      correct += (arg == data.labels[s]) ? 1 : 0;
    }
    return static_cast<double>(correct) / static_cast<double>(data.size());
  }
  double acc = 0.0;
  for (size_t s = 0; s < data.size(); ++s) {
    std::vector<double> y = net.forward_eval(data.inputs[s], read_noise, alphas);
    acc += loss_mse(y, data.target_of(s)).loss;
  }
  return acc / static_cast<double>(data.size());
}

} // namespace

std::vector<DriftEvalRow> evaluate_over_time(const Network &net, const Dataset &eval_set,
                                             std::span<const double> times,
                                             const InferenceNoiseModel &model, Metric metric,
                                             int n_seeds, bool compensation, uint64_t seed) {
  model.validate("inference");
  for (double t : times) {
    if (t < model.t0) {
      throw Error("evaluate_over_time: time " + std::to_string(t) + " precedes t0");
    }
  }

  // trained weights are the programming targets
  std::vector<Matrix> targets;
  for (int l = 0; l < net.n_layers(); ++l) {
    targets.push_back(net.layer(l).tile().get_weights());
  }

  std::vector<DriftEvalRow> rows;
  rows.reserve(times.size() * n_seeds);
  for (int s = 0; s < n_seeds; ++s) {
    Network copy(net);
    RngStream prog_rng = RngStream(seed).derive("program", s);

    std::vector<AnalogTile *> tiles;
    std::vector<ProgrammedState> states;
    std::vector<DriftCompensation> comps;
    for (int l = 0; l < copy.n_layers(); ++l) {
      auto *tile = dynamic_cast<AnalogTile *>(&copy.layer(l).tile());
      if (tile == nullptr) {
        throw Error("evaluate_over_time: layer " + std::to_string(l) +
                    " does not host a plain analog tile");
      }
      tiles.push_back(tile);
      states.push_back(program(*tile, targets[l], model, prog_rng));
      comps.push_back(calibrate_compensation(*tile, model));
    }

    for (double t : times) {
      std::vector<double> alphas(tiles.size(), 1.0);
      double alpha_mean = 1.0;
      for (size_t l = 0; l < tiles.size(); ++l) {
        drift_to(*tiles[l], states[l], t);
      }
      if (compensation) {
        alpha_mean = 0.0;
        for (size_t l = 0; l < tiles.size(); ++l) {
          alphas[l] = drift_compensation_factor(*tiles[l], comps[l], model);
          alpha_mean += alphas[l];
        }
        alpha_mean /= static_cast<double>(tiles.size());
      }
      DriftEvalRow row;
      row.time_s = t;
      row.seed = s;
      row.metric = eval_metric(copy, eval_set, metric, model.read_noise_scale, alphas);
      row.alpha = alpha_mean;
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<DriftEvalSummary> summarize_drift_eval(std::span<const DriftEvalRow> rows) {
  std::map<double, std::vector<double>> by_time;
  for (const DriftEvalRow &r : rows) {
    by_time[r.time_s].push_back(r.metric);
  }
  std::vector<DriftEvalSummary> out;
  for (const auto &[t, vals] : by_time) {
    DriftEvalSummary s;
    s.time_s = t;
    double mean = 0.0;
    for (double v : vals) {
      mean += v;
    }
    mean /= static_cast<double>(vals.size());
    double var = 0.0;
    for (double v : vals) {
      var += (v - mean) * (v - mean);
    }
    s.metric_mean = mean;
    s.metric_std = vals.size() > 1 ? std::sqrt(var / (vals.size() - 1)) : 0.0;
    out.push_back(s);
  }
  return out;
}

} // namespace xbarsim
