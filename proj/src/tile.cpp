/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "xbarsim/tile.hpp"

#include <algorithm>
#include <cmath>

namespace xbarsim {

void TemporalParams::validate(const std::string &context) const {
  if (decay_rate < 0.0 || diffusion_sigma < 0.0) {
    throw Error(context + ": decay_rate and diffusion_sigma must be >= 0");
  }
  if (reset_prob < 0.0 || reset_prob > 1.0) {
    throw Error(context + ".reset_prob: must be in [0, 1]");
  }
  if (decay_dtod < 0.0 || diffusion_dtod < 0.0 || reset_dtod < 0.0) {
    throw Error(context + ": dtod spreads must be >= 0");
  }
}

namespace {

RngStream make_init_stream(uint64_t seed) { return RngStream(seed).derive("realize"); }

Matrix gauss_matrix(int rows, int cols, RngStream &rng) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      m(i, j) = rng.gauss();
    }
  }
  return m;
}

} // namespace

AnalogTile::AnalogTile(int d_out, int d_in, const TileSettings &settings, uint64_t seed)
    : d_out_(d_out), d_in_(d_in), settings_(settings),
      rng_forward_(RngStream(seed).derive("forward")),
      rng_backward_(RngStream(seed).derive("backward")),
      rng_update_(RngStream(seed).derive("update")),
      rng_temporal_(RngStream(seed).derive("temporal")) {
  if (d_out < 1 || d_in < 1) {
    throw Error("tile: dimensions must be >= 1");
  }
  settings_.forward_io.validate("forward_io");
  settings_.backward_io.validate("backward_io");
  settings_.update.validate("update");
  settings_.temporal.validate("temporal");

  RngStream init = make_init_stream(seed);
  device_ = DeviceMatrix(settings_.device, d_out, d_in, init);
  weights_ = Matrix(d_out, d_in, 0.0);

  RngStream temporal_init = RngStream(seed).derive("temporal_init");
  xi_decay_ = gauss_matrix(d_out, d_in, temporal_init);
  xi_diffusion_ = gauss_matrix(d_out, d_in, temporal_init);
  xi_reset_ = gauss_matrix(d_out, d_in, temporal_init);
}

void AnalogTile::check_input(std::span<const double> v, int expected, const char *what) const {
  if (static_cast<int>(v.size()) != expected) {
    throw Error(std::string(what) + ": length " + std::to_string(v.size()) + ", expected " +
                std::to_string(expected));
  }
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw Error(std::string(what) + ": non-finite entry");
    }
  }
}

std::vector<double> AnalogTile::forward(std::span<const double> x) {
  check_input(x, d_in_, "forward");
  return analog_matvec(weights_, x, settings_.forward_io, rng_forward_, false);
}

std::vector<double> AnalogTile::backward(std::span<const double> d) {
  check_input(d, d_out_, "backward");
  return analog_matvec(weights_, d, settings_.backward_io, rng_backward_, true);
}

std::vector<double> AnalogTile::forward_with_io(std::span<const double> x, const IOParams &io) {
  check_input(x, d_in_, "forward");
  return analog_matvec(weights_, x, io, rng_forward_, false);
}

std::vector<double> AnalogTile::forward_noisy(std::span<const double> x,
                                              double extra_weight_sigma) {
  return forward_with_io(x, with_extra_weight_noise(settings_.forward_io, extra_weight_sigma));
}

void AnalogTile::update(std::span<const double> x, std::span<const double> d, double lr) {
  check_input(x, d_in_, "update(x)");
  check_input(d, d_out_, "update(d)");
  pulsed_update(weights_, device_, x, d, lr, settings_.update, rng_update_);
}

void AnalogTile::set_weights(const Matrix &w) {
  if (!w.same_shape(weights_)) {
    throw Error("set_weights: shape " + std::to_string(w.rows()) + "x" +
                std::to_string(w.cols()) + ", expected " + std::to_string(d_out_) + "x" +
                std::to_string(d_in_));
  }
  weights_ = w;
  clip_to_bounds();
}

void AnalogTile::clip_to_bounds() {
  for (int i = 0; i < d_out_; ++i) {
    for (int j = 0; j < d_in_; ++j) {
      weights_(i, j) = device_.clip(i, j, weights_(i, j));
    }
  }
}

void AnalogTile::set_learning_rate(double lr) {
  if (!(lr > 0.0)) {
    throw Error("learning_rate: must be > 0");
  }
  learning_rate_ = lr;
}

void AnalogTile::apply_temporal_step(const TemporalParams &tp) {
  if (!tp.any()) {
    return;
  }
  for (int i = 0; i < d_out_; ++i) {
    for (int j = 0; j < d_in_; ++j) {
      double w = weights_(i, j);
      if (tp.decay_rate > 0.0) {
        // w -> w_reset + (w - w_reset) * (1 - r), reset value 0
        const double r =
            std::clamp(tp.decay_rate * (1.0 + tp.decay_dtod * xi_decay_(i, j)), 0.0, 1.0);
        w *= 1.0 - r;
      }
      if (tp.diffusion_sigma > 0.0) {
        const double sigma =
            std::max(tp.diffusion_sigma * (1.0 + tp.diffusion_dtod * xi_diffusion_(i, j)), 0.0);
        w += sigma * rng_temporal_.gauss();
      }
      if (tp.reset_prob > 0.0) {
        const double p =
            std::clamp(tp.reset_prob * (1.0 + tp.reset_dtod * xi_reset_(i, j)), 0.0, 1.0);
        if (rng_temporal_.bernoulli(p)) {
          w = 0.0;
        }
      }
      weights_(i, j) = device_.clip(i, j, w);
    }
  }
}

void AnalogTile::apply_pulse_trains(const PulseTrains &trains, std::span<const int> sign_x,
                                    std::span<const int> sign_d, bool flip_direction) {
  if (!flip_direction) {
    apply_coincidences(weights_, device_, trains, sign_x, sign_d, rng_update_);
    return;
  }
  std::vector<int> flipped(sign_d.begin(), sign_d.end());
  for (int &s : flipped) {
    s = -s;
  }
  apply_coincidences(weights_, device_, trains, sign_x, flipped, rng_update_);
}

void AnalogTile::end_minibatch() { apply_temporal_step(settings_.temporal); }

} // namespace xbarsim
