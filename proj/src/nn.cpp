/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "xbarsim/nn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

namespace xbarsim {

double apply_activation(Activation act, double z) {
  switch (act) {
  case Activation::identity:
    return z;
  case Activation::tanh_act:
    return std::tanh(z);
  case Activation::relu:
    return z > 0.0 ? z : 0.0;
  case Activation::sigmoid:
    return 1.0 / (1.0 + std::exp(-z));
  }
  return z;
}

double activation_grad(Activation act, double z) {
  switch (act) {
  case Activation::identity:
    return 1.0;
  case Activation::tanh_act: {
    const double t = std::tanh(z);
    return 1.0 - t * t;
  }
  case Activation::relu:
    return z > 0.0 ? 1.0 : 0.0;
  case Activation::sigmoid: {
    const double s = 1.0 / (1.0 + std::exp(-z));
    return s * (1.0 - s);
  }
  }
  return 1.0;
}

/* ------------------------------------------------------------------ */
/* dense layer                                                         */

AnalogDenseLayer::AnalogDenseLayer(std::unique_ptr<TileBase> tile, int in, int out,
                                   BiasMode bias_mode, Activation act, HwAwareParams hw)
    : tile_(std::move(tile)), in_(in), out_(out), bias_mode_(bias_mode), act_(act), hw_(hw) {
  const int want_in = bias_mode_ == BiasMode::analog ? in_ + 1 : in_;
  if (tile_->d_out() != out_ || tile_->d_in() != want_in) {
    throw Error("dense layer: tile shape " + std::to_string(tile_->d_out()) + "x" +
                std::to_string(tile_->d_in()) + " does not match layer " + std::to_string(out_) +
                "x" + std::to_string(want_in));
  }
  if (bias_mode_ == BiasMode::digital) {
    bias_.assign(out_, 0.0);
  }
}

std::vector<double> AnalogDenseLayer::tile_input(std::span<const double> x) const {
  std::vector<double> v(x.begin(), x.end());
  if (bias_mode_ == BiasMode::analog) {
    v.push_back(1.0);
  }
  return v;
}

std::vector<double> AnalogDenseLayer::forward(std::span<const double> x, bool cache) {
  std::vector<double> tin = tile_input(x);
  std::vector<double> z = tile_->forward(tin);
  if (bias_mode_ == BiasMode::digital) {
    for (int i = 0; i < out_; ++i) {
      z[i] += bias_[i];
    }
  }
  std::vector<double> y(out_);
  for (int i = 0; i < out_; ++i) {
    y[i] = apply_activation(act_, z[i]);
  }
  if (cache) {
    cached_tile_in_ = std::move(tin);
    cached_preact_ = std::move(z);
    have_cache_ = true;
  }
  return y;
}

std::vector<double> AnalogDenseLayer::forward_eval(std::span<const double> x,
                                                   double extra_weight_sigma,
                                                   double output_scale) {
  std::vector<double> tin = tile_input(x);
  std::vector<double> z = tile_->forward_noisy(tin, extra_weight_sigma);
  for (int i = 0; i < out_; ++i) {
    z[i] *= output_scale;
    if (bias_mode_ == BiasMode::digital) {
      z[i] += bias_[i];
    }
    z[i] = apply_activation(act_, z[i]);
  }
  return z;
}

std::vector<double> AnalogDenseLayer::backward(std::span<const double> grad_out) {
  if (!have_cache_) {
    throw Error("backward: no cached forward pass");
  }
  if (static_cast<int>(grad_out.size()) != out_) {
    throw Error("backward: gradient length mismatch");
  }
  std::vector<double> grad_z(out_);
  for (int i = 0; i < out_; ++i) {
    grad_z[i] = grad_out[i] * activation_grad(act_, cached_preact_[i]);
  }

  std::vector<double> grad_in;
  if (hw_.perfect_backward) {
    grad_in = matvec_transposed(tile_->get_weights(), grad_z);
  } else {
    grad_in = tile_->backward(grad_z);
  }
  queued_.push_back({std::move(cached_tile_in_), std::move(grad_z)});
  have_cache_ = false;

  if (bias_mode_ == BiasMode::analog) {
    grad_in.pop_back(); // drop the constant-input column
  }
  return grad_in;
}

void AnalogDenseLayer::apply_updates(double lr, int batch_size) {
  const double inv_b = 1.0 / std::max(1, batch_size);
  if (hw_.perfect_update) {
    Matrix w = tile_->get_weights();
    for (const SampleGrad &s : queued_) {
      for (int i = 0; i < w.rows(); ++i) {
        for (int j = 0; j < w.cols(); ++j) {
          w(i, j) -= lr * inv_b * s.grad_z[i] * s.tile_in[j];
        }
      }
    }
    tile_->set_weights(w);
  } else {
    for (const SampleGrad &s : queued_) {
      std::vector<double> d(s.grad_z.size());
      for (size_t i = 0; i < d.size(); ++i) {
        d[i] = -s.grad_z[i] * inv_b;
      }
      tile_->update(s.tile_in, d, lr);
    }
  }
  if (bias_mode_ == BiasMode::digital) {
    for (const SampleGrad &s : queued_) {
      for (int i = 0; i < out_; ++i) {
        bias_[i] -= lr * inv_b * s.grad_z[i];
      }
    }
  }
  queued_.clear();
}

void AnalogDenseLayer::begin_minibatch(RngStream &rng) {
  if (hw_.weight_noise_sigma > 0.0) {
    saved_weights_ = tile_->get_weights();
    Matrix noisy = *saved_weights_;
    for (int i = 0; i < noisy.rows(); ++i) {
      for (int j = 0; j < noisy.cols(); ++j) {
        noisy(i, j) += hw_.weight_noise_sigma * rng.gauss();
      }
    }
    tile_->set_weights(noisy);
  }
}

void AnalogDenseLayer::remove_weight_noise() {
  if (saved_weights_) {
    tile_->set_weights(*saved_weights_);
    saved_weights_.reset();
  }
}

void AnalogDenseLayer::end_minibatch() { tile_->end_minibatch(); }

std::unique_ptr<LayerBase> AnalogDenseLayer::clone() const {
  auto copy = std::make_unique<AnalogDenseLayer>(tile_->clone(), in_, out_, bias_mode_, act_, hw_);
  copy->bias_ = bias_;
  return copy;
}

void AnalogDenseLayer::set_bias(std::span<const double> b) {
  if (bias_mode_ != BiasMode::digital || static_cast<int>(b.size()) != out_) {
    throw Error("set_bias: layer has no digital bias of that size");
  }
  bias_.assign(b.begin(), b.end());
}

/* ------------------------------------------------------------------ */
/* conv layer                                                          */

AnalogConv2DLayer::AnalogConv2DLayer(std::unique_ptr<TileBase> tile, int in_channels,
                                     int out_channels, int kernel, int stride, int padding,
                                     int in_h, int in_w, BiasMode bias_mode, Activation act,
                                     HwAwareParams hw)
    : tile_(std::move(tile)), in_channels_(in_channels), out_channels_(out_channels),
      kernel_(kernel), stride_(stride), padding_(padding), in_h_(in_h), in_w_(in_w),
      bias_mode_(bias_mode), act_(act), hw_(hw) {
  if (kernel_ < 1 || stride_ < 1 || padding_ < 0) {
    throw Error("conv layer: invalid kernel/stride/padding");
  }
  if (bias_mode_ == BiasMode::analog) {
    throw Error("conv layer: analog bias not supported");
  }
  out_h_ = (in_h_ + 2 * padding_ - kernel_) / stride_ + 1;
  out_w_ = (in_w_ + 2 * padding_ - kernel_) / stride_ + 1;
  if (out_h_ < 1 || out_w_ < 1) {
    throw Error("conv layer: kernel does not fit the input");
  }
  const int want_in = in_channels_ * kernel_ * kernel_;
  if (tile_->d_out() != out_channels_ || tile_->d_in() != want_in) {
    throw Error("conv layer: tile shape must be out_channels x (in_channels*k*k)");
  }
  if (bias_mode_ == BiasMode::digital) {
    bias_.assign(out_channels_, 0.0);
  }
}

std::vector<double> AnalogConv2DLayer::unfold_patch(std::span<const double> x, int oy,
                                                    int ox) const {
  std::vector<double> patch(in_channels_ * kernel_ * kernel_, 0.0);
  for (int c = 0; c < in_channels_; ++c) {
    for (int ky = 0; ky < kernel_; ++ky) {
      const int iy = oy * stride_ + ky - padding_;
      if (iy < 0 || iy >= in_h_) {
        continue;
      }
      for (int kx = 0; kx < kernel_; ++kx) {
        const int ix = ox * stride_ + kx - padding_;
        if (ix < 0 || ix >= in_w_) {
          continue;
        }
        patch[(c * kernel_ + ky) * kernel_ + kx] = x[(c * in_h_ + iy) * in_w_ + ix];
      }
    }
  }
  return patch;
}

std::vector<double> AnalogConv2DLayer::forward(std::span<const double> x, bool cache) {
  if (static_cast<int>(x.size()) != in_size()) {
    throw Error("conv forward: input length mismatch");
  }
  std::vector<double> z(out_size(), 0.0);
  std::vector<std::vector<double>> patches;
  if (cache) {
    patches.reserve(static_cast<size_t>(out_h_) * out_w_);
  }
  for (int oy = 0; oy < out_h_; ++oy) {
    for (int ox = 0; ox < out_w_; ++ox) {
      std::vector<double> patch = unfold_patch(x, oy, ox);
      std::vector<double> col = tile_->forward(patch); // one analog mat-vec per patch
      for (int c = 0; c < out_channels_; ++c) {
        double v = col[c];
        if (bias_mode_ == BiasMode::digital) {
          v += bias_[c];
        }
        z[(c * out_h_ + oy) * out_w_ + ox] = v;
      }
      if (cache) {
        patches.push_back(std::move(patch));
      }
    }
  }
  std::vector<double> y(z.size());
  for (size_t i = 0; i < z.size(); ++i) {
    y[i] = apply_activation(act_, z[i]);
  }
  if (cache) {
    cached_patches_ = std::move(patches);
    cached_preact_ = std::move(z);
    have_cache_ = true;
  }
  return y;
}

std::vector<double> AnalogConv2DLayer::forward_eval(std::span<const double> x,
                                                    double extra_weight_sigma,
                                                    double output_scale) {
  std::vector<double> y(out_size(), 0.0);
  for (int oy = 0; oy < out_h_; ++oy) {
    for (int ox = 0; ox < out_w_; ++ox) {
      std::vector<double> patch = unfold_patch(x, oy, ox);
      std::vector<double> col = tile_->forward_noisy(patch, extra_weight_sigma);
      for (int c = 0; c < out_channels_; ++c) {
        double v = col[c] * output_scale;
        if (bias_mode_ == BiasMode::digital) {
          v += bias_[c];
        }
        y[(c * out_h_ + oy) * out_w_ + ox] = apply_activation(act_, v);
      }
    }
  }
  return y;
}

std::vector<double> AnalogConv2DLayer::backward(std::span<const double> grad_out) {
  if (!have_cache_) {
    throw Error("backward: no cached forward pass");
  }
  if (static_cast<int>(grad_out.size()) != out_size()) {
    throw Error("conv backward: gradient length mismatch");
  }
  std::vector<double> grad_in(in_size(), 0.0);
  Matrix w_perfect;
  if (hw_.perfect_backward) {
    w_perfect = tile_->get_weights();
  }
  size_t patch_idx = 0;
  for (int oy = 0; oy < out_h_; ++oy) {
    for (int ox = 0; ox < out_w_; ++ox, ++patch_idx) {
      std::vector<double> grad_col(out_channels_);
      for (int c = 0; c < out_channels_; ++c) {
        const size_t pos = (static_cast<size_t>(c) * out_h_ + oy) * out_w_ + ox;
        grad_col[c] = grad_out[pos] * activation_grad(act_, cached_preact_[pos]);
      }
      std::vector<double> grad_patch = hw_.perfect_backward
                                           ? matvec_transposed(w_perfect, grad_col)
                                           : tile_->backward(grad_col);
      // fold the patch gradient back onto the input grid
      for (int c = 0; c < in_channels_; ++c) {
        for (int ky = 0; ky < kernel_; ++ky) {
          const int iy = oy * stride_ + ky - padding_;
          if (iy < 0 || iy >= in_h_) {
            continue;
          }
          for (int kx = 0; kx < kernel_; ++kx) {
            const int ix = ox * stride_ + kx - padding_;
            if (ix < 0 || ix >= in_w_) {
              continue;
            }
            grad_in[(c * in_h_ + iy) * in_w_ + ix] +=
                grad_patch[(c * kernel_ + ky) * kernel_ + kx];
          }
        }
      }
      queued_.push_back({std::move(cached_patches_[patch_idx]), std::move(grad_col)});
    }
  }
  have_cache_ = false;
  cached_patches_.clear();
  return grad_in;
}

void AnalogConv2DLayer::apply_updates(double lr, int batch_size) {
  const double inv_b = 1.0 / std::max(1, batch_size);
  if (hw_.perfect_update) {
    Matrix w = tile_->get_weights();
    for (const PatchGrad &p : queued_) {
      for (int i = 0; i < w.rows(); ++i) {
        for (int j = 0; j < w.cols(); ++j) {
          w(i, j) -= lr * inv_b * p.grad_col[i] * p.patch[j];
        }
      }
    }
    tile_->set_weights(w);
  } else {
    for (const PatchGrad &p : queued_) {
      std::vector<double> d(p.grad_col.size());
      for (size_t i = 0; i < d.size(); ++i) {
        d[i] = -p.grad_col[i] * inv_b;
      }
      tile_->update(p.patch, d, lr);
    }
  }
  if (bias_mode_ == BiasMode::digital) {
    for (const PatchGrad &p : queued_) {
      for (int c = 0; c < out_channels_; ++c) {
        bias_[c] -= lr * inv_b * p.grad_col[c];
      }
    }
  }
  queued_.clear();
}

void AnalogConv2DLayer::begin_minibatch(RngStream &rng) {
  if (hw_.weight_noise_sigma > 0.0) {
    saved_weights_ = tile_->get_weights();
    Matrix noisy = *saved_weights_;
    for (int i = 0; i < noisy.rows(); ++i) {
      for (int j = 0; j < noisy.cols(); ++j) {
        noisy(i, j) += hw_.weight_noise_sigma * rng.gauss();
      }
    }
    tile_->set_weights(noisy);
  }
}

void AnalogConv2DLayer::remove_weight_noise() {
  if (saved_weights_) {
    tile_->set_weights(*saved_weights_);
    saved_weights_.reset();
  }
}

void AnalogConv2DLayer::end_minibatch() { tile_->end_minibatch(); }

std::unique_ptr<LayerBase> AnalogConv2DLayer::clone() const {
  auto copy = std::make_unique<AnalogConv2DLayer>(tile_->clone(), in_channels_, out_channels_,
                                                  kernel_, stride_, padding_, in_h_, in_w_,
                                                  bias_mode_, act_, hw_);
  copy->bias_ = bias_;
  return copy;
}

/* ------------------------------------------------------------------ */
/* network                                                             */

Network::Network(const Network &other) {
  layers_.reserve(other.layers_.size());
  for (const auto &l : other.layers_) {
    layers_.push_back(l->clone());
  }
}

Network &Network::operator=(const Network &other) {
  if (this != &other) {
    Network tmp(other);
    layers_ = std::move(tmp.layers_);
  }
  return *this;
}

void Network::add(std::unique_ptr<LayerBase> layer) {
  if (!layers_.empty() && layers_.back()->out_size() != layer->in_size()) {
    throw Error("network: layer input " + std::to_string(layer->in_size()) +
                " does not match previous output " + std::to_string(layers_.back()->out_size()));
  }
  layers_.push_back(std::move(layer));
}

int Network::in_size() const { return layers_.empty() ? 0 : layers_.front()->in_size(); }
int Network::out_size() const { return layers_.empty() ? 0 : layers_.back()->out_size(); }

std::vector<double> Network::forward(std::span<const double> x, bool cache) {
  std::vector<double> v(x.begin(), x.end());
  for (auto &l : layers_) {
    v = l->forward(v, cache);
  }
  return v;
}

std::vector<double> Network::backward(std::span<const double> grad_out) {
  std::vector<double> g(grad_out.begin(), grad_out.end());
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) {
    g = (*it)->backward(g);
  }
  return g;
}

void Network::apply_updates(double lr, int batch_size) {
  for (auto &l : layers_) {
    l->apply_updates(lr, batch_size);
  }
}

void Network::begin_minibatch(RngStream &rng) {
  for (auto &l : layers_) {
    l->begin_minibatch(rng);
  }
}

void Network::remove_weight_noise() {
  for (auto &l : layers_) {
    l->remove_weight_noise();
  }
}

void Network::end_minibatch() {
  for (auto &l : layers_) {
    l->end_minibatch();
  }
}

std::vector<double> Network::forward_eval(std::span<const double> x, double extra_weight_sigma,
                                          std::span<const double> output_scales) {
  std::vector<double> v(x.begin(), x.end());
  for (size_t i = 0; i < layers_.size(); ++i) {
    const double scale = output_scales.empty() ? 1.0 : output_scales[i];
    v = layers_[i]->forward_eval(v, extra_weight_sigma, scale);
  }
  return v;
}

void initialize_network(Network &net, uint64_t seed) {
  RngStream rng(seed);
  for (int l = 0; l < net.n_layers(); ++l) {
    RngStream stream = rng.derive("init", l);
    TileBase &tile = net.layer(l).tile();
    Matrix w(tile.d_out(), tile.d_in());
    const double scale = 1.0 / std::sqrt(static_cast<double>(tile.d_in()));
    for (int i = 0; i < w.rows(); ++i) {
      for (int j = 0; j < w.cols(); ++j) {
        w(i, j) = scale * (2.0 * stream.uniform() - 1.0);
      }
    }
    tile.set_weights(w);
  }
}

/* ------------------------------------------------------------------ */
/* losses                                                              */

LossGrad loss_mse(std::span<const double> pred, std::span<const double> target) {
  if (pred.size() != target.size()) {
    throw Error("mse: prediction/target size mismatch");
  }
  LossGrad out;
  out.grad.resize(pred.size());
  const double inv_n = 1.0 / static_cast<double>(pred.size());
  for (size_t i = 0; i < pred.size(); ++i) {
    const double e = pred[i] - target[i];
    out.loss += e * e * inv_n;
    out.grad[i] = 2.0 * e * inv_n;
  }
  return out;
}

LossGrad loss_cross_entropy(std::span<const double> logits, int label) {
  if (label < 0 || label >= static_cast<int>(logits.size())) {
    throw Error("cross_entropy: label out of range");
  }
  LossGrad out;
  out.grad.resize(logits.size());
  double zmax = -std::numeric_limits<double>::infinity();
  for (double z : logits) {
    zmax = std::max(zmax, z);
  }
  double denom = 0.0;
  for (double z : logits) {
    denom += std::exp(z - zmax);
  }
  for (size_t i = 0; i < logits.size(); ++i) {
    const double p = std::exp(logits[i] - zmax) / denom;
    out.grad[i] = p - (static_cast<int>(i) == label ? 1.0 : 0.0);
    if (static_cast<int>(i) == label) {
      out.loss = -(logits[i] - zmax - std::log(denom));
    }
  }
  return out;
}

/* ------------------------------------------------------------------ */
/* datasets                                                            */

std::vector<double> Dataset::target_of(size_t idx) const {
  if (classification) {
    std::vector<double> t(n_outputs, 0.0);
    t[labels[idx]] = 1.0;
    return t;
  }
  return targets[idx];
}

Dataset make_blobs(int n, int features, int classes, double spread, uint64_t seed,
                   uint64_t sample_salt) {
  RngStream center_rng = RngStream(seed).derive("blob_centers");
  RngStream sample_rng = RngStream(seed).derive("blob_samples", sample_salt);
  Dataset d;
  d.n_features = features;
  d.n_outputs = classes;
  d.classification = true;

  // well-separated unit-scale centers, fixed by the base seed
  std::vector<std::vector<double>> centers(classes, std::vector<double>(features));
  for (int c = 0; c < classes; ++c) {
    double norm = 0.0;
    for (int f = 0; f < features; ++f) {
      centers[c][f] = center_rng.gauss();
      norm += centers[c][f] * centers[c][f];
    }
    norm = std::sqrt(norm);
    for (int f = 0; f < features; ++f) {
      centers[c][f] /= (norm > 0.0 ? norm : 1.0);
    }
  }

  d.inputs.reserve(n);
  d.labels.reserve(n);
  for (int s = 0; s < n; ++s) {
    const int c = s % classes;
    std::vector<double> x(features);
    for (int f = 0; f < features; ++f) {
      x[f] = centers[c][f] + spread * sample_rng.gauss();
    }
    d.inputs.push_back(std::move(x));
    d.labels.push_back(c);
  }
  return d;
}

Dataset make_regression(int n, int features, int outputs, double noise, uint64_t seed,
                        uint64_t sample_salt) {
  RngStream model_rng = RngStream(seed).derive("regression_model");
  RngStream sample_rng = RngStream(seed).derive("regression_samples", sample_salt);
  Dataset d;
  d.n_features = features;
  d.n_outputs = outputs;
  d.classification = false;

  Matrix a(outputs, features);
  for (int i = 0; i < outputs; ++i) {
    for (int j = 0; j < features; ++j) {
      a(i, j) = 2.0 * model_rng.uniform() - 1.0;
    }
  }
  d.inputs.reserve(n);
  d.targets.reserve(n);
  for (int s = 0; s < n; ++s) {
    std::vector<double> x(features);
    for (int f = 0; f < features; ++f) {
      x[f] = 2.0 * sample_rng.uniform() - 1.0;
    }
    std::vector<double> t = matvec(a, x);
    for (double &v : t) {
      v += noise * sample_rng.gauss();
    }
    d.inputs.push_back(std::move(x));
    d.targets.push_back(std::move(t));
  }
  return d;
}

Dataset load_csv_dataset(const std::string &path, bool classification) {
  std::ifstream in(path);
  if (!in) {
    throw Error("dataset: cannot open '" + path + "'");
  }
  Dataset d;
  d.classification = classification;
  std::string line;
  int max_label = -1;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') {
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      row.push_back(std::stod(cell));
    }
    if (row.size() < 2) {
      throw Error("dataset: row with fewer than 2 columns in '" + path + "'");
    }
    if (d.n_features == 0) {
      d.n_features = static_cast<int>(row.size()) - 1;
    } else if (static_cast<int>(row.size()) - 1 != d.n_features) {
      throw Error("dataset: inconsistent column count in '" + path + "'");
    }
    const double last = row.back();
    row.pop_back();
    d.inputs.push_back(std::move(row));
    if (classification) {
      const int label = static_cast<int>(std::lround(last));
      d.labels.push_back(label);
      max_label = std::max(max_label, label);
    } else {
      d.targets.push_back({last});
    }
  }
  d.n_outputs = classification ? max_label + 1 : 1;
  return d;
}

/* ------------------------------------------------------------------ */
/* trainer                                                             */

std::vector<EpochStats> train(Network &net, const Dataset &data, const TrainConfig &cfg) {
  if (data.size() == 0) {
    throw Error("train: empty dataset");
  }
  if (cfg.epochs < 0 || cfg.batch_size < 1) {
    throw Error("train: invalid epochs/batch_size");
  }
  RngStream shuffle_rng = RngStream(cfg.seed).derive("shuffle");
  RngStream wnoise_rng = RngStream(cfg.seed).derive("weight_noise");

  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0u);

  std::vector<EpochStats> history;
  history.reserve(cfg.epochs);
  double lr = cfg.lr;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates on the deterministic shuffle stream
    for (size_t i = order.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(shuffle_rng.uniform() * i);
      std::swap(order[i - 1], order[std::min(j, i - 1)]);
    }

    double loss_sum = 0.0;
    long correct = 0;
    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const size_t stop = std::min(order.size(), start + cfg.batch_size);
      net.begin_minibatch(wnoise_rng);
      for (size_t s = start; s < stop; ++s) {
        const size_t idx = order[s];
        std::vector<double> y = net.forward(data.inputs[idx], true);
        LossGrad lg;
        if (cfg.loss == Loss::cross_entropy) {
          if (!data.classification) {
            throw Error("train: cross_entropy needs a classification dataset");
          }
          lg = loss_cross_entropy(y, data.labels[idx]);
        } else {
          std::vector<double> t = data.target_of(idx);
          lg = loss_mse(y, t);
        }
        loss_sum += lg.loss;
        if (data.classification) {
          const auto arg =
              std::distance(y.begin(), std::max_element(y.begin(), y.end()));
          correct += (arg == data.labels[idx]) ? 1 : 0;
        }
        net.backward(lg.grad);
      }
      net.remove_weight_noise();
      net.apply_updates(lr, static_cast<int>(stop - start));
      net.end_minibatch();
    }

    EpochStats st;
    st.epoch = epoch;
    st.loss = loss_sum / static_cast<double>(data.size());
    st.accuracy = data.classification
                      ? static_cast<double>(correct) / static_cast<double>(data.size())
                      : std::numeric_limits<double>::quiet_NaN();
    history.push_back(st);
    lr *= cfg.lr_decay;
  }
  return history;
}

double evaluate_accuracy(Network &net, const Dataset &data) {
  long correct = 0;
  for (size_t s = 0; s < data.size(); ++s) {
    std::vector<double> y = net.forward(data.inputs[s], false);
    const auto arg = std::distance(y.begin(), std::max_element(y.begin(), y.end()));
    correct += (arg == data.labels[s]) ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

double evaluate_mse(Network &net, const Dataset &data) {
  double acc = 0.0;
  for (size_t s = 0; s < data.size(); ++s) {
    std::vector<double> y = net.forward(data.inputs[s], false);
    std::vector<double> t = data.target_of(s);
    acc += loss_mse(y, t).loss;
  }
  return acc / static_cast<double>(data.size());
}

} // namespace xbarsim
