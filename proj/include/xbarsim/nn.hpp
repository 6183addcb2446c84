/**
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xbarsim/tile.hpp"

namespace xbarsim {

enum class Activation { identity, tanh_act, relu, sigmoid };
enum class Loss { mse, cross_entropy };
enum class BiasMode { none, digital, analog };

/// Hardware-aware training switches: keep the analog forward but make the
/// backward/update exact, and optionally inject weight noise that is added at
/// mini-batch start and removed bit-exactly at mini-batch end.
struct HwAwareParams {
  bool perfect_backward = false;
  bool perfect_update = false;
  double weight_noise_sigma = 0.0;
};

double apply_activation(Activation act, double z);
double activation_grad(Activation act, double z);

/// A network layer hosting one analog tile plus its digital periphery.
class LayerBase {
public:
  virtual ~LayerBase() = default;

  virtual int in_size() const = 0;
  virtual int out_size() const = 0;

  /// Forward one sample; cache = true stores what backward/update need.
  virtual std::vector<double> forward(std::span<const double> x, bool cache) = 0;

  /// Gradient wrt this layer's input; consumes the cached forward and queues
  /// the per-sample update data.
  virtual std::vector<double> backward(std::span<const double> grad_out) = 0;

  /// Apply all queued per-sample updates (one pulsed update per sample and
  /// per conv patch), or one exact digital step under perfect_update.
  virtual void apply_updates(double lr, int batch_size) = 0;

  virtual void begin_minibatch(RngStream &rng) = 0; // weight-noise injection
  virtual void remove_weight_noise() = 0;
  virtual void end_minibatch() = 0; // temporal processes etc.

  /// Inference-style forward: extra transient weight noise on the tile and a
  /// digital scale on the analog output (drift compensation hook).
  virtual std::vector<double> forward_eval(std::span<const double> x, double extra_weight_sigma,
                                           double output_scale) = 0;

  virtual TileBase &tile() = 0;
  virtual const TileBase &tile() const = 0;
  virtual std::unique_ptr<LayerBase> clone() const = 0;
};

class AnalogDenseLayer : public LayerBase {
public:
  AnalogDenseLayer(std::unique_ptr<TileBase> tile, int in, int out, BiasMode bias_mode,
                   Activation act, HwAwareParams hw);

  int in_size() const override { return in_; }
  int out_size() const override { return out_; }

  std::vector<double> forward(std::span<const double> x, bool cache) override;
  std::vector<double> backward(std::span<const double> grad_out) override;
  void apply_updates(double lr, int batch_size) override;
  void begin_minibatch(RngStream &rng) override;
  void remove_weight_noise() override;
  void end_minibatch() override;
  std::vector<double> forward_eval(std::span<const double> x, double extra_weight_sigma,
                                   double output_scale) override;

  TileBase &tile() override { return *tile_; }
  const TileBase &tile() const override { return *tile_; }
  std::unique_ptr<LayerBase> clone() const override;

  std::span<const double> bias() const { return bias_; }
  void set_bias(std::span<const double> b);

private:
  std::vector<double> tile_input(std::span<const double> x) const;

  std::unique_ptr<TileBase> tile_;
  int in_ = 0;
  int out_ = 0;
  BiasMode bias_mode_ = BiasMode::digital;
  Activation act_ = Activation::identity;
  HwAwareParams hw_;
  std::vector<double> bias_;

  bool have_cache_ = false;
  std::vector<double> cached_tile_in_;
  std::vector<double> cached_preact_;
  struct SampleGrad {
    std::vector<double> tile_in;
    std::vector<double> grad_z;
  };
  std::vector<SampleGrad> queued_;
  std::optional<Matrix> saved_weights_;
};

class AnalogConv2DLayer : public LayerBase {
public:
  AnalogConv2DLayer(std::unique_ptr<TileBase> tile, int in_channels, int out_channels,
                    int kernel, int stride, int padding, int in_h, int in_w, BiasMode bias_mode,
                    Activation act, HwAwareParams hw);

  int in_size() const override { return in_channels_ * in_h_ * in_w_; }
  int out_size() const override { return out_channels_ * out_h_ * out_w_; }
  int out_h() const { return out_h_; }
  int out_w() const { return out_w_; }

  std::vector<double> forward(std::span<const double> x, bool cache) override;
  std::vector<double> backward(std::span<const double> grad_out) override;
  void apply_updates(double lr, int batch_size) override;
  void begin_minibatch(RngStream &rng) override;
  void remove_weight_noise() override;
  void end_minibatch() override;
  std::vector<double> forward_eval(std::span<const double> x, double extra_weight_sigma,
                                   double output_scale) override;

  TileBase &tile() override { return *tile_; }
  const TileBase &tile() const override { return *tile_; }
  std::unique_ptr<LayerBase> clone() const override;

  /// Patch vector at output position (oy, ox); zero padding outside.
  std::vector<double> unfold_patch(std::span<const double> x, int oy, int ox) const;

private:
  std::unique_ptr<TileBase> tile_;
  int in_channels_, out_channels_, kernel_, stride_, padding_, in_h_, in_w_;
  int out_h_ = 0, out_w_ = 0;
  BiasMode bias_mode_ = BiasMode::digital;
  Activation act_ = Activation::identity;
  HwAwareParams hw_;
  std::vector<double> bias_;

  bool have_cache_ = false;
  std::vector<std::vector<double>> cached_patches_;
  std::vector<double> cached_preact_;
  struct PatchGrad {
    std::vector<double> patch;
    std::vector<double> grad_col;
  };
  std::vector<PatchGrad> queued_;
  std::optional<Matrix> saved_weights_;
};

/// A stack of analog layers with digital activations in between.
class Network {
public:
  Network() = default;
  Network(const Network &other);
  Network &operator=(const Network &other);
  Network(Network &&) = default;
  Network &operator=(Network &&) = default;

  void add(std::unique_ptr<LayerBase> layer);
  int n_layers() const { return static_cast<int>(layers_.size()); }
  LayerBase &layer(int i) { return *layers_[i]; }
  const LayerBase &layer(int i) const { return *layers_[i]; }

  int in_size() const;
  int out_size() const;

  std::vector<double> forward(std::span<const double> x, bool cache);
  std::vector<double> backward(std::span<const double> grad_out);
  void apply_updates(double lr, int batch_size);
  void begin_minibatch(RngStream &rng);
  void remove_weight_noise();
  void end_minibatch();

  /// Forward with per-layer analog output scales and extra weight noise.
  std::vector<double> forward_eval(std::span<const double> x, double extra_weight_sigma,
                                   std::span<const double> output_scales);

private:
  std::vector<std::unique_ptr<LayerBase>> layers_;
};

/// Uniform init in +-1/sqrt(fan_in) per layer, biases zero. Deterministic in
/// the seed, independent of tile type.
void initialize_network(Network &net, uint64_t seed);

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad; // wrt network output
};
LossGrad loss_mse(std::span<const double> pred, std::span<const double> target);
LossGrad loss_cross_entropy(std::span<const double> logits, int label);

/// In-memory dataset: classification (integer labels, one-hot mse targets)
/// or regression (real targets).
struct Dataset {
  int n_features = 0;
  int n_outputs = 0;
  bool classification = true;
  std::vector<std::vector<double>> inputs;
  std::vector<int> labels;
  std::vector<std::vector<double>> targets;

  size_t size() const { return inputs.size(); }
  std::vector<double> target_of(size_t idx) const;
};

/// Gaussian blobs around fixed class centers. The centers depend only on
/// seed; sample_salt draws fresh samples from the same distribution (e.g. a
/// held-out evaluation split).
Dataset make_blobs(int n, int features, int classes, double spread, uint64_t seed,
                   uint64_t sample_salt = 0);
/// Linear targets y = A x (+ noise); A depends only on seed.
Dataset make_regression(int n, int features, int outputs, double noise, uint64_t seed,
                        uint64_t sample_salt = 0);
/// Plain CSV, one row per sample: feature values then the label (last column).
Dataset load_csv_dataset(const std::string &path, bool classification);

struct TrainConfig {
  Loss loss = Loss::mse;
  double lr = 0.1;
  double lr_decay = 1.0; // multiplicative per epoch
  int epochs = 30;
  int batch_size = 10;
  uint64_t seed = 1234;
};

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;
  double accuracy = 0.0; // NaN for regression
};

/// Full loop: forward -> loss -> backward -> per-sample analog updates, with
/// the temporal step once per mini-batch.
std::vector<EpochStats> train(Network &net, const Dataset &data, const TrainConfig &cfg);

double evaluate_accuracy(Network &net, const Dataset &data);
double evaluate_mse(Network &net, const Dataset &data);

} // namespace xbarsim
