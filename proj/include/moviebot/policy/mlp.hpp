#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "moviebot/util/rng.hpp"

namespace moviebot::policy {

// Feed-forward net, ReLU on hidden layers, identity output.
//
// Parameters live in one flat vector, layer by layer: the weight matrix
// (fan_out x fan_in, row-major) followed by the bias (fan_out).
class Mlp {
 public:
  // Zero-initialized. sizes = {in, hidden..., out}, at least two entries.
  explicit Mlp(std::vector<std::size_t> sizes);
  // He-uniform weights, zero biases.
  static Mlp he_uniform(std::vector<std::size_t> sizes, Rng& rng);

  const std::vector<std::size_t>& sizes() const { return sizes_; }
  std::size_t input_size() const { return sizes_.front(); }
  std::size_t output_size() const { return sizes_.back(); }
  std::size_t num_params() const { return params_.size(); }
  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }

  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + sizes_[layer] * sizes_[layer + 1];
  }

  // Throws DimensionError on a wrong input length.
  std::vector<double> forward(std::span<const double> x) const;

  // Activations of every layer (input first, output last), for backward.
  struct Tape {
    std::vector<std::vector<double>> activations;
    const std::vector<double>& output() const { return activations.back(); }
  };
  Tape forward_tape(std::span<const double> x) const;

  // Adds dLoss/dparams to grad (size num_params()) given dLoss/doutput.
  void backward(const Tape& tape, std::span<const double> output_grad,
                std::span<double> grad) const;

  bool operator==(const Mlp& other) const = default;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;
  std::vector<double> params_;
};

// Gradient of a scalar loss for one input; fresh vector.
std::vector<double> mlp_grad(const Mlp& net, std::span<const double> x,
                             std::span<const double> output_grad);

// Row-per-input batch evaluation. The OpenMP version splits rows across
// threads and returns exactly the serial result.
std::vector<std::vector<double>> forward_batch_serial(const Mlp& net,
                                                      const std::vector<std::vector<double>>& xs);
std::vector<std::vector<double>> forward_batch_parallel(
    const Mlp& net, const std::vector<std::vector<double>>& xs);

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> v);

}  // namespace moviebot::policy
