#include "moviebot/policy/mlp.hpp"

#include <cmath>

#include "moviebot/util/errors.hpp"

namespace moviebot::policy {

Mlp::Mlp(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.size() < 2) throw DimensionError("an MLP needs input and output sizes");
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    if (sizes_[l] == 0 || sizes_[l + 1] == 0) throw DimensionError("layer sizes must be positive");
    offsets_.push_back(total);
    total += (sizes_[l] + 1) * sizes_[l + 1];
  }
  params_.assign(total, 0.0);
}

Mlp Mlp::he_uniform(std::vector<std::size_t> sizes, Rng& rng) {
  Mlp net(std::move(sizes));
  for (std::size_t l = 0; l + 1 < net.sizes_.size(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(net.sizes_[l]));
    const std::size_t n = net.sizes_[l] * net.sizes_[l + 1];
    for (std::size_t j = 0; j < n; ++j) net.params_[net.offsets_[l] + j] = rng.uniform(-limit, limit);
  }
  return net;
}

Mlp::Tape Mlp::forward_tape(std::span<const double> x) const {
  if (x.size() != input_size()) {
    throw DimensionError("MLP input has " + std::to_string(x.size()) + " values, expected " +
                         std::to_string(input_size()));
  }
  Tape tape;
  tape.activations.emplace_back(x.begin(), x.end());
  const std::size_t layers = sizes_.size() - 1;
  for (std::size_t l = 0; l < layers; ++l) {
    const auto& in = tape.activations.back();
    const std::size_t fi = sizes_[l], fo = sizes_[l + 1];
    const double* w = &params_[weight_offset(l)];
    const double* b = &params_[bias_offset(l)];
    std::vector<double> out(fo);
    for (std::size_t o = 0; o < fo; ++o) {
      double s = b[o];
      const double* row = w + o * fi;
      for (std::size_t i = 0; i < fi; ++i) s += row[i] * in[i];
      out[o] = (l + 1 < layers && s < 0.0) ? 0.0 : s;
    }
    tape.activations.push_back(std::move(out));
  }
  return tape;
}

std::vector<double> Mlp::forward(std::span<const double> x) const {
  return std::move(forward_tape(x).activations.back());
}

void Mlp::backward(const Tape& tape, std::span<const double> output_grad,
                   std::span<double> grad) const {
  if (output_grad.size() != output_size()) throw DimensionError("output gradient size mismatch");
  if (grad.size() != num_params()) throw DimensionError("gradient buffer size mismatch");
  const std::size_t layers = sizes_.size() - 1;
  std::vector<double> delta(output_grad.begin(), output_grad.end());
  for (std::size_t l = layers; l-- > 0;) {
    const std::size_t fi = sizes_[l], fo = sizes_[l + 1];
    const auto& in = tape.activations[l];
    const double* w = &params_[weight_offset(l)];
    double* gw = &grad[weight_offset(l)];
    double* gb = &grad[bias_offset(l)];
    for (std::size_t o = 0; o < fo; ++o) {
      gb[o] += delta[o];
      double* grow = gw + o * fi;
      for (std::size_t i = 0; i < fi; ++i) grow[i] += delta[o] * in[i];
    }
    if (l == 0) break;
    // Hidden activations are ReLU outputs: the derivative is 1 where the
    // activation is positive.
    std::vector<double> prev(fi, 0.0);
    for (std::size_t o = 0; o < fo; ++o) {
      const double* row = w + o * fi;
      for (std::size_t i = 0; i < fi; ++i) prev[i] += row[i] * delta[o];
    }
    for (std::size_t i = 0; i < fi; ++i) {
      if (in[i] <= 0.0) prev[i] = 0.0;
    }
    delta = std::move(prev);
  }
}

std::vector<double> mlp_grad(const Mlp& net, std::span<const double> x,
                             std::span<const double> output_grad) {
  std::vector<double> g(net.num_params(), 0.0);
  net.backward(net.forward_tape(x), output_grad, g);
  return g;
}

std::vector<std::vector<double>> forward_batch_serial(const Mlp& net,
                                                      const std::vector<std::vector<double>>& xs) {
  std::vector<std::vector<double>> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(net.forward(x));
  return out;
}

std::vector<std::vector<double>> forward_batch_parallel(
    const Mlp& net, const std::vector<std::vector<double>>& xs) {
  for (const auto& x : xs) {
    if (x.size() != net.input_size()) throw DimensionError("MLP batch row has the wrong size");
  }
  std::vector<std::vector<double>> out(xs.size());
  const auto n = static_cast<std::ptrdiff_t>(xs.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] = net.forward(xs[static_cast<std::size_t>(i)]);
  }
  return out;
}

std::size_t argmax(std::span<const double> v) {
  if (v.empty()) throw DimensionError("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace moviebot::policy
