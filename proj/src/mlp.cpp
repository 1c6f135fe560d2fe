#include "wlda/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "wlda/errors.hpp"

namespace wlda {

namespace nn {

void softmax_inplace(std::span<double> v) {
  const double mx = *std::max_element(v.begin(), v.end());
  double sum = 0.0;
  for (double& x : v) {
    x = std::exp(x - mx);
    sum += x;
  }
  const double inv = 1.0 / sum;
  for (double& x : v) x *= inv;
}

SimplexVector softmax(std::span<const double> logits) {
  if (logits.empty()) throw DimensionError("softmax: empty input");
  if (!all_finite(logits)) throw NumericError("softmax: non-finite logit");
  std::vector<double> out(logits.begin(), logits.end());
  softmax_inplace(out);
  return SimplexVector::from_normalized(std::move(out));
}

double activate(Activation act, double x) noexcept {
  switch (act) {
    case Activation::softplus:
      return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
    case Activation::leaky_relu:
      return x > 0.0 ? x : kLeakySlope * x;
  }
  return x;
}

double activate_derivative(Activation act, double x) noexcept {
  switch (act) {
    case Activation::softplus:
      return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    case Activation::leaky_relu:
      return x > 0.0 ? 1.0 : kLeakySlope;
  }
  return 1.0;
}

std::vector<std::size_t> MlpParams::layer_sizes() const {
  std::vector<std::size_t> sizes;
  if (layers.empty()) return sizes;
  sizes.push_back(input_dim());
  for (const auto& l : layers) sizes.push_back(l.weight.rows());
  return sizes;
}

ParamBlocks MlpParams::blocks() {
  ParamBlocks b;
  b.reserve(2 * layers.size());
  for (auto& l : layers) {
    b.push_back(l.weight.data());
    b.push_back(l.bias);
  }
  return b;
}

void MlpParams::fill(double v) {
  for (auto& l : layers) {
    l.weight.fill(v);
    std::fill(l.bias.begin(), l.bias.end(), v);
  }
}

MlpParams init_mlp(std::span<const std::size_t> sizes, Activation activation, Rng& rng) {
  if (sizes.size() < 2) throw DimensionError("init_mlp: need at least input and output sizes");
  for (std::size_t s : sizes)
    if (s == 0) throw DimensionError("init_mlp: layer widths must be positive");
  MlpParams p;
  p.activation = activation;
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
    const std::size_t in = sizes[i], out = sizes[i + 1];
    Layer l{Matrix(out, in), Vector(out, 0.0)};
    const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    for (double& w : l.weight.data()) w = (2.0 * rng.uniform() - 1.0) * bound;
    p.layers.push_back(std::move(l));
  }
  return p;
}

MlpParams zeros_like(const MlpParams& params) {
  MlpParams z;
  z.activation = params.activation;
  for (const auto& l : params.layers) z.layers.push_back({Matrix(l.weight.rows(), l.weight.cols()), Vector(l.bias.size(), 0.0)});
  return z;
}

MlpForward mlp_forward(const MlpParams& params, std::span<const double> x) {
  if (params.layers.empty()) throw DimensionError("mlp_forward: network has no layers");
  if (x.size() != params.input_dim())
    throw DimensionError("mlp_forward: input length " + std::to_string(x.size()) + " != " +
                         std::to_string(params.input_dim()));
  MlpForward out;
  const std::size_t n = params.layers.size();
  out.cache.inputs.reserve(n);
  out.cache.pre.reserve(n);
  Vector current(x.begin(), x.end());
  for (std::size_t i = 0; i < n; ++i) {
    const Layer& l = params.layers[i];
    Vector z = matvec(l.weight, current);
    axpy(z, l.bias);
    out.cache.inputs.push_back(std::move(current));
    if (i + 1 < n) {
      current.resize(z.size());
      for (std::size_t j = 0; j < z.size(); ++j) current[j] = activate(params.activation, z[j]);
    } else {
      out.logits = z;
    }
    out.cache.pre.push_back(std::move(z));
  }
  return out;
}

void mlp_backward_accumulate(const MlpParams& params, const MlpCache& cache, std::span<const double> grad_logits,
                             MlpParams& grads, Vector* grad_input) {
  const std::size_t n = params.layers.size();
  if (cache.inputs.size() != n || cache.pre.size() != n) throw DimensionError("mlp_backward: cache does not match network depth");
  if (grads.layers.size() != n) throw DimensionError("mlp_backward: gradient container does not match network");
  if (grad_logits.size() != params.output_dim()) throw DimensionError("mlp_backward: grad_logits length mismatch");

  Vector delta(grad_logits.begin(), grad_logits.end());
  for (std::size_t i = n; i-- > 0;) {
    const Layer& l = params.layers[i];
    if (cache.inputs[i].size() != l.weight.cols() || cache.pre[i].size() != l.weight.rows())
      throw DimensionError("mlp_backward: cache shape mismatch at layer " + std::to_string(i));
    Layer& g = grads.layers[i];
    add_outer(g.weight, delta, cache.inputs[i]);
    axpy(g.bias, delta);
    if (i == 0 && grad_input == nullptr) break;
    Vector up = matvec_transposed(l.weight, delta);
    if (i == 0) {
      *grad_input = std::move(up);
      break;
    }
    const Vector& pre_prev = cache.pre[i - 1];
    for (std::size_t j = 0; j < up.size(); ++j) up[j] *= activate_derivative(params.activation, pre_prev[j]);
    delta = std::move(up);
  }
}

MlpBackward mlp_backward(const MlpParams& params, const MlpCache& cache, std::span<const double> grad_logits) {
  MlpBackward out{zeros_like(params), {}};
  mlp_backward_accumulate(params, cache, grad_logits, out.grads, &out.grad_input);
  return out;
}

}  // namespace nn
}  // namespace wlda
