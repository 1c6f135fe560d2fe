#include "wlda/adam.hpp"

#include <cmath>

#include "wlda/errors.hpp"

namespace wlda::nn {

AdamState::AdamState(AdamConfig cfg, const ParamBlocks& params) : config(cfg) {
  first_moment.reserve(params.size());
  second_moment.reserve(params.size());
  for (const auto& b : params) {
    first_moment.emplace_back(b.size(), 0.0);
    second_moment.emplace_back(b.size(), 0.0);
  }
}

void adam_step(AdamState& state, const ParamBlocks& params, const std::vector<std::span<const double>>& grads) {
  if (params.size() != state.first_moment.size() || grads.size() != params.size())
    throw DimensionError("adam_step: block count mismatch");
  for (std::size_t b = 0; b < params.size(); ++b)
    if (params[b].size() != state.first_moment[b].size() || grads[b].size() != params[b].size())
      throw DimensionError("adam_step: block size mismatch");

  const AdamConfig& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto p = params[b];
    auto g = grads[b];
    auto& m = state.first_moment[b];
    auto& v = state.second_moment[b];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g[i];
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g[i] * g[i];
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.epsilon);
    }
  }
}

std::vector<std::span<const double>> as_const(const ParamBlocks& blocks) {
  return {blocks.begin(), blocks.end()};
}

}  // namespace wlda::nn
