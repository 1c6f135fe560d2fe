#include "wlda/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "wlda/errors.hpp"

namespace wlda::nn {

std::vector<Vector> finite_diff_grad(const std::function<double()>& loss, const ParamBlocks& params, double h) {
  if (!(h > 0.0)) throw InvalidArgument("finite_diff_grad: step must be positive");
  std::vector<Vector> out;
  out.reserve(params.size());
  for (auto block : params) {
    Vector g(block.size(), 0.0);
    for (std::size_t i = 0; i < block.size(); ++i) {
      const double saved = block[i];
      block[i] = saved + h;
      const double up = loss();
      block[i] = saved - h;
      const double down = loss();
      block[i] = saved;
      g[i] = (up - down) / (2.0 * h);
    }
    out.push_back(std::move(g));
  }
  return out;
}

double max_relative_error(const std::vector<std::span<const double>>& analytic, const std::vector<Vector>& numeric,
                          double floor) {
  if (analytic.size() != numeric.size()) throw DimensionError("max_relative_error: block count mismatch");
  double worst = 0.0;
  for (std::size_t b = 0; b < analytic.size(); ++b) {
    if (analytic[b].size() != numeric[b].size()) throw DimensionError("max_relative_error: block size mismatch");
    for (std::size_t i = 0; i < analytic[b].size(); ++i) {
      const double a = analytic[b][i], n = numeric[b][i];
      const double denom = std::max({std::abs(a), std::abs(n), floor});
      worst = std::max(worst, std::abs(a - n) / denom);
    }
  }
  return worst;
}

}  // namespace wlda::nn
