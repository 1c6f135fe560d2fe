#pragma once

#include <functional>
#include <span>
#include <vector>

#include "wlda/matrix.hpp"
#include "wlda/mlp.hpp"

namespace wlda::nn {

/// Central-difference gradient of `loss` with respect to every entry of
/// `params`. `loss` must read the parameters through the same storage the
/// blocks view; each entry is perturbed by +-h and restored exactly.
std::vector<Vector> finite_diff_grad(const std::function<double()>& loss, const ParamBlocks& params, double h = 1e-6);

/// max_i |a_i - n_i| / max(|a_i|, |n_i|, floor) over all blocks.
double max_relative_error(const std::vector<std::span<const double>>& analytic, const std::vector<Vector>& numeric,
                          double floor = 1e-5);

}  // namespace wlda::nn
