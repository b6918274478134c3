#pragma once

#include <span>
#include <vector>

namespace matchfn {

/// Least-squares nondecreasing fit by pool-adjacent-violators. Weights
/// default to one. Returns the input unchanged when it is already monotone.
std::vector<double> isotonic_fit(std::span<const double> values, std::span<const double> weights = {});

}  // namespace matchfn
