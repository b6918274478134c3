#include "matchfn/isotonic.hpp"

#include "matchfn/error.hpp"

namespace matchfn {

std::vector<double> isotonic_fit(std::span<const double> values, std::span<const double> weights) {
  if (!weights.empty() && weights.size() != values.size()) {
    throw ValidationError("isotonic_fit: weights and values differ in length");
  }
  struct Block {
    double mean;
    double weight;
    std::size_t count;
  };
  std::vector<Block> stack;
  stack.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (!(w > 0.0)) throw ValidationError("isotonic_fit: weights must be positive");
    stack.push_back({values[i], w, 1});
    // Merge while the last two blocks violate the ordering.
    while (stack.size() > 1 && stack[stack.size() - 2].mean > stack.back().mean) {
      const Block top = stack.back();
      stack.pop_back();
      Block& prev = stack.back();
      const double total = prev.weight + top.weight;
      prev.mean = (prev.mean * prev.weight + top.mean * top.weight) / total;
      prev.weight = total;
      prev.count += top.count;
    }
  }
  if (stack.size() == values.size()) return {values.begin(), values.end()};

  std::vector<double> out;
  out.reserve(values.size());
  for (const auto& b : stack) out.insert(out.end(), b.count, b.mean);
  return out;
}

}  // namespace matchfn
