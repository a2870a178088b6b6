#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace lgcf {

struct GnnParameters;
struct GnnGradients;

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Moment buffers mirror the parameter blocks they were first stepped with.
struct AdamState {
  AdamConfig config;
  std::vector<std::vector<double>> first;
  std::vector<std::vector<double>> second;
  std::uint64_t step = 0;
};

// One bias-corrected Adam update. Throws ContractViolation if the block
// layout changed since the first step.
void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state);

// Convenience overload; also bumps params.generation.
void adam_step(GnnParameters& params, const GnnGradients& grads, AdamState& state);

}  // namespace lgcf
