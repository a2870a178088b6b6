#include "lgcf/adam.hpp"

#include <cmath>

#include "lgcf/errors.hpp"
#include "lgcf/gnn.hpp"

namespace lgcf {

void adam_step(std::span<const std::span<double>> params,
               std::span<const std::span<const double>> grads, AdamState& state) {
  if (params.size() != grads.size()) throw ContractViolation("adam: block count mismatch");
  if (state.step == 0 && state.first.empty()) {
    for (auto p : params) {
      state.first.emplace_back(p.size(), 0.0);
      state.second.emplace_back(p.size(), 0.0);
    }
  }
  if (state.first.size() != params.size()) {
    throw ContractViolation("adam: parameter layout changed between steps");
  }
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (params[b].size() != grads[b].size() || params[b].size() != state.first[b].size()) {
      throw ContractViolation("adam: block size mismatch");
    }
  }

  const auto& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correct1 = 1.0 - std::pow(c.beta1, t);
  const double correct2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto p = params[b];
    auto g = grads[b];
    auto& m = state.first[b];
    auto& v = state.second[b];
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = c.beta1 * m[j] + (1.0 - c.beta1) * g[j];
      v[j] = c.beta2 * v[j] + (1.0 - c.beta2) * g[j] * g[j];
      const double m_hat = m[j] / correct1;
      const double v_hat = v[j] / correct2;
      p[j] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
    }
  }
}

void adam_step(GnnParameters& params, const GnnGradients& grads, AdamState& state) {
  auto p = params.blocks();
  auto g = grads.blocks();
  adam_step(p, g, state);
  ++params.generation;
}

}  // namespace lgcf
