#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace lgcf {

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t worst_block = 0;
  std::size_t worst_index = 0;
  bool passed = true;
};

struct GradCheckOptions {
  double step = 1e-5;
  double tolerance = 1e-4;
  // Denominator floor: |a - n| / max(|a|, |n|, floor). Coordinates whose
  // gradients are both below the floor are compared in absolute terms.
  double floor = 1e-6;
};

// Relative error used by grad_check.
double relative_error(double analytic, double numeric, double floor);

// Compares `analytic` against central differences of `loss` taken by
// nudging each coordinate of `params` in place (restored afterwards).
GradCheckReport grad_check(const std::function<double()>& loss,
                           std::span<const std::span<double>> params,
                           std::span<const std::span<const double>> analytic,
                           const GradCheckOptions& options = {});

}  // namespace lgcf
