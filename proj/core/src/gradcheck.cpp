#include "lgcf/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "lgcf/errors.hpp"

namespace lgcf {

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

GradCheckReport grad_check(const std::function<double()>& loss,
                           std::span<const std::span<double>> params,
                           std::span<const std::span<const double>> analytic,
                           const GradCheckOptions& options) {
  if (params.size() != analytic.size()) throw ContractViolation("grad_check: block mismatch");
  GradCheckReport report;
  for (std::size_t b = 0; b < params.size(); ++b) {
    if (params[b].size() != analytic[b].size()) {
      throw ContractViolation("grad_check: block size mismatch");
    }
    for (std::size_t j = 0; j < params[b].size(); ++j) {
      double& x = params[b][j];
      const double saved = x;
      x = saved + options.step;
      const double up = loss();
      x = saved - options.step;
      const double down = loss();
      x = saved;
      const double numeric = (up - down) / (2.0 * options.step);
      const double err = relative_error(analytic[b][j], numeric, options.floor);
      if (err > report.max_rel_error) {
        report.max_rel_error = err;
        report.worst_block = b;
        report.worst_index = j;
      }
      ++report.checked;
    }
  }
  report.passed = report.max_rel_error < options.tolerance;
  return report;
}

}  // namespace lgcf
