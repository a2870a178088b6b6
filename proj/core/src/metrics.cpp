#include "lgcf/metrics.hpp"

#include <cmath>

#include "lgcf/errors.hpp"

namespace lgcf {

int hr_at_k(std::size_t rank, std::size_t k) {
  if (rank < 1) throw ContractViolation("ranks are 1-based");
  return rank <= k ? 1 : 0;
}

double ndcg_at_k(std::size_t rank, std::size_t k) {
  if (rank < 1) throw ContractViolation("ranks are 1-based");
  return rank <= k ? 1.0 / std::log2(static_cast<double>(rank) + 1.0) : 0.0;
}

}  // namespace lgcf
