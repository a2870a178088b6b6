#pragma once

#include <cstddef>

namespace lgcf {

// 1 iff the positive sits within the top k (rank is 1-based).
int hr_at_k(std::size_t rank, std::size_t k);

// 1 / log2(rank + 1) within the top k, else 0. One relevant item, so the
// ideal DCG is 1.
double ndcg_at_k(std::size_t rank, std::size_t k);

}  // namespace lgcf
