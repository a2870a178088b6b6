#pragma once

#include <cstddef>
#include <vector>

#include "lgcf/evaluate.hpp"

namespace lgcf {

// Group sizes for `pairs` items in `groups` contiguous groups; the first
// pairs % groups groups get one extra.
std::vector<std::size_t> group_sizes(std::size_t pairs, std::size_t groups);

// Test pairs sorted (stably) by the mean train degree of their endpoints,
// cut into n_groups contiguous groups, each evaluated on its own. The
// overall metrics cover all test pairs. Throws DomainError if n_groups is 0.
EvalReport degree_probe(const Scorer& scorer, const SplitSpec& split, const EvalProtocol& protocol,
                        std::size_t n_groups = 5);

}  // namespace lgcf
