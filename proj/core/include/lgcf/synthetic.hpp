#pragma once

#include <cstddef>
#include <cstdint>

#include "lgcf/graph.hpp"

namespace lgcf {

// Two-block bipartite stochastic block model over `num_users` users and
// `num_items` items. The first half of each side (rounded up) forms block
// 0. Same-block pairs connect with probability p_in, cross-block pairs with
// p_out. Every node left isolated gets one edge to a random node of its own
// block (any block if its own block on the other side is empty).
// Throws DomainError for probabilities outside [0, 1] or empty sides.
BipartiteGraph make_synthetic(std::size_t num_users, std::size_t num_items, double p_in,
                              double p_out, std::uint64_t seed);

// Block (0 or 1) of a global node id in a make_synthetic graph.
int synthetic_block(NodeId v, std::size_t num_users, std::size_t num_items);

}  // namespace lgcf
