#include "lgcf/synthetic.hpp"

#include <algorithm>
#include <random>
#include <vector>

#include "lgcf/errors.hpp"
#include "lgcf/random.hpp"

namespace lgcf {
namespace {

std::size_t first_half(std::size_t n) { return (n + 1) / 2; }

}  // namespace

int synthetic_block(NodeId v, std::size_t num_users, std::size_t num_items) {
  if (v < num_users) return v < first_half(num_users) ? 0 : 1;
  const std::size_t idx = v - num_users;
  if (idx >= num_items) throw ContractViolation("node id out of range");
  return idx < first_half(num_items) ? 0 : 1;
}

BipartiteGraph make_synthetic(std::size_t num_users, std::size_t num_items, double p_in,
                              double p_out, std::uint64_t seed) {
  if (!(p_in >= 0.0 && p_in <= 1.0) || !(p_out >= 0.0 && p_out <= 1.0)) {
    throw DomainError("block probabilities must lie in [0, 1]");
  }
  if (num_users == 0 || num_items == 0) throw DomainError("synthetic graph needs users and items");

  Rng rng = make_stream({seed, stream::kSynthetic});
  const auto n = static_cast<NodeId>(num_users);
  const std::size_t uh = first_half(num_users), ih = first_half(num_items);
  const std::size_t user_lo[2] = {0, uh}, user_hi[2] = {uh, num_users};
  const std::size_t item_lo[2] = {0, ih}, item_hi[2] = {ih, num_items};

  EdgeList edges;
  std::vector<std::size_t> user_deg(num_users, 0), item_deg(num_items, 0);
  auto add = [&](std::size_t u, std::size_t i) {
    edges.push_back({static_cast<NodeId>(u), n + static_cast<NodeId>(i)});
    ++user_deg[u];
    ++item_deg[i];
  };

  // Bernoulli trials over each block pair, visiting only the successes via
  // geometric gaps.
  for (int bu = 0; bu < 2; ++bu) {
    for (int bi = 0; bi < 2; ++bi) {
      const double p = bu == bi ? p_in : p_out;
      const std::size_t rows = user_hi[bu] - user_lo[bu], cols = item_hi[bi] - item_lo[bi];
      const std::size_t cells = rows * cols;
      if (p <= 0.0 || cells == 0) continue;
      std::geometric_distribution<std::size_t> gap(std::min(p, 1.0));
      std::size_t c = p >= 1.0 ? 0 : gap(rng);
      while (c < cells) {
        add(user_lo[bu] + c / cols, item_lo[bi] + c % cols);
        const std::size_t skip = p >= 1.0 ? 0 : gap(rng);
        if (skip >= cells - c - 1) break;
        c += 1 + skip;
      }
    }
  }

  auto pick = [&](const std::size_t* lo, const std::size_t* hi, std::size_t side_size, int block) {
    if (lo[block] >= hi[block]) return uniform_index(rng, side_size);
    return lo[block] + uniform_index(rng, hi[block] - lo[block]);
  };
  for (std::size_t u = 0; u < num_users; ++u) {
    if (user_deg[u] == 0) add(u, pick(item_lo, item_hi, num_items, u < uh ? 0 : 1));
  }
  for (std::size_t i = 0; i < num_items; ++i) {
    if (item_deg[i] == 0) add(pick(user_lo, user_hi, num_users, i < ih ? 0 : 1), i);
  }

  std::sort(edges.begin(), edges.end());
  return build_graph(edges, num_users, num_items);
}

}  // namespace lgcf
