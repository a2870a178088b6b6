#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lgcf/adam.hpp"
#include "lgcf/models.hpp"

namespace lgcf {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  Model model;
  std::vector<AdamState> optimizers;
};

// Text container; layout in docs/checkpoint-format.md. Doubles are written
// in shortest round-trip form, so save/load is exact.
void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);  // throws ParseError
void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace lgcf
