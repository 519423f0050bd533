#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sfpe {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed configuration document or invalid parameter combination.
struct ConfigError : Error {
  using Error::Error;
};

// A sampling budget (offspring cap, tree node cap) was exhausted.
struct BudgetError : Error {
  std::uint64_t nodes_seen = 0;
  std::int64_t draw_index = -1;

  explicit BudgetError(const std::string& msg, std::uint64_t nodes = 0,
                       std::int64_t draw = -1)
      : Error(msg), nodes_seen(nodes), draw_index(draw) {}
};

// A map evaluation produced a non-finite value. Carries the (level, index)
// context when raised inside a pool or tree computation.
struct OverflowError : Error {
  int level = -1;
  std::int64_t index = -1;

  explicit OverflowError(const std::string& msg, int lvl = -1,
                         std::int64_t idx = -1)
      : Error(msg), level(lvl), index(idx) {}
};

}  // namespace sfpe
