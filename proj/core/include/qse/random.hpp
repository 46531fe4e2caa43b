#pragma once

#include <cstdint>

namespace qse {

/// splitmix64 finalizer; maps (master seed, stream index) to an independent
/// 64-bit seed so that per-trial streams do not depend on execution order.
[[nodiscard]] constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace qse
