#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace fdnoma {

using Rng = std::mt19937_64;

/// Independent named streams derived from one master seed, so that e.g. the
/// arrival process is unchanged when only the topology stream is varied.
enum class Stream : std::uint32_t {
  kTopology = 1,
  kShadowing = 2,
  kArrivals = 3,
  kFading = 4,
};

inline Rng make_stream(std::uint64_t master_seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed),
                    static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x9e3779b9u};
  return Rng(seq);
}

}  // namespace fdnoma
