#pragma once

// Counter-based random substreams: every (master seed, stream, day) triple
// gets its own generator, so adding a stream never shifts another's draws.

#include <cstdint>
#include <random>
#include <string_view>

#include "elastic/types.hpp"

namespace elastic {

std::uint64_t splitmix64(std::uint64_t x);

/// FNV-1a of a stream name.
std::uint64_t stream_id(std::string_view name);

/// Uniform double in [0, 1) from the top 53 bits of one draw.
double uniform01(std::mt19937_64& gen);

class StreamRng {
 public:
  StreamRng() = default;
  StreamRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Fresh generator for one day of this stream.
  std::mt19937_64 for_day(Date day) const;

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
};

}  // namespace elastic
