#include "elastic/rng.hpp"

namespace elastic {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_id(std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double uniform01(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

std::mt19937_64 StreamRng::for_day(Date day) const {
  const std::uint64_t key =
      splitmix64(splitmix64(splitmix64(seed_) ^ stream_) ^ static_cast<std::uint64_t>(day.day_index));
  return std::mt19937_64(key);
}

}  // namespace elastic
