#include "ukrig/random.hpp"

namespace ukrig {

namespace {
std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) {
  return splitmix64(splitmix64(parent) ^ (tag * 0xd1b54a32d192ed03ULL + 1));
}

std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag) {
  // FNV-1a of the tag, then the integer path.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return derive_seed(parent, h);
}

double uniform_open(Rng& rng) {
  for (;;) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

std::size_t uniform_index(Rng& rng, std::size_t bound) {
  // Rejection avoids modulo bias.
  const std::uint64_t range = bound;
  const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % range);
  for (;;) {
    const std::uint64_t r = rng();
    if (r < limit) return static_cast<std::size_t>(r % range);
  }
}

}  // namespace ukrig
