#include "clickhomodyne/rng.hpp"

namespace clickhomodyne {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::mt19937_64 make_engine(const RngSpec& spec) {
  const std::uint64_t mixed = splitmix64(spec.seed ^ fnv1a64(spec.stream_label));
  return std::mt19937_64(mixed);
}

}  // namespace clickhomodyne
