#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace clickhomodyne {

/// Names an independent random substream of a run. Identical (seed, label)
/// pairs always produce identical sequences, so changing the parameters fed
/// to one substream never perturbs another.
struct RngSpec {
  std::uint64_t seed = 0;
  std::string stream_label;
};

/// Deterministic engine for a substream. The label is hashed (FNV-1a) and
/// mixed into the seed, so substreams of one seed are decorrelated.
std::mt19937_64 make_engine(const RngSpec& spec);

/// Uniform double in [0, 1). Hand-rolled from raw engine output so results
/// are identical across standard library implementations.
inline double uniform01(std::mt19937_64& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

/// Uniform double in (0, 1]; safe as a log() argument.
inline double uniform01_open_low(std::mt19937_64& eng) {
  return 1.0 - uniform01(eng);
}

std::uint64_t fnv1a64(std::string_view data);

}  // namespace clickhomodyne
