#pragma once

#include <utility>

#include "clickhomodyne/rng.hpp"
#include "clickhomodyne/types.hpp"

namespace clickhomodyne::simgen {

/// Homogeneous Poisson process realization on [0, duration_ps) via
/// exponential inter-arrival sampling. Duplicate integer timestamps are
/// resolved by incrementing to the next free picosecond.
TimeTagStream generate_poisson_stream(double rate_hz, std::uint64_t duration_ps,
                                      const RngSpec& rng);

/// Routes each tag to output A with probability `ratio`, else B. The two
/// outputs partition the input; tag values are unchanged.
std::pair<TimeTagStream, TimeTagStream> beamsplitter_split(
    const TimeTagStream& stream, double ratio, const RngSpec& rng);

/// Bernoulli loss: each tag kept independently with probability keep_prob.
TimeTagStream thin_stream(const TimeTagStream& stream, double keep_prob,
                          const RngSpec& rng);

/// Sorted union of two streams of equal duration. Timestamp collisions are
/// resolved by +1 ps nudging.
TimeTagStream merge_streams(const TimeTagStream& a, const TimeTagStream& b);

/// Non-paralyzable dead-time filter: a tag is kept iff it is at least
/// dead_time_ps after the last kept tag. The first tag is always kept.
TimeTagStream apply_dead_time(const TimeTagStream& stream,
                              std::uint64_t dead_time_ps);

/// Full detection pipeline for one run: LO Poisson stream at
/// lo_flux_hz * path_efficiency, beamsplitter routing, per-arm efficiency
/// thinning, per-detector dark counts merged in before the dead-time filter.
/// Channel A has id 0, channel B id 1. All stages draw from disjoint RNG
/// substreams of cfg.seed.
std::pair<TimeTagStream, TimeTagStream> simulate_detector_pair(
    const SimConfig& cfg);

}  // namespace clickhomodyne::simgen
