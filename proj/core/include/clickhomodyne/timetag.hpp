#pragma once

#include <filesystem>
#include <ostream>

#include "clickhomodyne/types.hpp"

namespace clickhomodyne::timetag {

// Time-tag file, little-endian:
//   magic "TTG1" (4 bytes), format version u16 = 1, channel_id u16,
//   duration_ps u64, tag_count u64, tag_count x u64 timestamps
// read_stream(write_stream(s)) == s bit-exactly.

void write_stream(const TimeTagStream& stream, const std::filesystem::path& path);
TimeTagStream read_stream(const std::filesystem::path& path);

/// counts[i] = number of tags in [i*w, (i+1)*w); the trailing partial bin is
/// dropped, never zero-padded.
BinnedCounts bin_counts(const TimeTagStream& stream, std::uint64_t bin_width_ps);

/// Maps every count to min(count, 1): multiple clicks within one bin are
/// treated as a single event. Idempotent.
BinnedCounts clamp_to_events(const BinnedCounts& binned);

/// Displaces the series by `shift` bins and truncates to the overlap with an
/// unshifted series of the same length, so result[i] pairs with
/// other[i + max(shift, 0)].
BinnedCounts shift_bins(const BinnedCounts& binned, std::int64_t shift);

/// CSV export of two binned channels: `bin_index,count_a,count_b,diff`.
void write_binned_csv(std::ostream& out, const BinnedCounts& a,
                      const BinnedCounts& b);

}  // namespace clickhomodyne::timetag
