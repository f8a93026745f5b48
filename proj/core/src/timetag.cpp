#include "clickhomodyne/timetag.hpp"

#include <array>
#include <cstring>
#include <fstream>

namespace clickhomodyne::timetag {

namespace {

constexpr std::array<char, 4> kMagic = {'T', 'T', 'G', '1'};
constexpr std::uint16_t kFormatVersion = 1;

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> buf;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    buf[i] = static_cast<char>((value >> (8 * i)) & 0xff);
  out.write(buf.data(), buf.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> buf;
  in.read(reinterpret_cast<char*>(buf.data()), buf.size());
  if (!in) throw IoError("truncated time-tag file");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i)
    value |= static_cast<T>(buf[i]) << (8 * i);
  return value;
}

}  // namespace

void write_stream(const TimeTagStream& stream,
                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint16_t>(out, kFormatVersion);
  put_le<std::uint16_t>(out, stream.channel_id);
  put_le<std::uint64_t>(out, stream.duration_ps);
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(stream.tags.size()));
  for (std::uint64_t tag : stream.tags) put_le<std::uint64_t>(out, tag);
  if (!out) throw IoError("write failed: " + path.string());
}

TimeTagStream read_stream(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());

  std::array<char, 4> magic;
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic)
    throw IoError("bad magic in " + path.string());
  if (get_le<std::uint16_t>(in) != kFormatVersion)
    throw IoError("unsupported format version in " + path.string());

  TimeTagStream stream;
  stream.channel_id = get_le<std::uint16_t>(in);
  stream.duration_ps = get_le<std::uint64_t>(in);
  const std::uint64_t count = get_le<std::uint64_t>(in);
  stream.tags.reserve(count);
  std::uint64_t prev = 0;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t tag = get_le<std::uint64_t>(in);
    if (i > 0 && tag <= prev)
      throw IoError("unsorted tags in " + path.string());
    if (tag >= stream.duration_ps)
      throw IoError("tag out of window in " + path.string());
    stream.tags.push_back(tag);
    prev = tag;
  }
  return stream;
}

BinnedCounts bin_counts(const TimeTagStream& stream,
                        std::uint64_t bin_width_ps) {
  if (bin_width_ps == 0) throw AnalysisError("bin_counts: bin width is zero");
  if (bin_width_ps > stream.duration_ps)
    throw AnalysisError("bin_counts: bin width exceeds stream duration");
  BinnedCounts out;
  out.bin_width_ps = bin_width_ps;
  out.channel_id = stream.channel_id;
  const std::uint64_t n_bins = stream.duration_ps / bin_width_ps;
  out.counts.assign(n_bins, 0);
  for (std::uint64_t tag : stream.tags) {
    const std::uint64_t bin = tag / bin_width_ps;
    if (bin < n_bins) ++out.counts[bin];  // trailing partial bin dropped
  }
  return out;
}

BinnedCounts clamp_to_events(const BinnedCounts& binned) {
  BinnedCounts out = binned;
  for (auto& c : out.counts) c = c > 0 ? 1 : 0;
  return out;
}

BinnedCounts shift_bins(const BinnedCounts& binned, std::int64_t shift) {
  const std::int64_t n = static_cast<std::int64_t>(binned.counts.size());
  if (shift >= n || -shift >= n)
    throw AnalysisError("shift_bins: |shift| >= length");
  BinnedCounts out;
  out.bin_width_ps = binned.bin_width_ps;
  out.channel_id = binned.channel_id;
  const std::int64_t begin = std::max<std::int64_t>(-shift, 0);
  const std::int64_t end = n - std::max<std::int64_t>(shift, 0);
  out.counts.assign(binned.counts.begin() + begin, binned.counts.begin() + end);
  return out;
}

void write_binned_csv(std::ostream& out, const BinnedCounts& a,
                      const BinnedCounts& b) {
  if (a.bin_width_ps != b.bin_width_ps || a.counts.size() != b.counts.size())
    throw AnalysisError("write_binned_csv: mismatched series");
  out << "bin_index,count_a,count_b,diff\n";
  for (std::size_t i = 0; i < a.counts.size(); ++i)
    out << i << ',' << a.counts[i] << ',' << b.counts[i] << ','
        << static_cast<std::int64_t>(a.counts[i]) -
               static_cast<std::int64_t>(b.counts[i])
        << '\n';
}

}  // namespace clickhomodyne::timetag
