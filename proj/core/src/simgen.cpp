#include "clickhomodyne/simgen.hpp"

#include <algorithm>
#include <cmath>

namespace clickhomodyne::simgen {

TimeTagStream generate_poisson_stream(double rate_hz, std::uint64_t duration_ps,
                                      const RngSpec& rng) {
  TimeTagStream out;
  out.duration_ps = duration_ps;
  if (rate_hz <= 0.0 || duration_ps == 0) return out;

  auto eng = make_engine(rng);
  const double mean_gap_ps = 1e12 / rate_hz;
  out.tags.reserve(static_cast<std::size_t>(
      rate_hz * static_cast<double>(duration_ps) * 1e-12 * 1.05 + 64));

  double t_ps = 0.0;
  while (true) {
    t_ps += -std::log(uniform01_open_low(eng)) * mean_gap_ps;
    if (t_ps >= static_cast<double>(duration_ps)) break;
    std::uint64_t tag = static_cast<std::uint64_t>(t_ps);
    if (!out.tags.empty() && tag <= out.tags.back()) tag = out.tags.back() + 1;
    if (tag >= duration_ps) break;  // nudged past the window
    out.tags.push_back(tag);
  }
  return out;
}

std::pair<TimeTagStream, TimeTagStream> beamsplitter_split(
    const TimeTagStream& stream, double ratio, const RngSpec& rng) {
  auto eng = make_engine(rng);
  TimeTagStream a, b;
  a.duration_ps = b.duration_ps = stream.duration_ps;
  a.channel_id = b.channel_id = stream.channel_id;
  for (std::uint64_t tag : stream.tags) {
    if (uniform01(eng) < ratio)
      a.tags.push_back(tag);
    else
      b.tags.push_back(tag);
  }
  return {std::move(a), std::move(b)};
}

TimeTagStream thin_stream(const TimeTagStream& stream, double keep_prob,
                          const RngSpec& rng) {
  auto eng = make_engine(rng);
  TimeTagStream out;
  out.duration_ps = stream.duration_ps;
  out.channel_id = stream.channel_id;
  for (std::uint64_t tag : stream.tags)
    if (uniform01(eng) < keep_prob) out.tags.push_back(tag);
  return out;
}

TimeTagStream merge_streams(const TimeTagStream& a, const TimeTagStream& b) {
  if (a.duration_ps != b.duration_ps)
    throw AnalysisError("merge_streams: mismatched durations");
  TimeTagStream out;
  out.duration_ps = a.duration_ps;
  out.channel_id = a.channel_id;
  out.tags.reserve(a.tags.size() + b.tags.size());
  std::merge(a.tags.begin(), a.tags.end(), b.tags.begin(), b.tags.end(),
             std::back_inserter(out.tags));
  // collision nudging: enforce strictly increasing
  for (std::size_t i = 1; i < out.tags.size(); ++i)
    if (out.tags[i] <= out.tags[i - 1]) out.tags[i] = out.tags[i - 1] + 1;
  while (!out.tags.empty() && out.tags.back() >= out.duration_ps)
    out.tags.pop_back();
  return out;
}

TimeTagStream apply_dead_time(const TimeTagStream& stream,
                              std::uint64_t dead_time_ps) {
  if (dead_time_ps == 0) return stream;
  TimeTagStream out;
  out.duration_ps = stream.duration_ps;
  out.channel_id = stream.channel_id;
  bool armed = true;
  std::uint64_t last_kept = 0;
  for (std::uint64_t tag : stream.tags) {
    if (armed || tag - last_kept >= dead_time_ps) {
      out.tags.push_back(tag);
      last_kept = tag;
      armed = false;
    }
  }
  return out;
}

std::pair<TimeTagStream, TimeTagStream> simulate_detector_pair(
    const SimConfig& cfg) {
  const std::uint64_t seed = cfg.seed;
  TimeTagStream lo = generate_poisson_stream(
      cfg.lo_flux_hz * cfg.path_efficiency, cfg.duration_ps, {seed, "lo"});
  auto [arm_a, arm_b] = beamsplitter_split(lo, cfg.split_ratio, {seed, "split"});

  TimeTagStream a =
      thin_stream(arm_a, cfg.detector_a.efficiency, {seed, "thin_a"});
  TimeTagStream b =
      thin_stream(arm_b, cfg.detector_b.efficiency, {seed, "thin_b"});

  // darks are merged before the dead-time filter so dark and LO clicks share
  // one dead-time budget per channel
  a = merge_streams(a, generate_poisson_stream(cfg.detector_a.dark_rate_hz,
                                               cfg.duration_ps,
                                               {seed, "dark_a"}));
  b = merge_streams(b, generate_poisson_stream(cfg.detector_b.dark_rate_hz,
                                               cfg.duration_ps,
                                               {seed, "dark_b"}));

  a = apply_dead_time(a, cfg.detector_a.dead_time_ps);
  b = apply_dead_time(b, cfg.detector_b.dead_time_ps);
  a.channel_id = 0;
  b.channel_id = 1;
  return {std::move(a), std::move(b)};
}

}  // namespace clickhomodyne::simgen
