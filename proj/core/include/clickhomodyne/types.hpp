#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace clickhomodyne {

/// Raised when a configuration value violates an invariant. Maps to exit code 2.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised on file format or filesystem problems. Maps to exit code 3.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when an analysis precondition fails. Maps to exit code 4.
struct AnalysisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Detection events of one detector channel over one measurement window.
/// Timestamps are integer picoseconds since window start, strictly increasing,
/// all below duration_ps.
struct TimeTagStream {
  std::uint16_t channel_id = 0;
  std::uint64_t duration_ps = 0;
  std::vector<std::uint64_t> tags;

  bool operator==(const TimeTagStream&) const = default;
};

/// Throws ValidationError if the stream violates ordering or window bounds.
void check_stream(const TimeTagStream& stream);

/// Physical parameters of one click detector.
struct DetectorModel {
  double efficiency = 1.0;       // [0,1]
  double dark_rate_hz = 0.0;     // counts/s
  std::uint64_t dead_time_ps = 0;
  std::optional<double> latch_flux_hz;  // hard cutoff, photons/s at the detector

  bool operator==(const DetectorModel&) const = default;
};

/// Full simulation run description: local oscillator, optics, two detectors.
struct SimConfig {
  double lo_flux_hz = 0.0;       // photons/s at the beamsplitter input
  double path_efficiency = 1.0;  // common optical losses before the detectors
  double split_ratio = 0.5;      // fraction routed to detector A
  DetectorModel detector_a;
  DetectorModel detector_b;
  std::uint64_t duration_ps = 0;
  std::uint64_t seed = 0;

  bool operator==(const SimConfig&) const = default;
};

/// Counts per fixed-width bin for one channel. Trailing partial bin dropped.
struct BinnedCounts {
  std::uint64_t bin_width_ps = 0;
  std::uint16_t channel_id = 0;
  std::vector<std::uint32_t> counts;

  bool operator==(const BinnedCounts&) const = default;
};

/// Per-bin channel difference counts_A - counts_B.
struct DifferenceSeries {
  std::uint64_t bin_width_ps = 0;
  std::vector<std::int32_t> diffs;
};

/// One flux point of a variance sweep.
struct SweepPoint {
  double lo_flux_set_hz = 0.0;       // before path losses
  double lo_flux_detected_hz = 0.0;  // expected detected LO flux, both detectors
  double variance_rate_hz = 0.0;     // rate-normalized difference variance
  double variance_rel_err = 0.0;
  double shot_noise_ref_hz = 0.0;
  std::uint64_t n_samples = 0;
};

/// Aggregate linearity and clearance analysis of a sweep.
struct ClearanceResult {
  double v_dc_hz = 0.0;
  double v_lin_max_hz = 0.0;
  double linear_limit_flux_hz = 0.0;
  double clearance_db = 0.0;
};

/// Second-order correlation estimate at one bin shift.
struct G2Estimate {
  std::int64_t tau_bins = 0;
  std::uint64_t coincidences = 0;
  std::uint64_t singles_1 = 0;
  std::uint64_t singles_2 = 0;
  std::uint64_t n_bins = 0;
  double g2 = 0.0;
  double g2_err = 0.0;
  bool err_defined = false;  // false when coincidences are zero
};

/// g2 estimates over a symmetric range of bin shifts, ordered by tau.
struct G2Curve {
  std::uint64_t bin_width_ps = 0;
  std::vector<G2Estimate> points;
};

}  // namespace clickhomodyne
