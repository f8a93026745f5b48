#pragma once

#include <optional>
#include <ostream>
#include <vector>

#include "clickhomodyne/types.hpp"

namespace clickhomodyne::homodyne {

/// Vacuum quadrature variance; sets the shot-noise scale of the difference
/// signal. The rate-normalized vacuum shot-noise line equals the detected
/// local oscillator flux (slope 1 through the origin).
inline constexpr double kVacuumQuadratureVariance = 0.25;

/// diffs[i] = a.counts[i] - b.counts[i]. Bin widths and lengths must match.
DifferenceSeries difference_series(const BinnedCounts& a, const BinnedCounts& b);

struct VarianceEstimate {
  double variance_rate_hz = 0.0;
  double rel_err = 0.0;  // [1/(2n-2)]^(1/2)
};

/// Sample variance of the per-bin differences (denominator n-1) divided by
/// the bin width in seconds. Accumulation is exact integer two-pass, immune
/// to cancellation at any sample count.
VarianceEstimate rate_normalized_variance(const DifferenceSeries& d);

/// Shot-noise reference for a vacuum signal: equal to the detected LO flux.
double shot_noise_reference(double detected_flux_hz);

/// Mean variance over sweep points whose detected LO flux is below the
/// threshold; this is the dark-count noise floor V_DC.
double estimate_dark_variance(const std::vector<SweepPoint>& sweep,
                              double flux_threshold_hz);

/// Default floor-selection threshold: a tenth of the total dark rate, where
/// the LO contribution to the variance is negligible against the darks.
double default_dark_threshold(const SimConfig& cfg);

/// Dark-subtracted variances, clamped at zero. The input sweep is retained
/// unmodified alongside the returned series.
std::vector<double> subtract_dark_variance(const std::vector<SweepPoint>& sweep,
                                           double v_dc_hz);

struct LinearLimit {
  double linear_limit_flux_hz = 0.0;
  double v_lin_max_hz = 0.0;  // uncorrected variance at the limit point
};

/// Finds the upper end of the shot-noise-limited regime. A point is
/// compliant when its dark-subtracted variance is within max_dev of the
/// shot-noise reference in log10. Scanning upward in flux from the first
/// compliant point (everything below it is the dark-count floor), the limit
/// is the largest compliant flux before two consecutive points violate the
/// criterion; a single violating point is treated as a statistical dip.
LinearLimit find_linear_limit(const std::vector<SweepPoint>& sweep,
                              double v_dc_hz, double max_dev = 0.1);

/// -10*log10(v_dc / v_lin_max), in dB. Inputs must be positive.
double clearance(double v_dc_hz, double v_lin_max_hz);

/// Simulates, bins, and measures one SweepPoint per flux. durations_ps may
/// be empty (use base_cfg.duration_ps) or give a per-point override. Points
/// are independent jobs and run on `jobs` threads.
std::vector<SweepPoint> run_sweep(const SimConfig& base_cfg,
                                  const std::vector<double>& flux_list_hz,
                                  std::uint64_t bin_width_ps,
                                  const std::vector<std::uint64_t>& durations_ps = {},
                                  unsigned jobs = 1);

/// Floor estimate, dark subtraction, linear limit, and clearance in one go.
ClearanceResult analyze_sweep(const std::vector<SweepPoint>& sweep,
                              double dark_threshold_hz, double max_dev = 0.1);

/// CSV: lo_flux_set_hz,lo_flux_detected_hz,variance_rate_hz,variance_rel_err,
///      shot_noise_ref_hz,dark_subtracted_variance_hz
void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& sweep,
                     const std::vector<double>& dark_subtracted);

/// Flat JSON clearance report.
void write_clearance_report(std::ostream& out, const ClearanceResult& result);

}  // namespace clickhomodyne::homodyne
