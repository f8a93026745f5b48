#pragma once

#include <ostream>
#include <vector>

#include "clickhomodyne/types.hpp"

namespace clickhomodyne::hbt {

/// g2 estimator at one bin shift. Both series are clamped to events first;
/// over the overlap region of n_bins: c = sum a[i]*b[i+tau], s1 = sum a[i],
/// s2 = sum b[i+tau], g2 = n_bins*c/(s1*s2). The error bar
/// g2*sqrt(n_bins*(1-s1/n_bins)*(1-s2/n_bins)/(s1*s2)) is first-order
/// propagation of the counting noise including the coincidence/singles
/// correlation; it reduces to g2/sqrt(c) at low bin occupancy. With c = 0
/// the estimate is 0 and the error is flagged undefined. s1*s2 = 0 is an
/// error ("insufficient singles").
G2Estimate g2_at_shift(const BinnedCounts& a, const BinnedCounts& b,
                       std::int64_t tau_bins);

/// g2_at_shift for every tau in [-tau_range, +tau_range].
G2Curve g2_curve(const BinnedCounts& a, const BinnedCounts& b,
                 std::int64_t tau_range);

struct FluxBinnedPair {
  double flux_hz = 0.0;
  BinnedCounts a;
  BinnedCounts b;
};

/// g2(0) per flux point. Zero-coincidence points are reported with g2 = 0
/// and err_defined = false rather than raising.
std::vector<std::pair<double, G2Estimate>> g2_flux_scan(
    const std::vector<FluxBinnedPair>& points);

/// CSV: tau_bins,tau_ns,coincidences,singles_1,singles_2,n_bins,g2,g2_err,flag
void write_g2_csv(std::ostream& out, const G2Curve& curve,
                  std::uint64_t min_coincidences = 0);

}  // namespace clickhomodyne::hbt
