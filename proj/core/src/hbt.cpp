#include "clickhomodyne/hbt.hpp"

#include <cmath>

#include "clickhomodyne/timetag.hpp"

namespace clickhomodyne::hbt {

G2Estimate g2_at_shift(const BinnedCounts& a, const BinnedCounts& b,
                       std::int64_t tau_bins) {
  if (a.bin_width_ps != b.bin_width_ps)
    throw AnalysisError("g2_at_shift: mismatched bin widths");
  if (a.counts.size() != b.counts.size())
    throw AnalysisError("g2_at_shift: mismatched lengths");
  const std::int64_t n = static_cast<std::int64_t>(a.counts.size());
  if (tau_bins >= n || -tau_bins >= n)
    throw AnalysisError("g2_at_shift: |tau| >= length");

  // overlap region: pair a[i] with b[i + tau]
  const std::int64_t begin = std::max<std::int64_t>(-tau_bins, 0);
  const std::int64_t end = n - std::max<std::int64_t>(tau_bins, 0);

  G2Estimate est;
  est.tau_bins = tau_bins;
  est.n_bins = static_cast<std::uint64_t>(end - begin);
  for (std::int64_t i = begin; i < end; ++i) {
    const std::uint32_t ai = a.counts[i] > 0 ? 1 : 0;
    const std::uint32_t bi = b.counts[i + tau_bins] > 0 ? 1 : 0;
    est.singles_1 += ai;
    est.singles_2 += bi;
    est.coincidences += ai & bi;
  }

  if (est.singles_1 == 0 || est.singles_2 == 0)
    throw AnalysisError("g2_at_shift: insufficient singles");

  const double c = static_cast<double>(est.coincidences);
  const double s1 = static_cast<double>(est.singles_1);
  const double s2 = static_cast<double>(est.singles_2);
  const double nb = static_cast<double>(est.n_bins);
  est.g2 = nb * c / (s1 * s2);
  if (est.coincidences > 0) {
    // full first-order propagation of the counting noise: the coincidence
    // count is correlated with each singles count (every coincidence is also
    // a single), which cancels part of the naive 1/c + 1/s1 + 1/s2 budget
    // and leaves (1-p1)(1-p2)/(n p1 p2) with p_i the bin occupancies
    const double p1 = s1 / nb;
    const double p2 = s2 / nb;
    est.g2_err = est.g2 * std::sqrt(nb * (1.0 - p1) * (1.0 - p2) / (s1 * s2));
    est.err_defined = true;
  }
  return est;
}

G2Curve g2_curve(const BinnedCounts& a, const BinnedCounts& b,
                 std::int64_t tau_range) {
  if (tau_range < 0) throw AnalysisError("g2_curve: negative tau range");
  if (static_cast<std::size_t>(tau_range) * 2 >= a.counts.size())
    throw AnalysisError("g2_curve: tau range too large for series");
  // clamp once up front; g2_at_shift's own clamping is then a no-op
  const BinnedCounts ca = timetag::clamp_to_events(a);
  const BinnedCounts cb = timetag::clamp_to_events(b);
  G2Curve curve;
  curve.bin_width_ps = a.bin_width_ps;
  curve.points.reserve(static_cast<std::size_t>(2 * tau_range + 1));
  for (std::int64_t tau = -tau_range; tau <= tau_range; ++tau)
    curve.points.push_back(g2_at_shift(ca, cb, tau));
  return curve;
}

std::vector<std::pair<double, G2Estimate>> g2_flux_scan(
    const std::vector<FluxBinnedPair>& points) {
  std::vector<std::pair<double, G2Estimate>> out;
  out.reserve(points.size());
  for (const auto& p : points) {
    try {
      out.emplace_back(p.flux_hz, g2_at_shift(p.a, p.b, 0));
    } catch (const AnalysisError&) {
      // not enough events at this flux: report a flagged zero instead
      G2Estimate empty;
      empty.n_bins = p.a.counts.size();
      out.emplace_back(p.flux_hz, empty);
    }
  }
  return out;
}

void write_g2_csv(std::ostream& out, const G2Curve& curve,
                  std::uint64_t min_coincidences) {
  out.precision(12);
  out << "tau_bins,tau_ns,coincidences,singles_1,singles_2,n_bins,g2,g2_err,"
         "flag\n";
  for (const auto& p : curve.points) {
    const char* flag = "ok";
    if (!p.err_defined)
      flag = "zero_coincidences";
    else if (p.coincidences < min_coincidences)
      flag = "low_statistics";
    out << p.tau_bins << ','
        << static_cast<double>(p.tau_bins) *
               static_cast<double>(curve.bin_width_ps) * 1e-3
        << ',' << p.coincidences << ',' << p.singles_1 << ',' << p.singles_2
        << ',' << p.n_bins << ',' << p.g2 << ',' << p.g2_err << ',' << flag
        << '\n';
  }
}

}  // namespace clickhomodyne::hbt
