#include "clickhomodyne/homodyne.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "clickhomodyne/simgen.hpp"
#include "clickhomodyne/timetag.hpp"

namespace clickhomodyne::homodyne {

DifferenceSeries difference_series(const BinnedCounts& a,
                                   const BinnedCounts& b) {
  if (a.bin_width_ps != b.bin_width_ps)
    throw AnalysisError("difference_series: mismatched bin widths");
  if (a.counts.size() != b.counts.size())
    throw AnalysisError("difference_series: mismatched lengths");
  DifferenceSeries d;
  d.bin_width_ps = a.bin_width_ps;
  d.diffs.resize(a.counts.size());
  for (std::size_t i = 0; i < a.counts.size(); ++i)
    d.diffs[i] = static_cast<std::int32_t>(a.counts[i]) -
                 static_cast<std::int32_t>(b.counts[i]);
  return d;
}

VarianceEstimate rate_normalized_variance(const DifferenceSeries& d) {
  const std::size_t n = d.diffs.size();
  if (n < 2) throw AnalysisError("rate_normalized_variance: need >= 2 samples");
  // Small-integer samples: int64 sums are exact, so the two-pass formula has
  // no cancellation issue.
  std::int64_t sum = 0;
  std::int64_t sum_sq = 0;
  for (std::int32_t v : d.diffs) {
    sum += v;
    sum_sq += static_cast<std::int64_t>(v) * v;
  }
  const long double mean = static_cast<long double>(sum) / n;
  const long double var_counts =
      (static_cast<long double>(sum_sq) - mean * sum) / (n - 1);
  const double bin_width_s = static_cast<double>(d.bin_width_ps) * 1e-12;
  VarianceEstimate est;
  est.variance_rate_hz = static_cast<double>(var_counts) / bin_width_s;
  est.rel_err = std::sqrt(1.0 / (2.0 * static_cast<double>(n) - 2.0));
  return est;
}

double shot_noise_reference(double detected_flux_hz) {
  if (detected_flux_hz < 0)
    throw AnalysisError("shot_noise_reference: negative flux");
  return detected_flux_hz;
}

double estimate_dark_variance(const std::vector<SweepPoint>& sweep,
                              double flux_threshold_hz) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& p : sweep) {
    if (p.lo_flux_detected_hz < flux_threshold_hz) {
      sum += p.variance_rate_hz;
      ++count;
    }
  }
  if (count == 0)
    throw AnalysisError(
        "estimate_dark_variance: no sweep points below flux threshold");
  return sum / static_cast<double>(count);
}

double default_dark_threshold(const SimConfig& cfg) {
  return 0.1 *
         (cfg.detector_a.dark_rate_hz + cfg.detector_b.dark_rate_hz);
}

std::vector<double> subtract_dark_variance(const std::vector<SweepPoint>& sweep,
                                           double v_dc_hz) {
  if (v_dc_hz < 0)
    throw AnalysisError("subtract_dark_variance: negative dark variance");
  std::vector<double> corrected;
  corrected.reserve(sweep.size());
  for (const auto& p : sweep)
    corrected.push_back(std::max(p.variance_rate_hz - v_dc_hz, 0.0));
  return corrected;
}

LinearLimit find_linear_limit(const std::vector<SweepPoint>& sweep,
                              double v_dc_hz, double max_dev) {
  if (!std::is_sorted(sweep.begin(), sweep.end(),
                      [](const SweepPoint& a, const SweepPoint& b) {
                        return a.lo_flux_detected_hz < b.lo_flux_detected_hz;
                      }))
    throw AnalysisError("find_linear_limit: sweep not sorted by flux");

  const std::vector<double> corrected = subtract_dark_variance(sweep, v_dc_hz);
  std::vector<bool> compliant(sweep.size(), false);
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const double ref = sweep[i].shot_noise_ref_hz;
    if (corrected[i] <= 0 || ref <= 0) continue;
    compliant[i] = std::abs(std::log10(corrected[i] / ref)) <= max_dev;
  }

  const auto first_it = std::find(compliant.begin(), compliant.end(), true);
  if (first_it == compliant.end())
    throw AnalysisError("find_linear_limit: no compliant points");
  const std::size_t first = static_cast<std::size_t>(first_it - compliant.begin());

  // Points below `first` sit on the dark-count floor, where the subtracted
  // variance is pure scatter. Above it, a lone violation is a statistical
  // dip; two in a row mark the end of the linear regime.
  std::size_t limit = first;
  for (std::size_t i = first + 1; i < sweep.size(); ++i) {
    if (compliant[i]) {
      limit = i;
    } else if (i + 1 >= sweep.size() || !compliant[i + 1]) {
      break;
    }
  }

  return {sweep[limit].lo_flux_detected_hz, sweep[limit].variance_rate_hz};
}

double clearance(double v_dc_hz, double v_lin_max_hz) {
  if (v_dc_hz <= 0 || v_lin_max_hz <= 0)
    throw AnalysisError("clearance: inputs must be positive");
  return -10.0 * std::log10(v_dc_hz / v_lin_max_hz);
}

namespace {

SweepPoint measure_point(SimConfig cfg, double flux_hz,
                         std::uint64_t bin_width_ps,
                         std::uint64_t duration_ps) {
  cfg.lo_flux_hz = flux_hz;
  cfg.duration_ps = duration_ps;
  auto [a, b] = simgen::simulate_detector_pair(cfg);
  const auto binned_a = timetag::bin_counts(a, bin_width_ps);
  const auto binned_b = timetag::bin_counts(b, bin_width_ps);
  const auto est =
      rate_normalized_variance(difference_series(binned_a, binned_b));

  SweepPoint p;
  p.lo_flux_set_hz = flux_hz;
  p.lo_flux_detected_hz =
      flux_hz * cfg.path_efficiency *
      (cfg.split_ratio * cfg.detector_a.efficiency +
       (1.0 - cfg.split_ratio) * cfg.detector_b.efficiency);
  p.variance_rate_hz = est.variance_rate_hz;
  p.variance_rel_err = est.rel_err;
  p.shot_noise_ref_hz = shot_noise_reference(p.lo_flux_detected_hz);
  p.n_samples = binned_a.counts.size();
  return p;
}

}  // namespace

std::vector<SweepPoint> run_sweep(const SimConfig& base_cfg,
                                  const std::vector<double>& flux_list_hz,
                                  std::uint64_t bin_width_ps,
                                  const std::vector<std::uint64_t>& durations_ps,
                                  unsigned jobs) {
  if (flux_list_hz.empty()) throw AnalysisError("run_sweep: empty flux list");
  if (!durations_ps.empty() && durations_ps.size() != flux_list_hz.size())
    throw AnalysisError("run_sweep: durations/flux length mismatch");

  std::vector<SweepPoint> points(flux_list_hz.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= flux_list_hz.size()) return;
      try {
        SimConfig cfg = base_cfg;
        // disjoint substreams per sweep point
        cfg.seed = base_cfg.seed + 0x1000 * (i + 1);
        const std::uint64_t dur =
            durations_ps.empty() ? base_cfg.duration_ps : durations_ps[i];
        points[i] = measure_point(cfg, flux_list_hz[i], bin_width_ps, dur);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };

  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::sort(points.begin(), points.end(),
            [](const SweepPoint& a, const SweepPoint& b) {
              return a.lo_flux_set_hz < b.lo_flux_set_hz;
            });
  return points;
}

ClearanceResult analyze_sweep(const std::vector<SweepPoint>& sweep,
                              double dark_threshold_hz, double max_dev) {
  if (sweep.size() < 2) throw AnalysisError("insufficient sweep");
  ClearanceResult result;
  result.v_dc_hz = estimate_dark_variance(sweep, dark_threshold_hz);
  const LinearLimit limit = find_linear_limit(sweep, result.v_dc_hz, max_dev);
  result.linear_limit_flux_hz = limit.linear_limit_flux_hz;
  result.v_lin_max_hz = limit.v_lin_max_hz;
  result.clearance_db = clearance(result.v_dc_hz, result.v_lin_max_hz);
  return result;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& sweep,
                     const std::vector<double>& dark_subtracted) {
  if (dark_subtracted.size() != sweep.size())
    throw AnalysisError("write_sweep_csv: length mismatch");
  out.precision(12);
  out << "lo_flux_set_hz,lo_flux_detected_hz,variance_rate_hz,"
         "variance_rel_err,shot_noise_ref_hz,dark_subtracted_variance_hz\n";
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const auto& p = sweep[i];
    out << p.lo_flux_set_hz << ',' << p.lo_flux_detected_hz << ','
        << p.variance_rate_hz << ',' << p.variance_rel_err << ','
        << p.shot_noise_ref_hz << ',' << dark_subtracted[i] << '\n';
  }
}

void write_clearance_report(std::ostream& out, const ClearanceResult& result) {
  out.precision(12);
  out << "{\n"
      << "  \"v_dc_hz\": " << result.v_dc_hz << ",\n"
      << "  \"v_lin_max_hz\": " << result.v_lin_max_hz << ",\n"
      << "  \"linear_limit_flux_hz\": " << result.linear_limit_flux_hz << ",\n"
      << "  \"clearance_db\": " << result.clearance_db << "\n"
      << "}\n";
}

}  // namespace clickhomodyne::homodyne
