// clickhomodyne: synthesize SNSPD time-tag streams for balanced homodyne
// detection of vacuum and run the variance / clearance / g2 analyses.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "clickhomodyne/config.hpp"
#include "clickhomodyne/hbt.hpp"
#include "clickhomodyne/homodyne.hpp"
#include "clickhomodyne/rng.hpp"
#include "clickhomodyne/simgen.hpp"
#include "clickhomodyne/timetag.hpp"

namespace fs = std::filesystem;
using namespace clickhomodyne;

namespace {

// temp file + rename so parallel runs never observe partial files
void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open for writing: " + tmp.string());
    out << content;
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::uint64_t file_checksum(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return fnv1a64(buf.str());
}

// precedence: --seed flag > CLICKHOMODYNE_SEED > config file
void apply_seed(SimConfig& cfg, const std::optional<std::uint64_t>& flag_seed) {
  if (flag_seed) {
    cfg.seed = *flag_seed;
    return;
  }
  if (const char* env = std::getenv("CLICKHOMODYNE_SEED")) {
    try {
      cfg.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw ValidationError("CLICKHOMODYNE_SEED is not an integer");
    }
  }
}

std::vector<double> parse_flux_spec(const std::string& spec) {
  std::vector<double> flux;
  if (spec.rfind("log:", 0) == 0) {
    double start = 0, stop = 0;
    int points = 0;
    char colon1 = 0, colon2 = 0;
    std::istringstream in(spec.substr(4));
    if (!(in >> start) || !(in >> colon1 >> stop) ||
        !(in >> colon2 >> points) || colon1 != ':' || colon2 != ':' ||
        start <= 0 || stop <= start || points < 2)
      throw ValidationError("bad flux spec: " + spec +
                            " (expected log:<start>:<stop>:<points>)");
    const double step =
        (std::log10(stop) - std::log10(start)) / (points - 1);
    for (int i = 0; i < points; ++i)
      flux.push_back(std::pow(10.0, std::log10(start) + step * i));
    return flux;
  }
  std::istringstream in(spec);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      flux.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ValidationError("bad flux value: " + item);
    }
  }
  if (flux.empty()) throw ValidationError("empty flux list");
  return flux;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir,
                 std::optional<std::uint64_t> seed,
                 std::optional<double> duration_s) {
  SimConfig cfg = load_config(config_path);
  apply_seed(cfg, seed);
  if (duration_s)
    cfg.duration_ps = static_cast<std::uint64_t>(*duration_s * 1e12);
  validate_config(cfg);

  fs::create_directories(out_dir);
  auto [a, b] = simgen::simulate_detector_pair(cfg);
  const fs::path path_a = fs::path(out_dir) / "channel_a.ttg";
  const fs::path path_b = fs::path(out_dir) / "channel_b.ttg";
  timetag::write_stream(a, path_a);
  timetag::write_stream(b, path_b);

  std::ostringstream manifest;
  manifest << "# clickhomodyne simulate manifest\n"
           << format_config(cfg) << "channel_a_file=channel_a.ttg\n"
           << "channel_a_tags=" << a.tags.size() << '\n'
           << "channel_a_checksum=" << std::hex << file_checksum(path_a)
           << std::dec << '\n'
           << "channel_b_file=channel_b.ttg\n"
           << "channel_b_tags=" << b.tags.size() << '\n'
           << "channel_b_checksum=" << std::hex << file_checksum(path_b)
           << std::dec << '\n';
  write_file_atomic(fs::path(out_dir) / "manifest.txt", manifest.str());
  std::cout << "wrote " << path_a.string() << " (" << a.tags.size()
            << " tags), " << path_b.string() << " (" << b.tags.size()
            << " tags)\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& flux_spec,
              const std::string& out_csv, const std::string& report_path,
              std::optional<std::uint64_t> seed, double bin_width_ns,
              std::optional<double> duration_s, const std::string& durations_s,
              std::optional<double> dead_time_ns, double max_dev,
              unsigned jobs) {
  SimConfig cfg = load_config(config_path);
  apply_seed(cfg, seed);
  if (duration_s)
    cfg.duration_ps = static_cast<std::uint64_t>(*duration_s * 1e12);
  if (dead_time_ns) {
    cfg.detector_a.dead_time_ps =
        static_cast<std::uint64_t>(*dead_time_ns * 1e3);
    cfg.detector_b.dead_time_ps = cfg.detector_a.dead_time_ps;
  }
  validate_config(cfg);

  const std::vector<double> flux = parse_flux_spec(flux_spec);
  std::vector<std::uint64_t> durations;
  if (!durations_s.empty()) {
    std::istringstream in(durations_s);
    std::string item;
    while (std::getline(in, item, ','))
      durations.push_back(static_cast<std::uint64_t>(std::stod(item) * 1e12));
    if (durations.size() != flux.size())
      throw ValidationError("--durations-s length must match flux list");
  }

  const std::uint64_t bin_width_ps =
      static_cast<std::uint64_t>(bin_width_ns * 1e3);
  const auto sweep =
      homodyne::run_sweep(cfg, flux, bin_width_ps, durations, jobs);

  ClearanceResult result;
  std::string refusal;
  try {
    result = homodyne::analyze_sweep(
        sweep, homodyne::default_dark_threshold(cfg), max_dev);
  } catch (const AnalysisError& e) {
    refusal = e.what();
  }

  const double v_dc = refusal.empty() ? result.v_dc_hz : 0.0;
  const auto subtracted = homodyne::subtract_dark_variance(sweep, v_dc);
  std::ostringstream csv;
  homodyne::write_sweep_csv(csv, sweep, subtracted);
  write_file_atomic(out_csv, csv.str());

  std::ostringstream report;
  if (refusal.empty()) {
    homodyne::write_clearance_report(report, result);
  } else {
    report << "{\n  \"error\": \"" << refusal << "\"\n}\n";
  }
  write_file_atomic(report_path, report.str());

  if (!refusal.empty()) {
    std::cerr << "clearance refused: " << refusal << '\n';
    return 4;
  }
  std::cout << "v_dc_hz=" << result.v_dc_hz
            << " linear_limit_flux_hz=" << result.linear_limit_flux_hz
            << " clearance_db=" << result.clearance_db << '\n';
  return 0;
}

int cmd_analyze(const std::string& file_a, const std::string& file_b,
                const std::string& mode, const std::string& out_csv,
                double bin_width_ns, std::int64_t tau_range,
                std::uint64_t min_coincidences) {
  const TimeTagStream a = timetag::read_stream(file_a);
  const TimeTagStream b = timetag::read_stream(file_b);
  if (a.duration_ps != b.duration_ps)
    throw AnalysisError("mismatched durations between input files");
  const std::uint64_t bin_width_ps =
      static_cast<std::uint64_t>(bin_width_ns * 1e3);
  const auto binned_a = timetag::bin_counts(a, bin_width_ps);
  const auto binned_b = timetag::bin_counts(b, bin_width_ps);

  std::ostringstream csv;
  if (mode == "homodyne") {
    const auto est = homodyne::rate_normalized_variance(
        homodyne::difference_series(binned_a, binned_b));
    csv.precision(12);
    csv << "n_samples,bin_width_ns,variance_rate_hz,variance_rel_err\n"
        << binned_a.counts.size() << ',' << bin_width_ns << ','
        << est.variance_rate_hz << ',' << est.rel_err << '\n';
  } else {
    const auto curve = hbt::g2_curve(binned_a, binned_b, tau_range);
    hbt::write_g2_csv(csv, curve, min_coincidences);
  }
  if (out_csv.empty() || out_csv == "-")
    std::cout << csv.str();
  else
    write_file_atomic(out_csv, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Balanced homodyne detection with click detectors: simulation and "
      "statistical analysis"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::optional<double> duration_s;
  std::optional<double> dead_time_ns;

  auto* simulate = app.add_subcommand(
      "simulate", "Generate a pair of time-tag files from a config");
  std::string sim_config, sim_out_dir;
  simulate->add_option("config", sim_config, "key=value config file")
      ->required();
  simulate->add_option("out_dir", sim_out_dir, "output directory")->required();
  simulate->add_option("--seed", seed, "override config / env seed");
  simulate->add_option("--duration-s", duration_s,
                       "override measurement time [s]");

  auto* sweep = app.add_subcommand(
      "sweep", "Run a local-oscillator flux sweep and clearance analysis");
  std::string sweep_config, flux_spec, sweep_csv = "sweep.csv";
  std::string report_path = "clearance.json", durations_list;
  double bin_width_ns = 500.0;
  double max_dev = 0.1;
  unsigned jobs = 1;
  sweep->add_option("config", sweep_config, "key=value config file")
      ->required();
  sweep
      ->add_option("--flux", flux_spec,
                   "log:<start>:<stop>:<points> or comma list [photons/s]")
      ->required();
  sweep->add_option("--out", sweep_csv, "sweep CSV path");
  sweep->add_option("--report", report_path, "clearance report path");
  sweep->add_option("--seed", seed, "override config / env seed");
  sweep->add_option("--bin-width-ns", bin_width_ns, "integration bin width");
  sweep->add_option("--duration-s", duration_s, "per-point measurement time");
  sweep->add_option("--durations-s", durations_list,
                    "comma list of per-point measurement times");
  sweep->add_option("--dead-time-ns", dead_time_ns,
                    "override both detectors' dead time");
  sweep->add_option("--max-dev", max_dev,
                    "max log10 deviation from shot noise");
  sweep->add_option("--jobs", jobs, "parallel sweep workers");

  auto* analyze = app.add_subcommand(
      "analyze", "Analyze a pair of time-tag files (homodyne or g2)");
  std::string file_a, file_b, mode, analyze_csv;
  std::int64_t tau_range = 20;
  std::uint64_t min_coincidences = 10;
  analyze->add_option("file_a", file_a, "channel A .ttg file")->required();
  analyze->add_option("file_b", file_b, "channel B .ttg file")->required();
  analyze->add_option("--mode", mode, "homodyne or g2")
      ->required()
      ->check(CLI::IsMember({"homodyne", "g2"}));
  analyze->add_option("--out", analyze_csv, "output CSV path ('-' = stdout)");
  analyze->add_option("--bin-width-ns", bin_width_ns, "integration bin width");
  analyze->add_option("--tau-range", tau_range, "g2 shift range [bins]");
  analyze->add_option("--min-coincidences", min_coincidences,
                      "flag g2 points with fewer coincidences");

  try {
    app.parse(argc, argv);
    if (simulate->parsed())
      return cmd_simulate(sim_config, sim_out_dir, seed, duration_s);
    if (sweep->parsed())
      return cmd_sweep(sweep_config, flux_spec, sweep_csv, report_path, seed,
                       bin_width_ns, duration_s, durations_list, dead_time_ns,
                       max_dev, jobs);
    return cmd_analyze(file_a, file_b, mode, analyze_csv, bin_width_ns,
                       tau_range, min_coincidences);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return 3;
  } catch (const AnalysisError& e) {
    std::cerr << "analysis error: " << e.what() << '\n';
    return 4;
  }
}
