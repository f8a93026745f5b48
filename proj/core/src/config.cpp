#include "clickhomodyne/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace clickhomodyne {

namespace {

const char* const kRequiredKeys[] = {
    "lo_flux_hz",
    "path_efficiency",
    "split_ratio",
    "duration_ps",
    "seed",
    "detector_a_efficiency",
    "detector_a_dark_rate_hz",
    "detector_a_dead_time_ps",
    "detector_b_efficiency",
    "detector_b_dark_rate_hz",
    "detector_b_dead_time_ps",
};

const char* const kOptionalKeys[] = {
    "detector_a_latch_flux_hz",
    "detector_b_latch_flux_hz",
};

bool known_key(const std::string& key) {
  for (const char* k : kRequiredKeys)
    if (key == k) return true;
  for (const char* k : kOptionalKeys)
    if (key == k) return true;
  return false;
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("bad value for " + key + ": '" + value + "'");
  }
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  const double v = to_double(key, value);
  if (v < 0 || v != std::floor(v) || v > 1.8e19)
    throw ValidationError("bad value for " + key + ": '" + value +
                          "' (non-negative integer expected)");
  return static_cast<std::uint64_t>(v);
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

SimConfig parse_config(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError("line " + std::to_string(lineno) +
                            ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_key(key)) throw ValidationError("unknown key: " + key);
    if (kv.count(key)) throw ValidationError("duplicate key: " + key);
    kv[key] = value;
  }

  for (const char* k : kRequiredKeys)
    if (!kv.count(k)) throw ValidationError(std::string("missing key: ") + k);

  SimConfig cfg;
  cfg.lo_flux_hz = to_double("lo_flux_hz", kv["lo_flux_hz"]);
  cfg.path_efficiency = to_double("path_efficiency", kv["path_efficiency"]);
  cfg.split_ratio = to_double("split_ratio", kv["split_ratio"]);
  cfg.duration_ps = to_u64("duration_ps", kv["duration_ps"]);
  cfg.seed = to_u64("seed", kv["seed"]);
  cfg.detector_a.efficiency =
      to_double("detector_a_efficiency", kv["detector_a_efficiency"]);
  cfg.detector_a.dark_rate_hz =
      to_double("detector_a_dark_rate_hz", kv["detector_a_dark_rate_hz"]);
  cfg.detector_a.dead_time_ps =
      to_u64("detector_a_dead_time_ps", kv["detector_a_dead_time_ps"]);
  cfg.detector_b.efficiency =
      to_double("detector_b_efficiency", kv["detector_b_efficiency"]);
  cfg.detector_b.dark_rate_hz =
      to_double("detector_b_dark_rate_hz", kv["detector_b_dark_rate_hz"]);
  cfg.detector_b.dead_time_ps =
      to_u64("detector_b_dead_time_ps", kv["detector_b_dead_time_ps"]);
  if (kv.count("detector_a_latch_flux_hz"))
    cfg.detector_a.latch_flux_hz =
        to_double("detector_a_latch_flux_hz", kv["detector_a_latch_flux_hz"]);
  if (kv.count("detector_b_latch_flux_hz"))
    cfg.detector_b.latch_flux_hz =
        to_double("detector_b_latch_flux_hz", kv["detector_b_latch_flux_hz"]);
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string format_config(const SimConfig& cfg) {
  std::ostringstream out;
  out.precision(17);
  out << "lo_flux_hz=" << cfg.lo_flux_hz << '\n'
      << "path_efficiency=" << cfg.path_efficiency << '\n'
      << "split_ratio=" << cfg.split_ratio << '\n'
      << "duration_ps=" << cfg.duration_ps << '\n'
      << "seed=" << cfg.seed << '\n';
  const auto detector = [&](const char* prefix, const DetectorModel& d) {
    out << prefix << "_efficiency=" << d.efficiency << '\n'
        << prefix << "_dark_rate_hz=" << d.dark_rate_hz << '\n'
        << prefix << "_dead_time_ps=" << d.dead_time_ps << '\n';
    if (d.latch_flux_hz)
      out << prefix << "_latch_flux_hz=" << *d.latch_flux_hz << '\n';
  };
  detector("detector_a", cfg.detector_a);
  detector("detector_b", cfg.detector_b);
  return out.str();
}

void check_stream(const TimeTagStream& stream) {
  std::uint64_t prev = 0;
  bool first = true;
  for (std::uint64_t tag : stream.tags) {
    if (!first && tag <= prev)
      throw ValidationError("tags not strictly increasing");
    if (tag >= stream.duration_ps) throw ValidationError("tag out of window");
    prev = tag;
    first = false;
  }
}

SimConfig validate_config(const SimConfig& cfg) {
  std::vector<std::string> errors;
  const auto in_unit = [&](double v, const char* field) {
    if (!(v >= 0.0 && v <= 1.0))
      errors.push_back(std::string(field) + " out of [0,1]");
  };
  const auto non_negative = [&](double v, const char* field) {
    if (!(v >= 0.0) || !std::isfinite(v))
      errors.push_back(std::string(field) + " must be finite and >= 0");
  };

  non_negative(cfg.lo_flux_hz, "lo_flux_hz");
  in_unit(cfg.path_efficiency, "path_efficiency");
  in_unit(cfg.split_ratio, "split_ratio");
  if (cfg.duration_ps == 0) errors.push_back("duration_ps must be > 0");
  in_unit(cfg.detector_a.efficiency, "detector_a_efficiency");
  in_unit(cfg.detector_b.efficiency, "detector_b_efficiency");
  non_negative(cfg.detector_a.dark_rate_hz, "detector_a_dark_rate_hz");
  non_negative(cfg.detector_b.dark_rate_hz, "detector_b_dark_rate_hz");
  const auto check_latch = [&](const DetectorModel& d, double arm_fraction,
                               const char* field) {
    if (d.latch_flux_hz && *d.latch_flux_hz <= 0)
      errors.push_back(std::string(field) + " must be > 0");
    else if (d.latch_flux_hz) {
      const double arriving =
          cfg.lo_flux_hz * cfg.path_efficiency * arm_fraction;
      if (arriving > *d.latch_flux_hz)
        errors.push_back(std::string("detector latched: ") + field);
    }
  };
  check_latch(cfg.detector_a, cfg.split_ratio, "detector_a_latch_flux_hz");
  check_latch(cfg.detector_b, 1.0 - cfg.split_ratio, "detector_b_latch_flux_hz");

  if (!errors.empty()) {
    std::string msg = "invalid config:";
    for (const auto& e : errors) msg += "\n  " + e;
    throw ValidationError(msg);
  }
  return cfg;
}

}  // namespace clickhomodyne
