#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "clickhomodyne/simgen.hpp"
#include "clickhomodyne/timetag.hpp"

using namespace clickhomodyne;
using namespace clickhomodyne::simgen;

namespace {
constexpr std::uint64_t kSecond = 1'000'000'000'000ULL;
}

TEST_CASE("zero rate gives an empty stream") {
  const auto s = generate_poisson_stream(0.0, kSecond, {1, "lo"});
  CHECK(s.tags.empty());
  CHECK(s.duration_ps == kSecond);
}

TEST_CASE("poisson generation is deterministic in (seed, label)") {
  const auto a = generate_poisson_stream(1e5, kSecond, {99, "lo"});
  const auto b = generate_poisson_stream(1e5, kSecond, {99, "lo"});
  const auto c = generate_poisson_stream(1e5, kSecond, {99, "dark_a"});
  const auto d = generate_poisson_stream(1e5, kSecond, {100, "lo"});
  CHECK(a == b);
  CHECK(a.tags != c.tags);
  CHECK(a.tags != d.tags);
}

TEST_CASE("poisson counts stay within the 4-sigma tail bound across seeds") {
  // P(|N - m| >= 4 sqrt(m)) ~ 6e-5, so one outlier in 1000 seeds is already
  // rare; allow at most one.
  const double rate = 1e6;
  const std::uint64_t duration = kSecond / 5;  // 0.2 s
  const double mean = rate * 0.2;
  const double bound = 4.0 * std::sqrt(mean);
  int outliers = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto s = generate_poisson_stream(rate, duration, {seed, "lo"});
    if (std::abs(static_cast<double>(s.tags.size()) - mean) >= bound)
      ++outliers;
  }
  CHECK(outliers <= 1);
}

TEST_CASE("generated streams satisfy stream invariants") {
  const auto s = generate_poisson_stream(5e6, kSecond / 10, {3, "lo"});
  CHECK_NOTHROW(check_stream(s));
}

TEST_CASE("beamsplitter at ratio 1 and 0") {
  const auto in = generate_poisson_stream(1e5, kSecond / 10, {5, "lo"});
  const auto [a1, b1] = beamsplitter_split(in, 1.0, {5, "split"});
  CHECK(a1.tags == in.tags);
  CHECK(b1.tags.empty());
  const auto [a0, b0] = beamsplitter_split(in, 0.0, {5, "split"});
  CHECK(a0.tags.empty());
  CHECK(b0.tags == in.tags);
}

TEST_CASE("beamsplitter outputs partition the input") {
  const auto in = generate_poisson_stream(2e6, kSecond / 10, {7, "lo"});
  const auto [a, b] = beamsplitter_split(in, 0.37, {7, "split"});
  CHECK(a.tags.size() + b.tags.size() == in.tags.size());
  std::vector<std::uint64_t> merged;
  std::merge(a.tags.begin(), a.tags.end(), b.tags.begin(), b.tags.end(),
             std::back_inserter(merged));
  CHECK(merged == in.tags);
}

TEST_CASE("balanced beamsplitter counts are binomial") {
  const auto in = generate_poisson_stream(1e6, kSecond, {11, "lo"});
  REQUIRE(in.tags.size() > 900'000);
  const auto [a, b] = beamsplitter_split(in, 0.5, {11, "split"});
  const double n = static_cast<double>(in.tags.size());
  const double bound = 4.0 * std::sqrt(n * 0.25);
  CHECK(std::abs(static_cast<double>(a.tags.size()) - n / 2) < bound);
}

TEST_CASE("thinning edge probabilities") {
  const auto in = generate_poisson_stream(1e5, kSecond / 10, {13, "lo"});
  CHECK(thin_stream(in, 1.0, {13, "thin_a"}).tags == in.tags);
  CHECK(thin_stream(in, 0.0, {13, "thin_a"}).tags.empty());
}

TEST_CASE("thinning a poisson stream matches the thinned rate") {
  // thinning theorem: rate lambda kept with p is poisson rate p*lambda
  const double rate = 1e6, p = 0.3;
  double total = 0;
  const int seeds = 100;
  const std::uint64_t duration = kSecond / 10;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto in = generate_poisson_stream(rate, duration, {static_cast<std::uint64_t>(seed), "lo"});
    total += static_cast<double>(
        thin_stream(in, p, {static_cast<std::uint64_t>(seed), "thin"}).tags.size());
  }
  const double expected = rate * p * 0.1 * seeds;
  CHECK(std::abs(total - expected) < 4.0 * std::sqrt(expected));
}

TEST_CASE("merge with empty is identity") {
  const auto a = generate_poisson_stream(1e5, kSecond / 10, {17, "lo"});
  TimeTagStream empty;
  empty.duration_ps = a.duration_ps;
  CHECK(merge_streams(a, empty).tags == a.tags);
  CHECK(merge_streams(empty, a).tags == a.tags);
}

TEST_CASE("merge is sorted and preserves total count") {
  const auto a = generate_poisson_stream(1e6, kSecond / 10, {19, "dark_a"});
  const auto b = generate_poisson_stream(1e6, kSecond / 10, {19, "dark_b"});
  const auto m = merge_streams(a, b);
  CHECK(m.tags.size() == a.tags.size() + b.tags.size());
  CHECK_NOTHROW(check_stream(m));
}

TEST_CASE("merge rejects mismatched durations") {
  TimeTagStream a, b;
  a.duration_ps = 100;
  b.duration_ps = 200;
  CHECK_THROWS_AS(merge_streams(a, b), AnalysisError);
}

TEST_CASE("merged poisson streams superpose rates") {
  double total = 0;
  const int seeds = 100;
  const std::uint64_t duration = kSecond / 10;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto a = generate_poisson_stream(4e5, duration, {static_cast<std::uint64_t>(seed), "x"});
    const auto b = generate_poisson_stream(6e5, duration, {static_cast<std::uint64_t>(seed), "y"});
    total += static_cast<double>(merge_streams(a, b).tags.size());
  }
  const double expected = 1e6 * 0.1 * seeds;
  CHECK(std::abs(total - expected) < 4.0 * std::sqrt(expected));
}

TEST_CASE("dead time zero is identity") {
  const auto s = generate_poisson_stream(1e6, kSecond / 10, {23, "lo"});
  CHECK(apply_dead_time(s, 0) == s);
}

TEST_CASE("dead time hand trace") {
  TimeTagStream s;
  s.duration_ps = 1'000'000;
  s.tags = {0, 50'000, 120'000};
  const auto out = apply_dead_time(s, 100'000);
  CHECK(out.tags == std::vector<std::uint64_t>{0, 120'000});
}

TEST_CASE("dead time kept rate matches lambda/(1+lambda*tau)") {
  const std::uint64_t tau = 100'000;  // 100 ns
  for (const double lambda_tau : {0.01, 0.1, 0.5}) {
    const double lambda = lambda_tau / (static_cast<double>(tau) * 1e-12);
    const std::uint64_t duration = kSecond;
    const auto in = generate_poisson_stream(lambda, duration, {29, "lo"});
    const auto out = apply_dead_time(in, tau);
    const double expected = lambda / (1.0 + lambda_tau);
    const double kept = static_cast<double>(out.tags.size());
    // variance of dead-timed counts is below poisson, so sqrt(N) is a
    // conservative sigma
    CHECK(std::abs(kept - expected) < 4.0 * std::sqrt(expected));
  }
}

TEST_CASE("dead time count is monotone in tau") {
  const auto in = generate_poisson_stream(3e6, kSecond / 10, {31, "lo"});
  std::size_t prev = in.tags.size();
  for (std::uint64_t tau : {10'000ULL, 50'000ULL, 100'000ULL, 500'000ULL}) {
    const std::size_t n = apply_dead_time(in, tau).tags.size();
    CHECK(n <= prev);
    prev = n;
  }
}

TEST_CASE("dead time makes counts sub-poissonian") {
  // lambda*tau = 0.2: Fano factor of 1 ms bins drops well below 1
  const double lambda = 2e6;
  const std::uint64_t tau = 100'000;
  const auto in = generate_poisson_stream(lambda, kSecond, {37, "lo"});
  const auto out = apply_dead_time(in, tau);
  const auto binned = timetag::bin_counts(out, 1'000'000'000ULL);  // 1 ms
  double mean = 0;
  for (auto c : binned.counts) mean += c;
  mean /= static_cast<double>(binned.counts.size());
  double var = 0;
  for (auto c : binned.counts) var += (c - mean) * (c - mean);
  var /= static_cast<double>(binned.counts.size() - 1);
  CHECK(var / mean < 1.0);
}

TEST_CASE("detector pair: dark-only counts") {
  SimConfig cfg;
  cfg.lo_flux_hz = 0.0;
  cfg.path_efficiency = 0.93;
  cfg.split_ratio = 0.5;
  cfg.detector_a = {0.93, 9.0, 100'000, {}};
  cfg.detector_b = {0.93, 9.0, 100'000, {}};
  cfg.duration_ps = 5 * kSecond;
  cfg.seed = 1;
  const auto [a, b] = simulate_detector_pair(cfg);
  // mean 45 dark counts per channel over 5 s
  CHECK(std::abs(static_cast<double>(a.tags.size()) - 45.0) <
        4.0 * std::sqrt(45.0));
  CHECK(std::abs(static_cast<double>(b.tags.size()) - 45.0) <
        4.0 * std::sqrt(45.0));
}

TEST_CASE("detector pair: per-channel rate at the paper operating point") {
  // detected total 7.3e5 photons/s -> about 3.65e5 per channel before
  // dead-time losses (lambda*tau = 0.037 gives a ~3.5% reduction)
  SimConfig cfg;
  cfg.lo_flux_hz = 7.3e5 / (0.93 * 0.93);
  cfg.path_efficiency = 0.93;
  cfg.split_ratio = 0.5;
  cfg.detector_a = {0.93, 9.0, 0, {}};
  cfg.detector_b = {0.93, 9.0, 0, {}};
  cfg.duration_ps = 5 * kSecond;
  cfg.seed = 2;
  const auto [a, b] = simulate_detector_pair(cfg);
  const double expected = 3.65e5 * 5;
  CHECK(std::abs(static_cast<double>(a.tags.size()) - expected) <
        4.0 * std::sqrt(expected));
  CHECK(std::abs(static_cast<double>(b.tags.size()) - expected) <
        4.0 * std::sqrt(expected));
}

TEST_CASE("detector pair is deterministic") {
  SimConfig cfg;
  cfg.lo_flux_hz = 1e5;
  cfg.path_efficiency = 0.93;
  cfg.split_ratio = 0.5;
  cfg.detector_a = {0.93, 9.0, 100'000, {}};
  cfg.detector_b = {0.90, 9.0, 100'000, {}};
  cfg.duration_ps = kSecond;
  cfg.seed = 77;
  const auto [a1, b1] = simulate_detector_pair(cfg);
  const auto [a2, b2] = simulate_detector_pair(cfg);
  CHECK(a1 == a2);
  CHECK(b1 == b2);

  // changing detector B must not perturb channel A's randomness upstream of
  // its own stages
  cfg.detector_b.dark_rate_hz = 500.0;
  const auto [a3, b3] = simulate_detector_pair(cfg);
  CHECK(a3 == a1);
  CHECK(b3.tags.size() > b1.tags.size());
}
