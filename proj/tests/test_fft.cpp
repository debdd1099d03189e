#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <vector>

#include "gbsense/fft.hpp"
#include "oracle.hpp"

using gbsense::cplx;

namespace {

std::vector<cplx> random_signal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit;
  std::vector<cplx> out(n);
  for (auto& v : out) v = cplx{unit(rng), unit(rng)};
  return out;
}

}  // namespace

TEST_CASE("forward transform matches the quadratic DFT") {
  for (std::size_t n : {1u, 2u, 16u, 33u, 40u, 256u}) {
    const auto x = random_signal(n, 100 + n);
    const auto got = gbsense::fft::forward(x);
    const auto want = oracle::naive_dft(x, -1);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      num += std::norm(got[k] - want[k]);
      den += std::norm(want[k]);
    }
    INFO("n=" << n);
    REQUIRE(std::sqrt(num) <= 1e-12 * std::sqrt(den) + 1e-15);
  }
}

TEST_CASE("inverse undoes forward") {
  for (std::size_t n : {5u, 64u, 1024u, 40960u}) {
    const auto x = random_signal(n, 7 * n);
    const auto back = gbsense::fft::inverse(gbsense::fft::forward(x));
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) worst = std::max(worst, std::abs(back[k] - x[k]));
    REQUIRE(worst < 1e-10);
  }
}

TEST_CASE("empty input stays empty") {
  REQUIRE(gbsense::fft::forward({}).empty());
  REQUIRE(gbsense::fft::inverse({}).empty());
}

TEST_CASE("Parseval holds for the unnormalized convention") {
  const auto x = random_signal(512, 11);
  const auto spec = gbsense::fft::forward(x);
  double time_power = 0.0, freq_power = 0.0;
  for (const auto& v : x) time_power += std::norm(v);
  for (const auto& v : spec) freq_power += std::norm(v);
  REQUIRE(freq_power / 512.0 == Catch::Approx(time_power).epsilon(1e-12));
}
