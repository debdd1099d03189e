#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "gbsense/pattern.hpp"
#include "oracle.hpp"

using namespace gbsense;

namespace {

const std::vector<int> kPaperCosets{0, 1, 5, 9, 16, 22, 31, 38};

void require_error(errc code, const std::function<void()>& fn) {
  try {
    fn();
    FAIL("expected " << errc_name(code));
  } catch (const Error& e) {
    REQUIRE(e.code() == code);
  }
}

}  // namespace

TEST_CASE("validate accepts the stock 8-lane instance") {
  const auto p = validate_pattern(8, 40, kPaperCosets, 50e6);
  REQUIRE(p.num_lanes == 8);
  REQUIRE(p.grid_factor == 40);
  REQUIRE(p.cosets == kPaperCosets);
  REQUIRE(p.lane_rate_hz == 50e6);
  REQUIRE(p.grid_rate_hz() == Catch::Approx(2e9));
  REQUIRE(p.average_rate_hz() == Catch::Approx(400e6));
}

TEST_CASE("validate rejects malformed patterns") {
  require_error(errc::too_few_lanes, [] { validate_pattern(2, 2, {0, 1}); });
  require_error(errc::duplicate_coset, [] { validate_pattern(3, 8, {0, 2, 2}); });
  require_error(errc::not_sorted, [] { validate_pattern(3, 8, {0, 3, 2}); });
  require_error(errc::coset_out_of_range, [] { validate_pattern(2, 8, {0, 9}); });
  require_error(errc::coset_out_of_range, [] { validate_pattern(2, 8, {0, -1}); });
  require_error(errc::first_coset_nonzero, [] { validate_pattern(2, 8, {1, 2}); });
  require_error(errc::invalid_dimensions, [] { validate_pattern(3, 8, {0, 1}); });
}

TEST_CASE("hardware delay grid predicate is exactly divisibility of 80") {
  for (int L = 2; L <= 80; ++L) {
    const auto p = validate_pattern(1, L, {0}, 50e6);
    INFO("L=" << L);
    REQUIRE(check_hardware_delay_grid(p) == (80 % L == 0));
  }
  // a coarser clock step changes the set
  const auto p40 = validate_pattern(1, 40, {0}, 50e6);
  REQUIRE(check_hardware_delay_grid(p40, 500e-12));
  const auto p80 = validate_pattern(1, 80, {0}, 50e6);
  REQUIRE_FALSE(check_hardware_delay_grid(p80, 500e-12));
}

TEST_CASE("sensing matrix structure") {
  const auto pattern = validate_pattern(8, 40, kPaperCosets, 50e6);
  const auto A = build_sensing_matrix(pattern);
  REQUIRE(A.entries.rows() == 8);
  REQUIRE(A.entries.cols() == 40);

  SECTION("all 320 entries are unit modulus") {
    for (Eigen::Index p = 0; p < 8; ++p)
      for (Eigen::Index l = 0; l < 40; ++l)
        REQUIRE(std::abs(std::abs(A.entries(p, l)) - 1.0) < 1e-12);
  }
  SECTION("zero-shift column and zero-coset row are exactly ones") {
    for (Eigen::Index p = 0; p < 8; ++p) REQUIRE(A.entries(p, 0) == cplx{1.0, 0.0});
    for (Eigen::Index l = 0; l < 40; ++l) REQUIRE(A.entries(0, l) == cplx{1.0, 0.0});
  }
  SECTION("columns have norm sqrt(P)") {
    for (Eigen::Index l = 0; l < 40; ++l)
      REQUIRE(A.entries.col(l).norm() == Catch::Approx(std::sqrt(8.0)).epsilon(1e-12));
  }
  SECTION("construction is reproducible bit for bit") {
    const auto B = build_sensing_matrix(pattern);
    REQUIRE(A.entries == B.entries);
  }
}

TEST_CASE("sensing matrix sign convention") {
  // second row for cosets {0,1} on a 4-grid: e^{+j 2 pi l / 4}
  const auto A = build_sensing_matrix(validate_pattern(2, 4, {0, 1}));
  REQUIRE(std::abs(A.entries(1, 0) - cplx{1, 0}) < 1e-12);
  REQUIRE(std::abs(A.entries(1, 1) - cplx{0, 1}) < 1e-12);
  REQUIRE(std::abs(A.entries(1, 2) - cplx{-1, 0}) < 1e-12);
  REQUIRE(std::abs(A.entries(1, 3) - cplx{0, -1}) < 1e-12);
}

TEST_CASE("coherence") {
  SECTION("full coset set is orthogonal") {
    // P = L is outside the compressive regime, built directly
    SamplingPattern full{8, 8, {0, 1, 2, 3, 4, 5, 6, 7}, 50e6};
    REQUIRE(pattern_coherence(build_sensing_matrix(full)) < 1e-10);
  }
  SECTION("aliased half-grid cosets give identical columns") {
    const auto A = build_sensing_matrix(validate_pattern(2, 4, {0, 2}));
    REQUIRE(pattern_coherence(A) == Catch::Approx(1.0).epsilon(1e-12));
  }
  SECTION("consecutive cosets hit the Dirichlet kernel value") {
    const auto pattern = validate_pattern(8, 40, {0, 1, 2, 3, 4, 5, 6, 7});
    const double got = pattern_coherence(build_sensing_matrix(pattern));
    const double closed = std::abs(std::sin(M_PI * 8.0 / 40.0) / std::sin(M_PI / 40.0)) / 8.0;
    REQUIRE(got == Catch::Approx(closed).epsilon(1e-12));
    REQUIRE(got == Catch::Approx(0.936452).margin(1e-6));
    REQUIRE(got == Catch::Approx(oracle::coherence_brute(pattern)).epsilon(1e-12));
  }
  SECTION("matches the plain-loop oracle on random patterns") {
    for (std::uint64_t seed : {1, 2, 3}) {
      const auto pattern = generate_pattern(6, 24, PatternStrategy::random, seed);
      const double got = pattern_coherence(build_sensing_matrix(pattern));
      REQUIRE(got == Catch::Approx(oracle::coherence_brute(pattern)).epsilon(1e-10));
      REQUIRE(got > 0.0);
      REQUIRE(got <= 1.0);
    }
  }
}

TEST_CASE("pattern generation") {
  SECTION("single lane is forced to coset zero") {
    REQUIRE(generate_pattern(1, 2, PatternStrategy::random, 99).cosets == std::vector<int>{0});
    REQUIRE(generate_pattern(1, 2, PatternStrategy::greedy_min_coherence, 99).cosets ==
            std::vector<int>{0});
  }
  SECTION("seeded runs are identical") {
    const auto a = generate_pattern(8, 40, PatternStrategy::random, 7);
    const auto b = generate_pattern(8, 40, PatternStrategy::random, 7);
    REQUIRE(a.cosets == b.cosets);
    const auto c = generate_pattern(8, 40, PatternStrategy::random, 8);
    REQUIRE(a.cosets != c.cosets);
  }
  SECTION("output always validates") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto p = generate_pattern(5, 17, PatternStrategy::random, seed);
      REQUIRE_NOTHROW(validate_pattern(p.num_lanes, p.grid_factor, p.cosets, p.lane_rate_hz));
    }
    const auto g = generate_pattern(5, 17, PatternStrategy::greedy_min_coherence, 0);
    REQUIRE_NOTHROW(validate_pattern(g.num_lanes, g.grid_factor, g.cosets, g.lane_rate_hz));
  }
  SECTION("greedy beats consecutive cosets and reaches the exhaustive optimum at 4x8") {
    const auto greedy = generate_pattern(4, 8, PatternStrategy::greedy_min_coherence, 0);
    const double greedy_coh = pattern_coherence(build_sensing_matrix(greedy));
    const double consec_coh =
        pattern_coherence(build_sensing_matrix(validate_pattern(4, 8, {0, 1, 2, 3})));
    // exhaustive scan over the C(7,3) admissible coset sets
    double best = 1.0;
    for (int a = 1; a < 8; ++a)
      for (int b = a + 1; b < 8; ++b)
        for (int c = b + 1; c < 8; ++c)
          best = std::min(best, pattern_coherence(build_sensing_matrix(
                                    validate_pattern(4, 8, {0, a, b, c}))));
    REQUIRE(greedy_coh <= consec_coh + 1e-12);
    REQUIRE(greedy_coh == Catch::Approx(best).epsilon(1e-9));
    REQUIRE(best == Catch::Approx(0.5).epsilon(1e-9));
  }
  SECTION("dimension guard") {
    require_error(errc::invalid_dimensions,
                  [] { generate_pattern(8, 8, PatternStrategy::random, 0); });
  }
}

TEST_CASE("pattern text round trip") {
  const auto p = validate_pattern(8, 40, kPaperCosets, 50e6);
  const auto q = parse_pattern(serialize_pattern(p));
  REQUIRE(q.num_lanes == p.num_lanes);
  REQUIRE(q.grid_factor == p.grid_factor);
  REQUIRE(q.cosets == p.cosets);
  REQUIRE(q.lane_rate_hz == p.lane_rate_hz);

  require_error(errc::config_parse, [] { parse_pattern("P=8\nL=40\n"); });
  require_error(errc::config_parse, [] { parse_pattern("what is this"); });
  require_error(errc::config_parse, [] { parse_pattern("P=8\nL=40\ncosets=0,x\n"); });
  // validation still applies on load
  require_error(errc::first_coset_nonzero, [] { parse_pattern("P=2\nL=8\ncosets=1,2\n"); });
}
