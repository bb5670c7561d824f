#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "ietsurf/pairing.hpp"
#include "oracle.hpp"

using namespace ietsurf;

namespace {
const double kPhi = (1.0 + std::sqrt(5.0)) / 2.0;

std::vector<Rat> rat_vec(const std::vector<long long>& v) {
  std::vector<Rat> out;
  for (long long x : v) out.emplace_back(x);
  return out;
}
}  // namespace

TEST_CASE("pairing matrix") {
  const QForm q = q_matrix(Permutation({2, 1}));
  CHECK(q.m == std::vector<std::vector<int>>{{0, -1}, {1, 0}});
  const QForm q3 = q_matrix(Permutation({3, 1, 2}));
  CHECK(q3.m == std::vector<std::vector<int>>{{0, -1, -1}, {1, 0, 0}, {1, 0, 0}});
}

TEST_CASE("pairing matrix matches the definition on random permutations") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 6);
    std::vector<int> img(d);
    for (int i = 0; i < d; ++i) img[i] = i + 1;
    std::shuffle(img.begin(), img.end(), rng);
    const QForm q = q_matrix(Permutation(img));
    const auto ref = oracle::slow_q(img);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) {
        CHECK(q.m[i][j] == ref[i][j]);
        CHECK(q.m[i][j] == -q.m[j][i]);  // antisymmetry
      }
  }
}

TEST_CASE("q_eval against the inversion-pair expansion") {
  const std::vector<int> img{4, 1, 3, 2};
  const QForm q = q_matrix(Permutation(img));
  const std::vector<double> u{0.3, 1.2, 0.7, 2.1}, v{1.0, -0.4, 0.9, -1.7};
  CHECK(q_eval(q, u, v) == doctest::Approx(oracle::slow_q_eval(img, u, v)).epsilon(1e-14));
  CHECK_THROWS_AS(q_eval(q, std::vector<double>{1.0}, v), DimensionMismatch);
}

TEST_CASE("heights and the step values") {
  const Permutation p({4, 3, 2, 1});
  const auto h = heights(p, rat_vec({3, 1, -1, -3}));
  CHECK(h.L == std::vector<Rat>{Rat(3), Rat(7), Rat(7), Rat(3)});
  const auto hd = heights(p, std::vector<double>{3, 1, -1, -3});
  const auto ref = oracle::slow_L({4, 3, 2, 1}, {3, 1, -1, -3});
  for (int i = 0; i < 4; ++i) CHECK(hd.L[i] == ref[i]);
}

TEST_CASE("universal direction lies in the cone") {
  CHECK(universal_direction(Permutation({2, 1})) == std::vector<long long>{1, -1});
  CHECK(universal_direction(Permutation({4, 3, 2, 1})) ==
        std::vector<long long>{3, 1, -1, -3});
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 25; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 6);
    std::vector<int> img(d);
    for (int i = 0; i < d; ++i) img[i] = i + 1;
    do {
      std::shuffle(img.begin(), img.end(), rng);
    } while (!oracle::slow_irreducible(img));
    const Permutation p(img);
    CHECK(cone_contains(p, rat_vec(universal_direction(p))));
  }
}

TEST_CASE("cone rejection") {
  CHECK_FALSE(cone_contains(Permutation({2, 1}), rat_vec({-1, 1})));
  CHECK_FALSE(cone_contains(Permutation({2, 1}), rat_vec({0, 0})));  // strict
}

TEST_CASE("null space") {
  CHECK(null_space(Permutation({2, 1})).empty());
  const auto ns = null_space(Permutation({3, 1, 2}));
  REQUIRE(ns.size() == 1);
  CHECK(ns[0] == std::vector<long long>{0, 1, -1});
}

TEST_CASE("null space vectors annihilate the form, dimension is d - rank") {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 25; ++trial) {
    const int d = 2 + static_cast<int>(rng() % 5);
    std::vector<int> img(d);
    for (int i = 0; i < d; ++i) img[i] = i + 1;
    do {
      std::shuffle(img.begin(), img.end(), rng);
    } while (!oracle::slow_irreducible(img));
    const Permutation p(img);
    const auto ref = oracle::slow_q(img);
    const auto ns = null_space(p);
    CHECK(static_cast<int>(ns.size()) == d - oracle::slow_rank(ref));
    for (const auto& r : ns)
      for (int i = 0; i < d; ++i) {
        long long row = 0;
        for (int j = 0; j < d; ++j) row += ref[i][j] * r[j];
        CHECK(row == 0);
      }
  }
}

TEST_CASE("integer kernel basics") {
  const auto k = integer_kernel({{1, 1, 0}});
  REQUIRE(k.size() == 2);
  for (const auto& v : k) CHECK(v[0] + v[1] == 0);
  CHECK(integer_kernel({{1, 0}, {0, 1}}).empty());
}

TEST_CASE("birkhoff frequencies of the golden rotation approximate lengths") {
  Iet<double> t(Permutation({2, 1}), {1.0, kPhi});
  const auto freqs = empirical_invariant_measures(t, 8, 200000, 5);
  REQUIRE(freqs.size() == 1);  // uniquely ergodic: all seeds agree
  const double total = 1.0 + kPhi;
  CHECK(freqs[0][0] == doctest::Approx(1.0 / total).epsilon(1e-3));
  CHECK(freqs[0][1] == doctest::Approx(kPhi / total).epsilon(1e-3));
}

TEST_CASE("decision: golden pair is positive") {
  const auto v = is_positive_pair<Q5>(Permutation({2, 1}), {Q5(1), Q5::golden()},
                                      {Q5(1), Q5(-1)});
  CHECK(v.status == Positivity::Positive);
  CHECK(positivity_name(v.status) == std::string("Positive"));
}

TEST_CASE("decision: frequency witness flips the sign") {
  const auto v =
      is_positive_pair<Rat>(Permutation({2, 1}), {Rat(1), Rat(1)}, {Rat(-1), Rat(1)});
  CHECK(v.status == Positivity::NotPositive);
  REQUIRE(v.frequency_witness.has_value());
  CHECK(v.witness_value == doctest::Approx(-1.0).epsilon(1e-3));  // Q(f, b) at f = (1/2,1/2)
}

TEST_CASE("decision: connection sum failing the strict inequality") {
  // With these heights the sum along the orbit of x_0 equals y_0 - y_2
  // exactly, so strictness fails at the m = 1 hit (0, 2, 1).  The sampled
  // measures both pair to exactly zero, so the frequency step cannot decide.
  const auto v = is_positive_pair<Rat>(Permutation({3, 2, 1}), {Rat(1), Rat(1), Rat(1)},
                                       {Rat(1), Rat(-3), Rat(1)});
  CHECK(v.status == Positivity::NotPositive);
  REQUIRE(v.connection_witness.has_value());
  CHECK(*v.connection_witness == Connection{0, 2, 1});
  CHECK(v.witness_value == 0.0);
}

TEST_CASE("decision: periodic but positive") {
  // all connection sums pass strictly and the sampled measures clear the margin
  const auto v = is_positive_pair<Rat>(Permutation({3, 2, 1}), {Rat(1), Rat(1), Rat(1)},
                                       {Rat(2), Rat(0), Rat(-2)});
  CHECK(v.status == Positivity::Positive);
}

TEST_CASE("decision: equality at the opposite discontinuity is a violation") {
  // b = (1,1) on the unit torus: the hop x_0 -> x_1 carries L(x_0) = -1,
  // exactly equal to y_0 - y_1, so the strict inequality fails there.
  const auto v =
      is_positive_pair<Rat>(Permutation({2, 1}), {Rat(1), Rat(1)}, {Rat(1), Rat(1)});
  CHECK(v.status == Positivity::NotPositive);
  REQUIRE(v.connection_witness.has_value());
  CHECK(*v.connection_witness == Connection{0, 1, 1});
  CHECK(v.witness_value == 0.0);
}

TEST_CASE("decision: margin band gives undetermined") {
  // Golden rotation, b outside the cone, no connections, pairing value -1
  // for the unique invariant measure: an inflated margin swallows it, so the
  // sampling step can certify neither sign.
  PositivityConfig cfg;
  cfg.margin_scale = 10.0;  // margin = 10 * 1 * (1 + phi) > 1
  cfg.seeds = 4;
  cfg.orbit_len = 20000;
  const auto v = is_positive_pair<Q5>(Permutation({2, 1}), {Q5(1), Q5::golden()},
                                      {Q5(-1), Q5(1)}, cfg);
  CHECK(v.status == Positivity::Undetermined);
  CHECK(!v.connection_witness.has_value());
  CHECK(!v.frequency_witness.has_value());
}

TEST_CASE("decision: size mismatch throws") {
  CHECK_THROWS_AS(is_positive_pair<Rat>(Permutation({2, 1}), {Rat(1), Rat(1)}, {Rat(1)}),
                  DimensionMismatch);
}
