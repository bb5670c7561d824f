#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <numeric>

#include "ietsurf/perm.hpp"
#include "oracle.hpp"

using namespace ietsurf;

TEST_CASE("construction and parsing") {
  Permutation p({2, 1});
  CHECK(p.d() == 2);
  CHECK(p(1) == 2);
  CHECK(p(2) == 1);
  CHECK(p.inverse_of(2) == 1);
  CHECK(Permutation::parse("4,3,2,1") == Permutation({4, 3, 2, 1}));
  CHECK(Permutation::parse(" 3, 1 ,2 ") == Permutation({3, 1, 2}));
  CHECK(p.to_string() == "2,1");

  CHECK_THROWS_AS(Permutation({1}), ParseError);         // d < 2
  CHECK_THROWS_AS(Permutation({2, 2}), ParseError);      // repeat
  CHECK_THROWS_AS(Permutation({0, 1}), ParseError);      // out of range
  CHECK_THROWS_AS(Permutation({3, 1}), ParseError);      // not a bijection
  CHECK_THROWS_AS(Permutation::parse("2,x"), ParseError);
  CHECK_THROWS_AS(Permutation::parse(""), ParseError);
}

TEST_CASE("inverse and reversal") {
  Permutation p({3, 1, 2});
  Permutation q = p.inverse();
  CHECK(q == Permutation({2, 3, 1}));
  for (int i = 1; i <= 3; ++i) CHECK(q(p(i)) == i);
  CHECK(Permutation::reversal(4) == Permutation({4, 3, 2, 1}));
}

TEST_CASE("irreducibility") {
  CHECK(is_irreducible(Permutation({2, 1})));
  CHECK(is_irreducible(Permutation({3, 2, 1})));
  CHECK(is_irreducible(Permutation({2, 3, 1})));
  CHECK_FALSE(is_irreducible(Permutation({1, 2})));
  CHECK_FALSE(is_irreducible(Permutation({2, 1, 3})));
  CHECK_FALSE(is_irreducible(Permutation({1, 3, 2})));

  // agree with the brute-force check on all of S_5
  std::vector<int> img{1, 2, 3, 4, 5};
  do {
    CHECK(is_irreducible(Permutation(img)) == oracle::slow_irreducible(img));
  } while (std::next_permutation(img.begin(), img.end()));
}

TEST_CASE("slot names") {
  CHECK(slot_name(3, slot_upper(0)) == "P0");
  CHECK(slot_name(3, slot_upper(3)) == "P3");
  CHECK(slot_name(3, slot_lower(3, 1)) == "P'1");
}

TEST_CASE("torus stratum") {
  const StratumData st = singularity_data(Permutation({2, 1}));
  CHECK(st.k == 1);
  CHECK(st.genus == 1);
  REQUIRE(st.orders.size() == 1);
  CHECK(st.orders[0] == 0);
  CHECK_FALSE(is_admissible(Permutation({2, 1})));  // marked point, order 0
}

TEST_CASE("genus-two stratum of the reversal") {
  const Permutation p({4, 3, 2, 1});
  const StratumData st = singularity_data(p);
  CHECK(st.k == 1);
  CHECK(st.genus == 2);
  REQUIRE(st.orders.size() == 1);
  CHECK(st.orders[0] == 2);
  CHECK(is_admissible(p));
  // one class containing all 2(d+1) polygon corners
  REQUIRE(st.vertex_cycles.size() == 1);
  CHECK(st.vertex_cycles[0].size() == 10);
  for (int s = 0; s < 10; ++s) CHECK(st.slot_class[s] == 0);
}

TEST_CASE("torus with two marked points") {
  const StratumData st = singularity_data(Permutation({3, 1, 2}));
  CHECK(st.k == 2);
  CHECK(st.genus == 1);
  CHECK(st.orders == std::vector<int>{0, 0});
}

TEST_CASE("canonical heights") {
  CHECK(canonical_heights(Permutation({2, 1})) == std::vector<long long>{1, -1});
  CHECK(canonical_heights(Permutation({4, 3, 2, 1})) ==
        std::vector<long long>{3, 1, -1, -3});
  CHECK_THROWS_AS(singularity_data(Permutation({1, 2})), NotIrreducible);
}

TEST_CASE("stratum does not depend on the height choice") {
  const Permutation p({4, 3, 2, 1});
  const StratumData s1 = singularity_data_with_heights(p, {3, 1, -1, -3});
  const StratumData s2 = singularity_data_with_heights(p, {1, 1, -1, -1});
  CHECK(s1.k == s2.k);
  CHECK(s1.genus == s2.genus);
  CHECK(s1.orders == s2.orders);
}

TEST_CASE("euler relations on all irreducible permutations up to d = 5") {
  for (int d = 2; d <= 5; ++d) {
    std::vector<int> img(d);
    std::iota(img.begin(), img.end(), 1);
    do {
      if (!oracle::slow_irreducible(img)) continue;
      const StratumData st = singularity_data(Permutation(img));
      long sum = 0;
      for (int r : st.orders) sum += r;
      CHECK(sum == 2 * st.genus - 2);
      CHECK(d == 2 * st.genus + st.k - 1);
      CHECK(static_cast<int>(st.orders.size()) == st.k);
    } while (std::next_permutation(img.begin(), img.end()));
  }
}
