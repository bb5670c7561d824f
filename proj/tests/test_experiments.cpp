#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <atomic>
#include <cmath>
#include <set>

#include "ietsurf/experiments.hpp"
#include "oracle.hpp"

using namespace ietsurf;

namespace {
const double kPhi = (1.0 + std::sqrt(5.0)) / 2.0;
}

TEST_CASE("geometric schedule") {
  const auto s = default_schedule(1 << 20);
  REQUIRE(s.size() == 17);
  CHECK(s.front() == 16);
  CHECK(s[1] == 32);
  CHECK(s.back() == 1 << 20);

  const auto t = default_schedule(100000);
  CHECK(t.back() == 100000);      // cap always included
  CHECK(t[t.size() - 2] == 65536);
  CHECK(default_schedule(10) == std::vector<long>{10});
  CHECK_THROWS_AS(default_schedule(0), NonpositiveParameter);
}

TEST_CASE("diagnostic: golden rotation is bounded-type at finite horizon") {
  const auto rec = recurrence_diagnostic(Permutation({2, 1}), {1.0, kPhi},
                                         default_schedule(1 << 16));
  CHECK(rec.classification == RecurrenceClass::BoundedProxy);
  CHECK(rec.zeta_lo == doctest::Approx(0.05 * (1.0 + kPhi)));
  CHECK(rec.schedule_cap == 1 << 16);
  REQUIRE(!rec.eps_trace.empty());
  for (const auto& tp : rec.eps_trace) {
    CHECK(tp.n_eps_n == doctest::Approx(tp.n * tp.eps_n));
    CHECK(tp.n_eps_n > 0.5);  // the classical lower bound for the golden ratio
  }
}

TEST_CASE("diagnostic: periodic data is degenerate") {
  const auto rec =
      recurrence_diagnostic(Permutation({2, 1}), {2.0, 1.0}, default_schedule(1 << 10));
  CHECK(rec.classification == RecurrenceClass::Degenerate);
  CHECK(recurrence_class_name(rec.classification) == std::string("Degenerate"));
}

TEST_CASE("diagnostic: near-rational rotation looks nonrecurrent") {
  // alpha barely above 1/2: eps collapses at r = 2 and stays tiny well past
  // the top of this schedule, without ever reaching zero.
  const double tiny = std::ldexp(1.0, -20);
  const auto rec = recurrence_diagnostic(Permutation({2, 1}), {1.0, 1.0 + tiny},
                                         default_schedule(1 << 16));
  CHECK(rec.classification == RecurrenceClass::NonRecurrentProxy);
  for (const auto& tp : rec.eps_trace) CHECK(tp.eps_n > 0.0);
}

TEST_CASE("schedule validation") {
  CHECK_THROWS_AS(recurrence_diagnostic(Permutation({2, 1}), {1.0, kPhi}, {}),
                  NonpositiveParameter);
  CHECK_THROWS_AS(recurrence_diagnostic(Permutation({2, 1}), {1.0, kPhi}, {8, 8}),
                  NonpositiveParameter);
  CHECK_THROWS_AS(recurrence_diagnostic(Permutation({2, 1}), {1.0, kPhi}, {-1, 8}),
                  NonpositiveParameter);
}

TEST_CASE("samplers") {
  MeasureSampler lebesgue{MeasureSampler::Kind::Lebesgue, -0.2, 0.2, 20, 9};
  const auto pts = lebesgue.draw(200);
  REQUIRE(pts.size() == 200);
  for (double v : pts) {
    CHECK(v >= -0.2);
    CHECK(v <= 0.2);
  }
  CHECK(lebesgue.draw(200) == pts);  // deterministic
  MeasureSampler other = lebesgue;
  other.seed = 10;
  CHECK(other.draw(200) != pts);

  MeasureSampler grid{MeasureSampler::Kind::Grid, 0.0, 1.0};
  CHECK(grid.draw(5) == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(grid.draw(1) == std::vector<double>{0.5});

  MeasureSampler cantor{MeasureSampler::Kind::CantorCoinToss, 0.0, 1.0, 20, 3};
  for (double v : cantor.draw(500)) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    // truncated coin-tossing points avoid the removed middle third
    CHECK_FALSE((v > 1.0 / 3 && v < 2.0 / 3));
  }
}

TEST_CASE("coin-tossing sampler in the unit interval") {
  const auto pts = cantor_sampler(20, 300, 7);
  std::set<double> uniq(pts.begin(), pts.end());
  CHECK(uniq.size() > 250);  // 2^20 possible values: collisions should be rare
  const double max_partial = 1.0 - std::pow(3.0, -20);
  for (double v : pts) {
    CHECK(v >= 0.0);
    CHECK(v <= max_partial + 1e-15);
    CHECK_FALSE((v > 1.0 / 3 && v < 2.0 / 3));
    CHECK_FALSE((v > 1.0 / 9 && v < 2.0 / 9));  // second-level gap
  }
  CHECK(cantor_sampler(20, 300, 7) == pts);
}

TEST_CASE("gamma closed form") {
  CHECK(mahler_gamma<Rat>(2, Rat(1)) == std::vector<Rat>{Rat(-1), Rat(1)});
  CHECK(mahler_gamma<Rat>(3, Rat(1)) == std::vector<Rat>{Rat(-3), Rat(0), Rat(3)});
  // the coefficients telescope: sum_i gamma_i(s) = 0 identically
  for (int d = 2; d <= 6; ++d)
    for (const Rat& s : {Rat(1, 5), Rat(2, 3), Rat(1), Rat(7, 4)}) {
      Rat sum(0);
      for (const Rat& g : mahler_gamma(d, s)) sum += g;
      CHECK(sum == Rat(0));
    }
}

TEST_CASE("power curve point") {
  const auto pt = mahler_curve<Rat>(3, Rat(1));
  CHECK(pt.beta == std::vector<Rat>{Rat(1, 3), Rat(1, 3), Rat(1, 3)});
  CHECK(pt.beta_prime == std::vector<Rat>{Rat(-1, 3), Rat(0), Rat(1, 3)});
  Rat sum(0);
  for (const Rat& v : mahler_curve<Rat>(5, Rat(2, 3)).beta) sum += v;
  CHECK(sum == Rat(1));  // beta is normalized

  CHECK_THROWS_AS(mahler_curve<Rat>(1, Rat(1)), DimensionMismatch);
  CHECK_THROWS_AS(mahler_curve<double>(3, 0.0), NonpositiveParameter);
}

TEST_CASE("closed-form derivative matches finite differences") {
  for (int d = 2; d <= 6; ++d)
    for (double s = 0.2; s <= 2.0; s += 0.15) {
      const auto pt = mahler_curve<double>(d, s);
      const auto fd = oracle::slow_beta_fd(d, s, 1e-5);
      const auto direct = oracle::slow_beta(d, s);
      for (int i = 0; i < d; ++i) {
        CHECK(pt.beta[i] == doctest::Approx(direct[i]).epsilon(1e-12));
        CHECK(std::fabs(pt.beta_prime[i] - fd[i]) <= 1e-8);
      }
    }
}

TEST_CASE("parallel for: all indices, exceptions propagate") {
  std::vector<int> hit(100, 0);
  detail::parallel_for_indexed(100, 4, [&](long i) { hit[i] = 1; });
  for (int h : hit) CHECK(h == 1);

  std::atomic<int> ran{0};
  CHECK_THROWS_AS(detail::parallel_for_indexed(
                      8, 4,
                      [&](long i) {
                        ran.fetch_add(1);
                        if (i == 3) throw OutOfDomain("boom");
                      }),
                  OutOfDomain);
  CHECK(ran.load() >= 1);
}

TEST_CASE("line scan over the golden pair") {
  MeasureSampler sampler{MeasureSampler::Kind::Lebesgue, -0.2, 0.2, 20, 11};
  ScanConfig cfg;
  cfg.schedule = default_schedule(1 << 14);
  const auto res = line_scan<double>(Permutation({2, 1}), {1.0, kPhi}, {1.0, -1.0},
                                     sampler, 16, cfg);
  REQUIRE(res.records.size() == 16);
  CHECK(res.base_verdict == "Positive");
  CHECK(res.n_recurrent + res.n_bounded + res.n_nonrecurrent + res.n_degenerate == 16);
  CHECK(res.recurrent_fraction ==
        doctest::Approx((res.n_recurrent + res.n_bounded) / 16.0));
  CHECK(res.recurrent_fraction > 0.9);  // rotations: almost every s is fine
  for (const auto& rec : res.records) {
    CHECK(rec.verdict == "Positive");
    CHECK(rec.a_s.size() == 2);
    CHECK(rec.a_s[0] == doctest::Approx(1.0 + rec.s));
  }
  CHECK(res.exceptional.size() ==
        static_cast<size_t>(res.n_nonrecurrent + res.n_degenerate));
}

TEST_CASE("line scan rejects a non-positive base pair") {
  MeasureSampler sampler{MeasureSampler::Kind::Lebesgue, -0.1, 0.1, 20, 1};
  CHECK_THROWS_AS(
      line_scan<Rat>(Permutation({2, 1}), {Rat(1), Rat(1)}, {Rat(-1), Rat(1)}, sampler, 4),
      NotPositivePair);
}

TEST_CASE("line scan rejects samples that leave the simplex") {
  MeasureSampler grid{MeasureSampler::Kind::Grid, -2.0, -2.0};
  CHECK_THROWS_AS(line_scan<double>(Permutation({2, 1}), {1.0, kPhi}, {1.0, -1.0}, grid, 1),
                  InvalidLengths);
}

TEST_CASE("line scan is deterministic across thread counts") {
  MeasureSampler sampler{MeasureSampler::Kind::CantorCoinToss, -0.15, 0.15, 20, 13};
  ScanConfig one, eight;
  one.schedule = eight.schedule = default_schedule(1 << 12);
  one.threads = 1;
  eight.threads = 8;
  const auto r1 = line_scan<double>(Permutation({4, 3, 2, 1}), {1, 1, 1, 1},
                                    {3, 1, -1, -3}, sampler, 24, one);
  const auto r8 = line_scan<double>(Permutation({4, 3, 2, 1}), {1, 1, 1, 1},
                                    {3, 1, -1, -3}, sampler, 24, eight);
  REQUIRE(r1.records.size() == r8.records.size());
  for (size_t i = 0; i < r1.records.size(); ++i) {
    CHECK(r1.records[i].s == r8.records[i].s);  // bitwise
    CHECK(r1.records[i].classification == r8.records[i].classification);
    for (size_t j = 0; j < r1.records[i].eps_trace.size(); ++j)
      CHECK(r1.records[i].eps_trace[j].eps_n == r8.records[i].eps_trace[j].eps_n);
  }
}

TEST_CASE("power-curve scan stays in the cone") {
  MeasureSampler sampler{MeasureSampler::Kind::Lebesgue, 0.2, 2.0, 20, 17};
  ScanConfig cfg;
  cfg.schedule = default_schedule(1 << 14);
  const auto res = mahler_scan(3, sampler, 20, cfg);
  REQUIRE(res.records.size() == 20);
  CHECK(res.cone_failures == 0);
  for (const auto& rec : res.records) CHECK(rec.verdict == "InCone");
  CHECK(res.recurrent_fraction > 0.9);
  CHECK_THROWS_AS(mahler_scan(1, sampler, 4), DimensionMismatch);
}

TEST_CASE("compactness trace constants and assertions") {
  std::vector<double> grid;
  for (double t = 0.0; t <= 8.0; t += 0.5) grid.push_back(t);

  // periodic witness: eps vanishes identically, so the asserted inequality
  // degenerates to 0 <= kappa2 * phi and every grid point is fine
  const auto per = geodesic_compactness_trace(Permutation({4, 3, 2, 1}), {1, 1, 1, 1},
                                              {3, 1, -1, -3}, grid);
  CHECK(per.c1 == 3.0);
  CHECK(per.c2 == 7.0);
  CHECK(per.kappa1 == doctest::Approx(std::sqrt(14.0)));
  CHECK(per.kappa2 == 6.0);
  CHECK(per.record.classification == RecurrenceClass::Degenerate);
  REQUIRE(per.record.phi_trace.size() == grid.size());
  for (const auto& pp : per.record.phi_trace) CHECK(pp.phi > 0.0);
  CHECK(per.first_one.empty());  // zeta = 0 points carry no converse data

  // golden suspension: nonzero zeta everywhere, converse points populated
  const auto gold = geodesic_compactness_trace(Permutation({2, 1}), {1.0, kPhi},
                                               {1.0, -1.0}, grid);
  CHECK(gold.c1 == 1.0);
  CHECK(gold.c2 == 1.0);
  CHECK(gold.kappa2 == 4.0);
  CHECK(gold.first_one.size() == grid.size());
  for (const auto& fo : gold.first_one) {
    CHECK(fo.zeta > 0.0);
    CHECK(fo.bound == doctest::Approx(std::sqrt(2.0) * std::sqrt(fo.zeta)));
    CHECK(fo.t == doctest::Approx(2.0 * std::log(fo.n * std::sqrt(2.0 / fo.zeta))));
    CHECK(std::isfinite(fo.phi));
  }
}

TEST_CASE("compactness trace rejects an invalid suspension") {
  CHECK_THROWS_AS(
      geodesic_compactness_trace(Permutation({2, 1}), {1.0, 1.0}, {-1.0, 1.0}, {0.0}),
      SuspensionInvalid);
}
