#pragma once

// Veech's antisymmetric form Q, heights / the step function L, the cone of
// universally good height directions, the null space (real REL directions),
// and the semi-decided positive-pair test.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ietsurf/errors.hpp"
#include "ietsurf/iet.hpp"
#include "ietsurf/perm.hpp"
#include "ietsurf/rng.hpp"
#include "ietsurf/scalars.hpp"

namespace ietsurf {

struct QForm {
  int d = 0;
  std::vector<std::vector<int>> m;  // antisymmetric, entries in {-1,0,1}
};

// M_ij = 1 if i>j and sigma(i)<sigma(j); -1 if i<j and sigma(i)>sigma(j).
QForm q_matrix(const Permutation& p);

template <class K>
K q_eval(const QForm& q, const std::vector<K>& u, const std::vector<K>& v) {
  if (static_cast<int>(u.size()) != q.d || static_cast<int>(v.size()) != q.d)
    throw DimensionMismatch("q_eval: vector size != form size");
  K out(0);
  for (int i = 0; i < q.d; ++i) {
    K row(0);
    for (int j = 0; j < q.d; ++j)
      if (q.m[i][j] != 0) row += K(q.m[i][j]) * v[j];
    out += u[i] * row;
  }
  return out;
}

template <class K>
struct HeightData {
  std::vector<K> b;
  std::vector<K> y, yp;  // partial sums, size d+1
  std::vector<K> L;      // L restricted to I_i = y_i - y'_{sigma(i)}, size d
};

template <class K>
HeightData<K> heights(const Permutation& p, const std::vector<K>& b) {
  const int d = p.d();
  if (static_cast<int>(b.size()) != d)
    throw DimensionMismatch("heights: vector size != permutation size");
  HeightData<K> h;
  h.b = b;
  h.y.assign(d + 1, K(0));
  h.yp.assign(d + 1, K(0));
  for (int i = 1; i <= d; ++i) h.y[i] = h.y[i - 1] + b[i - 1];
  for (int j = 1; j <= d; ++j) h.yp[j] = h.yp[j - 1] + b[p.inverse_of(j) - 1];
  h.L.reserve(d);
  const QForm q = q_matrix(p);
  for (int i = 1; i <= d; ++i) {
    K li = h.y[i] - h.yp[p(i)];
    if constexpr (is_exact_v<K>) {
      K via_q(0);
      for (int j = 0; j < d; ++j)
        if (q.m[i - 1][j] != 0) via_q += K(q.m[i - 1][j]) * b[j];
      if (!(via_q == li)) throw InternalError("L_i != Q(e_i, b)");
    }
    h.L.push_back(li);
  }
  return h;
}

// b0 with b0_i = sigma(i) - i; always inside the cone.
std::vector<long long> universal_direction(const Permutation& p);

// True iff Q(e_i, b) > 0 strictly for every i.
template <class K>
bool cone_contains(const Permutation& p, const std::vector<K>& b) {
  for (const K& li : heights(p, b).L)
    if (!(sign_of(li) > 0)) return false;
  return true;
}

// Exact kernel basis of an integer matrix (rows x cols) as primitive integer
// vectors with deterministic order and sign (first nonzero entry positive).
std::vector<std::vector<long long>> integer_kernel(
    const std::vector<std::vector<long long>>& rows);

// Exact basis of ker(Q) as primitive integer vectors; dimension k-1.
std::vector<std::vector<long long>> null_space(const Permutation& p);

// Birkhoff visit-frequency vectors from `seeds` random start points,
// deduplicated within 1e-3 in l1.  Deterministic for a fixed rng_seed.
std::vector<std::vector<double>> empirical_invariant_measures(
    const Iet<double>& t, int seeds, long orbit_len, uint64_t rng_seed);

enum class Positivity { Positive, NotPositive, Undetermined };

const char* positivity_name(Positivity s);

struct PositivityConfig {
  int seeds = 32;
  long orbit_len = 1000000;
  long m_max = 10000;
  double margin_scale = 1e-6;  // margin = scale * |b|_inf * sum(a)
  uint64_t rng_seed = 1;
};

struct PositivityVerdict {
  Positivity status = Positivity::Undetermined;
  std::optional<Connection> connection_witness;          // violated inequality
  std::optional<std::vector<double>> frequency_witness;  // Q(a',b) <= -margin
  double witness_value = 0;  // the offending Q(a',b) or connection margin
  double margin = 0;
  PositivityConfig cfg;
  std::string note;  // which branch decided
};

// The positive-pair semi-decision:
//   (1) cone membership + empty connection list up to m_max  -> Positive
//   (2) some sampled frequency vector with Q(a',b) <= -margin -> NotPositive
//   (3) a connection whose sum fails sum_{n<m} L(T^n x_i) > y_i - y_j
//       strictly -> NotPositive (exact arithmetic on exact backends)
//   (4) all frequencies clear +margin and all sums pass -> Positive,
//       otherwise Undetermined.
//
// Step (3) skips the triple with m == 1 landing on x_0: that hit is the
// zero-length hop through the identification of P_{i} with P'_0 (it exists
// for every length vector, and its margin is identically zero for every b),
// so it carries no information about positivity.
template <class K>
PositivityVerdict is_positive_pair(const Permutation& p, const std::vector<K>& a,
                                   const std::vector<K>& b,
                                   const PositivityConfig& cfg = {});

// --- implementation -------------------------------------------------------

template <class K>
PositivityVerdict is_positive_pair(const Permutation& p, const std::vector<K>& a,
                                   const std::vector<K>& b,
                                   const PositivityConfig& cfg) {
  const int d = p.d();
  if (static_cast<int>(b.size()) != d)
    throw DimensionMismatch("is_positive_pair: height vector size != d");
  Iet<K> t(p, a);

  PositivityVerdict out;
  out.cfg = cfg;

  const bool in_cone = cone_contains(p, b);
  const std::vector<Connection> conns = t.detect_connections(cfg.m_max);
  if (in_cone && conns.empty()) {
    out.status = Positivity::Positive;
    out.note = "cone membership and no connection up to m_max";
    return out;
  }

  std::vector<double> ad(d), bd(d);
  for (int i = 0; i < d; ++i) {
    ad[i] = to_dbl(a[i]);
    bd[i] = to_dbl(b[i]);
  }
  double binf = 0, atot = 0;
  for (int i = 0; i < d; ++i) {
    binf = std::max(binf, std::fabs(bd[i]));
    atot += ad[i];
  }
  out.margin = cfg.margin_scale * binf * atot;

  const QForm q = q_matrix(p);
  Iet<double> td(p, ad);
  const auto freqs =
      empirical_invariant_measures(td, cfg.seeds, cfg.orbit_len, cfg.rng_seed);
  bool all_clear = true;
  for (const auto& f : freqs) {
    const double v = q_eval(q, f, bd);
    if (v <= -out.margin) {
      out.status = Positivity::NotPositive;
      out.frequency_witness = f;
      out.witness_value = v;
      out.note = "sampled invariant measure with nonpositive pairing";
      return out;
    }
    if (v < out.margin) all_clear = false;
  }

  const HeightData<K> h = heights(p, b);
  // One orbit pass per starting index accumulates all the connection sums.
  for (int i = 0; i < d; ++i) {
    long max_m = 0;
    for (const Connection& c : conns)
      if (c.i == i) max_m = std::max(max_m, c.m);
    if (max_m == 0) continue;
    size_t next = 0;
    std::vector<const Connection*> mine;
    for (const Connection& c : conns)
      if (c.i == i) mine.push_back(&c);
    std::sort(mine.begin(), mine.end(),
              [](const Connection* l, const Connection* r) { return l->m < r->m; });
    K z = t.x(i);
    K sum(0);
    for (long m = 1; m <= max_m; ++m) {
      sum += h.L[t.interval_index(z) - 1];
      z = t.evaluate(z);
      for (; next < mine.size() && mine[next]->m == m; ++next) {
        const Connection& c = *mine[next];
        if (c.m == 1 && c.j == 0) continue;  // zero-length hop through P'_0
        const K rhs = h.y[c.i] - h.y[c.j];
        if (!(sum > rhs)) {
          out.status = Positivity::NotPositive;
          out.connection_witness = c;
          out.witness_value = to_dbl(K(sum - rhs));
          out.note = "connection sum fails the strict inequality";
          return out;
        }
      }
    }
  }

  if (all_clear) {
    out.status = Positivity::Positive;
    out.note = conns.empty()
                   ? "sampled measures all clear the margin"
                   : "sampled measures clear the margin; connection sums pass";
  } else {
    out.status = Positivity::Undetermined;
    out.note = "a sampled pairing fell inside the margin band";
  }
  return out;
}

}  // namespace ietsurf
