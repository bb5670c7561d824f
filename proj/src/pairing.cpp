#include "ietsurf/pairing.hpp"

#include <algorithm>
#include <numeric>

namespace ietsurf {

QForm q_matrix(const Permutation& p) {
  const int d = p.d();
  QForm q;
  q.d = d;
  q.m.assign(d, std::vector<int>(d, 0));
  for (int i = 1; i <= d; ++i)
    for (int j = 1; j <= d; ++j) {
      if (i > j && p(i) < p(j)) q.m[i - 1][j - 1] = 1;
      if (i < j && p(i) > p(j)) q.m[i - 1][j - 1] = -1;
    }
  return q;
}

const char* positivity_name(Positivity s) {
  switch (s) {
    case Positivity::Positive: return "Positive";
    case Positivity::NotPositive: return "NotPositive";
    case Positivity::Undetermined: return "Undetermined";
  }
  return "Undetermined";
}

std::vector<long long> universal_direction(const Permutation& p) {
  if (!is_irreducible(p))
    throw NotIrreducible("universal_direction: permutation is reducible");
  std::vector<long long> b0(p.d());
  for (int i = 1; i <= p.d(); ++i) b0[i - 1] = p(i) - i;
  return b0;
}

namespace {

using Int = boost::multiprecision::mpz_int;

}  // namespace

std::vector<std::vector<long long>> integer_kernel(
    const std::vector<std::vector<long long>>& rows) {
  const int nr = static_cast<int>(rows.size());
  const int nc = nr == 0 ? 0 : static_cast<int>(rows[0].size());
  // Row-reduce over the rationals; entries are small ints so this is cheap.
  std::vector<std::vector<Rat>> m(nr, std::vector<Rat>(nc));
  for (int i = 0; i < nr; ++i) {
    if (static_cast<int>(rows[i].size()) != nc)
      throw DimensionMismatch("integer_kernel: ragged matrix");
    for (int j = 0; j < nc; ++j) m[i][j] = Rat(rows[i][j]);
  }

  std::vector<int> pivot_col;  // pivot column of each reduced row
  int row = 0;
  for (int col = 0; col < nc && row < nr; ++col) {
    int sel = -1;
    for (int r = row; r < nr; ++r)
      if (m[r][col] != 0) { sel = r; break; }
    if (sel < 0) continue;
    std::swap(m[row], m[sel]);
    const Rat inv = Rat(1) / m[row][col];
    for (int j = col; j < nc; ++j) m[row][j] *= inv;
    for (int r = 0; r < nr; ++r) {
      if (r == row || m[r][col] == 0) continue;
      const Rat f = m[r][col];
      for (int j = col; j < nc; ++j) m[r][j] -= f * m[row][j];
    }
    pivot_col.push_back(col);
    ++row;
  }

  std::vector<bool> is_pivot(nc, false);
  for (int c : pivot_col) is_pivot[c] = true;

  std::vector<std::vector<long long>> basis;
  for (int free = 0; free < nc; ++free) {
    if (is_pivot[free]) continue;
    std::vector<Rat> v(nc, Rat(0));
    v[free] = Rat(1);
    for (size_t r = 0; r < pivot_col.size(); ++r) v[pivot_col[r]] = -m[r][free];
    // Clear denominators, divide by the gcd, make the first nonzero positive.
    Int mult = 1;
    for (const Rat& x : v)
      mult = boost::multiprecision::lcm(mult, boost::multiprecision::denominator(x));
    Int g = 0;
    std::vector<Int> ints(nc);
    for (int j = 0; j < nc; ++j) {
      ints[j] = boost::multiprecision::numerator(v[j] * Rat(mult));
      g = boost::multiprecision::gcd(g, ints[j]);
    }
    if (g == 0) g = 1;
    std::vector<long long> iv(nc);
    for (int j = 0; j < nc; ++j)
      iv[j] = (ints[j] / g).convert_to<long long>();
    for (int j = 0; j < nc; ++j) {
      if (iv[j] == 0) continue;
      if (iv[j] < 0)
        for (long long& x : iv) x = -x;
      break;
    }
    basis.push_back(std::move(iv));
  }
  return basis;
}

std::vector<std::vector<long long>> null_space(const Permutation& p) {
  const int d = p.d();
  const QForm q = q_matrix(p);
  std::vector<std::vector<long long>> rows(d, std::vector<long long>(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) rows[i][j] = q.m[i][j];
  return integer_kernel(rows);
}

std::vector<std::vector<double>> empirical_invariant_measures(
    const Iet<double>& t, int seeds, long orbit_len, uint64_t rng_seed) {
  if (seeds < 1 || orbit_len < 1)
    throw NonpositiveParameter("empirical_invariant_measures: seeds and orbit_len must be >= 1");
  const int d = t.d();
  const double total = t.total();
  std::vector<std::vector<double>> freqs;
  for (int s = 0; s < seeds; ++s) {
    CounterRng rng(rng_seed, static_cast<uint64_t>(s));
    double z = rng.uniform(0, 0.0, total);
    std::vector<long> counts(d, 0);
    for (long n = 0; n < orbit_len; ++n) {
      ++counts[t.interval_index(z) - 1];
      z = t.evaluate(z);
    }
    std::vector<double> f(d);
    for (int i = 0; i < d; ++i) f[i] = double(counts[i]) / double(orbit_len);
    bool dup = false;
    for (const auto& g : freqs) {
      double l1 = 0;
      for (int i = 0; i < d; ++i) l1 += std::fabs(f[i] - g[i]);
      if (l1 <= 1e-3) { dup = true; break; }
    }
    if (!dup) freqs.push_back(std::move(f));
  }
  return freqs;
}

}  // namespace ietsurf
