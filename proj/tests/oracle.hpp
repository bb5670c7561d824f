#pragma once

// Slow reference computations the tests compare the library against.
// Everything in here works straight from the definitions with its own
// loops and data structures; nothing calls the code under test.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>
#include <utility>
#include <vector>

namespace oracle {

// --- interval exchange by linear scan --------------------------------------

template <class K>
struct SlowIet {
  std::vector<int> sigma;  // sigma[i-1] = image of i
  std::vector<K> xs, xps;  // breakpoint partial sums

  SlowIet(std::vector<int> s, const std::vector<K>& a) : sigma(std::move(s)) {
    const int d = static_cast<int>(sigma.size());
    std::vector<K> ap(d, K(0));
    for (int i = 1; i <= d; ++i) ap[sigma[i - 1] - 1] = a[i - 1];
    xs.assign(d + 1, K(0));
    xps.assign(d + 1, K(0));
    for (int i = 1; i <= d; ++i) xs[i] = xs[i - 1] + a[i - 1];
    for (int j = 1; j <= d; ++j) xps[j] = xps[j - 1] + ap[j - 1];
  }

  K apply(const K& v) const {
    const int d = static_cast<int>(sigma.size());
    for (int i = 1; i <= d; ++i)
      if (!(v < xs[i - 1]) && v < xs[i])
        return v - xs[i - 1] + xps[sigma[i - 1] - 1];
    return v;  // callers keep points in [0, total)
  }
};

inline std::vector<int> inverse_perm(const std::vector<int>& sigma) {
  std::vector<int> inv(sigma.size());
  for (int i = 1; i <= static_cast<int>(sigma.size()); ++i) inv[sigma[i - 1] - 1] = i;
  return inv;
}

// T^{-1} is itself an interval exchange: permutation sigma^{-1} acting on
// the image lengths a'_j = a_{sigma^{-1}(j)}.
template <class K>
SlowIet<K> slow_inverse(const std::vector<int>& sigma, const std::vector<K>& a) {
  const int d = static_cast<int>(sigma.size());
  std::vector<K> ap(d, K(0));
  for (int i = 1; i <= d; ++i) ap[sigma[i - 1] - 1] = a[i - 1];
  return SlowIet<K>(inverse_perm(sigma), ap);
}

inline bool slow_irreducible(const std::vector<int>& sigma) {
  const int d = static_cast<int>(sigma.size());
  int seen_max = 0;
  for (int k = 1; k < d; ++k) {
    seen_max = std::max(seen_max, sigma[k - 1]);
    if (seen_max == k) return false;
  }
  return true;
}

// --- eps_n from the pairwise definition ------------------------------------
//
// min |T^k x_i - T^l x_j| over 0 <= k,l <= n, 1 <= i,j <= d-1, (i,k) != (j,l):
// collect every forward iterate, sort, take the smallest adjacent gap.  When
// there are fewer than two points (d = 2, n = 0) fall back to sum(a), the
// same no-candidate sentinel the library uses.
template <class K>
K slow_eps_pairwise(const std::vector<int>& sigma, const std::vector<K>& a, long n) {
  const int d = static_cast<int>(sigma.size());
  const SlowIet<K> t(sigma, a);
  std::vector<K> pts;
  for (int i = 1; i <= d - 1; ++i) {
    K z = t.xs[i];
    pts.push_back(z);
    for (long k = 1; k <= n; ++k) {
      z = t.apply(z);
      pts.push_back(z);
    }
  }
  K total(0);
  for (const K& ai : a) total += ai;
  if (pts.size() < 2) return total;
  std::sort(pts.begin(), pts.end());
  K best = total;
  for (size_t p = 1; p < pts.size(); ++p)
    best = std::min(best, K(pts[p] - pts[p - 1]));
  return best;
}

// Same minimum from the base-vs-orbit form (both signs of r), as a second
// reference for the double backend unit tests.
template <class K>
K slow_eps_base(const std::vector<int>& sigma, const std::vector<K>& a, long n) {
  const int d = static_cast<int>(sigma.size());
  const SlowIet<K> fwd(sigma, a);
  const SlowIet<K> bwd = slow_inverse(sigma, a);
  K total(0);
  for (const K& ai : a) total += ai;
  K best = total;
  auto dist = [](const K& u, const K& v) { return u < v ? K(v - u) : K(u - v); };
  for (int j = 1; j <= d - 1; ++j) {
    K zf = fwd.xs[j], zb = fwd.xs[j];
    for (long r = 0; r <= n; ++r) {
      for (int i = 1; i <= d - 1; ++i) {
        if (r != 0 || i != j) best = std::min(best, dist(fwd.xs[i], zf));
        if (r != 0) best = std::min(best, dist(fwd.xs[i], zb));
      }
      zf = fwd.apply(zf);
      zb = bwd.apply(zb);
    }
  }
  return best;
}

// --- torus saddle connections ----------------------------------------------
//
// For d = 2 the suspension is the torus spanned by u = (a1,b1), v = (a2,b2);
// its saddle connections are exactly the primitive lattice vectors.  Returns
// the (x, y) holonomies with sup-norm <= rho, sorted.
inline std::vector<std::pair<double, double>> torus_connections(
    double a1, double b1, double a2, double b2, double rho) {
  std::vector<std::pair<double, double>> out;
  const double det = std::fabs(a1 * b2 - a2 * b1);
  // |p|, |q| <= bound once max(|x|,|y|) <= rho: p = (x b2 - y a2) / det.
  const double bound =
      rho * (std::fabs(a1) + std::fabs(b1) + std::fabs(a2) + std::fabs(b2)) / det + 2;
  const long pb = static_cast<long>(bound);
  for (long p = -pb; p <= pb; ++p)
    for (long q = -pb; q <= pb; ++q) {
      if (std::gcd(std::labs(p), std::labs(q)) != 1) continue;
      const double x = p * a1 + q * a2, y = p * b1 + q * b2;
      if (std::max(std::fabs(x), std::fabs(y)) <= rho) out.emplace_back(x, y);
    }
  std::sort(out.begin(), out.end());
  return out;
}

// --- beta and its finite-difference derivative ------------------------------

inline std::vector<double> slow_beta(int d, double s) {
  std::vector<double> b(d);
  double r = 0, pw = 1;
  for (int i = 1; i <= d; ++i) {
    pw *= s;
    b[i - 1] = pw;
    r += pw;
  }
  for (double& v : b) v /= r;
  return b;
}

inline std::vector<double> slow_beta_fd(int d, double s, double h) {
  const std::vector<double> hi = slow_beta(d, s + h), lo = slow_beta(d, s - h);
  std::vector<double> out(d);
  for (int i = 0; i < d; ++i) out[i] = (hi[i] - lo[i]) / (2 * h);
  return out;
}

// --- integer rank by fraction-free elimination ------------------------------
//
// Bareiss on long long; fine for the small {-1,0,1} matrices in play.
inline int slow_rank(std::vector<std::vector<long long>> m) {
  if (m.empty()) return 0;
  const int rows = static_cast<int>(m.size());
  const int cols = static_cast<int>(m[0].size());
  int rank = 0;
  long long prev = 1;
  for (int col = 0; col < cols && rank < rows; ++col) {
    int piv = -1;
    for (int r = rank; r < rows; ++r)
      if (m[r][col] != 0) { piv = r; break; }
    if (piv < 0) continue;
    std::swap(m[rank], m[piv]);
    for (int r = rank + 1; r < rows; ++r) {
      for (int c = col + 1; c < cols; ++c)
        m[r][c] = (m[rank][col] * m[r][c] - m[r][col] * m[rank][c]) / prev;
      m[r][col] = 0;
    }
    prev = m[rank][col];
    ++rank;
  }
  return rank;
}

// The pairing matrix straight from its definition.
inline std::vector<std::vector<long long>> slow_q(const std::vector<int>& sigma) {
  const int d = static_cast<int>(sigma.size());
  std::vector<std::vector<long long>> m(d, std::vector<long long>(d, 0));
  for (int i = 1; i <= d; ++i)
    for (int j = 1; j <= d; ++j) {
      if (i > j && sigma[i - 1] < sigma[j - 1]) m[i - 1][j - 1] = 1;
      if (i < j && sigma[i - 1] > sigma[j - 1]) m[i - 1][j - 1] = -1;
    }
  return m;
}

// Q(u, v) expanded over inversion pairs; equals the suspension polygon area
// when u = a, v = b.
inline double slow_q_eval(const std::vector<int>& sigma, const std::vector<double>& u,
                          const std::vector<double>& v) {
  const int d = static_cast<int>(sigma.size());
  double out = 0;
  for (int i = 1; i <= d; ++i)
    for (int j = i + 1; j <= d; ++j)
      if (sigma[i - 1] > sigma[j - 1]) out += u[j - 1] * v[i - 1] - u[i - 1] * v[j - 1];
  return out;
}

// Shoelace area of the suspension polygon, built from scratch.
inline double slow_area(const std::vector<int>& sigma, const std::vector<double>& a,
                        const std::vector<double>& b) {
  const int d = static_cast<int>(sigma.size());
  std::vector<double> tx(d + 1, 0), ty(d + 1, 0), bx(d + 1, 0), by(d + 1, 0);
  const std::vector<int> inv = inverse_perm(sigma);
  for (int i = 1; i <= d; ++i) {
    tx[i] = tx[i - 1] + a[i - 1];
    ty[i] = ty[i - 1] + b[i - 1];
  }
  for (int j = 1; j <= d; ++j) {
    bx[j] = bx[j - 1] + a[inv[j - 1] - 1];
    by[j] = by[j - 1] + b[inv[j - 1] - 1];
  }
  std::vector<std::pair<double, double>> cyc;
  cyc.emplace_back(tx[0], ty[0]);
  for (int j = 1; j < d; ++j) cyc.emplace_back(bx[j], by[j]);
  cyc.emplace_back(tx[d], ty[d]);
  for (int i = d - 1; i >= 1; --i) cyc.emplace_back(tx[i], ty[i]);
  double two_a = 0;
  for (size_t c = 0; c < cyc.size(); ++c) {
    const auto& [x1, y1] = cyc[c];
    const auto& [x2, y2] = cyc[(c + 1) % cyc.size()];
    two_a += x1 * y2 - x2 * y1;
  }
  return two_a / 2;
}

// Heights y_i, y'_j and the step values L_i = y_i - y'_{sigma(i)}.
inline std::vector<double> slow_L(const std::vector<int>& sigma,
                                  const std::vector<double>& b) {
  const int d = static_cast<int>(sigma.size());
  const std::vector<int> inv = inverse_perm(sigma);
  std::vector<double> y(d + 1, 0), yp(d + 1, 0), L(d);
  for (int i = 1; i <= d; ++i) y[i] = y[i - 1] + b[i - 1];
  for (int j = 1; j <= d; ++j) yp[j] = yp[j - 1] + b[inv[j - 1] - 1];
  for (int i = 1; i <= d; ++i) L[i - 1] = y[i] - yp[sigma[i - 1]];
  return L;
}

}  // namespace oracle
