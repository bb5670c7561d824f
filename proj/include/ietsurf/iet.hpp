#pragma once

// Interval exchange dynamics over a templated scalar backend: evaluation,
// orbits, the proximity statistic eps_n, and connection detection.
//
// Intervals are closed on the left and open on the right, so the map is
// defined at every discontinuity: I_i = [x_{i-1}, x_i) and T restricted to
// I_i is the translation onto I'_{sigma(i)} = [x'_{sigma(i)-1}, x'_{sigma(i)}).

#include <algorithm>
#include <utility>
#include <vector>

#include "ietsurf/errors.hpp"
#include "ietsurf/perm.hpp"
#include "ietsurf/scalars.hpp"

namespace ietsurf {

// A detected triple (i, j, m) with T^m(x_i) = x_j, indices in {0..d-1}.
// tolerance_match marks hits found with the float backend's tolerance
// |T^m(x_i) - x_j| <= tau instead of exact equality.
struct Connection {
  int i = 0;
  int j = 0;
  long m = 0;
  bool tolerance_match = false;

  bool operator==(const Connection& o) const {
    return i == o.i && j == o.j && m == o.m;
  }
};

template <class K>
class Iet {
 public:
  Iet(Permutation p, std::vector<K> lengths)
      : perm_(std::move(p)), a_(std::move(lengths)) {
    const int d = perm_.d();
    if (static_cast<int>(a_.size()) != d)
      throw DimensionMismatch("length vector size != permutation size");
    for (const K& v : a_)
      if (!(sign_of(v) > 0)) throw InvalidLengths("lengths must be positive");
    x_.assign(d + 1, K(0));
    xp_.assign(d + 1, K(0));
    for (int i = 1; i <= d; ++i) x_[i] = x_[i - 1] + a_[i - 1];
    for (int j = 1; j <= d; ++j) xp_[j] = xp_[j - 1] + a_[perm_.inverse_of(j) - 1];
  }

  const Permutation& perm() const { return perm_; }
  const std::vector<K>& lengths() const { return a_; }
  int d() const { return perm_.d(); }
  const K& total() const { return x_.back(); }
  const K& x(int i) const { return x_[i]; }
  const K& x_prime(int i) const { return xp_[i]; }

  // 1-based index of the interval I_i containing v (caller checks domain).
  int interval_index(const K& v) const {
    auto it = std::upper_bound(x_.begin() + 1, x_.end(), v);
    int i = static_cast<int>(it - x_.begin());
    return std::min(i, perm_.d());  // guard the float edge v == total
  }

  K evaluate(const K& v) const {
    check_domain(v);
    const int i = interval_index(v);
    K out = v - x_[i - 1] + xp_[perm_(i) - 1];
    return clamp(out);
  }

  K evaluate_inverse(const K& v) const {
    check_domain(v);
    auto it = std::upper_bound(xp_.begin() + 1, xp_.end(), v);
    int j = std::min(static_cast<int>(it - xp_.begin()), perm_.d());
    const int i = perm_.inverse_of(j);
    K out = v - xp_[j - 1] + x_[i - 1];
    return clamp(out);
  }

  // (x, Tx, ..., T^n x), or inverse iterates when forward = false.
  std::vector<K> orbit(const K& start, long n, bool forward = true) const {
    std::vector<K> pts;
    pts.reserve(n + 1);
    pts.push_back(start);
    K z = start;
    for (long r = 0; r < n; ++r) {
      z = forward ? evaluate(z) : evaluate_inverse(z);
      pts.push_back(z);
    }
    return pts;
  }

  // eps_n = min |x_i - T^r x_j| over 1 <= i,j <= d-1, |r| <= n, (j,r) != (i,0).
  // Streamed: only distances from orbit points to the r = 0 base points
  // matter, so each of the 2(d-1) orbit streams advances once per step and
  // queries its nearest base neighbor.  Returns the running value at each
  // schedule point (schedule strictly increasing, values >= 0).
  std::vector<std::pair<long, K>> epsilon_trace(const std::vector<long>& schedule) const {
    const int d = perm_.d();
    std::vector<K> base(x_.begin() + 1, x_.begin() + d);  // x_1..x_{d-1}
    std::sort(base.begin(), base.end());

    K best = total();  // sentinel: attained only when there are no candidates
    for (size_t t = 1; t < base.size(); ++t)
      best = std::min(best, K(base[t] - base[t - 1]));

    std::vector<std::pair<long, K>> out;
    size_t si = 0;
    while (si < schedule.size() && schedule[si] == 0) {
      out.emplace_back(0, best);
      ++si;
    }
    if (si == schedule.size()) return out;

    std::vector<K> fwd(base), bwd(base);
    const long n_max = schedule.back();
    for (long r = 1; r <= n_max; ++r) {
      for (K& z : fwd) {
        z = evaluate(z);
        best = std::min(best, nearest_base(base, z));
      }
      for (K& z : bwd) {
        z = evaluate_inverse(z);
        best = std::min(best, nearest_base(base, z));
      }
      while (si < schedule.size() && schedule[si] == r) {
        out.emplace_back(r, best);
        ++si;
      }
    }
    return out;
  }

  K epsilon_n(long n) const { return epsilon_trace({n}).back().second; }

  // Every (i, j, m) with m <= m_max and T^m(x_i) = x_j (i, j in {0..d-1});
  // exact equality on exact backends, |.| <= 1e-12 * total on double.
  // Sorted by m, then i.
  std::vector<Connection> detect_connections(long m_max) const {
    if (m_max < 1) throw OutOfDomain("m_max must be >= 1");
    const int d = perm_.d();
    const K tau = is_exact_v<K> ? K(0) : K(total() * K(1e-12));
    std::vector<K> targets(x_.begin(), x_.begin() + d);  // x_0..x_{d-1}, sorted
    std::vector<Connection> hits;
    for (int i = 0; i < d; ++i) {
      K z = x_[i];
      for (long m = 1; m <= m_max; ++m) {
        z = evaluate(z);
        auto it = std::lower_bound(targets.begin(), targets.end(), z);
        int j = -1;
        if (it != targets.end() && abs_k(*it - z) <= tau)
          j = static_cast<int>(it - targets.begin());
        else if (it != targets.begin() && abs_k(*(it - 1) - z) <= tau)
          j = static_cast<int>(it - targets.begin()) - 1;
        if (j >= 0) hits.push_back({i, j, m, !is_exact_v<K>});
      }
    }
    std::stable_sort(hits.begin(), hits.end(),
                     [](const Connection& l, const Connection& r) {
                       return l.m != r.m ? l.m < r.m : l.i < r.i;
                     });
    return hits;
  }

 private:
  void check_domain(const K& v) const {
    if (sign_of(v) < 0 || !(v < total()))
      throw OutOfDomain("point outside [0, sum a)");
  }

  // Rounding can push a float result onto the right endpoint; fold it back
  // into the half-open domain.  No-op on exact backends.
  K clamp(K v) const {
    if constexpr (!is_exact_v<K>) {
      if (v >= total()) v = std::nextafter(to_dbl(total()), 0.0);
      if (v < K(0)) v = K(0);
    }
    return v;
  }

  K nearest_base(const std::vector<K>& base, const K& z) const {
    auto it = std::lower_bound(base.begin(), base.end(), z);
    K best = total();
    if (it != base.end()) best = std::min(best, K(*it - z));
    if (it != base.begin()) best = std::min(best, K(z - *(it - 1)));
    return best;
  }

  Permutation perm_;
  std::vector<K> a_;
  std::vector<K> x_, xp_;
};

}  // namespace ietsurf
