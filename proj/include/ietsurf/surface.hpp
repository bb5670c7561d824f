#pragma once

// One-polygon translation surfaces: Masur's suspension over an interval
// exchange, the SL(2,R) action, saddle-connection enumeration by unfolding
// the triangulated polygon, the shortest-connection function phi, vertical
// return maps to the horizontal diameter, and real REL deformations.

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "ietsurf/errors.hpp"
#include "ietsurf/iet.hpp"
#include "ietsurf/pairing.hpp"
#include "ietsurf/perm.hpp"
#include "ietsurf/scalars.hpp"

namespace ietsurf {

template <class K>
struct V2 {
  K x{0}, y{0};
  V2 operator+(const V2& o) const { return {x + o.x, y + o.y}; }
  V2 operator-(const V2& o) const { return {x - o.x, y - o.y}; }
  V2 operator-() const { return {-x, -y}; }
  bool operator==(const V2& o) const { return x == o.x && y == o.y; }
};

template <class K>
K cross(const V2<K>& u, const V2<K>& v) { return u.x * v.y - u.y * v.x; }
template <class K>
K dot(const V2<K>& u, const V2<K>& v) { return u.x * v.x + u.y * v.y; }
template <class K>
K linf(const V2<K>& u) { return std::max(abs_k(u.x), abs_k(u.y)); }

template <class K>
struct SaddleConnection {
  V2<K> hol;
  int from = -1, to = -1;  // singularity class labels
  K len() const { return linf(hol); }
};

// Vertices of the suspension polygon: upper chain P_0..P_d, lower chain
// P'_0..P'_d, upper edge i glued to lower edge perm(i) by translation.
// a, b always hold the current edge holonomies (so after a shear they are
// the sheared data, not the original suspension data).
template <class K>
struct TranslationSurface {
  Permutation perm;
  std::vector<K> a, b;
  std::vector<V2<K>> top, bot;
  StratumData strat;

  explicit TranslationSurface(Permutation p) : perm(std::move(p)) {}
  int d() const { return perm.d(); }
  K total_width() const { return top.back().x; }
  K area() const {  // shoelace over the boundary cycle
    K two_a(0);
    const int n = d();
    // cycle P_0, P'_1..P'_{d-1}, P_d, P_{d-1}..P_1
    std::vector<V2<K>> cyc;
    cyc.push_back(top[0]);
    for (int j = 1; j < n; ++j) cyc.push_back(bot[j]);
    cyc.push_back(top[n]);
    for (int i = n - 1; i >= 1; --i) cyc.push_back(top[i]);
    for (size_t c = 0; c < cyc.size(); ++c)
      two_a += cross(cyc[c], cyc[(c + 1) % cyc.size()]);
    return two_a / K(2);
  }
};

using Mat2 = std::array<std::array<double, 2>, 2>;

inline Mat2 geodesic_matrix(double t) {
  return {{{std::exp(t / 2), 0.0}, {0.0, std::exp(-t / 2)}}};
}
inline Mat2 horocycle_matrix(double s) { return {{{1.0, s}, {0.0, 1.0}}}; }
inline Mat2 rotation_matrix(double theta) {
  return {{{std::cos(theta), -std::sin(theta)},
           {std::sin(theta), std::cos(theta)}}};
}

template <class K>
TranslationSurface<K> suspend(const Permutation& p, const std::vector<K>& a,
                              const std::vector<K>& b) {
  const int d = p.d();
  if (!is_irreducible(p))
    throw NotIrreducible("suspend: permutation is reducible");
  if (static_cast<int>(a.size()) != d || static_cast<int>(b.size()) != d)
    throw DimensionMismatch("suspend: vector sizes != permutation size");
  for (const K& ai : a)
    if (!(sign_of(ai) > 0)) throw InvalidLengths("suspend: lengths must be positive");

  TranslationSurface<K> q(p);
  q.a = a;
  q.b = b;
  q.top.assign(d + 1, V2<K>{});
  q.bot.assign(d + 1, V2<K>{});
  for (int i = 1; i <= d; ++i)
    q.top[i] = {q.top[i - 1].x + a[i - 1], q.top[i - 1].y + b[i - 1]};
  for (int j = 1; j <= d; ++j) {
    const int i = p.inverse_of(j);
    q.bot[j] = {q.bot[j - 1].x + a[i - 1], q.bot[j - 1].y + b[i - 1]};
  }
  for (int i = 1; i < d; ++i) {
    if (!(sign_of(q.top[i].y) > 0))
      throw SuspensionInvalid(
          fmt::format("suspension fails: y_{} <= 0", i));
    if (!(sign_of(q.bot[i].y) < 0))
      throw SuspensionInvalid(
          fmt::format("suspension fails: y'_{} >= 0", i));
  }
  if (!(sign_of(q.area()) > 0))
    throw SuspensionInvalid("suspension fails: polygon area is not positive");
  q.strat = singularity_data(p);
  return q;
}

template <class K>
TranslationSurface<double> to_double(const TranslationSurface<K>& q) {
  TranslationSurface<double> out(q.perm);
  out.strat = q.strat;
  const int d = q.d();
  out.a.resize(d);
  out.b.resize(d);
  out.top.resize(d + 1);
  out.bot.resize(d + 1);
  for (int i = 0; i < d; ++i) {
    out.a[i] = to_dbl(q.a[i]);
    out.b[i] = to_dbl(q.b[i]);
  }
  for (int i = 0; i <= d; ++i) {
    out.top[i] = {to_dbl(q.top[i].x), to_dbl(q.top[i].y)};
    out.bot[i] = {to_dbl(q.bot[i].x), to_dbl(q.bot[i].y)};
  }
  return out;
}

inline TranslationSurface<double> apply_matrix(const TranslationSurface<double>& q,
                                               const Mat2& g) {
  const double det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
  if (std::fabs(det - 1.0) > 1e-12)
    throw NotUnimodular(fmt::format("matrix determinant {} != 1", det));
  TranslationSurface<double> out = q;
  auto map = [&](const V2<double>& v) -> V2<double> {
    return {g[0][0] * v.x + g[0][1] * v.y, g[1][0] * v.x + g[1][1] * v.y};
  };
  const int d = q.d();
  for (int i = 0; i <= d; ++i) {
    out.top[i] = map(q.top[i]);
    out.bot[i] = map(q.bot[i]);
  }
  for (int i = 1; i <= d; ++i) {
    out.a[i - 1] = out.top[i].x - out.top[i - 1].x;
    out.b[i - 1] = out.top[i].y - out.top[i - 1].y;
  }
  return out;
}

inline TranslationSurface<double> normalize_area(const TranslationSurface<double>& q) {
  const double s = 1.0 / std::sqrt(q.area());
  TranslationSurface<double> out = q;
  for (auto* chain : {&out.top, &out.bot})
    for (auto& v : *chain) { v.x *= s; v.y *= s; }
  for (auto* vec : {&out.a, &out.b})
    for (auto& x : *vec) x *= s;
  return out;
}

// --------------------------------------------------------------------------
// Polygon geometry shared by triangulation, unfolding and the return map.

namespace detail {

// Is direction w strictly inside the sector sweeping CCW from s to e
// (angle in (0, 2*pi))?  Straight corners (e = -s) count as half planes.
template <class K>
bool dir_strictly_inside(const V2<K>& s, const V2<K>& e, const V2<K>& w) {
  const int c = sign_of(cross(s, e));
  if (c > 0) return sign_of(cross(s, w)) > 0 && sign_of(cross(w, e)) > 0;
  if (c < 0) return sign_of(cross(s, w)) > 0 || sign_of(cross(w, e)) > 0;
  if (sign_of(dot(s, e)) < 0) return sign_of(cross(s, w)) > 0;
  return false;
}

template <class K>
struct PolyGeom {
  int n = 0;                       // 2d boundary corners
  std::vector<V2<K>> corner;       // CCW cycle P_0, P'_1.., P_d, P_{d-1}..
  std::vector<int> corner_slot;    // owning slot id per corner
  std::vector<int> bpartner;       // glued partner of boundary edge e
  std::vector<V2<K>> bjump;        // teleports a point on edge e to partner
  std::vector<V2<K>> bdelta;       // translates the unfolded copy across e
};

template <class K>
PolyGeom<K> build_geom(const TranslationSurface<K>& q) {
  const int d = q.d();
  PolyGeom<K> g;
  g.n = 2 * d;
  g.corner.reserve(g.n);
  g.corner_slot.reserve(g.n);
  g.corner.push_back(q.top[0]);
  g.corner_slot.push_back(slot_upper(0));
  for (int j = 1; j < d; ++j) {
    g.corner.push_back(q.bot[j]);
    g.corner_slot.push_back(slot_lower(d, j));
  }
  g.corner.push_back(q.top[d]);
  g.corner_slot.push_back(slot_upper(d));
  for (int i = d - 1; i >= 1; --i) {
    g.corner.push_back(q.top[i]);
    g.corner_slot.push_back(slot_upper(i));
  }
  // Boundary edge e runs corner[e] -> corner[e+1]: e in [0,d-1] is lower
  // edge e+1, e in [d,2d-1] is upper edge 2d-e (traversed backwards).
  g.bpartner.resize(g.n);
  g.bjump.resize(g.n);
  g.bdelta.resize(g.n);
  for (int e = 0; e < g.n; ++e) {
    int partner;
    if (e < d) {
      const int j = e + 1;
      partner = 2 * d - q.perm.inverse_of(j);
      if (partner == 2 * d) partner = d;  // upper edge d sits at index d
    } else {
      const int i = 2 * d - e;
      partner = q.perm(i) - 1;
    }
    g.bpartner[e] = partner;
    const V2<K> start = g.corner[e];
    const V2<K> pend = g.corner[(partner + 1) % g.n];
    g.bjump[e] = pend - start;
    g.bdelta[e] = start - pend;
  }
  return g;
}

template <class K>
int orient_sign(const V2<K>& a, const V2<K>& b, const V2<K>& c) {
  return sign_of(cross(b - a, c - a));
}

template <class K>
bool on_segment_collinear(const V2<K>& a, const V2<K>& b, const V2<K>& p) {
  return !(p.x < std::min(a.x, b.x)) && !(std::max(a.x, b.x) < p.x) &&
         !(p.y < std::min(a.y, b.y)) && !(std::max(a.y, b.y) < p.y);
}

// Exact minimum of max(|x|,|y|) over the segment [p,q]; candidates are the
// endpoints and the parameters where x, y, x-y or x+y change sign.
template <class K>
K min_linf_on_segment(const V2<K>& p, const V2<K>& q) {
  const V2<K> dvec = q - p;
  K best = std::min(linf(p), linf(q));
  auto consider_root = [&](const K& num, const K& den) {
    if (sign_of(den) == 0) return;
    const K t = num / den;
    if (!(sign_of(t) > 0)) return;
    if (!(t < K(1))) return;
    const V2<K> at{p.x + t * dvec.x, p.y + t * dvec.y};
    best = std::min(best, linf(at));
  };
  consider_root(-p.x, dvec.x);
  consider_root(-p.y, dvec.y);
  consider_root(-(p.x - p.y), dvec.x - dvec.y);
  consider_root(-(p.x + p.y), dvec.x + dvec.y);
  return best;
}

}  // namespace detail

// Exactly tests whether the boundary polygon is embedded (simple).  The
// suspension inequalities alone do not guarantee this when sum(b) != 0.
template <class K>
bool is_simple(const TranslationSurface<K>& q) {
  const auto g = detail::build_geom(q);
  const int n = g.n;
  if (n < 4) return false;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (g.corner[i] == g.corner[j]) return false;
  for (int i = 0; i < n; ++i) {
    const V2<K>&p1 = g.corner[i], &p2 = g.corner[(i + 1) % n];
    for (int j = i + 1; j < n; ++j) {
      const V2<K>&p3 = g.corner[j], &p4 = g.corner[(j + 1) % n];
      const bool adj = (j == i + 1) || (i == 0 && j == n - 1);
      if (adj) {
        // Consecutive edges may only meet at the shared corner: reject a
        // collinear fold-back.
        const V2<K>& shared = (j == i + 1) ? p2 : p1;
        const V2<K>& o1 = (j == i + 1) ? p1 : p2;
        const V2<K>& o2 = (j == i + 1) ? p4 : p3;
        if (sign_of(cross(o1 - shared, o2 - shared)) == 0 &&
            sign_of(dot(o1 - shared, o2 - shared)) > 0)
          return false;
        continue;
      }
      const int d1 = detail::orient_sign(p3, p4, p1);
      const int d2 = detail::orient_sign(p3, p4, p2);
      const int d3 = detail::orient_sign(p1, p2, p3);
      const int d4 = detail::orient_sign(p1, p2, p4);
      if (d1 * d2 < 0 && d3 * d4 < 0) return false;
      if (d1 == 0 && detail::on_segment_collinear(p3, p4, p1)) return false;
      if (d2 == 0 && detail::on_segment_collinear(p3, p4, p2)) return false;
      if (d3 == 0 && detail::on_segment_collinear(p1, p2, p3)) return false;
      if (d4 == 0 && detail::on_segment_collinear(p1, p2, p4)) return false;
    }
  }
  return true;
}

namespace detail {

struct TriRec {
  std::array<int, 3> v;      // corner ids, CCW
  std::array<int, 3> nbr;    // neighbor triangle across side s (or -1)
  std::array<int, 3> nbs;    // matching side in the neighbor
  std::array<int, 3> bedge;  // boundary edge id (or -1)
};

struct Diagonal {
  int c1, c2;
};

// Ear clipping.  Assumes the polygon is simple; with exact scalars this
// always terminates, the step cap only guards float degeneracies.
template <class K>
void triangulate(const PolyGeom<K>& g, std::vector<TriRec>& tris,
                 std::vector<Diagonal>& diags) {
  const int n = g.n;
  std::vector<int> act(n);
  for (int i = 0; i < n; ++i) act[i] = i;
  tris.clear();
  diags.clear();
  int guard = 0;
  while (static_cast<int>(act.size()) > 3) {
    if (++guard > 4 * n)
      throw InternalError("ear clipping did not terminate");
    bool found = false;
    const int m = static_cast<int>(act.size());
    for (int k = 0; k < m && !found; ++k) {
      const int ip = act[(k + m - 1) % m], ic = act[k], in = act[(k + 1) % m];
      const V2<K>&P = g.corner[ip], &C = g.corner[ic], &N = g.corner[in];
      if (!(sign_of(cross(C - P, N - C)) > 0)) continue;  // not convex
      bool blocked = false;
      for (int o : act) {
        if (o == ip || o == ic || o == in) continue;
        const V2<K>& O = g.corner[o];
        const int s1 = orient_sign(P, C, O), s2 = orient_sign(C, N, O),
                  s3 = orient_sign(N, P, O);
        if (s1 > 0 && s2 > 0 && s3 > 0) { blocked = true; break; }  // inside
        if (s3 == 0 && on_segment_collinear(N, P, O)) { blocked = true; break; }
      }
      if (blocked) continue;
      tris.push_back(TriRec{{ip, ic, in}, {-1, -1, -1}, {-1, -1, -1}, {-1, -1, -1}});
      diags.push_back(Diagonal{ip, in});
      act.erase(act.begin() + k);
      found = true;
    }
    if (!found) throw InternalError("no ear found; polygon is not simple?");
  }
  if (sign_of(cross(g.corner[act[1]] - g.corner[act[0]],
                    g.corner[act[2]] - g.corner[act[1]])) <= 0)
    throw InternalError("degenerate final triangle");
  tris.push_back(TriRec{{act[0], act[1], act[2]},
                        {-1, -1, -1}, {-1, -1, -1}, {-1, -1, -1}});

  // Link sides: consecutive cycle corners are boundary, the rest pair up.
  std::map<std::pair<int, int>, std::pair<int, int>> open;
  for (int t = 0; t < static_cast<int>(tris.size()); ++t)
    for (int s = 0; s < 3; ++s) {
      const int u = tris[t].v[s], v = tris[t].v[(s + 1) % 3];
      if ((u + 1) % n == v) { tris[t].bedge[s] = u; continue; }
      if ((v + 1) % n == u) { tris[t].bedge[s] = v; continue; }
      const int lo = std::min(u, v), hi = std::max(u, v);
      const auto it = open.find({lo, hi});
      if (it == open.end()) {
        open[{lo, hi}] = {t, s};
      } else {
        const auto [t2, s2] = it->second;
        tris[t].nbr[s] = t2;
        tris[t].nbs[s] = s2;
        tris[t2].nbr[s2] = t;
        tris[t2].nbs[s2] = s;
        open.erase(it);
      }
    }
  if (!open.empty()) throw InternalError("unmatched triangulation diagonal");
}

}  // namespace detail

// All saddle connections of L-infinity length <= rho, as directed vectors
// with source/target singularity labels.  Found by collecting triangulation
// edges, then unfolding triangle by triangle through every corner's
// visibility wedge; complete for the given rho.
template <class K>
std::vector<SaddleConnection<K>> saddle_connections_up_to(
    const TranslationSurface<K>& q, const K& rho) {
  if (!(sign_of(rho) > 0)) throw NonpositiveParameter("rho must be positive");
  if (!is_simple(q))
    throw SuspensionInvalid("saddle connection search needs an embedded polygon");

  const auto g = detail::build_geom(q);
  std::vector<detail::TriRec> tris;
  std::vector<detail::Diagonal> diags;
  detail::triangulate(g, tris, diags);

  auto corner_class = [&](int cid) { return q.strat.slot_class[g.corner_slot[cid]]; };

  std::vector<SaddleConnection<K>> found;
  auto record = [&](const V2<K>& hol, int from, int to) {
    if (rho < linf(hol)) return;
    found.push_back(SaddleConnection<K>{hol, from, to});
  };

  // Triangulation edges are saddle connections themselves (their interiors
  // avoid all corners); the wedge search below only ever reports vertices
  // strictly inside a window, so these have to be seeded explicitly.
  const int d = q.d();
  for (int i = 1; i <= d; ++i) {
    const V2<K> hol = q.top[i] - q.top[i - 1];
    const int c0 = q.strat.class_of_upper(i - 1), c1 = q.strat.class_of_upper(i);
    record(hol, c0, c1);
    record(-hol, c1, c0);
  }
  for (const auto& dg : diags) {
    const V2<K> hol = g.corner[dg.c2] - g.corner[dg.c1];
    record(hol, corner_class(dg.c1), corner_class(dg.c2));
    record(-hol, corner_class(dg.c2), corner_class(dg.c1));
  }

  // Which triangle side realizes each polygon boundary edge.
  std::vector<int> btri(g.n, -1), bside(g.n, -1);
  for (int t = 0; t < static_cast<int>(tris.size()); ++t)
    for (int s = 0; s < 3; ++s)
      if (tris[t].bedge[s] >= 0) {
        btri[tris[t].bedge[s]] = t;
        bside[tris[t].bedge[s]] = s;
      }
  for (int e = 0; e < g.n; ++e)
    if (btri[e] < 0) throw InternalError("boundary edge without owning triangle");

  // Wedge BFS.  A state says: rays from the source (at the origin) strictly
  // inside the window (u, v) enter triangle `tri` through its side `side`;
  // `off` maps that triangle's corner coordinates into the source frame.
  struct WState {
    int tri, side;
    V2<K> off, u, v;
  };
  long nodes = 0;
  const long node_budget = 20000000;
  std::vector<WState> stack;

  // Window-boundary sign with a relative collinearity fuzz on the float
  // backend: a developed corner that lands on a boundary ray only through
  // roundoff must count as on-ray, otherwise a segment running through a
  // closer singularity gets reported as a connection (e.g. 3x a lattice
  // vector on a torus with non-dyadic side lengths).
  auto wedge_sign = [](const V2<K>& p, const V2<K>& r) -> int {
    const K c = cross(p, r);
    if constexpr (!is_exact_v<K>) {
      if (abs_k(c) <= linf(p) * linf(r) * K(1e-12)) return 0;
    }
    return sign_of(c);
  };

  auto push_exit = [&](int tri, int side, const V2<K>& off, const V2<K>& u,
                       const V2<K>& v) {
    if (!(wedge_sign(u, v) > 0)) return;  // empty window
    if (tris[tri].nbr[side] >= 0) {
      stack.push_back(WState{tris[tri].nbr[side], tris[tri].nbs[side], off, u, v});
      return;
    }
    const int e = tris[tri].bedge[side];
    const int pe = g.bpartner[e];
    stack.push_back(WState{btri[pe], bside[pe], off + g.bdelta[e], u, v});
  };

  for (int t0 = 0; t0 < static_cast<int>(tris.size()); ++t0) {
    for (int c = 0; c < 3; ++c) {
      const int src_id = tris[t0].v[c];
      const int src_class = corner_class(src_id);
      const V2<K> S = g.corner[src_id];
      const V2<K> off0 = -S;
      const V2<K> u0 = g.corner[tris[t0].v[(c + 1) % 3]] - S;
      const V2<K> v0 = g.corner[tris[t0].v[(c + 2) % 3]] - S;
      stack.clear();
      push_exit(t0, (c + 1) % 3, off0, u0, v0);
      while (!stack.empty()) {
        if (++nodes > node_budget)
          throw InternalError("saddle connection search exceeded node budget");
        const WState w = stack.back();
        stack.pop_back();
        const detail::TriRec& tr = tris[w.tri];
        const V2<K> pa = g.corner[tr.v[w.side]] + w.off;
        const V2<K> pb = g.corner[tr.v[(w.side + 1) % 3]] + w.off;
        if (detail::min_linf_on_segment(pa, pb) > rho) continue;
        const int did = tr.v[(w.side + 2) % 3];
        const V2<K> dpos = g.corner[did] + w.off;
        const int cu = wedge_sign(w.u, dpos);
        const int cv = wedge_sign(dpos, w.v);
        if (cu > 0 && cv > 0) {
          record(dpos, src_class, corner_class(did));
          push_exit(w.tri, (w.side + 1) % 3, w.off, w.u, dpos);
          push_exit(w.tri, (w.side + 2) % 3, w.off, dpos, w.v);
        } else if (cu <= 0) {
          push_exit(w.tri, (w.side + 2) % 3, w.off, w.u, w.v);
        } else {
          push_exit(w.tri, (w.side + 1) % 3, w.off, w.u, w.v);
        }
      }
    }
  }

  // Deduplicate by (source, target, holonomy); float search results merge
  // holonomies within 1e-9 of the surface scale.
  std::sort(found.begin(), found.end(),
            [](const SaddleConnection<K>& l, const SaddleConnection<K>& r) {
              if (l.from != r.from) return l.from < r.from;
              if (l.to != r.to) return l.to < r.to;
              if (l.hol.x != r.hol.x) return l.hol.x < r.hol.x;
              return l.hol.y < r.hol.y;
            });
  K scale(0);
  for (const K& ai : q.a) scale += abs_k(ai);
  for (const K& bi : q.b) scale += abs_k(bi);
  const K tau = is_exact_v<K> ? K(0) : K(scale * K(1e-9));
  std::vector<SaddleConnection<K>> dedup;
  for (const auto& sc : found) {
    if (!dedup.empty()) {
      const auto& pr = dedup.back();
      if (pr.from == sc.from && pr.to == sc.to &&
          !(abs_k(pr.hol.x - sc.hol.x) > tau) &&
          !(abs_k(pr.hol.y - sc.hol.y) > tau))
        continue;
    }
    dedup.push_back(sc);
  }
  std::sort(dedup.begin(), dedup.end(),
            [](const SaddleConnection<K>& l, const SaddleConnection<K>& r) {
              if (l.hol.x != r.hol.x) return l.hol.x < r.hol.x;
              if (l.hol.y != r.hol.y) return l.hol.y < r.hol.y;
              if (l.from != r.from) return l.from < r.from;
              return l.to < r.to;
            });
  return dedup;
}

// phi = length of the shortest saddle connection.  The initial radius, the
// shortest polygon edge, already encloses a nonempty set.
template <class K>
std::pair<K, SaddleConnection<K>> shortest_sc(const TranslationSurface<K>& q) {
  K rho = linf(q.top[1] - q.top[0]);
  for (int i = 2; i <= q.d(); ++i)
    rho = std::min(rho, linf(q.top[i] - q.top[i - 1]));
  for (;;) {
    const auto all = saddle_connections_up_to(q, rho);
    if (!all.empty()) {
      const auto best = std::min_element(
          all.begin(), all.end(),
          [](const SaddleConnection<K>& l, const SaddleConnection<K>& r) {
            const K ll = l.len(), rl = r.len();
            if (ll != rl) return ll < rl;
            if (l.hol.x != r.hol.x) return l.hol.x < r.hol.x;
            if (l.hol.y != r.hol.y) return l.hol.y < r.hol.y;
            if (l.from != r.from) return l.from < r.from;
            return l.to < r.to;
          });
      return {best->len(), *best};
    }
    rho = rho + rho;
  }
}

template <class K>
K phi(const TranslationSurface<K>& q) { return shortest_sc(q).first; }

inline bool in_K_eps(const TranslationSurface<double>& q, double eps) {
  return phi(normalize_area(q)) >= eps;
}

// Horizontal saddle connections up to length 2*sum|a_i|; exact on exact
// scalars, tolerance 1e-10*sum|b_i| on the float backend.
template <class K>
std::vector<SaddleConnection<K>> horizontal_saddle_connections(
    const TranslationSurface<K>& q) {
  K sa(0), sb(0);
  for (const K& ai : q.a) sa += abs_k(ai);
  for (const K& bi : q.b) sb += abs_k(bi);
  const K tau = is_exact_v<K> ? K(0) : K(sb * K(1e-10));
  std::vector<SaddleConnection<K>> out;
  for (const auto& sc : saddle_connections_up_to(q, K(K(2) * sa)))
    if (!(abs_k(sc.hol.y) > tau)) out.push_back(sc);
  return out;
}

// Boundary map edges -> singularities: column i is e(end) - e(start) of the
// i-th edge class; its kernel is the absolute homology, dimension 2g.
std::vector<std::vector<long long>> boundary_matrix(const Permutation& p);
std::vector<std::vector<long long>> boundary_kernel(const Permutation& p);

template <class K>
std::vector<std::vector<long long>> boundary_matrix(const TranslationSurface<K>& q) {
  return boundary_matrix(q.perm);
}

// Real REL deformation: slide the singularities horizontally with direction
// r in the null space of the pairing, keeping all absolute x-periods fixed.
template <class K>
TranslationSurface<K> rel_deform(const TranslationSurface<K>& q,
                                 const std::vector<K>& r, const K& t) {
  const int d = q.d();
  if (static_cast<int>(r.size()) != d)
    throw DimensionMismatch("rel_deform: direction size != d");
  const QForm qf = q_matrix(q.perm);
  K rtol(0);
  if constexpr (!is_exact_v<K>) {
    for (const K& ri : r) rtol += abs_k(ri);
    rtol = K(rtol * K(1e-9));
  }
  for (int i = 0; i < d; ++i) {
    K row(0);
    for (int j = 0; j < d; ++j)
      if (qf.m[i][j] != 0) row += K(qf.m[i][j]) * r[j];
    if (abs_k(row) > rtol)
      throw NotInNullSpace("rel_deform: direction is not in the null space");
  }

  std::vector<K> a2(d);
  for (int i = 0; i < d; ++i) {
    a2[i] = q.a[i] + t * r[i];
    if (!(sign_of(a2[i]) > 0))
      throw LengthCollapse(fmt::format("length {} collapses", i + 1));
  }

  // Every corner of a singularity class must drift at the same speed; the
  // class speed then drives the collision check below.
  std::vector<K> vup(d + 1, K(0)), vlow(d + 1, K(0));
  for (int i = 1; i <= d; ++i) vup[i] = vup[i - 1] + r[i - 1];
  for (int j = 1; j <= d; ++j)
    vlow[j] = vlow[j - 1] + r[q.perm.inverse_of(j) - 1];
  std::vector<K> cls_vel(q.strat.k, K(0));
  std::vector<bool> seen(q.strat.k, false);
  auto note = [&](int cls, const K& vel) {
    if (!seen[cls]) { seen[cls] = true; cls_vel[cls] = vel; return; }
    if (abs_k(cls_vel[cls] - vel) > rtol)
      throw InternalError("null-space direction moves a singularity inconsistently");
  };
  for (int i = 0; i <= d; ++i) note(q.strat.class_of_upper(i), vup[i]);
  for (int j = 0; j <= d; ++j) note(q.strat.class_of_lower(d, j), vlow[j]);

  if (sign_of(t) != 0) {
    for (const auto& sc : horizontal_saddle_connections(q)) {
      if (sc.from == sc.to) continue;
      const K dv = cls_vel[sc.to] - cls_vel[sc.from];
      if (sign_of(dv) == 0) continue;
      const K hit = -sc.hol.x / dv;  // x-holonomy reaches 0 at this time
      const bool inside = sign_of(t) > 0 ? (sign_of(hit) > 0 && !(hit > t))
                                         : (sign_of(hit) < 0 && !(hit < t));
      if (inside)
        throw CollisionObstruction(
            "two singularities collide along the deformation");
    }
  }
  return suspend(q.perm, a2, q.b);
}

// --------------------------------------------------------------------------
// First-return map of the upward vertical flow to the horizontal diameter.

namespace detail {

template <class K>
struct TravPiece {
  K param0, len, x0, y;
};

}  // namespace detail

template <class K>
Iet<K> vertical_return_map(const TranslationSurface<K>& q) {
  const int d = q.d();
  if (!is_simple(q))
    throw SuspensionInvalid("vertical return map needs an embedded polygon");
  for (int i = 1; i <= d; ++i)
    if (!(sign_of(q.top[i].x - q.top[i - 1].x) > 0))
      throw DegenerateTransversal(
          fmt::format("edge {} has nonpositive horizontal extent", i));
  for (int i = 1; i < d; ++i)
    if (!(sign_of(q.top[i].y) > 0) || !(sign_of(q.bot[i].y) < 0))
      throw DegenerateTransversal(
          "the horizontal diameter is not interior to the surface");

  const auto g = detail::build_geom(q);
  const K total = q.total_width();
  const int step_cap = 100000;

  // Shoot an axis-parallel ray and report the nearest boundary crossing and
  // the nearest corner hit.  dir: 0 = +x, 1 = -y, 2 = +y.  `skip` names the
  // edge the ray starts on (after a gluing teleport): an axis-parallel ray
  // meets that edge only at its start point, but roundoff can report the
  // crossing at a tiny positive distance, bouncing the ray back out of the
  // polygon, so the edge is excluded outright.
  struct RayHit {
    bool has_edge = false, has_vertex = false;
    K edge_dist{0}, vertex_dist{0};
    int edge = -1;
    V2<K> edge_pt;
  };
  auto cast_ray = [&](const V2<K>& pos, int dir, int skip) {
    RayHit h;
    for (int e = 0; e < g.n; ++e) {
      if (e == skip) continue;
      const V2<K>&w1 = g.corner[e], &w2 = g.corner[(e + 1) % g.n];
      const K c1 = dir == 0 ? w1.y - pos.y : w1.x - pos.x;
      const K c2 = dir == 0 ? w2.y - pos.y : w2.x - pos.x;
      if (sign_of(c1) == 0 || sign_of(c1) == sign_of(c2)) continue;
      // crossing point of the segment with the ray's supporting line
      const K f = c1 / (c1 - c2);
      const V2<K> pt{w1.x + f * (w2.x - w1.x), w1.y + f * (w2.y - w1.y)};
      K dist;
      if (dir == 0) dist = pt.x - pos.x;
      else if (dir == 1) dist = pos.y - pt.y;
      else dist = pt.y - pos.y;
      if (!(sign_of(dist) > 0)) continue;
      if (!h.has_edge || dist < h.edge_dist) {
        h.has_edge = true;
        h.edge_dist = dist;
        h.edge = e;
        h.edge_pt = pt;
      }
    }
    for (int c = 0; c < g.n; ++c) {
      const V2<K>& w = g.corner[c];
      K dist;
      if (dir == 0) {
        if (!(w.y == pos.y)) continue;
        dist = w.x - pos.x;
      } else {
        if (!(w.x == pos.x)) continue;
        dist = dir == 1 ? pos.y - w.y : w.y - pos.y;
      }
      if (!(sign_of(dist) > 0)) continue;
      if (!h.has_vertex || dist < h.vertex_dist) {
        h.has_vertex = true;
        h.vertex_dist = dist;
      }
    }
    return h;
  };

  // Phase 1: develop the diameter, a straight horizontal arc of length
  // total, into polygon pieces by following the edge gluings.
  std::vector<detail::TravPiece<K>> pieces;
  {
    V2<K> cur{K(0), K(0)};
    K param0(0);
    int on_edge = -1;
    int steps = 0;
    for (;;) {
      if (++steps > step_cap)
        throw InternalError("transversal development did not close up");
      const K remaining = total - param0;
      const RayHit h = cast_ray(cur, 0, on_edge);
      K lead(0);
      bool have_lead = false, vertex_first = false;
      if (h.has_edge) { lead = h.edge_dist; have_lead = true; }
      if (h.has_vertex && (!have_lead || !(lead < h.vertex_dist))) {
        lead = h.vertex_dist;
        have_lead = true;
        vertex_first = true;
      }
      if (!have_lead || !(lead < remaining)) {
        pieces.push_back({param0, remaining, cur.x, cur.y});
        break;
      }
      if (vertex_first)
        throw DegenerateTransversal("the diameter runs into a singularity");
      pieces.push_back({param0, h.edge_dist, cur.x, cur.y});
      param0 += h.edge_dist;
      cur = h.edge_pt + g.bjump[h.edge];
      on_edge = g.bpartner[h.edge];
    }
  }

  // Vertical developing ray: from pos, direction down (1) or up (2), stop at
  // the first transversal piece; corners on the way are degeneracies.
  auto flow_to_piece = [&](V2<K> pos, int dir) {
    int steps = 0;
    int on_edge = -1;
    for (;;) {
      if (++steps > step_cap)
        throw InternalError("vertical flow did not return to the diameter");
      bool have_piece = false;
      K piece_dist{0}, piece_param{0};
      for (const auto& pc : pieces) {
        if (pos.x < pc.x0 || pc.x0 + pc.len < pos.x) continue;
        const K dist = dir == 1 ? pos.y - pc.y : pc.y - pos.y;
        if (!(sign_of(dist) > 0)) continue;
        if (!have_piece || dist < piece_dist) {
          have_piece = true;
          piece_dist = dist;
          piece_param = pc.param0 + (pos.x - pc.x0);
        }
      }
      const RayHit h = cast_ray(pos, dir, on_edge);
      if (have_piece && (!h.has_edge || !(h.edge_dist < piece_dist))) {
        if (h.has_vertex && h.vertex_dist < piece_dist)
          throw DegenerateTransversal("vertical leaf hits a singularity");
        return piece_param;
      }
      if (!h.has_edge) {
        if (h.has_vertex)
          throw DegenerateTransversal("vertical leaf hits a singularity");
        throw InternalError("vertical leaf escaped the polygon");
      }
      if (h.has_vertex && !(h.edge_dist < h.vertex_dist))
        throw DegenerateTransversal("vertical leaf hits a singularity");
      pos = h.edge_pt + g.bjump[h.edge];
      on_edge = g.bpartner[h.edge];
    }
  };

  // Phase 2: each corner whose sector contains straight-down emits one
  // breakpoint of the return map; there are exactly d-1 of them.
  std::vector<K> breaks;
  for (int c = 0; c < g.n; ++c) {
    const V2<K> s = g.corner[(c + 1) % g.n] - g.corner[c];
    const V2<K> e = g.corner[(c + g.n - 1) % g.n] - g.corner[c];
    if (!detail::dir_strictly_inside(s, e, V2<K>{K(0), K(-1)})) continue;
    breaks.push_back(flow_to_piece(g.corner[c], 1));
  }
  std::sort(breaks.begin(), breaks.end());
  if (static_cast<int>(breaks.size()) != d - 1)
    throw DegenerateTransversal(
        fmt::format("expected {} breakpoints, found {}", d - 1, breaks.size()));
  for (size_t i = 0; i < breaks.size(); ++i) {
    if (!(sign_of(breaks[i]) > 0) || !(breaks[i] < total))
      throw DegenerateTransversal("breakpoint outside the open diameter");
    if (i > 0 && !(breaks[i - 1] < breaks[i]))
      throw DegenerateTransversal("coincident breakpoints");
  }

  // Phase 3: flow one midpoint per continuity interval upward; the image
  // parameter shifts by a constant on each interval.
  breaks.insert(breaks.begin(), K(0));
  breaks.push_back(total);
  std::vector<K> lengths(d), starts(d);
  for (int rix = 1; rix <= d; ++rix) {
    const K lo = breaks[rix - 1], hi = breaks[rix];
    lengths[rix - 1] = hi - lo;
    const K mid = (lo + hi) / K(2);
    const detail::TravPiece<K>* home = nullptr;
    for (const auto& pc : pieces)
      if (!(mid < pc.param0) && mid < pc.param0 + pc.len) { home = &pc; break; }
    if (home == nullptr) throw InternalError("midpoint not on the diameter");
    const V2<K> pos{home->x0 + (mid - home->param0), home->y};
    const K img = flow_to_piece(pos, 2);
    starts[rix - 1] = img - (mid - lo);
  }

  // The image intervals must tile [0, total); their rank order is the
  // permutation of the return map.
  std::vector<int> order(d);
  for (int i = 0; i < d; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](int l, int rr) { return starts[l] < starts[rr]; });
  const K tol = is_exact_v<K> ? K(0) : K(total * K(1e-9));
  K expect(0);
  std::vector<int> image(d);
  for (int rank = 0; rank < d; ++rank) {
    const int who = order[rank];
    if (abs_k(starts[who] - expect) > tol)
      throw InternalError("return map image intervals do not tile the diameter");
    image[who] = rank + 1;
    expect += lengths[who];
  }
  if (abs_k(expect - total) > tol)
    throw InternalError("return map image intervals do not tile the diameter");
  return Iet<K>(Permutation(image), lengths);
}

}  // namespace ietsurf
