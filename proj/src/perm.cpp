#include "ietsurf/perm.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <numeric>
#include <sstream>

namespace ietsurf {

Permutation::Permutation(std::vector<int> image) : img_(std::move(image)) {
  const int d = static_cast<int>(img_.size());
  if (d < 2) throw ParseError("permutation needs d >= 2");
  std::vector<char> seen(d + 1, 0);
  for (int v : img_) {
    if (v < 1 || v > d || seen[v])
      throw ParseError(fmt::format("image list is not a bijection on 1..{}", d));
    seen[v] = 1;
  }
  inv_.assign(d, 0);
  for (int i = 1; i <= d; ++i) inv_[img_[i - 1] - 1] = i;
}

Permutation Permutation::inverse() const {
  return Permutation(inv_);
}

Permutation Permutation::reversal(int d) {
  std::vector<int> img(d);
  for (int i = 1; i <= d; ++i) img[i - 1] = d + 1 - i;
  return Permutation(img);
}

Permutation Permutation::parse(const std::string& text) {
  std::vector<int> img;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      size_t pos = 0;
      int v = std::stoi(tok, &pos);
      while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
      if (pos != tok.size()) throw std::invalid_argument(tok);
      img.push_back(v);
    } catch (const std::exception&) {
      throw ParseError(fmt::format("bad permutation entry '{}'", tok));
    }
  }
  return Permutation(img);
}

std::string Permutation::to_string() const {
  std::string out;
  for (size_t i = 0; i < img_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(img_[i]);
  }
  return out;
}

bool is_irreducible(const Permutation& p) {
  const int d = p.d();
  int max_seen = 0;
  for (int k = 1; k < d; ++k) {
    max_seen = std::max(max_seen, p(k));
    if (max_seen == k) return false;  // sigma({1..k}) = {1..k}
  }
  return true;
}

std::string slot_name(int d, int slot) {
  if (slot <= d) return fmt::format("P{}", slot);
  return fmt::format("P'{}", slot - d - 1);
}

std::vector<long long> canonical_heights(const Permutation& p) {
  std::vector<long long> b(p.d());
  for (int i = 1; i <= p.d(); ++i) b[i - 1] = p(i) - i;
  return b;
}

namespace {

struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

using Vec2 = std::array<long long, 2>;

long long cross(const Vec2& u, const Vec2& v) { return u[0] * v[1] - u[1] * v[0]; }

// Does the interior sector at a CCW polygon corner (incoming direction u,
// outgoing direction w) contain the straight-down direction?  The sector
// sweeps CCW from w to -u; down = (0,-1) lies strictly inside a convex
// sector iff both boundary tests pass, inside a reflex one iff either does.
bool corner_contains_down(const Vec2& u, const Vec2& w) {
  const bool from_w = w[0] < 0;   // cross(w, down) > 0
  const bool to_u = u[0] < 0;     // cross(down, -u) > 0
  if (cross(u, w) >= 0) return from_w && to_u;
  return from_w || to_u;
}

}  // namespace

StratumData singularity_data_with_heights(const Permutation& p,
                                          const std::vector<long long>& b) {
  if (!is_irreducible(p))
    throw NotIrreducible("singularity data needs an irreducible permutation");
  const int d = p.d();

  // Vertex identifications: edge i glues P_{i-1} -> P'_{sigma(i)-1} and
  // P_i -> P'_{sigma(i)}; the polygon itself identifies P_0 = P'_0 and
  // P_d = P'_d (shared corners of the two chains).
  Dsu dsu(2 * (d + 1));
  dsu.unite(slot_upper(0), slot_lower(d, 0));
  dsu.unite(slot_upper(d), slot_lower(d, d));
  for (int i = 1; i <= d; ++i) {
    dsu.unite(slot_upper(i - 1), slot_lower(d, p(i) - 1));
    dsu.unite(slot_upper(i), slot_lower(d, p(i)));
  }

  // Concrete polygon with a = (1,..,1): P_i = (i, y_i), P'_j = (x'_j, y'_j).
  std::vector<long long> y(d + 1, 0), yp(d + 1, 0), xp(d + 1, 0);
  for (int i = 1; i <= d; ++i) y[i] = y[i - 1] + b[i - 1];
  for (int j = 1; j <= d; ++j) {
    const int k = p.inverse_of(j);
    yp[j] = yp[j - 1] + b[k - 1];
    xp[j] = xp[j - 1] + 1;
  }
  for (int i = 1; i < d; ++i)
    if (y[i] <= 0 || yp[i] >= 0)
      throw SuspensionInvalid(
          fmt::format("heights do not suspend: index {} fails", i));

  // Counterclockwise corner cycle with the slot that owns each corner:
  // P_0, P'_1..P'_{d-1}, P_d, P_{d-1}..P_1.
  std::vector<std::pair<Vec2, int>> cyc;
  cyc.push_back({{0, 0}, slot_upper(0)});
  for (int j = 1; j < d; ++j) cyc.push_back({{xp[j], yp[j]}, slot_lower(d, j)});
  cyc.push_back({{static_cast<long long>(d), y[d]}, slot_upper(d)});
  for (int i = d - 1; i >= 1; --i)
    cyc.push_back({{static_cast<long long>(i), y[i]}, slot_upper(i)});

  // Each down separatrix of a singularity shows up as exactly one corner
  // whose sector contains (0,-1); cone angle 2*pi*(r+1) means r+1 of them.
  std::vector<int> down_count(2 * (d + 1), 0);
  const int n = static_cast<int>(cyc.size());
  for (int c = 0; c < n; ++c) {
    const Vec2& cur = cyc[c].first;
    const Vec2& prev = cyc[(c + n - 1) % n].first;
    const Vec2& next = cyc[(c + 1) % n].first;
    const Vec2 u{cur[0] - prev[0], cur[1] - prev[1]};
    const Vec2 w{next[0] - cur[0], next[1] - cur[1]};
    if (corner_contains_down(u, w)) ++down_count[dsu.find(cyc[c].second)];
  }

  StratumData out;
  out.slot_class.assign(2 * (d + 1), -1);
  std::vector<int> root_to_class(2 * (d + 1), -1);
  for (int s = 0; s < 2 * (d + 1); ++s) {
    const int r = dsu.find(s);
    if (root_to_class[r] < 0) {
      root_to_class[r] = out.k++;
      out.vertex_cycles.emplace_back();
      out.orders.push_back(down_count[r] - 1);
      if (down_count[r] < 1)
        throw InternalError("singularity class with no down separatrix");
    }
    out.slot_class[s] = root_to_class[r];
    out.vertex_cycles[root_to_class[r]].push_back(s);
  }

  const int sum_r = std::accumulate(out.orders.begin(), out.orders.end(), 0);
  if (sum_r % 2 != 0)
    throw InternalError("odd total singularity order");
  out.genus = (sum_r + 2) / 2;
  if (d != 2 * out.genus + out.k - 1)
    throw InternalError(
        fmt::format("dimension count failed: d={} g={} k={}", d, out.genus, out.k));
  return out;
}

StratumData singularity_data(const Permutation& p) {
  return singularity_data_with_heights(p, canonical_heights(p));
}

bool is_admissible(const Permutation& p) {
  const StratumData s = singularity_data(p);
  return std::all_of(s.orders.begin(), s.orders.end(),
                     [](int r) { return r >= 1; });
}

}  // namespace ietsurf
