#pragma once

// Permutation combinatorics and the singularity data of the suspended
// surface.  Everything here is exact integer arithmetic.

#include <string>
#include <vector>

#include "ietsurf/errors.hpp"

namespace ietsurf {

// A permutation of {1..d}, stored as its image list (1-indexed API: p(i) is
// sigma(i)).  Immutable after construction.
class Permutation {
 public:
  // image[k] = sigma(k+1).  Throws ParseError unless it is a bijection on
  // {1..d} with d >= 2.
  explicit Permutation(std::vector<int> image);

  int d() const { return static_cast<int>(img_.size()); }
  int operator()(int i) const { return img_[i - 1]; }       // sigma(i)
  int inverse_of(int j) const { return inv_[j - 1]; }       // sigma^{-1}(j)

  Permutation inverse() const;
  static Permutation reversal(int d);                       // i -> d+1-i
  static Permutation parse(const std::string& text);        // "4,3,2,1"
  std::string to_string() const;

  const std::vector<int>& image() const { return img_; }
  bool operator==(const Permutation& o) const { return img_ == o.img_; }

 private:
  std::vector<int> img_;
  std::vector<int> inv_;
};

// True iff no proper prefix {1..k}, k < d, is invariant under sigma.
bool is_irreducible(const Permutation& p);

// Vertex slots of the suspension polygon: slot i in [0,d] is P_i, slot
// d+1+j with j in [0,d] is P'_j.  There are 2(d+1) slots; the gluings
// identify them into the singularity classes.
inline int slot_upper(int i) { return i; }
inline int slot_lower(int d, int j) { return d + 1 + j; }
std::string slot_name(int d, int slot);  // "P3", "P'1", ...

struct StratumData {
  int k = 0;                    // number of singularities
  std::vector<int> orders;      // r_j per class, aligned with vertex_cycles
  int genus = 0;
  std::vector<std::vector<int>> vertex_cycles;  // slot ids per class
  std::vector<int> slot_class;  // size 2(d+1): class index of each slot

  int class_of_upper(int i) const { return slot_class[i]; }
  int class_of_lower(int d, int j) const { return slot_class[d + 1 + j]; }
};

// The canonical suspension heights b0_i = sigma(i) - i.  Irreducibility makes
// the partial sums satisfy y_i >= 1 and y'_i <= -1 on interior indices, so
// the polygon with a = (1,...,1), b = b0 always exists.
std::vector<long long> canonical_heights(const Permutation& p);

// Singularity classes, orders and genus, computed on the concrete polygon
// with a = (1,..,1) and the given integer heights (must be a valid
// suspension).  Exposed so tests can confirm the result does not depend on
// the height choice.
StratumData singularity_data_with_heights(const Permutation& p,
                                          const std::vector<long long>& b);

// Same, with b = canonical_heights(p).  Throws NotIrreducible.
StratumData singularity_data(const Permutation& p);

// True iff no singularity is a removable marked point (all orders >= 1).
bool is_admissible(const Permutation& p);

}  // namespace ietsurf
