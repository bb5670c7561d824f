#include "ietsurf/surface.hpp"

namespace ietsurf {

std::vector<std::vector<long long>> boundary_matrix(const Permutation& p) {
  const StratumData st = singularity_data(p);
  const int d = p.d();
  std::vector<std::vector<long long>> m(st.k, std::vector<long long>(d, 0));
  for (int i = 1; i <= d; ++i) {
    m[st.class_of_upper(i)][i - 1] += 1;
    m[st.class_of_upper(i - 1)][i - 1] -= 1;
  }
  return m;
}

std::vector<std::vector<long long>> boundary_kernel(const Permutation& p) {
  return integer_kernel(boundary_matrix(p));
}

}  // namespace ietsurf
