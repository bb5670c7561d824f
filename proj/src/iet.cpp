#include "ietsurf/iet.hpp"

// The class template lives in the header; instantiate the three supported
// backends once here so every other translation unit links against these.

namespace ietsurf {

template class Iet<Rat>;
template class Iet<Q5>;
template class Iet<double>;

}  // namespace ietsurf
