#pragma once

#include <initializer_list>
#include <vector>

#include "erlattice/lattice.hpp"
#include "erlattice/random.hpp"

namespace testing_support {

// fam(3, {{}, {1}, {1, 2}}): 1-based element lists, in the given order.
inline erl::SetFamily fam(int n, std::initializer_list<std::initializer_list<int>> sets) {
  erl::SetFamily out(n);
  for (const auto& s : sets) {
    const std::vector<int> elems(s);
    out.add(erl::Subset::from_elements(n, elems).bits());
  }
  return out;
}

inline erl::SetFamily from_bits(int n, std::uint64_t characteristic) {
  erl::SetFamily out(n);
  for (std::uint64_t rest = characteristic; rest != 0; rest &= rest - 1) {
    out.add(static_cast<erl::Mask>(std::countr_zero(rest)));
  }
  return out;
}

inline erl::SetFamily chain(int n, int length) {
  erl::SetFamily out(n);
  erl::Mask m = 0;
  for (int i = 0; i < length; ++i) {
    out.add(m);
    m |= erl::Mask{1} << i;
  }
  return out;
}

inline erl::SetFamily random_subfamily(erl::Rng& rng, int n, double p) {
  erl::SetFamily out(n);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m) {
    if (rng.bernoulli(p)) out.add(static_cast<erl::Mask>(m));
  }
  return out;
}

}  // namespace testing_support
