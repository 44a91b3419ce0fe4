#pragma once

#include <stdexcept>

namespace fracseg {

// Exponent pair (s, a) with a = 1 - 2s. `a` is always recomputed from `s`,
// never stored independently, so the two can't drift apart.
struct FracParam {
  double s = 0.5;
  double a = 0.0;
};

inline FracParam make_params(double s) {
  if (!(s > 0.0 && s < 1.0))
    throw std::domain_error("make_params: s must lie in (0,1)");
  return FracParam{s, 1.0 - 2.0 * s};
}

}  // namespace fracseg
