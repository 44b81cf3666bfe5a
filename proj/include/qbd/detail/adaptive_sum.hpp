#pragma once

#include <cmath>

#include "qbd/error.hpp"

namespace qbd {

// `term(n)` returns {value, magnitude}; the magnitude drives the stopping rule.
template <typename Term>
double sum_until_negligible(Term&& term, double threshold, long min_levels, long max_levels) {
  double total = 0.0;
  int quiet = 0;
  for (long n = 0; n < max_levels; ++n) {
    const auto [value, magnitude] = term(n);
    total += value;
    quiet = magnitude < threshold ? quiet + 1 : 0;
    if (quiet >= 5 && n >= min_levels) return total;
  }
  throw Error(ErrorKind::NoConvergence, "tail summation did not settle");
}

}  // namespace qbd
