// Copyright 2026 The cpesdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string>

namespace cpesdp {

// Domain or precondition violation. Messages are stable and tested.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct BisectionOptions {
  double x_tolerance = 1e-10;
  int max_iterations = 4000;
};

// Root of a strictly monotone `f` on [lo, hi], where f(lo) and f(hi) have
// opposite signs. Iterates until the bracket is narrower than
// `x_tolerance` or cannot be split further in double precision.
template <std::invocable<double> F>
double Bisect(const F& f, double lo, double hi,
              const BisectionOptions& opts = {}) {
  double f_lo = f(lo);
  const double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if (std::signbit(f_lo) == std::signbit(f_hi)) {
    throw DomainError("bisection interval does not bracket a root");
  }
  for (int i = 0; i < opts.max_iterations; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (hi - lo <= opts.x_tolerance || mid <= lo || mid >= hi) {
      return mid;
    }
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if (std::signbit(f_mid) == std::signbit(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

// Grows `hi` geometrically until `f` changes sign relative to f(lo).
// Returns the expanded upper end.
template <std::invocable<double> F>
double ExpandUpperBracket(const F& f, double lo, double hi,
                          int max_doublings = 2000) {
  const bool sign_lo = std::signbit(f(lo));
  for (int i = 0; i < max_doublings; ++i) {
    if (std::signbit(f(hi)) != sign_lo || f(hi) == 0.0) return hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) break;
  }
  throw DomainError("could not bracket root");
}

}  // namespace cpesdp
