#pragma once

#include "cma/rational.hpp"

#include <vector>

namespace cma {

struct Interval {
  Q lo, hi;

  Interval() = default;
  explicit Interval(const Q& x) : lo(x), hi(x) {}
  Interval(const Q& a, const Q& b) : lo(a), hi(b) {}

  bool contains(const Q& x) const { return lo <= x && x <= hi; }
  bool contains(const Interval& o) const { return lo <= o.lo && o.hi <= hi; }
  Q width() const { return hi - lo; }
  Q mid() const { return (lo + hi) / 2; }
};

using Box = std::vector<Interval>;

Interval operator+(const Interval& a, const Interval& b);
Interval operator-(const Interval& a, const Interval& b);
Interval operator-(const Interval& a);
Interval operator*(const Interval& a, const Interval& b);
Interval sqr(const Interval& a);
// b must not contain 0.
Interval operator/(const Interval& a, const Interval& b);
Interval hull(const Interval& a, const Interval& b);

// Outward rounding of both endpoints to multiples of 2^-bits.
Interval widen(const Interval& a, unsigned bits);

// Enclosures of exp and sin over an interval; one-point inputs give widths below 2^-k.
Interval iexp(const Interval& a, unsigned k);
Interval isin(const Interval& a, unsigned k);
Interval icos(const Interval& a, unsigned k);
// pi within 2^-k.
Interval ipi(unsigned k);

}  // namespace cma
