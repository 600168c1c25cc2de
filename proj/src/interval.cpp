#include "cma/interval.hpp"

#include <algorithm>
#include <map>
#include <mutex>

namespace cma {

Interval operator+(const Interval& a, const Interval& b) { return {a.lo + b.lo, a.hi + b.hi}; }
Interval operator-(const Interval& a, const Interval& b) { return {a.lo - b.hi, a.hi - b.lo}; }
Interval operator-(const Interval& a) { return {-a.hi, -a.lo}; }

Interval operator*(const Interval& a, const Interval& b) {
  Q p1 = a.lo * b.lo, p2 = a.lo * b.hi, p3 = a.hi * b.lo, p4 = a.hi * b.hi;
  return {std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
}

Interval sqr(const Interval& a) {
  Q l2 = a.lo * a.lo, h2 = a.hi * a.hi;
  if (sgn(a.lo) >= 0) return {l2, h2};
  if (sgn(a.hi) <= 0) return {h2, l2};
  return {Q(0), std::max(l2, h2)};
}

Interval operator/(const Interval& a, const Interval& b) {
  if (b.contains(Q(0))) throw PreconditionError("interval division by an interval containing 0");
  Interval inv{1 / b.hi, 1 / b.lo};
  return a * inv;
}

Interval hull(const Interval& a, const Interval& b) { return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)}; }

Interval widen(const Interval& a, unsigned bits) { return {round_down(a.lo, bits), round_up(a.hi, bits)}; }

namespace {

unsigned mag_bits(const Q& x) {
  Q a = abs(x);
  if (a < 1) return 0;
  return static_cast<unsigned>(bit_length(ceil_q(a)));
}

// exp(x) for rational x, exact-sum Taylor after halving, then squaring.
Interval exp_point(const Q& x, unsigned k) {
  unsigned extra = 0;
  while (true) {
    unsigned s = 0;
    Q y = x;
    while (abs(y) > Q(1, 2)) {
      y /= 2;
      ++s;
    }
    unsigned p = k + s + 8 + 2 * mag_bits(x) + extra;
    Q term = 1, sum = 1;
    Q tol = pow2(-static_cast<long>(p + 2));
    unsigned i = 1;
    while (true) {
      term = term * y / i;
      sum += term;
      if (abs(term) < tol) break;
      ++i;
    }
    // Tail after the last term is below twice its magnitude times |y| <= 1/2.
    Q rem = abs(term);
    Interval e = widen(Interval(sum - rem, sum + rem), p);
    for (unsigned t = 0; t < s; ++t) e = widen(sqr(e), p);
    if (e.width() < pow2(-static_cast<long>(k))) return e;
    extra += 16;
  }
}

// Taylor sin for |y| <= 8 with alternating-tail bound.
Interval sin_taylor(const Q& y, unsigned p) {
  Q y2 = y * y;
  Q term = y, sum = y;
  Q tol = pow2(-static_cast<long>(p + 2));
  unsigned i = 1;
  while (true) {
    term = -term * y2 / ((2 * i) * (2 * i + 1));
    sum += term;
    if (2 * i + 1 > 10 && abs(term) < tol) break;
    ++i;
  }
  Q next = abs(term * y2 / ((2 * i + 2) * (2 * i + 3)));
  return widen(Interval(sum - next, sum + next), p);
}

Interval sin_point(const Q& x, unsigned k) {
  unsigned p = k + 8;
  if (abs(x) <= 8) return sin_taylor(x, p);
  Interval pi = ipi(p + mag_bits(x) + 4);
  Z j = floor_q(x / (2 * pi.lo) + Q(1, 2));
  Interval red = Interval(x) - Interval(Q(2 * j)) * pi;
  Interval c = sin_taylor(red.mid(), p + 1);
  Q w = red.width();
  return {std::max(Q(-1), Q(c.lo - w)), std::min(Q(1), Q(c.hi + w))};
}

Interval atan_inv(unsigned m, unsigned p) {
  // atan(1/m) = sum (-1)^i / ((2i+1) m^(2i+1)), alternating and decreasing.
  Q mm = Q(m) * m;
  Q pw = Q(1, m);
  Q sum = 0, term;
  Q tol = pow2(-static_cast<long>(p + 4));
  for (unsigned i = 0;; ++i) {
    term = pw / (2 * i + 1);
    if (i % 2 == 0)
      sum += term;
    else
      sum -= term;
    pw /= mm;
    if (term < tol) break;
  }
  return {sum - tol, sum + tol};
}

}  // namespace

Interval iexp(const Interval& a, unsigned k) {
  Interval l = exp_point(a.lo, k);
  if (a.lo == a.hi) return l;
  Interval h = exp_point(a.hi, k);
  return {l.lo, h.hi};
}

Interval ipi(unsigned k) {
  static std::mutex mu;
  static std::map<unsigned, Interval> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(k);
  if (it != cache.end()) return it->second;
  Interval a = atan_inv(5, k + 6), b = atan_inv(239, k + 6);
  Interval pi{16 * a.lo - 4 * b.hi, 16 * a.hi - 4 * b.lo};
  pi = widen(pi, k + 4);
  cache.emplace(k, pi);
  return pi;
}

Interval isin(const Interval& a, unsigned k) {
  if (a.width() >= 7) return {Q(-1), Q(1)};
  Interval r = sin_point(a.lo, k);
  if (a.lo != a.hi) r = hull(r, sin_point(a.hi, k));
  Interval pi = ipi(k + 8);
  Z j0 = floor_q(a.lo / 6) - 2, j1 = ceil_q(a.hi / 6) + 2;
  for (Z j = j0; j <= j1; ++j) {
    // pi/2 + 2j pi (maximum) and -pi/2 + 2j pi (minimum), as intervals.
    Interval two_j_pi = Interval(Q(2 * j)) * pi;
    Interval half_pi{pi.lo / 2, pi.hi / 2};
    Interval cmax = two_j_pi + half_pi, cmin = two_j_pi - half_pi;
    if (!(cmax.hi < a.lo || cmax.lo > a.hi)) r.hi = 1;
    if (!(cmin.hi < a.lo || cmin.lo > a.hi)) r.lo = -1;
  }
  r.lo = std::max(r.lo, Q(-1));
  r.hi = std::min(r.hi, Q(1));
  return r;
}

Interval icos(const Interval& a, unsigned k) {
  Interval pi = ipi(k + 8);
  Interval shifted = a + Interval(pi.lo / 2, pi.hi / 2);
  return isin(shifted, k);
}

}  // namespace cma
