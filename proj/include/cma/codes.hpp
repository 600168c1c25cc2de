#pragma once

#include "cma/rational.hpp"

#include <utility>
#include <vector>

namespace cma {

// Cantor pairing: pair(a,b) = (a+b)(a+b+1)/2 + b.
Z pair(const Z& a, const Z& b);
std::pair<Z, Z> unpair(const Z& i);
inline Z tau1(const Z& i) { return unpair(i).first; }
inline Z tau2(const Z& i) { return unpair(i).second; }

// q_i = (a+1)/(b+1) where (a,b) = unpair(i).
Q rat_pos(const Z& i);
// Canonical index of a positive rational (lowest terms).
Z rat_pos_index(const Q& q);

// pair(pair(a,b),c) -> (-1)^c * a/(b+1).
Q signed_rat(const Z& i);
Z signed_rat_index(const Q& q);

// Lists: j = pair(len-1, fold) with fold(x) = x, fold(x, rest...) = pair(x, fold(rest...)).
Z list_encode(const std::vector<Z>& seq);
// Decodes at most `max_len` entries; longer lists raise PreconditionError.
std::vector<Z> list_decode(const Z& j, std::size_t max_len = 1u << 20);
// j-bar: the list's last index.
Z list_last_index(const Z& j);
// (j)_i; an index past the end reads entry 0.
Z list_entry(const Z& j, const Z& i);

// nu: N^n -> N, the identity for n = 1 and pair(v1, nu(v2..vn)) otherwise.
Z nu(const std::vector<Z>& v);
std::vector<Z> nu_inverse(const Z& c, unsigned n);

// Grid codes: side(l) = tau2(l), entry(l, v) = (tau1(l))_{nu(v)}.
Z grid_side(const Z& l);
Z grid_entry(const Z& l, unsigned n, const std::vector<Z>& v);
// `table` is row-major over {0..side}^n with the first coordinate most significant.
Z grid_encode(unsigned n, unsigned long side, const std::vector<Z>& table);

}  // namespace cma
