#pragma once

#include "cma/sets.hpp"

#include <functional>
#include <string>
#include <vector>

namespace cma {

using Index = std::vector<long>;

// Chebyshev distance on index vectors.
long p_metric(const Index& a, const Index& b);

// Row-major over {0..side}^n, first coordinate most significant.
std::size_t flat_index(const Index& v, unsigned long side);
Index unflatten(std::size_t idx, unsigned n, unsigned long side);

// H_l held structurally: links[flat_index(v)] = J_{(l)_v}.
struct GridChain {
  unsigned n = 1;
  unsigned long side = 0;  // h-hat(l); indices run over 0..side
  std::vector<OpenSet> links;

  std::size_t size() const { return links.size(); }
  const OpenSet& at(const Index& v) const { return links[flat_index(v, side)]; }
};

// Numeric chain codes; only practical for small chains.
Z chain_code(const GridChain& c);
GridChain chain_from_code(const Z& l, unsigned n);

// zeta(l) and zeta'(l) on structural chains and on numeric codes.
OpenSet chain_union(const GridChain& c);
OpenSet chain_lower_boundary(const GridChain& c);
Z union_code(const Z& l, unsigned n);
Z lower_boundary_code(const Z& l, unsigned n);

Verdict covers(const SemiOracle& s, const GridChain& c, Budget& b);
Verdict lower_covers(const SemiOracle& t, const GridChain& c, Budget& b);

struct ChainOffender {
  Index v, w;
  std::size_t ball_v, ball_w;
};
// Far pairs (p > 1) with some pair of balls not formally disjoint; stops after `limit`.
std::vector<ChainOffender> chain_offenders(const GridChain& c, std::size_t limit = 1);
bool is_formal_chain(const GridChain& c);

// Certifies fmesh(c) < q from fdiam upper bounds at precision `prec`.
bool fmesh_lt(const GridChain& c, const Q& q, unsigned prec);
Q fdiam_upper(const OpenSet& u, unsigned prec);

struct GridCell {
  Point lo, hi;
};
// E^m cells over {0..8m+7}^n; `half` uses [v_n/(2m+2), (v_n+1)/(2m+2)] in the last factor.
std::vector<GridCell> grid_chain(unsigned long m, unsigned n, bool half);
GridCell grid_cell(unsigned long m, const Index& v, bool half);

// delta -> finite D with K <_delta D and D <_delta K.
using Sampler = std::function<PointSet(const Q& delta)>;

struct NetCover {
  OpenSet balls;
  Q gamma;
};
// Balls of radius gamma centred on a gamma/2-thinning of a gamma/4-net.
NetCover net_cover(const Sampler& k, const Q& gamma);
// The same from a net D with K <_eta D and D <_eta K, eta <= gamma/4.
NetCover net_cover_from(const PointSet& net, const Q& gamma);

// Greedy thinning: every input point lies within `radius` (<=) of some kept point.
PointSet thin(const PointSet& pts, const Q& radius);

// Positive rational below d(K, L), or nullopt if none is found above 2^-max_bits.
std::optional<Q> dist_lower_bound(const Sampler& k, const Sampler& l, unsigned max_bits = 40);
// d(A, B) > q for finite sets, decided exactly.
bool sets_farther_than(const PointSet& a, const PointSet& b, const Q& q);

// certify-chain input: "dim n", "side h", then "link v1..vn : c1..cn r [; c1..cn r]*".
GridChain parse_chain(const std::string& text);

}  // namespace cma
