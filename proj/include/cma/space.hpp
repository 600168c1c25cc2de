#pragma once

#include "cma/rational.hpp"

#include <string>
#include <utility>
#include <vector>

namespace cma {

using Point = std::vector<Q>;
using PointSet = std::vector<Point>;

struct Ball {
  Point c;
  Q r;
};

// J_j as the ordered sequence [(j)_0, ..., (j)_jbar]; entry 0 is the "first ball".
using OpenSet = std::vector<Ball>;

// The computable metric space R^n with alpha_i from n-fold unpairing.
struct Space {
  unsigned n;

  Point alpha(const Z& i) const;
  Z alpha_index(const Point& p) const;
  Ball ball(const Z& i) const;
  Z ball_index(const Ball& b) const;
  OpenSet open(const Z& j) const;
  Z open_index(const OpenSet& u) const;
  PointSet finset(const Z& i) const;
  Z finset_index(const PointSet& s) const;
};

Q sq_dist(const Point& p, const Point& q);
bool mem_ball(const Point& p, const Ball& b);
bool mem_open(const Point& p, const OpenSet& u);

// lo <= fdiam(u) <= hi with hi - lo < 2^-k; fdiam = max center distance + 2 max radius.
std::pair<Q, Q> fdiam_bounds(const OpenSet& u, unsigned k);

bool formally_disjoint(const Ball& a, const Ball& b);
bool formally_disjoint(const OpenSet& u, const OpenSet& v);
// d(outer.c, y) + s < outer.r
bool formally_contained(const Ball& outer, const Point& y, const Q& s);

// Exact decisions of rho(A,B) <= q and rho(A,B) < q.
bool hausdorff_le(const PointSet& a, const PointSet& b, const Q& q);
bool hausdorff_lt(const PointSet& a, const PointSet& b, const Q& q);
// Every a in A has some b in B with d(a,b) < eps (resp. <= eps).
bool prec_lt(const PointSet& a, const PointSet& b, const Q& eps);
bool prec_le(const PointSet& a, const PointSet& b, const Q& eps);

// d(p, box) squared for the closed box [lo, hi].
Q sq_dist_to_box(const Point& p, const Point& lo, const Point& hi);
// Closed box contained in the open ball.
bool box_in_ball(const Point& lo, const Point& hi, const Ball& b);

std::string point_str(const Point& p);
std::string ball_str(const Ball& b);

}  // namespace cma
