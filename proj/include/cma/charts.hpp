#pragma once

#include "cma/chains.hpp"
#include "cma/interval.hpp"
#include "cma/levelset.hpp"

#include <functional>
#include <string>
#include <vector>

namespace cma {

// A homeomorphism f from [-4,4]^n (or [-4,4]^(n-1) x [0,4] when `half`) into S, as data.
struct ChartWitness {
  std::string name;
  unsigned n = 1;
  unsigned ambient = 1;
  bool half = false;
  // A rational point within 2^-k of f(x).
  std::function<Point(const Point& x, unsigned k)> eval;
  // m with ||x - y||_inf <= 1/(m+1) => d(f(x), f(y)) < 2^-k.
  std::function<unsigned long(unsigned k)> modulus;
  // Optional: the same bound for x, y restricted to a domain box. Nets use it when present.
  std::function<unsigned long(unsigned k, const Box& box)> local_modulus;
  // S \ f(<-4,4>^n) inside J_m0, and J_m0 disjoint from f([-2,2]^n).
  OpenSet m0;
  // x' covers f([-core,core]^n) (half: [-core,core]^(n-1) x [0,core]); needs core < 1 (half: < 1/2).
  Q core;
};

Box chart_domain(const ChartWitness& c);

// Grid points of a domain box with sup-spacing at most `spacing` (endpoints included).
PointSet grid_points(const Box& box, const Q& spacing);
// Image net of f(box): every point of f(box) within delta of it and vice versa.
PointSet image_net(const ChartWitness& c, const Box& box, const Q& delta);
Sampler image_sampler(const ChartWitness& c, Box box);

// Smallest k with 2^-k <= q, for q > 0.
unsigned bits_below(const Q& q);

// Rational parametrization of the unit circle: u -> ((1-u^2)/(1+u^2), 2u/(1+u^2)).
Point circle_point(const Q& u);

// Circle charts: f(x) = g(phi(x)), phi piecewise linear on quarter-integer breakpoints.
// The second chart is -f.
std::vector<ChartWitness> circle_atlas();
// [0,1]: one interior chart, boundary charts at 0 and 1.
std::vector<ChartWitness> segment_atlas();
// Unit sphere in R^3: six axis charts through scaled stereographic projection.
std::vector<ChartWitness> sphere_atlas();
// Torus ((2 + cos b) cos a, (2 + cos b) sin a, sin b): products of the circle charts.
std::vector<ChartWitness> torus_atlas();
// Star-shaped level surface: radial projection of the sphere charts onto f^-1{y}.
std::vector<ChartWitness> radial_atlas(const LevelSetInstance& inst);

// The circle charts' angle data, shared with instance samplers.
const std::vector<Q>& circle_phi_table();  // phi at x = j/4, j = -16..16
Q circle_phi(const Q& x);
Q circle_lipschitz();
// Speed bound of g o phi over [lo, hi].
Q circle_speed(const Q& lo, const Q& hi);

// Radius t with F(t d) = y_0 for a direction d (|d| = 1), bracketed to width 2^-k.
Interval radial_root(const LevelSetInstance& inst, const Point& d, unsigned k);

}  // namespace cma
