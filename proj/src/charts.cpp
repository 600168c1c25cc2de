#include "cma/charts.hpp"

#include <cmath>

namespace cma {

Box chart_domain(const ChartWitness& c) {
  Box b(c.n, Interval(Q(-4), Q(4)));
  if (c.half) b[c.n - 1] = Interval(Q(0), Q(4));
  return b;
}

unsigned bits_below(const Q& q) {
  if (sgn(q) <= 0) throw PreconditionError("bits_below needs q > 0");
  unsigned k = 0;
  while (pow2(-static_cast<long>(k)) > q) ++k;
  return k;
}

PointSet grid_points(const Box& box, const Q& spacing) {
  std::vector<std::vector<Q>> axes;
  for (const Interval& iv : box) {
    std::vector<Q> ax;
    Z steps = ceil_q(iv.width() / spacing);
    if (sgn(steps) == 0) {
      ax.push_back(iv.lo);
    } else {
      unsigned long s = steps.get_ui();
      Q h = iv.width() / s;
      for (unsigned long j = 0; j <= s; ++j) ax.push_back(iv.lo + h * j);
    }
    axes.push_back(std::move(ax));
  }
  PointSet out;
  Point p(box.size());
  std::vector<std::size_t> pos(box.size(), 0);
  while (true) {
    for (std::size_t i = 0; i < box.size(); ++i) p[i] = axes[i][pos[i]];
    out.push_back(p);
    std::size_t i = box.size();
    while (i-- > 0) {
      if (++pos[i] < axes[i].size()) break;
      pos[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  return out;
}

PointSet image_net(const ChartWitness& c, const Box& box, const Q& delta) {
  // 2^-k for the modulus plus 2^-k for evaluation stays below delta.
  unsigned k = bits_below(delta / 2) + 1;
  unsigned long m = c.local_modulus ? c.local_modulus(k, box) : c.modulus(k);
  PointSet out;
  for (const Point& x : grid_points(box, Q(2, m + 1))) out.push_back(c.eval(x, k));
  return out;
}

Sampler image_sampler(const ChartWitness& c, Box box) {
  return [c, box](const Q& delta) { return image_net(c, box, delta); };
}

Point circle_point(const Q& u) {
  Q d = 1 + u * u;
  return {(1 - u * u) / d, 2 * u / d};
}

// ---- circle -------------------------------------------------------------------

namespace {

constexpr double kPi = 3.14159265358979323846;

// Target angle in degrees: 100 x on [0,1], +35 per unit to x = 2, +17.5 per unit to x = 4.
double target_angle(double x) {
  double a = std::fabs(x), t;
  if (a <= 1)
    t = 100 * a;
  else if (a <= 2)
    t = 100 + 35 * (a - 1);
  else
    t = 135 + 17.5 * (a - 2);
  return x < 0 ? -t : t;
}

std::vector<Q> make_phi_table() {
  std::vector<Q> t;
  for (int j = -16; j <= 16; ++j) {
    double u = std::tan(target_angle(j / 4.0) * kPi / 360.0);
    t.push_back(Q(static_cast<long>(std::lround(u * 1024)), 1024));
  }
  return t;
}

Q round_to(const Q& x, unsigned bits) { return round_down(x, bits); }

Point round_point(Point p, unsigned bits) {
  for (Q& x : p) x = round_to(x, bits);
  return p;
}

unsigned long ceil_ul(const Q& x) {
  Z c = ceil_q(x);
  if (sgn(c) < 0) return 0;
  if (!c.fits_ulong_p()) throw PreconditionError("modulus overflow");
  return c.get_ui();
}

// m with L * 2^k < m + 1, so ||x-y||_inf <= 1/(m+1) gives L ||x-y|| < 2^-k.
unsigned long lipschitz_modulus(const Q& lip, unsigned k) { return ceil_ul(lip * pow2(static_cast<long>(k))); }

}  // namespace

const std::vector<Q>& circle_phi_table() {
  static const std::vector<Q> table = make_phi_table();
  return table;
}

Q circle_phi(const Q& x) {
  const auto& t = circle_phi_table();
  if (x < -4 || x > 4) throw PreconditionError("circle chart outside [-4,4]");
  Z j = floor_q(4 * x);
  long i = j.get_si() + 16;
  if (i >= 32) return t[32];
  Q x0(j, 4);
  return t[i] + (t[i + 1] - t[i]) * 4 * (x - x0);
}

Q circle_speed(const Q& lo, const Q& hi) {
  const auto& t = circle_phi_table();
  Q best = 0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    Q x0(static_cast<long>(i) - 16, 4), x1(static_cast<long>(i) - 15, 4);
    if (x1 < lo || x0 > hi) continue;
    Q slope = (t[i + 1] - t[i]) * 4;
    Q m2 = (sgn(t[i]) != sgn(t[i + 1])) ? Q(0) : std::min(Q(t[i] * t[i]), Q(t[i + 1] * t[i + 1]));
    Q speed = 2 * slope / (1 + m2);
    if (speed > best) best = speed;
  }
  return best;
}

Q circle_lipschitz() {
  static const Q lip = circle_speed(Q(-4), Q(4));
  return lip;
}

std::vector<ChartWitness> circle_atlas() {
  std::vector<ChartWitness> out;
  for (int sign : {1, -1}) {
    ChartWitness c;
    c.name = sign > 0 ? "circle-east" : "circle-west";
    c.n = 1;
    c.ambient = 2;
    c.eval = [sign](const Point& x, unsigned k) {
      Point p = circle_point(circle_phi(x[0]));
      if (sign < 0)
        for (Q& v : p) v = -v;
      return round_point(std::move(p), k + 1);
    };
    Q lip = circle_lipschitz();
    c.modulus = [lip](unsigned k) { return lipschitz_modulus(lip, k); };
    c.local_modulus = [](unsigned k, const Box& b) { return lipschitz_modulus(circle_speed(b[0].lo, b[0].hi), k); };
    c.m0 = {Ball{{Q(-sign), Q(0)}, Q(1, 2)}};
    c.core = Q(19, 20);
    out.push_back(std::move(c));
  }
  return out;
}

// ---- segment ------------------------------------------------------------------

namespace {

struct PiecewiseLinear {
  std::vector<Q> xs, ys;

  Q operator()(const Q& x) const {
    if (x < xs.front() || x > xs.back()) throw PreconditionError("chart argument outside its domain");
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
      if (x <= xs[i + 1]) return ys[i] + (ys[i + 1] - ys[i]) * (x - xs[i]) / (xs[i + 1] - xs[i]);
    return ys.back();
  }

  Q lipschitz() const { return lipschitz(xs.front(), xs.back()); }
  Q lipschitz(const Q& lo, const Q& hi) const {
    Q best = 0;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
      if (xs[i + 1] >= lo && xs[i] <= hi) best = std::max(best, Q(abs(ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i])));
    return best;
  }
};

ChartWitness segment_chart(std::string name, PiecewiseLinear f, bool half, OpenSet m0, Q core) {
  ChartWitness c;
  c.name = std::move(name);
  c.n = 1;
  c.ambient = 1;
  c.half = half;
  c.eval = [f](const Point& x, unsigned) { return Point{f(x[0])}; };
  Q lip = f.lipschitz();
  c.modulus = [lip](unsigned k) { return lipschitz_modulus(lip, k); };
  c.local_modulus = [f](unsigned k, const Box& b) { return lipschitz_modulus(f.lipschitz(b[0].lo, b[0].hi), k); };
  c.m0 = std::move(m0);
  c.core = std::move(core);
  return c;
}

}  // namespace

std::vector<ChartWitness> segment_atlas() {
  std::vector<ChartWitness> out;
  PiecewiseLinear mid{{Q(-4), Q(-2), Q(-1), Q(1), Q(2), Q(4)},
                      {Q(1, 16), Q(1, 8), Q(3, 16), Q(13, 16), Q(7, 8), Q(15, 16)}};
  out.push_back(segment_chart("segment-interior", mid, false, {Ball{{Q(0)}, Q(3, 32)}, Ball{{Q(1)}, Q(3, 32)}},
                              Q(7, 8)));
  PiecewiseLinear left{{Q(0), Q(1, 2), Q(1), Q(2), Q(4)}, {Q(0), Q(5, 16), Q(3, 8), Q(7, 16), Q(1, 2)}};
  out.push_back(segment_chart("segment-left", left, true, {Ball{{Q(3, 4)}, Q(9, 32)}}, Q(7, 16)));
  PiecewiseLinear right = left;
  for (Q& y : right.ys) y = 1 - y;
  out.push_back(segment_chart("segment-right", right, true, {Ball{{Q(1, 4)}, Q(9, 32)}}, Q(7, 16)));
  return out;
}

// ---- sphere -------------------------------------------------------------------

namespace {

const Q kStereoScale(3, 5);

// Inverse stereographic projection from the south pole, north pole at u = 0.
Point stereo(const Q& u1, const Q& u2) {
  Q s = u1 * u1 + u2 * u2;
  Q d = 1 + s;
  return {2 * u1 / d, 2 * u2 / d, (1 - s) / d};
}

// Places the chart's (a, b, c) so that c runs along sign * e_axis.
Point orient(const Point& p, unsigned axis, int sign) {
  Point q(3);
  unsigned o1 = (axis + 1) % 3, o2 = (axis + 2) % 3;
  q[axis] = sign * p[2];
  q[o1] = p[0];
  q[o2] = sign * p[1];
  return q;
}

Point axis_point(unsigned axis, const Q& v) {
  Point q(3, Q(0));
  q[axis] = v;
  return q;
}

// Conformal factor 2/(1+|u|^2) at its largest on the box, times the scale and sqrt 2 < 283/200.
Q stereo_lipschitz(const Box& b) {
  Q near = 0;
  for (const Interval& iv : b) {
    Q d = 0;
    if (sgn(iv.lo) > 0) d = iv.lo;
    if (sgn(iv.hi) < 0) d = -iv.hi;
    near += d * d;
  }
  return kStereoScale * 2 / (1 + kStereoScale * kStereoScale * near) * Q(283, 200);
}

}  // namespace

std::vector<ChartWitness> sphere_atlas() {
  std::vector<ChartWitness> out;
  for (unsigned axis = 0; axis < 3; ++axis)
    for (int sign : {1, -1}) {
      ChartWitness c;
      c.name = std::string("sphere-") + (sign > 0 ? "+" : "-") + "xyz"[axis];
      c.n = 2;
      c.ambient = 3;
      c.eval = [axis, sign](const Point& x, unsigned k) {
        return round_point(orient(stereo(kStereoScale * x[0], kStereoScale * x[1]), axis, sign), k + 2);
      };
      // Conformal factor <= 2, sup-norm to Euclidean sqrt 2, scale 3/5.
      c.modulus = [](unsigned k) { return lipschitz_modulus(Q(7, 4), k); };
      c.local_modulus = [](unsigned k, const Box& b) { return lipschitz_modulus(stereo_lipschitz(b), k); };
      c.m0 = {Ball{axis_point(axis, Q(-sign)), Q(9, 10)}};
      c.core = Q(19, 20);
      out.push_back(std::move(c));
    }
  return out;
}

// ---- torus --------------------------------------------------------------------

namespace {

Point torus_point(const Point& a, const Point& b) {
  Q rad = 2 + b[0];
  return {rad * a[0], rad * a[1], b[1]};
}

Point signed_circle(const Q& u, int sign) {
  Point p = circle_point(u);
  if (sign < 0)
    for (Q& v : p) v = -v;
  return p;
}

// Torus points with the first (or second) angle within 2 atan(1/8) of the antipode of `sa` (or `sb`).
OpenSet torus_outer_cover(int sa, int sb) {
  PointSet pts;
  const Q step(1, 64);
  std::vector<Point> near, full;
  for (Q u = Q(-1, 8); u <= Q(1, 8); u += step) near.push_back(signed_circle(u, -1));
  for (int s : {1, -1})
    for (Q u = -1; u <= 1; u += step) full.push_back(signed_circle(u, s));
  auto flip = [](Point p, int s) {
    if (s < 0)
      for (Q& v : p) v = -v;
    return p;
  };
  for (const Point& a : near)
    for (const Point& b : full) pts.push_back(torus_point(flip(a, sa), b));
  for (const Point& a : full)
    for (const Point& b : near) pts.push_back(torus_point(a, flip(b, sb)));
  return net_cover_from(pts, Q(1, 4)).balls;
}

}  // namespace

std::vector<ChartWitness> torus_atlas() {
  std::vector<ChartWitness> out;
  Q lip = 4 * circle_lipschitz();
  for (int sa : {1, -1})
    for (int sb : {1, -1}) {
      ChartWitness c;
      c.name = std::string("torus-") + (sa > 0 ? "e" : "w") + (sb > 0 ? "e" : "w");
      c.n = 2;
      c.ambient = 3;
      c.eval = [sa, sb](const Point& x, unsigned k) {
        return round_point(torus_point(signed_circle(circle_phi(x[0]), sa), signed_circle(circle_phi(x[1]), sb)),
                           k + 2);
      };
      c.modulus = [lip](unsigned k) { return lipschitz_modulus(lip, k); };
      // Radius 2 + cos b <= 3 along a; the two directions add up in the sup norm.
      c.local_modulus = [](unsigned k, const Box& b) {
        return lipschitz_modulus(3 * circle_speed(b[0].lo, b[0].hi) + circle_speed(b[1].lo, b[1].hi), k);
      };
      c.m0 = torus_outer_cover(sa, sb);
      c.core = Q(19, 20);
      out.push_back(std::move(c));
    }
  return out;
}

// ---- radial charts for star-shaped level surfaces ------------------------------

Interval radial_root(const LevelSetInstance& inst, const Point& d, unsigned k) {
  const ExprPtr& f = inst.exprs.at(0);
  const Q& y = inst.target.at(0);
  // -1 below, +1 above, 0 undecided at this precision.
  auto side = [&](const Q& t, unsigned p) {
    Point x;
    for (const Q& di : d) x.push_back(t * di);
    Interval v = eval_point(f, x, p);
    if (v.hi < y) return -1;
    if (v.lo > y) return 1;
    return 0;
  };
  auto decided = [&](Q t) {
    for (unsigned p = k + 8; p <= k + 72; p += 16) {
      int s = side(t, p);
      if (s != 0) return std::make_pair(t, s);
    }
    return std::make_pair(t, 0);
  };
  Q lo = 0, hi = 1;
  if (side(lo, k + 8) >= 0) throw PreconditionError("radial chart: origin is not inside the surface");
  while (decided(hi).second <= 0) {
    hi *= 2;
    if (hi > 1024) throw PreconditionError("radial chart: no crossing along the ray");
  }
  const Q width = pow2(-static_cast<long>(k));
  while (hi - lo >= width) {
    Q mid = (lo + hi) / 2;
    auto [t, s] = decided(mid);
    if (s == 0) {
      // Nudge off an undecided point; the bracket stays certified.
      Q shift = (hi - lo) / 8;
      std::tie(t, s) = decided(mid + shift);
      if (s == 0) std::tie(t, s) = decided(mid - shift);
      if (s == 0) throw PreconditionError("radial chart: crossing not isolated");
    }
    if (s < 0)
      lo = t;
    else
      hi = t;
  }
  return {lo, hi};
}

std::vector<ChartWitness> radial_atlas(const LevelSetInstance& inst) {
  if (inst.n != 3 || inst.exprs.size() != 1) throw PreconditionError("radial charts need one equation in R^3");
  auto shared = std::make_shared<const LevelSetInstance>(inst);
  std::vector<ChartWitness> out;
  for (unsigned axis = 0; axis < 3; ++axis)
    for (int sign : {1, -1}) {
      ChartWitness c;
      c.name = std::string("radial-") + (sign > 0 ? "+" : "-") + "xyz"[axis];
      c.n = 2;
      c.ambient = 3;
      c.eval = [shared, axis, sign](const Point& x, unsigned k) {
        Point d = orient(stereo(kStereoScale * x[0], kStereoScale * x[1]), axis, sign);
        Interval t = radial_root(*shared, d, k + 2);
        Point p;
        for (const Q& v : d) p.push_back(t.mid() * v);
        return round_point(std::move(p), k + 2);
      };
      // Radii stay in [1/2, 1] and vary slowly with the direction.
      c.modulus = [](unsigned k) { return lipschitz_modulus(Q(7, 2), k); };
      c.m0 = {Ball{axis_point(axis, Q(-3 * sign, 4)), Q(2, 3)}};
      c.core = Q(19, 20);
      out.push_back(std::move(c));
    }
  return out;
}

}  // namespace cma
