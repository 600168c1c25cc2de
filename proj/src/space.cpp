#include "cma/space.hpp"

#include "cma/codes.hpp"
#include "cma/index.hpp"

#include <algorithm>

namespace cma {

Point Space::alpha(const Z& i) const {
  Point p;
  p.reserve(n);
  Z rest = i;
  for (unsigned d = 0; d + 1 < n; ++d) {
    auto [a, b] = unpair(rest);
    p.push_back(signed_rat(a));
    rest = b;
  }
  p.push_back(signed_rat(rest));
  return p;
}

Z Space::alpha_index(const Point& p) const {
  if (p.size() != n) throw PreconditionError("point arity mismatch");
  Z c = signed_rat_index(p.back());
  for (std::size_t d = n - 1; d-- > 0;) c = pair(signed_rat_index(p[d]), c);
  return c;
}

Ball Space::ball(const Z& i) const {
  auto [a, b] = unpair(i);
  return Ball{alpha(a), rat_pos(b)};
}

Z Space::ball_index(const Ball& b) const { return pair(alpha_index(b.c), rat_pos_index(b.r)); }

OpenSet Space::open(const Z& j) const {
  OpenSet u;
  for (const Z& i : list_decode(j)) u.push_back(ball(i));
  return u;
}

Z Space::open_index(const OpenSet& u) const {
  std::vector<Z> codes;
  for (const Ball& b : u) codes.push_back(ball_index(b));
  return list_encode(codes);
}

PointSet Space::finset(const Z& i) const {
  PointSet s;
  for (const Z& c : list_decode(i)) s.push_back(alpha(c));
  return s;
}

Z Space::finset_index(const PointSet& s) const {
  std::vector<Z> codes;
  for (const Point& p : s) codes.push_back(alpha_index(p));
  return list_encode(codes);
}

Q sq_dist(const Point& p, const Point& q) {
  if (p.size() != q.size()) throw PreconditionError("sq_dist arity mismatch");
  Q s = 0, t;
  for (std::size_t i = 0; i < p.size(); ++i) {
    t = p[i] - q[i];
    s += t * t;
  }
  return s;
}

bool mem_ball(const Point& p, const Ball& b) { return sq_dist(p, b.c) < b.r * b.r; }

bool mem_open(const Point& p, const OpenSet& u) {
  return std::any_of(u.begin(), u.end(), [&](const Ball& b) { return mem_ball(p, b); });
}

std::pair<Q, Q> fdiam_bounds(const OpenSet& u, unsigned k) {
  if (u.empty()) throw PreconditionError("fdiam of an empty open set");
  Q maxd2 = 0, maxr = 0;
  for (std::size_t a = 0; a < u.size(); ++a) {
    if (u[a].r > maxr) maxr = u[a].r;
    for (std::size_t b = a + 1; b < u.size(); ++b) {
      Q d2 = sq_dist(u[a].c, u[b].c);
      if (d2 > maxd2) maxd2 = d2;
    }
  }
  Q two_r = 2 * maxr;
  if (sgn(maxd2) == 0) return {two_r, two_r};
  return {sqrt_lo(maxd2, k + 1) + two_r, sqrt_hi(maxd2, k + 1) + two_r};
}

bool formally_disjoint(const Ball& a, const Ball& b) {
  Q s = a.r + b.r;
  return sq_dist(a.c, b.c) > s * s;
}

bool formally_disjoint(const OpenSet& u, const OpenSet& v) {
  if (u.empty() || v.empty()) return true;
  if (u.size() * v.size() <= 256) {
    for (const Ball& a : u)
      for (const Ball& b : v)
        if (!formally_disjoint(a, b)) return false;
    return true;
  }
  // Balls whose closed bounding boxes are apart are formally disjoint.
  const OpenSet& big = u.size() >= v.size() ? u : v;
  const OpenSet& small = u.size() >= v.size() ? v : u;
  BoxIndex idx(static_cast<unsigned>(big[0].c.size()));
  for (std::size_t i = 0; i < big.size(); ++i) idx.insert_ball(big[i], i);
  std::vector<std::size_t> cand;
  for (const Ball& a : small) {
    idx.query_ball(a, cand);
    for (std::size_t i : cand)
      if (!formally_disjoint(a, big[i])) return false;
  }
  return true;
}

bool formally_contained(const Ball& outer, const Point& y, const Q& s) {
  Q gap = outer.r - s;
  if (sgn(gap) <= 0) return false;
  return sq_dist(outer.c, y) < gap * gap;
}

namespace {

// strict: d < eps, else d <= eps.
bool prec_impl(const PointSet& a, const PointSet& b, const Q& eps, bool strict) {
  if (a.empty()) return true;
  if (b.empty()) return false;
  if (sgn(eps) < 0 || (strict && sgn(eps) == 0)) return false;
  Q e2 = eps * eps;
  auto ok = [&](const Q& d2) { return strict ? d2 < e2 : d2 <= e2; };
  if (a.size() * b.size() <= 4096 || sgn(eps) == 0) {
    for (const Point& p : a) {
      bool found = false;
      for (const Point& q : b)
        if (ok(sq_dist(p, q))) {
          found = true;
          break;
        }
      if (!found) return false;
    }
    return true;
  }
  unsigned n = static_cast<unsigned>(a[0].size());
  BoxIndex idx(n, BoxIndex::level_at_least(eps));
  for (std::size_t i = 0; i < b.size(); ++i) idx.insert_point(b[i], i);
  std::vector<std::size_t> cand;
  Point lo(n), hi(n);
  for (const Point& p : a) {
    for (unsigned i = 0; i < n; ++i) {
      lo[i] = p[i] - eps;
      hi[i] = p[i] + eps;
    }
    idx.query(lo, hi, cand);
    bool found = false;
    for (std::size_t i : cand)
      if (ok(sq_dist(p, b[i]))) {
        found = true;
        break;
      }
    if (!found) return false;
  }
  return true;
}

}  // namespace

bool prec_lt(const PointSet& a, const PointSet& b, const Q& eps) { return prec_impl(a, b, eps, true); }
bool prec_le(const PointSet& a, const PointSet& b, const Q& eps) { return prec_impl(a, b, eps, false); }

bool hausdorff_le(const PointSet& a, const PointSet& b, const Q& q) {
  return prec_le(a, b, q) && prec_le(b, a, q);
}

bool hausdorff_lt(const PointSet& a, const PointSet& b, const Q& q) {
  // On finite sets the maxima of minima are attained, so strictness is per point.
  return prec_lt(a, b, q) && prec_lt(b, a, q);
}

Q sq_dist_to_box(const Point& p, const Point& lo, const Point& hi) {
  Q s = 0, t;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < lo[i]) {
      t = lo[i] - p[i];
      s += t * t;
    } else if (p[i] > hi[i]) {
      t = p[i] - hi[i];
      s += t * t;
    }
  }
  return s;
}

bool box_in_ball(const Point& lo, const Point& hi, const Ball& b) {
  Q s = 0, t, u;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    t = abs(lo[i] - b.c[i]);
    u = abs(hi[i] - b.c[i]);
    if (u > t) t = u;
    s += t * t;
  }
  return s < b.r * b.r;
}

std::string point_str(const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) s += ", ";
    s += to_exact(p[i]);
  }
  return s + ")";
}

std::string ball_str(const Ball& b) { return "B(" + point_str(b.c) + ", " + to_exact(b.r) + ")"; }

}  // namespace cma
