#include "cma/chains.hpp"

#include "cma/codes.hpp"
#include "cma/index.hpp"

#include <algorithm>
#include <sstream>

namespace cma {

long p_metric(const Index& a, const Index& b) {
  if (a.size() != b.size()) throw PreconditionError("p_metric: arity mismatch");
  long m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::labs(a[i] - b[i]));
  return m;
}

std::size_t flat_index(const Index& v, unsigned long side) {
  std::size_t idx = 0;
  for (long x : v) {
    if (x < 0 || static_cast<unsigned long>(x) > side) throw PreconditionError("grid index outside the cube");
    idx = idx * (side + 1) + static_cast<std::size_t>(x);
  }
  return idx;
}

Index unflatten(std::size_t idx, unsigned n, unsigned long side) {
  Index v(n);
  for (unsigned i = n; i-- > 0;) {
    v[i] = static_cast<long>(idx % (side + 1));
    idx /= side + 1;
  }
  return v;
}

Z chain_code(const GridChain& c) {
  Space sp{c.n};
  std::vector<Z> table;
  table.reserve(c.links.size());
  for (const OpenSet& u : c.links) table.push_back(sp.open_index(u));
  return grid_encode(c.n, c.side, table);
}

GridChain chain_from_code(const Z& l, unsigned n) {
  Space sp{n};
  GridChain c;
  c.n = n;
  Z side = grid_side(l);
  if (!side.fits_ulong_p() || side > 4096) throw PreconditionError("chain side too large to materialize");
  c.side = side.get_ui();
  std::size_t total = 1;
  for (unsigned i = 0; i < n; ++i) total *= c.side + 1;
  for (std::size_t f = 0; f < total; ++f) {
    Index v = unflatten(f, n, c.side);
    std::vector<Z> zv(v.begin(), v.end());
    c.links.push_back(sp.open(grid_entry(l, n, zv)));
  }
  return c;
}

OpenSet chain_union(const GridChain& c) {
  OpenSet out;
  for (const OpenSet& u : c.links) out.insert(out.end(), u.begin(), u.end());
  return out;
}

OpenSet chain_lower_boundary(const GridChain& c) {
  OpenSet out;
  for (std::size_t f = 0; f < c.links.size(); ++f)
    if (f % (c.side + 1) == 0) out.insert(out.end(), c.links[f].begin(), c.links[f].end());
  return out;
}

namespace {

Z concat_entries(const Z& l, unsigned n, bool lower) {
  Z side = grid_side(l);
  if (!side.fits_ulong_p() || side > 4096) throw PreconditionError("chain side too large to materialize");
  unsigned long s = side.get_ui();
  std::size_t total = 1;
  for (unsigned i = 0; i < n; ++i) total *= s + 1;
  std::vector<Z> balls;
  for (std::size_t f = 0; f < total; ++f) {
    Index v = unflatten(f, n, s);
    if (lower && v[n - 1] != 0) continue;
    std::vector<Z> zv(v.begin(), v.end());
    for (const Z& b : list_decode(grid_entry(l, n, zv))) balls.push_back(b);
  }
  return list_encode(balls);
}

}  // namespace

Z union_code(const Z& l, unsigned n) { return concat_entries(l, n, false); }
Z lower_boundary_code(const Z& l, unsigned n) { return concat_entries(l, n, true); }

Verdict covers(const SemiOracle& s, const GridChain& c, Budget& b) { return s.covered_by(chain_union(c), b); }

Verdict lower_covers(const SemiOracle& t, const GridChain& c, Budget& b) {
  return t.covered_by(chain_lower_boundary(c), b);
}

std::vector<ChainOffender> chain_offenders(const GridChain& c, std::size_t limit) {
  std::vector<ChainOffender> out;
  if (c.links.empty()) return out;
  struct Ref {
    std::size_t link, ball;
  };
  std::vector<Ref> refs;
  BoxIndex idx(c.n);
  for (std::size_t f = 0; f < c.links.size(); ++f)
    for (std::size_t i = 0; i < c.links[f].size(); ++i) {
      idx.insert_ball(c.links[f][i], refs.size());
      refs.push_back({f, i});
    }
  std::vector<Index> coords(c.links.size());
  for (std::size_t f = 0; f < c.links.size(); ++f) coords[f] = unflatten(f, c.n, c.side);
  std::vector<std::size_t> cand;
  for (std::size_t a = 0; a < refs.size(); ++a) {
    const Ball& x = c.links[refs[a].link][refs[a].ball];
    idx.query_ball(x, cand);
    for (std::size_t b : cand) {
      if (b <= a) continue;
      if (p_metric(coords[refs[a].link], coords[refs[b].link]) <= 1) continue;
      if (!formally_disjoint(x, c.links[refs[b].link][refs[b].ball])) {
        out.push_back({coords[refs[a].link], coords[refs[b].link], refs[a].ball, refs[b].ball});
        if (out.size() >= limit) return out;
      }
    }
  }
  return out;
}

bool is_formal_chain(const GridChain& c) { return chain_offenders(c, 1).empty(); }

Q fdiam_upper(const OpenSet& u, unsigned prec) {
  if (u.empty()) throw PreconditionError("fdiam of an empty open set");
  const std::size_t n = u[0].c.size();
  Point lo = u[0].c, hi = u[0].c;
  Q maxr = 0;
  for (const Ball& b : u) {
    for (std::size_t i = 0; i < n; ++i) {
      if (b.c[i] < lo[i]) lo[i] = b.c[i];
      if (b.c[i] > hi[i]) hi[i] = b.c[i];
    }
    if (b.r > maxr) maxr = b.r;
  }
  // The centre bounding-box diagonal bounds every centre distance.
  Q diag2 = sq_dist(lo, hi);
  Q quick = (sgn(diag2) == 0 ? Q(0) : sqrt_hi(diag2, prec + 1)) + 2 * maxr;
  if (u.size() <= 2) return fdiam_bounds(u, prec).second;
  return quick;
}

bool fmesh_lt(const GridChain& c, const Q& q, unsigned prec) {
  for (const OpenSet& u : c.links) {
    if (u.empty()) return false;
    if (fdiam_upper(u, prec) < q) continue;
    if (!(fdiam_bounds(u, prec).second < q)) return false;
  }
  return true;
}

GridCell grid_cell(unsigned long m, const Index& v, bool half) {
  GridCell g;
  const unsigned n = static_cast<unsigned>(v.size());
  const Q w(1, m + 1);
  for (unsigned i = 0; i < n; ++i) {
    if (half && i == n - 1) {
      Q hw(1, 2 * m + 2);
      g.lo.push_back(hw * v[i]);
      g.hi.push_back(hw * (v[i] + 1));
    } else {
      g.lo.push_back(Q(-4) + w * v[i]);
      g.hi.push_back(Q(-4) + w * (v[i] + 1));
    }
  }
  return g;
}

std::vector<GridCell> grid_chain(unsigned long m, unsigned n, bool half) {
  const unsigned long side = 8 * m + 7;
  std::size_t total = 1;
  for (unsigned i = 0; i < n; ++i) total *= side + 1;
  std::vector<GridCell> out;
  out.reserve(total);
  for (std::size_t f = 0; f < total; ++f) out.push_back(grid_cell(m, unflatten(f, n, side), half));
  return out;
}

PointSet thin(const PointSet& pts, const Q& radius) {
  PointSet kept;
  if (pts.empty()) return kept;
  const Q r2 = radius * radius;
  BoxIndex idx(static_cast<unsigned>(pts[0].size()), BoxIndex::level_at_least(radius));
  std::vector<std::size_t> cand;
  for (const Point& p : pts) {
    // Nets arrive in grid order, so the last kept point is usually close enough.
    if (!kept.empty() && sq_dist(kept.back(), p) <= r2) continue;
    idx.query_ball(Ball{p, radius}, cand);
    bool near = false;
    for (std::size_t i : cand)
      if (sq_dist(kept[i], p) <= r2) {
        near = true;
        break;
      }
    if (near) continue;
    idx.insert_point(p, kept.size());
    kept.push_back(p);
  }
  return kept;
}

NetCover net_cover_from(const PointSet& net, const Q& gamma) {
  if (sgn(gamma) <= 0) throw PreconditionError("net_cover: gamma must be positive");
  NetCover nc{{}, gamma};
  for (Point& c : thin(net, gamma / 2)) nc.balls.push_back(Ball{std::move(c), gamma});
  return nc;
}

NetCover net_cover(const Sampler& k, const Q& gamma) {
  if (sgn(gamma) <= 0) throw PreconditionError("net_cover: gamma must be positive");
  return net_cover_from(k(gamma / 4), gamma);
}

bool sets_farther_than(const PointSet& a, const PointSet& b, const Q& q) {
  if (a.empty() || b.empty()) return true;
  const Q q2 = q * q;
  BoxIndex idx(static_cast<unsigned>(b[0].size()), BoxIndex::level_at_least(q));
  for (std::size_t i = 0; i < b.size(); ++i) idx.insert_point(b[i], i);
  std::vector<std::size_t> cand;
  for (const Point& p : a) {
    idx.query_ball(Ball{p, q}, cand);
    for (std::size_t i : cand)
      if (sq_dist(p, b[i]) <= q2) return false;
  }
  return true;
}

std::optional<Q> dist_lower_bound(const Sampler& k, const Sampler& l, unsigned max_bits) {
  // Candidate c = 2^s, largest first; nets at delta = c/4 prove d(K,L) > c.
  for (long s = 4; s >= -static_cast<long>(max_bits); --s) {
    Q c = pow2(s);
    Q delta = c / 4;
    PointSet dk = k(delta), dl = l(delta);
    if (sets_farther_than(dk, dl, c + 2 * delta)) return c;
  }
  return std::nullopt;
}

GridChain parse_chain(const std::string& text) {
  GridChain c;
  bool have_dim = false, have_side = false;
  std::vector<bool> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) {
    throw PreconditionError("chain file line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "dim") {
      if (!(ls >> c.n) || c.n == 0 || c.n > BoxIndex::kMaxDim) fail("bad dim");
      have_dim = true;
    } else if (key == "side") {
      if (!(ls >> c.side)) fail("bad side");
      have_side = true;
    } else if (key == "link") {
      if (!have_dim || !have_side) fail("dim and side must precede links");
      if (c.links.empty()) {
        std::size_t total = 1;
        for (unsigned i = 0; i < c.n; ++i) total *= c.side + 1;
        c.links.resize(total);
        seen.assign(total, false);
      }
      Index v(c.n);
      for (unsigned i = 0; i < c.n; ++i)
        if (!(ls >> v[i])) fail("bad link index");
      std::string colon;
      if (!(ls >> colon) || colon != ":") fail("expected ':'");
      std::string rest((std::istreambuf_iterator<char>(ls)), std::istreambuf_iterator<char>());
      std::size_t f;
      try {
        f = flat_index(v, c.side);
      } catch (const PreconditionError&) {
        fail("link index outside the cube");
      }
      std::istringstream bs(rest);
      std::string part;
      OpenSet u;
      while (std::getline(bs, part, ';')) {
        std::istringstream ps(part);
        std::vector<Q> nums;
        std::string tok;
        while (ps >> tok) nums.push_back(parse_rational(tok));
        if (nums.empty()) continue;
        if (nums.size() != c.n + 1) fail("ball needs n coordinates and a radius");
        Ball b{Point(nums.begin(), nums.end() - 1), nums.back()};
        if (sgn(b.r) <= 0) fail("radius must be positive");
        u.push_back(std::move(b));
      }
      if (u.empty()) fail("empty link");
      c.links[f] = std::move(u);
      seen[f] = true;
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (!have_dim || !have_side) throw PreconditionError("chain file needs dim and side");
  for (std::size_t f = 0; f < seen.size(); ++f)
    if (!seen[f]) throw PreconditionError("chain file misses a link");
  if (c.links.empty()) throw PreconditionError("chain file has no links");
  return c;
}

}  // namespace cma
