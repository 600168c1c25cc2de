#include "cma/reconstruction.hpp"

#include "cma/codes.hpp"
#include "cma/index.hpp"

#include <sstream>

namespace cma {

namespace {

std::uint64_t cap_shift(std::uint64_t base, unsigned s) {
  if (s >= 40) return std::uint64_t(1) << 62;
  return base << s;
}

Box cube(unsigned n, bool half, const Q& r, const Q& half_hi) {
  Box b(n, Interval(-r, r));
  if (half) b[n - 1] = Interval(Q(0), half_hi);
  return b;
}

// [-2,2]^n (half: last factor [0,2]) with coordinate i fixed to v.
Box face(const ChartWitness& c, unsigned i, const Q& v) {
  Box b = cube(c.n, c.half, Q(2), Q(2));
  b[i] = Interval(v);
  return b;
}

// The chart domain with coordinate i restricted to [lo, hi].
Box slab(const ChartWitness& c, unsigned i, const Q& lo, const Q& hi) {
  Box b = chart_domain(c);
  b[i] = Interval(lo, hi);
  return b;
}

Q separation(const ChartWitness& c, const Box& k, const Box& l) {
  std::optional<Q> d = dist_lower_bound(image_sampler(c, k), image_sampler(c, l));
  if (!d) throw PreconditionError("chart " + c.name + ": separation search failed (is the chart injective?)");
  return *d;
}

Box cell_box(const GridCell& g) {
  Box b;
  for (std::size_t i = 0; i < g.lo.size(); ++i) b.push_back(Interval(g.lo[i], g.hi[i]));
  return b;
}

struct ImageBox {
  Point lo, hi;
};

// Closed box containing f(cell): bounding box of an eta-net, grown by eta.
ImageBox image_box(const ChartWitness& c, const Box& cell, const Q& eta) {
  PointSet net = image_net(c, cell, eta);
  ImageBox b{net[0], net[0]};
  for (const Point& p : net)
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] < b.lo[i]) b.lo[i] = p[i];
      if (p[i] > b.hi[i]) b.hi[i] = p[i];
    }
  for (std::size_t i = 0; i < b.lo.size(); ++i) {
    b.lo[i] -= eta;
    b.hi[i] += eta;
  }
  return b;
}

Q box_sq_dist(const ImageBox& a, const ImageBox& b) {
  Q d = 0;
  for (std::size_t i = 0; i < a.lo.size(); ++i) {
    Q g = 0;
    if (b.lo[i] > a.hi[i]) g = b.lo[i] - a.hi[i];
    if (a.lo[i] > b.hi[i]) g = a.lo[i] - b.hi[i];
    d += g * g;
  }
  return d;
}

ImageBox grown(const ImageBox& b, const Q& r) {
  ImageBox g = b;
  for (std::size_t i = 0; i < g.lo.size(); ++i) {
    g.lo[i] -= r;
    g.hi[i] += r;
  }
  return g;
}

// Open-set cover with a spatial index, for formal-disjointness queries.
class IndexedCover {
 public:
  IndexedCover(const OpenSet& u, unsigned n) : u_(&u), idx_(n) {
    for (std::size_t i = 0; i < u.size(); ++i) idx_.insert_ball(u[i], i);
  }
  bool disjoint_from(const OpenSet& link) const {
    for (const Ball& x : link) {
      idx_.query_ball(x, cand_);
      for (std::size_t i : cand_)
        if (!formally_disjoint(x, (*u_)[i])) return false;
    }
    return true;
  }

 private:
  const OpenSet* u_;
  BoxIndex idx_;
  mutable std::vector<std::size_t> cand_;
};

}  // namespace

// ---- anchors ----------------------------------------------------------------------

Anchors derive_anchors(const ChartWitness& c) {
  const unsigned n = c.n;
  const bool half = c.half;
  if (half ? !(c.core < Q(1, 2)) : !(c.core < 1)) throw PreconditionError("chart " + c.name + ": core too large");
  Anchors an;
  an.a.resize(n);
  an.b.resize(n);
  Q least = -1;
  auto keep = [&](const Q& d) {
    an.separations.push_back(d);
    if (least < 0 || d < least) least = d;
  };
  for (unsigned i = 0; i < n; ++i) {
    const bool last_half = half && i == n - 1;
    if (!last_half) keep(separation(c, face(c, i, Q(-2)), slab(c, i, Q(-1), Q(4))));
    keep(separation(c, face(c, i, Q(2)), slab(c, i, last_half ? Q(0) : Q(-4), Q(1))));
  }
  const Box core = cube(n, half, c.core, c.core);
  Q core_sep = -1;
  for (unsigned i = 0; i < n; ++i) {
    std::vector<Box> outer;
    if (half && i == n - 1) {
      outer.push_back(slab(c, i, Q(1, 2), Q(4)));
    } else {
      outer.push_back(slab(c, i, Q(-4), Q(-1)));
      outer.push_back(slab(c, i, Q(1), Q(4)));
    }
    for (const Box& o : outer) {
      Q d = separation(c, core, o);
      if (core_sep < 0 || d < core_sep) core_sep = d;
    }
  }
  keep(core_sep);
  an.gamma = dyadic_below(least / 4, bits_below(least) + 4);
  for (unsigned i = 0; i < n; ++i) {
    if (!(half && i == n - 1)) an.a[i] = net_cover(image_sampler(c, face(c, i, Q(-2))), an.gamma).balls;
    an.b[i] = net_cover(image_sampler(c, face(c, i, Q(2))), an.gamma).balls;
  }
  // Put a ball on f(0) first so that x lies in J_x' by construction.
  PointSet core_net = image_net(c, core, an.gamma / 4);
  Box origin(n, Interval(Q(0)));
  PointSet centre = image_net(c, origin, an.gamma / 4);
  centre.insert(centre.end(), core_net.begin(), core_net.end());
  an.x = net_cover_from(centre, an.gamma).balls;
  return an;
}

// ---- candidates -------------------------------------------------------------------

Candidate synth_candidate(unsigned k, const ChartWitness& c, const Anchors& a) {
  const unsigned n = c.n;
  const Q eps = pow2(-static_cast<long>(k));
  // Cells of sup-width 1/(m+1) have images of diameter < eps/8.
  const unsigned long m = c.modulus(k + 3);
  const unsigned long side = 8 * m + 7;
  std::size_t total = 1;
  for (unsigned i = 0; i < n; ++i) total *= side + 1;

  // Coarse boxes around every cell image, refined where far cells are not yet separated.
  const Q eta0 = pow2(-static_cast<long>(k) - 7);
  const Q reach = eps / 4;
  const unsigned max_level = 6;
  std::vector<Box> cells(total);
  std::vector<ImageBox> stored(total), current(total);
  std::vector<unsigned> level(total, 0);
  std::vector<Index> coords(total);
  BoxIndex idx(c.ambient);
  for (std::size_t f = 0; f < total; ++f) {
    coords[f] = unflatten(f, n, side);
    cells[f] = cell_box(grid_cell(m, coords[f], c.half));
    stored[f] = image_box(c, cells[f], eta0);
    current[f] = stored[f];
    idx.insert(stored[f].lo, stored[f].hi, f);
  }
  auto refine = [&](std::size_t f) {
    if (level[f] >= max_level)
      throw PreconditionError("chart " + c.name + ": images of far cells are not separated");
    ++level[f];
    current[f] = image_box(c, cells[f], eta0 * pow2(-2 * static_cast<long>(level[f])));
  };
  std::vector<Q> sep(total);
  std::vector<std::size_t> cand;
  for (std::size_t f = 0; f < total; ++f) {
    ImageBox q = grown(stored[f], reach + eta0);
    while (true) {
      idx.query(q.lo, q.hi, cand);
      Q best = reach * reach;
      std::optional<std::size_t> clash;
      for (std::size_t w : cand) {
        if (p_metric(coords[f], coords[w]) <= 1) continue;
        Q d2 = box_sq_dist(current[f], current[w]);
        // Refine while the box slack dominates the distance, so that sep stays close to the true gap.
        const unsigned coarse = std::max(level[f], level[w]);
        if (coarse < max_level) {
          Q slack = 8 * eta0 * pow2(-2 * static_cast<long>(coarse));
          if (d2 < slack * slack) {
            clash = w;
            break;
          }
        } else if (sgn(d2) == 0) {
          clash = w;
          break;
        }
        if (d2 < best) best = d2;
      }
      if (!clash) {
        sep[f] = best == reach * reach ? reach : std::min(reach, sqrt_lo(best, k + 12));
        break;
      }
      refine(level[f] <= level[*clash] ? f : *clash);
    }
  }

  Candidate out;
  out.m = m;
  out.t.k = k;
  out.t.e = static_cast<long>(3 * m + 3);
  out.t.h = static_cast<long>(5 * m + 4);
  if (c.half) out.t.u = static_cast<long>(m);
  out.origin = "synth";
  out.chain.n = n;
  out.chain.side = side;
  out.chain.links.resize(total);
  const Q cap = std::min(a.gamma, Q(eps / 6));
  for (std::size_t f = 0; f < total; ++f) {
    Q bound = std::min(cap, Q(sep[f] / 4));
    if (sgn(bound) <= 0) throw PreconditionError("chart " + c.name + ": zero separation");
    Q delta = dyadic_below(bound, bits_below(bound) + 3);
    if (f == 0 || delta < out.delta_min) out.delta_min = delta;
    if (f == 0 || delta > out.delta_max) out.delta_max = delta;
    out.chain.links[f] = net_cover_from(image_net(c, cells[f], delta / 4), delta).balls;
  }
  return out;
}

std::optional<Candidate> enumerated_candidate(const Z& code, unsigned k, unsigned n, bool half) {
  std::vector<Z> parts = nu_inverse(code, half ? 4 : 3);
  Z side = grid_side(parts[0]);
  if (!side.fits_ulong_p() || side > 64) return std::nullopt;
  Z total = 1;
  for (unsigned i = 0; i < n; ++i) total *= side + 1;
  if (total > 4096) return std::nullopt;
  for (std::size_t i = 1; i < parts.size(); ++i)
    if (!parts[i].fits_slong_p()) return std::nullopt;
  Candidate c;
  try {
    c.chain = chain_from_code(parts[0], n);
  } catch (const PreconditionError&) {
    return std::nullopt;
  }
  c.t.k = k;
  c.t.e = parts[1].get_si();
  c.t.h = parts[2].get_si();
  if (half) c.t.u = parts[3].get_si();
  c.origin = "enumerated " + code.get_str();
  return c;
}

// ---- conditions -------------------------------------------------------------------

CheckReport check_conditions(const Candidate& cand, const SemiOracle& s_prime, const SemiOracle* t_prime,
                             const Anchors& a, Budget& b) {
  const GridChain& ch = cand.chain;
  const unsigned n = ch.n;
  const bool half = cand.t.u.has_value();
  if (half && !t_prime) throw PreconditionError("boundary tuple checked without a boundary oracle");
  CheckReport rep;
  auto add = [&](const std::string& name, Verdict v) { rep.conditions.push_back({name, v}); };
  auto charge = [&]() { return b.take(std::max<std::size_t>(ch.size(), 1)); };
  auto structural = [&](bool ok) { return ok ? Verdict::yes : Verdict::no; };

  for (const OpenSet& l : ch.links)
    if (l.empty()) {
      rep.verdict = Verdict::no;
      add("well-formed", Verdict::no);
      return rep;
    }
  if (ch.links.empty() || a.a.size() != n || a.b.size() != n || a.x.empty() ||
      ch.links[0][0].c.size() != a.x[0].c.size()) {
    rep.verdict = Verdict::no;
    add("well-formed", Verdict::no);
    return rep;
  }
  const unsigned amb = static_cast<unsigned>(a.x[0].c.size());

  // Formal chain, anchored disjointness and fmesh are decided exactly; do them first.
  Verdict formal = Verdict::unknown, adis = Verdict::unknown, bdis = Verdict::unknown, bn = Verdict::unknown,
          xin = Verdict::unknown, xlast = Verdict::unknown, mesh = Verdict::unknown;
  StructuralVerdicts& memo = *cand.cache;
  if (charge()) {
    if (!memo.formal) memo.formal = structural(is_formal_chain(ch));
    formal = *memo.formal;
  }
  if (charge() && !memo.adis) {
    std::vector<std::unique_ptr<IndexedCover>> ia(n), ib(n);
    for (unsigned i = 0; i < n; ++i) {
      ia[i] = std::make_unique<IndexedCover>(a.a[i], amb);
      ib[i] = std::make_unique<IndexedCover>(a.b[i], amb);
    }
    IndexedCover ix(a.x, amb);
    bool ok_a = true, ok_b = true, ok_bn = true, ok_x = true, ok_xl = true;
    const unsigned free_coords = half ? n - 1 : n;
    for (std::size_t f = 0; f < ch.size(); ++f) {
      Index v = unflatten(f, n, ch.side);
      const OpenSet& link = ch.links[f];
      bool outside = false;
      for (unsigned i = 0; i < free_coords; ++i) {
        if (ok_a && v[i] >= cand.t.e && !ia[i]->disjoint_from(link)) ok_a = false;
        if (ok_b && v[i] <= cand.t.h && !ib[i]->disjoint_from(link)) ok_b = false;
        if (v[i] < cand.t.e || v[i] > cand.t.h) outside = true;
      }
      if (ok_x && outside && !ix.disjoint_from(link)) ok_x = false;
      if (half) {
        if (ok_bn && v[n - 1] <= *cand.t.u && !ib[n - 1]->disjoint_from(link)) ok_bn = false;
        if (ok_xl && v[n - 1] > *cand.t.u && !ix.disjoint_from(link)) ok_xl = false;
      }
    }
    memo.adis = structural(ok_a);
    memo.bdis = structural(ok_b);
    memo.xin = structural(ok_x);
    memo.bn = structural(ok_bn);
    memo.xlast = structural(ok_xl);
  }
  if (memo.adis) {
    adis = *memo.adis;
    bdis = *memo.bdis;
    xin = *memo.xin;
    if (half) {
      bn = *memo.bn;
      xlast = *memo.xlast;
    }
  }
  if (charge()) {
    if (!memo.mesh) memo.mesh = structural(fmesh_lt(ch, pow2(-static_cast<long>(cand.t.k)), cand.t.k + 4));
    mesh = *memo.mesh;
  }

  bool failed = false;
  for (Verdict v : {formal, adis, bdis, xin, mesh}) failed = failed || v == Verdict::no;
  if (half) failed = failed || bn == Verdict::no || xlast == Verdict::no;

  Verdict cover = Verdict::unknown, lower = Verdict::unknown;
  if (!failed && !b.exhausted()) cover = covers(s_prime, ch, b);
  if (half && !failed && cover == Verdict::yes && !b.exhausted()) lower = lower_covers(*t_prime, ch, b);

  if (half) {
    add("(1) cover of S'", cover);
    add("(2) lower boundary covers T'", lower);
    add("(3) formal chain", formal);
    add("(4) disjoint from a_i, v_i >= e, i < n", adis);
    add("(5) disjoint from b_i, v_i <= h, i < n", bdis);
    add("(6) disjoint from b_n, v_n <= u", bn);
    add("(7) disjoint from x', some v_i outside [e,h], i < n", xin);
    add("(8) disjoint from x', v_n > u", xlast);
    add("(9) fmesh < 2^-k", mesh);
  } else {
    add("(1) cover of S'", cover);
    add("(2) formal chain", formal);
    add("(3) disjoint from a_i, v_i >= e", adis);
    add("(4) disjoint from b_i, v_i <= h", bdis);
    add("(5) disjoint from x', some v_i outside [e,h]", xin);
    add("(6) fmesh < 2^-k", mesh);
  }
  bool all_yes = true, any_no = false;
  for (const ConditionResult& r : rep.conditions) {
    all_yes = all_yes && r.verdict == Verdict::yes;
    any_no = any_no || r.verdict == Verdict::no;
  }
  rep.verdict = all_yes ? Verdict::yes : any_no ? Verdict::no : Verdict::unknown;
  return rep;
}

std::vector<Index> gamma_indices(const Candidate& cand) {
  std::vector<Index> out;
  const GridChain& ch = cand.chain;
  const bool half = cand.t.u.has_value();
  for (std::size_t f = 0; f < ch.size(); ++f) {
    Index v = unflatten(f, ch.n, ch.side);
    bool in = true;
    for (unsigned i = 0; i < ch.n && in; ++i) {
      if (half && i == ch.n - 1)
        in = v[i] <= *cand.t.u;
      else
        in = cand.t.e <= v[i] && v[i] <= cand.t.h;
    }
    if (in) out.push_back(std::move(v));
  }
  return out;
}

PointSet gamma_points(const Candidate& cand) {
  PointSet pts;
  for (const Index& v : gamma_indices(cand)) {
    const OpenSet& link = cand.chain.at(v);
    if (!link.empty()) pts.push_back(link[0].c);
  }
  return union_points({pts});
}

// ---- local search -----------------------------------------------------------------

LocalApprox::LocalApprox(SemiPtr s, ChartWitness chart, SemiPtr boundary, std::uint64_t budget)
    : chart_(std::move(chart)), budget_(budget) {
  s_prime_ = subtract(std::move(s), chart_.m0);
  if (chart_.half) {
    if (!boundary) throw PreconditionError("boundary chart " + chart_.name + " needs a boundary oracle");
    t_prime_ = subtract(std::move(boundary), chart_.m0);
  }
}

const Anchors& LocalApprox::anchors() const {
  std::lock_guard<std::mutex> lock(mu_);
  if (!anchors_) anchors_ = derive_anchors(chart_);
  return *anchors_;
}

const LocalStep& LocalApprox::step(unsigned k) const {
  Budget b(budget_);
  return step(k, b);
}

const LocalStep& LocalApprox::step(unsigned k, Budget& b) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = steps_.find(k);
    if (it != steps_.end()) {
      if (!b.take(it->second->steps)) throw BudgetExhausted("chart " + chart_.name + ": budget exhausted");
      return *it->second;
    }
  }
  const std::uint64_t start = b.used;
  const Anchors& an = anchors();
  const unsigned kp = k + 1;
  Candidate synth = synth_candidate(kp, chart_, an);
  if (!b.take(synth.chain.size())) throw BudgetExhausted("chart " + chart_.name + ": budget exhausted");
  const std::uint64_t base = 1024;

  auto accept = [&](const Candidate& cand, CheckReport rep, unsigned s) -> const LocalStep& {
    auto st = std::make_unique<LocalStep>();
    st->chart = chart_.name;
    st->k = k;
    st->cand = cand;
    st->report = std::move(rep);
    st->gamma_size = gamma_indices(cand).size();
    if (st->gamma_size == 0) throw std::logic_error("accepted tuple with empty Gamma");
    for (const OpenSet& l : cand.chain.links) st->balls += l.size();
    st->lambda = gamma_points(cand);
    st->stage = s;
    st->steps = b.used - start;
    std::lock_guard<std::mutex> lock(mu_);
    auto& slot = steps_[k];
    slot = std::move(st);
    return *slot;
  };

  for (unsigned s = 0;; ++s) {
    {
      Budget q = b.sub(cap_shift(base, s));
      CheckReport rep = check_conditions(synth, *s_prime_, t_prime_.get(), an, q);
      b.settle(q);
      if (rep.verdict == Verdict::yes) return accept(synth, std::move(rep), s);
    }
    for (unsigned code = 0; code <= s && !b.exhausted(); ++code) {
      std::optional<Candidate> cand = enumerated_candidate(Z(code), kp, chart_.n, chart_.half);
      if (!cand) continue;
      Budget q = b.sub(cap_shift(1, s));
      CheckReport rep = check_conditions(*cand, *s_prime_, t_prime_.get(), an, q);
      b.settle(q);
      if (rep.verdict == Verdict::yes) return accept(*cand, std::move(rep), s);
    }
    if (b.exhausted()) throw BudgetExhausted("chart " + chart_.name + ": budget exhausted at k=" + std::to_string(k));
  }
}

PointSet LocalApprox::at(unsigned k) const { return step(k).lambda; }

std::shared_ptr<LocalApprox> local_upto_approx(SemiPtr s, const ChartWitness& chart, SemiPtr boundary,
                                               std::uint64_t budget) {
  return std::make_shared<LocalApprox>(std::move(s), chart, std::move(boundary), budget);
}

UpToApprox local_upto(SemiPtr s, const ChartWitness& chart, SemiPtr boundary, std::uint64_t budget) {
  return UpToApprox{"S", "S' cap J_x' (" + chart.name + ")",
                    local_upto_approx(std::move(s), chart, std::move(boundary), budget)};
}

Reconstruction reconstruct(SemiPtr s, SemiPtr boundary, const std::vector<ChartWitness>& atlas, std::uint64_t budget) {
  if (atlas.empty()) throw PreconditionError("reconstruction needs an atlas");
  Reconstruction r;
  std::vector<UpToApprox> pieces;
  for (const ChartWitness& c : atlas) {
    auto local = local_upto_approx(s, c, c.half ? boundary : nullptr, budget);
    r.locals.push_back(local);
    pieces.push_back(UpToApprox{"S", c.name, local});
  }
  r.glued = glue(pieces);
  return r;
}

ReconstructionRun run_reconstruction(const Reconstruction& r, unsigned k, std::uint64_t budget) {
  ReconstructionRun run;
  run.k = k;
  Budget b(budget);
  std::vector<PointSet> parts;
  for (const auto& local : r.locals) {
    const LocalStep& st = local->step(k, b);
    run.steps.push_back(&st);
    parts.push_back(st.lambda);
  }
  run.points = union_points(parts);
  run.steps_used = b.used;
  return run;
}

std::string chain_digest(const GridChain& c) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&](const std::string& s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ull;
    }
    h ^= 0xff;
    h *= 1099511628211ull;
  };
  mix(std::to_string(c.n));
  mix(std::to_string(c.side));
  for (const OpenSet& u : c.links) {
    for (const Ball& b : u) mix(ball_str(b));
    mix(";");
  }
  std::ostringstream o;
  o << std::hex;
  o.width(16);
  o.fill('0');
  o << h;
  return o.str();
}

}  // namespace cma
