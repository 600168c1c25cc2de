#include "cma/instances.hpp"

#include "cma/index.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace cma {

namespace {

Point closest_on_segment(const TruthSample& s, const Point& p) {
  Q len2 = sq_dist(s.lo, s.hi);
  if (sgn(len2) == 0) return s.lo;
  Q dot = 0;
  for (std::size_t i = 0; i < p.size(); ++i) dot += (p[i] - s.lo[i]) * (s.hi[i] - s.lo[i]);
  Q t = dot / len2;
  if (t < 0) t = 0;
  if (t > 1) t = 1;
  Point q(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) q[i] = s.lo[i] + t * (s.hi[i] - s.lo[i]);
  return q;
}

}  // namespace

bool sample_in_ball(const TruthSample& s, const Ball& b) { return mem_ball(closest_on_segment(s, b.c), b); }

bool sample_inside_ball(const TruthSample& s, const Ball& b) { return mem_ball(s.lo, b) && mem_ball(s.hi, b); }

// ---- generic semi oracles -------------------------------------------------------

namespace {

class ParamSemi : public SemiOracle {
 public:
  ParamSemi(unsigned ambient, std::vector<ParamPiece> pieces) : n_(ambient), pieces_(std::move(pieces)) {}
  unsigned dim() const override { return n_; }

  Verdict covered_by(const OpenSet& u, Budget& b) const override {
    if (u.empty()) return Verdict::no;
    Q rmin = u[0].r;
    for (const Ball& ball : u) rmin = std::min(rmin, Q(ball.r));
    BoxIndex idx(n_, BoxIndex::level_at_least(rmin));
    for (std::size_t i = 0; i < u.size(); ++i) idx.insert_ball(u[i], i);
    std::vector<std::size_t> cand;
    for (const ParamPiece& piece : pieces_) {
      std::vector<Box> stack{piece.domain};
      while (!stack.empty()) {
        if (!b.take()) return Verdict::unknown;
        Box box = std::move(stack.back());
        stack.pop_back();
        Box enc = piece.enclose(box);
        Point lo, hi, centre;
        for (const Interval& iv : enc) {
          lo.push_back(iv.lo);
          hi.push_back(iv.hi);
          centre.push_back(iv.mid());
        }
        // A ball containing the box contains its centre.
        idx.query_point(centre, cand);
        bool inside = false;
        for (std::size_t i : cand)
          if (box_in_ball(lo, hi, u[i])) {
            inside = true;
            break;
          }
        if (inside) continue;
        Point mid;
        for (const Interval& iv : box) mid.push_back(iv.mid());
        Point at = piece.at(mid);
        idx.query_point(at, cand);
        if (std::none_of(cand.begin(), cand.end(), [&](std::size_t i) { return mem_ball(at, u[i]); }))
          return Verdict::no;
        std::size_t w = 0;
        for (std::size_t i = 1; i < box.size(); ++i)
          if (box[i].width() > box[w].width()) w = i;
        Box left = box, right = box;
        left[w].hi = box[w].mid();
        right[w].lo = box[w].mid();
        stack.push_back(std::move(right));
        stack.push_back(std::move(left));
      }
    }
    return Verdict::yes;
  }

 private:
  unsigned n_;
  std::vector<ParamPiece> pieces_;
};

class FiniteSemi : public SemiOracle {
 public:
  explicit FiniteSemi(PointSet pts) : pts_(std::move(pts)) {}
  unsigned dim() const override { return pts_.empty() ? 1 : static_cast<unsigned>(pts_[0].size()); }
  Verdict covered_by(const OpenSet& u, Budget& b) const override {
    for (const Point& p : pts_) {
      if (!b.take()) return Verdict::unknown;
      if (!mem_open(p, u)) return Verdict::no;
    }
    return Verdict::yes;
  }

 private:
  PointSet pts_;
};

class IntervalSemi : public SemiOracle {
 public:
  IntervalSemi(Q a, Q b) : a_(std::move(a)), b_(std::move(b)) {}
  unsigned dim() const override { return 1; }
  Verdict covered_by(const OpenSet& u, Budget& b) const override {
    if (!b.take()) return Verdict::unknown;
    return interval_covered(a_, b_, u) ? Verdict::yes : Verdict::no;
  }

 private:
  Q a_, b_;
};

}  // namespace

SemiPtr param_semi(unsigned ambient, std::vector<ParamPiece> pieces) {
  return std::make_shared<ParamSemi>(ambient, std::move(pieces));
}
SemiPtr finite_semi(PointSet pts) { return std::make_shared<FiniteSemi>(std::move(pts)); }
SemiPtr interval_semi(Q a, Q b) { return std::make_shared<IntervalSemi>(std::move(a), std::move(b)); }

// ---- parametrizations -------------------------------------------------------------

namespace {

Point negate(Point p) {
  for (Q& v : p) v = -v;
  return p;
}

Point signed_circle_point(const Q& u, int sign) { return sign > 0 ? circle_point(u) : negate(circle_point(u)); }

// g is monotone in each coordinate on [-1,0] and on [0,1], so endpoint images span the arc.
Box circle_box(const Interval& u, int sign) {
  Point a = signed_circle_point(u.lo, sign), b = signed_circle_point(u.hi, sign);
  Box out;
  for (std::size_t i = 0; i < 2; ++i) out.push_back(Interval(std::min(a[i], b[i]), std::max(a[i], b[i])));
  return out;
}

const Interval kHalves[2] = {Interval(Q(-1), Q(0)), Interval(Q(0), Q(1))};

Box stereo_box(const Interval& u1, const Interval& u2, int zsign) {
  Interval d = Interval(Q(1)) + sqr(u1) + sqr(u2);
  Interval two(Q(2));
  Interval z = (Interval(Q(2)) / d) - Interval(Q(1));
  if (zsign < 0) z = -z;
  return {two * u1 / d, two * u2 / d, z};
}

Point stereo_point(const Q& u1, const Q& u2, int zsign) {
  Q s = u1 * u1 + u2 * u2, d = 1 + s;
  return {2 * u1 / d, 2 * u2 / d, zsign * (1 - s) / d};
}

Point torus_at(const Point& a, const Point& b) {
  Q rad = 2 + b[0];
  return {rad * a[0], rad * a[1], b[1]};
}

}  // namespace

std::vector<ParamPiece> circle_pieces() {
  std::vector<ParamPiece> out;
  for (int sign : {1, -1})
    for (const Interval& h : kHalves)
      out.push_back({Box{h}, [sign](const Box& x) { return circle_box(x[0], sign); },
                     [sign](const Point& x) { return signed_circle_point(x[0], sign); }});
  return out;
}

std::vector<ParamPiece> sphere_pieces() {
  std::vector<ParamPiece> out;
  for (int zs : {1, -1})
    out.push_back({Box{Interval(Q(-1), Q(1)), Interval(Q(-1), Q(1))},
                   [zs](const Box& x) { return stereo_box(x[0], x[1], zs); },
                   [zs](const Point& x) { return stereo_point(x[0], x[1], zs); }});
  return out;
}

std::vector<ParamPiece> torus_pieces() {
  std::vector<ParamPiece> out;
  for (int sa : {1, -1})
    for (int sb : {1, -1})
      for (const Interval& ha : kHalves)
        for (const Interval& hb : kHalves)
          out.push_back({Box{ha, hb},
                         [sa, sb](const Box& x) {
                           Box a = circle_box(x[0], sa), b = circle_box(x[1], sb);
                           Interval rad = Interval(Q(2)) + b[0];
                           return Box{rad * a[0], rad * a[1], b[1]};
                         },
                         [sa, sb](const Point& x) {
                           return torus_at(signed_circle_point(x[0], sa), signed_circle_point(x[1], sb));
                         }});
  return out;
}

ApproxPtr circle_approx() {
  class CircleApprox : public Approx {
   public:
    unsigned dim() const override { return 2; }
    // Speed of g is at most 2, so a 2^-(k+1) grid puts every arc point within 2^-(k+1).
    PointSet at(unsigned k) const override {
      PointSet out;
      const Q h = pow2(-static_cast<long>(k) - 1);
      for (int sign : {1, -1})
        for (Q u = -1; u <= 1; u += h) {
          if (sign < 0 && (u == -1 || u == 1)) continue;
          out.push_back(signed_circle_point(u, sign));
        }
      return out;
    }
    std::optional<std::uint64_t> size_hint(unsigned k) const override {
      return k > 40 ? std::nullopt : std::optional<std::uint64_t>((std::uint64_t(1) << (k + 3)) + 2);
    }
  };
  return std::make_shared<CircleApprox>();
}

// ---- truth oracles ----------------------------------------------------------------

namespace {

// | |p| - radius | <= q by squaring.
bool sphere_dist_le(const Point& p, const Q& q) {
  Q n2 = 0;
  for (const Q& x : p) n2 += x * x;
  Q up = 1 + q;
  if (n2 > up * up) return false;
  if (q >= 1) return true;
  Q down = 1 - q;
  return n2 >= down * down;
}

bool torus_dist_le(const Point& p, const Q& q) {
  // D^2 = (rho - 2)^2 + z^2 = P - 4 rho with P = |p|^2 + 4 and rho = sqrt(x^2 + y^2).
  Q rho2 = p[0] * p[0] + p[1] * p[1];
  Q P = rho2 + p[2] * p[2] + 4;
  Q upper = (1 + q) * (1 + q);
  Q lower = q < 1 ? Q((1 - q) * (1 - q)) : Q(0);
  Q a = (P - upper) / 4, b = (P - lower) / 4;  // need a <= rho <= b
  if (sgn(b) < 0 || rho2 > b * b) return false;
  if (sgn(a) > 0 && rho2 < a * a) return false;
  return true;
}

std::vector<TruthSample> points_as_samples(const PointSet& pts) {
  std::vector<TruthSample> out;
  for (const Point& p : pts) out.push_back({p, p});
  return out;
}

Truth circle_truth() {
  Truth t;
  t.dist_le = sphere_dist_le;
  // u spacing 2^-9 and speed <= 2 put every circle point within 2^-9 of a sample.
  t.samples = [] { return points_as_samples(circle_approx()->at(8)); };
  t.slack = pow2(-9);
  return t;
}

Truth segment_truth() {
  Truth t;
  t.dist_le = [](const Point& p, const Q& q) {
    Q d = 0;
    if (p[0] < 0) d = -p[0];
    if (p[0] > 1) d = p[0] - 1;
    return d <= q;
  };
  t.samples = [] {
    PointSet pts;
    for (Q x = 0; x <= 1; x += pow2(-9)) pts.push_back({x});
    return points_as_samples(pts);
  };
  t.slack = pow2(-10);
  return t;
}

Truth sphere_truth() {
  Truth t;
  t.dist_le = sphere_dist_le;
  t.samples = [] {
    PointSet pts;
    const Q h = pow2(-6);
    for (int zs : {1, -1})
      for (Q a = -1; a <= 1; a += h)
        for (Q b = -1; b <= 1; b += h) pts.push_back(stereo_point(a, b, zs));
    return points_as_samples(pts);
  };
  // Speed <= 2 in each parameter: half-diagonal sqrt(2) h / 2 maps within sqrt(2) h < 2h.
  t.slack = pow2(-5);
  return t;
}

Truth torus_truth() {
  Truth t;
  t.dist_le = torus_dist_le;
  t.samples = [] {
    PointSet pts;
    const Q h = pow2(-5);
    for (int sa : {1, -1})
      for (int sb : {1, -1})
        for (Q a = -1; a <= 1; a += h)
          for (Q b = -1; b <= 1; b += h) pts.push_back(torus_at(signed_circle_point(a, sa), signed_circle_point(b, sb)));
    return points_as_samples(pts);
  };
  // Speeds 6 and 2 over a half-step of 2^-6: sqrt(36 + 4) 2^-6 < 2^-3.
  t.slack = pow2(-3);
  return t;
}

Truth radial_truth(std::shared_ptr<const LevelSetInstance> inst) {
  Truth t;
  t.samples = [inst] {
    std::vector<TruthSample> out;
    const Q h(1, 8);
    for (int zs : {1, -1})
      for (Q a = -1; a <= 1; a += h)
        for (Q b = -1; b <= 1; b += h) {
          Point d = stereo_point(a, b, zs);
          Interval r = radial_root(*inst, d, 30);
          TruthSample s;
          for (const Q& v : d) {
            s.lo.push_back(r.lo * v);
            s.hi.push_back(r.hi * v);
          }
          out.push_back(std::move(s));
        }
    return out;
  };
  t.exact_samples = false;
  return t;
}

const char* kExampleI =
    "name paper-example-i\n"
    "dim 3\n"
    "exprs (+ (+ (* (sq x) (+ 1 (exp x))) (* (sq y) (+ 1 (exp y)))) (* (sq z) (+ 1 (exp z))))\n"
    "target 1\n"
    "box -2 2 -2 2 -2 2\n"
    "atlas radial\n"
    "regular yes\n";

}  // namespace

// ---- instances --------------------------------------------------------------------

const std::vector<std::string>& builtin_instance_names() {
  static const std::vector<std::string> names = {"circle", "segment", "sphere", "torus", "paper-example-i",
                                                 "adversarial-segment"};
  return names;
}

Instance instance_from_levelset(const LevelSetInstance& ls) {
  Instance in;
  auto shared = std::make_shared<const LevelSetInstance>(ls);
  in.levelset = shared;
  in.name = ls.name.empty() ? "levelset" : ls.name;
  in.ambient = ls.n;
  in.dim = ls.n > ls.exprs.size() ? static_cast<unsigned>(ls.n - ls.exprs.size()) : 0;
  in.coce = coce_from_levelset(ls);
  in.semi = semi_from_levelset(ls);
  in.notes.push_back(std::string("regular value claimed: ") + (ls.regular ? "yes" : "no") + " (not checked)");
  in.notes.push_back("the level set lies in the interior of the box (supplier obligation)");
  if (ls.atlas == "circle") {
    if (ls.n != 2) throw PreconditionError("atlas circle needs dim 2");
    in.atlas = circle_atlas();
    in.truth = circle_truth();
    in.approx = circle_approx();
    in.notes.push_back("atlas circle: the file must describe the unit circle");
  } else if (ls.atlas == "sphere") {
    if (ls.n != 3) throw PreconditionError("atlas sphere needs dim 3");
    in.atlas = sphere_atlas();
    in.truth = sphere_truth();
    in.notes.push_back("atlas sphere: the file must describe the unit sphere");
  } else if (ls.atlas == "radial") {
    in.atlas = radial_atlas(ls);
    in.truth = radial_truth(shared);
    in.notes.push_back("radial charts: the surface is star-shaped about 0 with radii in [1/2, 1] (supplier obligation)");
  } else if (ls.atlas.empty()) {
    in.no_atlas_reason = "no atlas: the instance names no chart family";
  } else {
    throw PreconditionError("unknown chart family '" + ls.atlas + "'");
  }
  return in;
}

Instance make_instance(const std::string& ref) {
  Instance in;
  in.name = ref;
  if (ref == "circle") {
    in.ambient = 2;
    in.dim = 1;
    in.semi = param_semi(2, circle_pieces());
    in.coce = semi_to_coce(in.semi);
    in.approx = circle_approx();
    in.ce = approx_to_ce(in.approx);
    in.atlas = circle_atlas();
    in.truth = circle_truth();
    in.notes.push_back("the x' anchors of the two charts cover the circle");
    return in;
  }
  if (ref == "segment") {
    in.ambient = 1;
    in.dim = 1;
    in.semi = interval_semi(0, 1);
    in.coce = semi_to_coce(in.semi);
    in.approx = std::make_shared<FunctionApprox>(1, [](unsigned k) {
      PointSet out;
      for (Q x = 0; x <= 1; x += pow2(-static_cast<long>(k) - 1)) out.push_back({x});
      return out;
    });
    in.ce = approx_to_ce(in.approx);
    in.has_boundary = true;
    in.boundary_semi = finite_semi({{Q(0)}, {Q(1)}});
    in.atlas = segment_atlas();
    in.truth = segment_truth();
    in.notes.push_back("boundary {0,1}; the x' anchors of the three charts cover [0,1]");
    return in;
  }
  if (ref == "sphere") {
    in.ambient = 3;
    in.dim = 2;
    in.semi = param_semi(3, sphere_pieces());
    in.coce = semi_to_coce(in.semi);
    in.atlas = sphere_atlas();
    in.truth = sphere_truth();
    in.notes.push_back("the x' anchors of the six charts cover the sphere");
    return in;
  }
  if (ref == "torus") {
    in.ambient = 3;
    in.dim = 2;
    in.semi = param_semi(3, torus_pieces());
    in.coce = semi_to_coce(in.semi);
    in.atlas = torus_atlas();
    in.truth = torus_truth();
    in.notes.push_back("the x' anchors of the four charts cover the torus");
    return in;
  }
  if (ref == "paper-example-i") return instance_from_levelset(parse_instance(kExampleI));
  if (ref == "adversarial-segment") {
    Adversarial adv = make_adversarial();
    in.ambient = 1;
    in.dim = 1;
    in.semi = adv.semi;
    in.coce = adv.coce;
    in.ce = adv.ce;
    in.has_boundary = true;
    in.no_atlas_reason = "no atlas: boundary not computable";
    in.notes.push_back("[0,c] with c right-c.e. from a halting enumeration");
    return in;
  }
  std::ifstream f(ref);
  if (!f) throw PreconditionError("unknown instance '" + ref + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return instance_from_levelset(parse_instance(ss.str()));
}

// ---- the right-c.e. segment -----------------------------------------------------

void Bracket::extend() const {
  if (stages_.empty()) {
    stages_.push_back({0, en_.c_lo(), en_.c_hi()});
    return;
  }
  std::uint64_t before = en_.work();
  en_.advance_stage();
  stages_.push_back({stages_.back().cost + 1 + (en_.work() - before), en_.c_lo(), en_.c_hi()});
}

Bracket::Stage Bracket::within(std::uint64_t steps) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (stages_.empty()) extend();
  while (stages_.back().cost <= steps) {
    extend();
    if (stages_.back().cost > steps) return stages_[stages_.size() - 2];
  }
  // Earlier stages already fit.
  std::size_t i = stages_.size();
  while (i-- > 0)
    if (stages_[i].cost <= steps) return stages_[i];
  return stages_[0];
}

Bracket::Stage Bracket::stage(unsigned s) const {
  std::lock_guard<std::mutex> lock(mu_);
  while (stages_.size() <= s) extend();
  return stages_[s];
}

namespace {

class AdvSemi : public SemiOracle {
 public:
  explicit AdvSemi(std::shared_ptr<Bracket> br) : br_(std::move(br)) {}
  unsigned dim() const override { return 1; }
  Verdict covered_by(const OpenSet& u, Budget& b) const override {
    for (unsigned s = 0;; ++s) {
      const Bracket::Stage st = br_->stage(s);
      if (st.cost + s + 1 > b.left) {
        b.take(b.left);
        return Verdict::unknown;
      }
      if (interval_covered(0, st.hi, u)) {
        b.take(st.cost + s + 1);
        return Verdict::yes;
      }
      // [0, c_lo] is inside the set.
      if (!interval_covered(0, st.lo, u)) {
        b.take(st.cost + s + 1);
        return Verdict::no;
      }
    }
  }

 private:
  std::shared_ptr<Bracket> br_;
};

class AdvCe : public CeOracle {
 public:
  explicit AdvCe(std::shared_ptr<Bracket> br) : br_(std::move(br)) {}
  unsigned dim() const override { return 1; }
  Verdict meets(const Ball& ball, Budget& b) const override {
    const Q left = ball.c[0] - ball.r, right = ball.c[0] + ball.r;
    if (sgn(right) <= 0) return b.take() ? Verdict::no : Verdict::unknown;
    for (unsigned s = 0;; ++s) {
      const Bracket::Stage st = br_->stage(s);
      if (st.cost + s + 1 > b.left) {
        b.take(b.left);
        return Verdict::unknown;
      }
      if (left < st.lo) {
        b.take(st.cost + s + 1);
        return Verdict::yes;
      }
      if (left >= st.hi) {
        b.take(st.cost + s + 1);
        return Verdict::no;
      }
    }
  }

 private:
  std::shared_ptr<Bracket> br_;
};

class AdvCoceStream : public CoCeStream {
 public:
  explicit AdvCoceStream(std::shared_ptr<Bracket> br) : br_(std::move(br)) {}
  bool next(Ball& out, Budget& b) override {
    if (negative_) {
      if (!b.take()) return false;
      // (-2^(s+1), 0)
      Q r = pow2(static_cast<long>(s_));
      out = Ball{{-r}, r};
      negative_ = false;
      ++s_;
      return true;
    }
    const Bracket::Stage st = br_->stage(s_);
    std::uint64_t cost = st.cost - paid_ + 1;
    if (!b.take(cost)) return false;
    paid_ = st.cost;
    // (c_hi(s), c_hi(s) + s + 1)
    Q half(s_ + 1, 2);
    half.canonicalize();
    out = Ball{{st.hi + half}, half};
    negative_ = true;
    return true;
  }

 private:
  std::shared_ptr<Bracket> br_;
  unsigned s_ = 0;
  bool negative_ = false;
  std::uint64_t paid_ = 0;
};

class AdvCoce : public CoCeOracle {
 public:
  explicit AdvCoce(std::shared_ptr<Bracket> br) : br_(std::move(br)) {}
  unsigned dim() const override { return 1; }
  std::unique_ptr<CoCeStream> start() const override { return std::make_unique<AdvCoceStream>(br_); }

 private:
  std::shared_ptr<Bracket> br_;
};

}  // namespace

Adversarial make_adversarial() {
  Adversarial a;
  a.bracket = std::make_shared<Bracket>();
  a.semi = std::make_shared<AdvSemi>(a.bracket);
  a.ce = std::make_shared<AdvCe>(a.bracket);
  a.coce = std::make_shared<AdvCoce>(a.bracket);
  return a;
}

GapReport adversarial_gap_demo(std::uint64_t budget) {
  Adversarial adv = make_adversarial();
  GapReport r;
  r.budget = budget;
  const Bracket::Stage fin = adv.bracket->within(budget);
  r.c_lo = fin.lo;
  r.c_hi = fin.hi;
  while (adv.bracket->stage(r.stages + 1).cost <= budget) ++r.stages;
  {
    HaltingEnumerator en;
    for (unsigned s = 0; s < r.stages; ++s) en.advance_stage();
    r.halted = en.halted().size();
    r.looping = en.looping_count();
  }

  Space sp{1};
  r.semi_emissions = semi_trace(*adv.semi, budget);
  for (const TraceLine& t : r.semi_emissions)
    if (interval_covered(0, r.c_hi, sp.open(t.code))) ++r.semi_sound;

  // Inside [0, c_lo(0)] = [0, 1/2].
  r.inner = Ball{{Q(1, 4)}, Q(1, 8)};
  {
    Budget b(budget);
    r.inner_certified = adv.ce->meets(r.inner, b) == Verdict::yes;
    r.inner_steps = b.used;
  }
  // From the middle of the final bracket to past c_hi; never certified while c_lo stays below.
  Q mid = (r.c_lo + r.c_hi) / 2;
  r.straddle = Ball{{(mid + r.c_hi + 1) / 2}, (r.c_hi + 1 - mid) / 2};
  {
    Budget b(budget);
    r.straddle_certified = adv.ce->meets(r.straddle, b) == Verdict::yes;
    r.straddle_steps = b.used;
  }

  r.coce_emissions = coce_emissions(*adv.coce, budget);
  for (const Ball& b : r.coce_emissions) {
    Q lo = b.c[0] - b.r, hi = b.c[0] + b.r;
    if (sgn(hi) <= 0 || lo >= r.c_hi) ++r.coce_sound;
  }
  return r;
}

std::string format_gap_report(const GapReport& r) {
  std::ostringstream o;
  o << "# adversarial segment [0,c], c = 1 - sum_{i in W} 2^-(i+2)\n";
  o << "budget " << r.budget << "\n";
  o << "stages " << r.stages << " halted " << r.halted << " looping " << r.looping << "\n";
  o << "bracket " << to_exact(r.c_lo) << " " << to_exact(r.c_hi) << " (" << to_decimal(r.c_lo, 12) << " "
    << to_decimal(r.c_hi, 12) << ")\n";
  o << "semi emissions " << r.semi_emissions.size() << " sound " << r.semi_sound << "\n";
  const std::size_t shown = 24;
  for (std::size_t i = 0; i < r.semi_emissions.size() && i < shown; ++i)
    o << "  semi " << r.semi_emissions[i].budget << " " << r.semi_emissions[i].code.get_str() << "\n";
  if (r.semi_emissions.size() > shown) o << "  ... " << r.semi_emissions.size() - shown << " more\n";
  o << "ce inner " << ball_str(r.inner) << " " << (r.inner_certified ? "certified" : "not-certified") << " steps "
    << r.inner_steps << "\n";
  o << "ce straddle " << ball_str(r.straddle) << " " << (r.straddle_certified ? "certified" : "not-certified")
    << " steps " << r.straddle_steps << "\n";
  o << "coce emissions " << r.coce_emissions.size() << " sound " << r.coce_sound << "\n";
  for (std::size_t i = 0; i < r.coce_emissions.size() && i < shown; ++i)
    o << "  coce " << ball_str(r.coce_emissions[i]) << "\n";
  if (r.coce_emissions.size() > shown) o << "  ... " << r.coce_emissions.size() - shown << " more\n";
  o << "soundness " << (r.all_sound() ? "ok" : "VIOLATED") << "\n";
  return o.str();
}

}  // namespace cma
