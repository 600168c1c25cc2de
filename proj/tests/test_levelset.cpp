#include "cma/instances.hpp"
#include "cma/levelset.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace cma;

namespace {

long double eval_ld(const ExprPtr& e, const std::vector<long double>& x) {
  switch (e->op) {
    case Expr::var: return x[e->index];
    case Expr::constant: return e->value.get_d();
    case Expr::add: return eval_ld(e->args[0], x) + eval_ld(e->args[1], x);
    case Expr::sub: return eval_ld(e->args[0], x) - eval_ld(e->args[1], x);
    case Expr::neg: return -eval_ld(e->args[0], x);
    case Expr::mul: return eval_ld(e->args[0], x) * eval_ld(e->args[1], x);
    case Expr::sq: {
      long double v = eval_ld(e->args[0], x);
      return v * v;
    }
    case Expr::sin: return std::sin(eval_ld(e->args[0], x));
    case Expr::exp: return std::exp(eval_ld(e->args[0], x));
  }
  return 0;
}

Q rand_q(std::mt19937_64& g, long lo, long hi, long den) {
  Q q(lo * den + static_cast<long>(g() % static_cast<unsigned long>((hi - lo) * den + 1)), den);
  q.canonicalize();
  return q;
}

Box point_box(const Point& p) {
  Box b;
  for (const Q& x : p) b.emplace_back(x);
  return b;
}

bool misses_circle(const Ball& b) {
  Q n2 = b.c[0] * b.c[0] + b.c[1] * b.c[1];
  Q out = 1 + b.r;
  if (n2 >= out * out) return true;
  return b.r <= 1 && n2 <= (1 - b.r) * (1 - b.r);
}

const char* kCircle =
    "name c\ndim 2\nexprs (+ (sq x) (sq y))\ntarget 1\nbox -2 2 -2 2\n";

}  // namespace

TEST_CASE("expressions print back to what they parse") {
  for (const char* s : {"(+ (sq x1) (* 3/4 x2))", "(sin (exp (- x1)))", "(- x1 (* x1 x2))", "1/3"}) {
    ExprPtr e = parse_expr(s, 2);
    CHECK(expr_str(parse_expr(expr_str(e), 2)) == expr_str(e));
  }
  CHECK(expr_str(parse_expr("(+ x y)", 2)) == expr_str(parse_expr("(+ x1 x2)", 2)));
  CHECK(parse_exprs("(sq x) (sin y)", 2).size() == 2);
  CHECK_THROWS_AS(parse_expr("(cos x)", 1), PreconditionError);
  CHECK_THROWS_AS(parse_expr("x3", 2), PreconditionError);
  CHECK_THROWS_AS(parse_expr("(+ x", 1), PreconditionError);
  CHECK_THROWS_AS(parse_expr("(sq x y)", 2), PreconditionError);
}

TEST_CASE("interval evaluation on small examples") {
  ExprPtr f = parse_expr("(- (sq x) 1)", 1);
  Interval r = ieval(f, {Interval(Q(2), Q(3))}, 20);
  CHECK_FALSE(r.contains(Q(0)));
  CHECK(r.lo <= 3);
  CHECK(r.hi >= 8);
  CHECK(r.lo >= 3 - pow2(-20));
  CHECK(r.hi <= 8 + pow2(-20));
  Interval id = ieval(parse_expr("x", 1), {Interval(Q(1, 3), Q(2, 3))}, 4);
  CHECK(id.contains(Interval(Q(1, 3), Q(2, 3))));
  Interval s = eval_point(parse_expr("(sin x)", 1), {Q(0)}, 10);
  CHECK(s.contains(Q(0)));
  CHECK(s.width() < pow2(-10));
  Interval e = eval_point(parse_expr("(exp x)", 1), {Q(1)}, 30);
  CHECK(e.lo < Q(271828183, 100000000));
  CHECK(e.hi > Q(271828182, 100000000));
}

TEST_CASE("enclosures contain the floating-point value") {
  std::mt19937_64 g(21);
  std::vector<ExprPtr> es{parse_expr("(+ (sq x) (* x y))", 2), parse_expr("(sin (* 3 x))", 2),
                          parse_expr("(exp (- (sq y) x))", 2), parse_expr("(+ (sin x) (sin y))", 2)};
  for (int t = 0; t < 1000; ++t) {
    Point p{rand_q(g, -2, 2, 97), rand_q(g, -2, 2, 89)};
    std::vector<long double> x{p[0].get_d(), p[1].get_d()};
    const ExprPtr& e = es[t % es.size()];
    long double v = eval_ld(e, x);
    Interval r = eval_point(e, p, 24);
    long double tol = 1e-12L * (1 + std::fabs(v));
    CHECK(r.lo.get_d() <= v + tol);
    CHECK(r.hi.get_d() >= v - tol);
    CHECK(r.width() < pow2(-24));
    // Monotone under inclusion: a box around p encloses the point enclosure.
    Box big{Interval(Q(p[0] - Q(1, 8)), Q(p[0] + Q(1, 8))), Interval(Q(p[1] - Q(1, 8)), Q(p[1] + Q(1, 8)))};
    Interval rb = ieval(e, big, 24);
    Interval rp = ieval(e, point_box(p), 24);
    CHECK(rb.contains(rp));
  }
}

TEST_CASE("instance files") {
  LevelSetInstance in = parse_instance(kCircle);
  CHECK(in.n == 2);
  CHECK(in.exprs.size() == 1);
  CHECK(in.box.size() == 2);
  CHECK(in.atlas.empty());
  CHECK_THROWS_AS(parse_instance("exprs x\ntarget 0\nbox 0 1\n"), PreconditionError);
  CHECK_THROWS_AS(parse_instance("dim 2\nexprs x\ntarget 0\nbox 0 1\n"), PreconditionError);
  CHECK_THROWS_AS(parse_instance("dim 1\nexprs x\ntarget 0 1\nbox 0 1\n"), PreconditionError);
  CHECK_THROWS_AS(parse_instance("dim 1\nexprs x\ntarget 0\nbox 0 1\nfrobnicate\n"), PreconditionError);
}

TEST_CASE("exact ball-box separation") {
  Box b{Interval(Q(0), Q(1)), Interval(Q(0), Q(1))};
  CHECK(ball_misses_box({{Q(3), Q(0)}, Q(2)}, b) == false);  // closed ball touches (1, 0)
  CHECK(ball_misses_box({{Q(3), Q(0)}, Q(3, 2)}, b));
  CHECK(ball_misses_box({{Q(2), Q(2)}, Q(7, 5)}, b));
  CHECK_FALSE(ball_misses_box({{Q(2), Q(2)}, Q(3, 2)}, b));
}

TEST_CASE("circle level set excludes far regions and emits only sound balls") {
  LevelSetInstance in = parse_instance(kCircle);
  CHECK_FALSE(ieval(in.exprs[0], {Interval(Q(5, 4), Q(2)), Interval(Q(5, 4), Q(2))}, 8).contains(Q(1)));
  CHECK(ieval(in.exprs[0], {Interval(Q(0), Q(1)), Interval(Q(0), Q(1))}, 8).contains(Q(1)));
  std::vector<Ball> out = coce_emissions(*coce_from_levelset(in), 5000);
  REQUIRE(out.size() > 100);
  for (const Ball& b : out) CHECK(misses_circle(b));
  // Sampled circle points stay outside every ball.
  std::mt19937_64 g(22);
  for (int t = 0; t < 1000; ++t) {
    Point p = circle_point(rand_q(g, -1, 1, 1009));
    if (t % 2) p = {-p[0], -p[1]};
    for (const Ball& b : out)
      if (mem_ball(p, b)) FAIL("circle point inside an emitted ball");
  }
}

TEST_CASE("emissions refine: a longer run extends a shorter one") {
  CoCePtr c = coce_from_levelset(parse_instance(kCircle));
  std::vector<TraceLine> a = coce_trace(*c, 2000), b = coce_trace(*c, 4000);
  REQUIRE(a.size() <= b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].code == b[i].code);
    CHECK(a[i].budget == b[i].budget);
  }
}

TEST_CASE("second example: corner exclusion") {
  LevelSetInstance in = parse_instance(
      "dim 4\nexprs (+ (+ (sq x1) (sq x2)) (+ (sq x3) (sq x4)))\nexprs (+ (+ (sin x1) (sin x2)) (+ (sin x3) "
      "(sin x4)))\ntarget 1 1\nbox -2 2 -2 2 -2 2 -2 2\n");
  Box corner(4, Interval(Q(3, 2), Q(2)));
  CHECK_FALSE(ieval(in.exprs[0], corner, 8).contains(Q(1)));
  Box centre(4, Interval(Q(0), Q(1, 2)));
  CHECK(ieval(in.exprs[0], centre, 8).contains(Q(1)));  // |x|^2 = 1 at the far corner
  CHECK(ieval(in.exprs[1], Box(4, Interval(Q(0), Q(1, 2))), 8).contains(Q(1)));
  std::vector<Ball> out = coce_emissions(*coce_from_levelset(in), 3000);
  CHECK_FALSE(out.empty());
}

TEST_CASE("level-set semi oracle agrees with the parametrized circle") {
  LevelSetInstance in = parse_instance(kCircle);
  std::vector<TraceLine> t = semi_trace(*semi_from_levelset(in), 150000);
  REQUIRE_FALSE(t.empty());
  SemiPtr param = param_semi(2, circle_pieces());
  Space sp{2};
  for (const TraceLine& l : t) {
    Budget b(200000);
    CHECK(param->covered_by(sp.open(l.code), b) == Verdict::yes);
  }
  // Dropping the ball at (1, 0) uncovers the circle there; neither route may accept.
  OpenSet ring;
  for (int i = 1; i < 16; ++i) {
    Point p = circle_point(Q(i - 8) / 8);
    if (i == 8) continue;
    ring.push_back({p, Q(1, 5)});
    ring.push_back({{-p[0], -p[1]}, Q(1, 5)});
  }
  Budget bp(200000);
  CHECK(param->covered_by(ring, bp) != Verdict::yes);
  OpenSet full = ring;
  full.push_back({{Q(1), Q(0)}, Q(1, 5)});
  full.push_back({{Q(-1), Q(0)}, Q(1, 5)});
  full.push_back({{Q(0), Q(1)}, Q(1, 5)});
  full.push_back({{Q(0), Q(-1)}, Q(1, 5)});
  Budget bf(200000);
  CHECK(param->covered_by(full, bf) == Verdict::yes);
  Budget bl(200000);
  CHECK(semi_from_levelset(in)->covered_by(ring, bl) != Verdict::yes);
}

TEST_CASE("an empty level set is covered by anything") {
  LevelSetInstance in = parse_instance("dim 1\nexprs (+ (sq x) 1)\ntarget 0\nbox -2 2\n");
  std::vector<TraceLine> t = semi_trace(*semi_from_levelset(in), 5000);
  REQUIRE_FALSE(t.empty());
  Budget b(100000);
  CHECK(semi_from_levelset(in)->covered_by({}, b) == Verdict::yes);
}
