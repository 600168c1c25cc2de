#include "cma/instances.hpp"
#include "cma/levelset.hpp"
#include "cma/sets.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace cma;

namespace {

// Membership in a union of open intervals is constant between consecutive endpoints.
bool interval_covered_oracle(const Q& a, const Q& b, const OpenSet& u) {
  std::vector<Q> crit{a, b};
  for (const Ball& x : u)
    for (Q e : {Q(x.c[0] - x.r), Q(x.c[0] + x.r)})
      if (a <= e && e <= b) crit.push_back(e);
  std::sort(crit.begin(), crit.end());
  std::vector<Q> probes = crit;
  for (std::size_t i = 0; i + 1 < crit.size(); ++i) probes.push_back((crit[i] + crit[i + 1]) / 2);
  return std::all_of(probes.begin(), probes.end(), [&](const Q& p) { return mem_open({p}, u); });
}

// B(c, r) misses the unit circle.
bool misses_circle(const Ball& b) {
  Q n2 = b.c[0] * b.c[0] + b.c[1] * b.c[1];
  Q out = 1 + b.r;
  if (n2 >= out * out) return true;
  return b.r <= 1 && n2 <= (1 - b.r) * (1 - b.r);
}

PointSet unit_interval_grid(unsigned bits) {
  PointSet s;
  for (Q x = 0; x <= 1; x += pow2(-static_cast<long>(bits))) s.push_back({x});
  return s;
}

// X \ [0,1] as B(-2^s, 2^s), B(1 + 2^s, 2^s), s = 0, 1, ...
class SegmentComplement : public CoCeOracle {
 public:
  unsigned dim() const override { return 1; }
  std::unique_ptr<CoCeStream> start() const override {
    struct St : CoCeStream {
      long s = 0;
      bool right = false;
      bool next(Ball& out, Budget& b) override {
        if (!b.take()) return false;
        Q r = pow2(s);
        out = right ? Ball{{1 + r}, r} : Ball{{-r}, r};
        if (right) ++s;
        right = !right;
        return true;
      }
    };
    return std::make_unique<St>();
  }
};

bool misses_unit_interval(const Ball& b) {
  Q x = b.c[0];
  Q near = x < 0 ? Q(0) : x > 1 ? Q(1) : x;
  return abs(x - near) >= b.r;
}

ApproxPtr segment_approx() {
  return std::make_shared<FunctionApprox>(1, [](unsigned k) { return unit_interval_grid(k + 1); });
}

}  // namespace

TEST_CASE("budget accounting") {
  Budget b(10);
  CHECK(b.take(4));
  CHECK(b.used == 4);
  Budget child = b.sub(100);
  CHECK(child.left == 6);
  CHECK(child.take(5));
  b.settle(child);
  CHECK(b.left == 1);
  CHECK_FALSE(b.take(2));
  CHECK(b.exhausted());
  CHECK(b.used == 10);
}

TEST_CASE("interval cover decision against the endpoint oracle") {
  std::mt19937_64 g(8);
  for (int t = 0; t < 2000; ++t) {
    OpenSet u(g() % 5);
    for (Ball& x : u) {
      Q c(static_cast<long>(g() % 17) - 4, 8), r(static_cast<long>(1 + g() % 4), 8);
      c.canonicalize();
      r.canonicalize();
      x = Ball{{c}, r};
    }
    Q a(static_cast<long>(g() % 9), 8), len(static_cast<long>(g() % 6), 8);
    a.canonicalize();
    len.canonicalize();
    CHECK(interval_covered(a, a + len, u) == interval_covered_oracle(a, a + len, u));
  }
  // Touching open intervals leave their common endpoint uncovered.
  OpenSet two{{{Q(0)}, Q(1, 2)}, {{Q(1)}, Q(1, 2)}};
  CHECK_FALSE(interval_covered(Q(0), Q(1), two));
}

TEST_CASE("traces round-trip") {
  std::vector<TraceLine> t{{3, "semi", Z(17)}, {9, "coce", Z("123456789012345678901234567890", 10)}};
  std::string s = format_trace(t);
  CHECK(s == "3, semi, 17\n9, coce, 123456789012345678901234567890\n");
  std::vector<TraceLine> back = parse_trace("# comment\n" + s);
  REQUIRE(back.size() == 2);
  CHECK(back[1].code == t[1].code);
  CHECK(back[0].kind == "semi");
  CHECK_THROWS_AS(parse_trace("bad line"), PreconditionError);
}

TEST_CASE("semi trace of the segment emits genuine covers") {
  SemiPtr s = interval_semi(0, 1);
  std::vector<TraceLine> t = semi_trace(*s, 3000);
  REQUIRE(!t.empty());
  Space sp{1};
  for (const TraceLine& l : t) {
    CHECK(l.kind == "semi");
    CHECK(interval_covered_oracle(Q(0), Q(1), sp.open(l.code)));
  }
  CHECK(semi_trace(*s, 3000).size() == t.size());
}

TEST_CASE("semi to co-c.e. is sound") {
  std::vector<Ball> balls = coce_emissions(*semi_to_coce(interval_semi(0, 1)), 400000);
  REQUIRE(balls.size() >= 3);
  for (const Ball& b : balls) CHECK(misses_unit_interval(b));
  // The circle needs long covers before any candidate separates; only soundness is checked.
  Instance in = make_instance("circle");
  for (const Ball& b : coce_emissions(*semi_to_coce(in.semi), 3000)) CHECK(misses_circle(b));
}

TEST_CASE("approximation to semi and ce") {
  ApproxPtr a = segment_approx();
  SemiPtr s = approx_to_semi(a);
  CePtr c = approx_to_ce(a);
  Budget b1(100000);
  CHECK(s->covered_by({{{Q(1, 2)}, Q(3, 4)}}, b1) == Verdict::yes);
  Budget b2(100000);
  CHECK(s->covered_by({{{Q(1, 2)}, Q(1, 2)}}, b2) == Verdict::unknown);  // misses 0 and 1
  Budget b3(100000);
  CHECK(c->meets({{Q(1, 3)}, Q(1, 100)}, b3) == Verdict::yes);
  Budget b4(100000);
  CHECK(c->meets({{Q(3)}, Q(1)}, b4) == Verdict::unknown);
}

TEST_CASE("semi plus ce gives a 2^-k approximation of the segment") {
  SemiCeApprox a(interval_semi(0, 1), approx_to_ce(segment_approx()), 2000000);
  PointSet truth = unit_interval_grid(10);
  for (unsigned k = 0; k <= 4; ++k) {
    ApproxOutcome o = a.search(k, 2000000);
    REQUIRE(o.status == ApproxOutcome::found);
    // Grid spacing 2^-10 adds at most 2^-11 to the distance from [0,1].
    CHECK(hausdorff_le(o.points, truth, pow2(-static_cast<long>(k)) - pow2(-11)));
  }
  CHECK(a.search(3, 10).status == ApproxOutcome::stalled);
}

TEST_CASE("co-c.e. to semi with a bounding box") {
  SemiPtr s = coce_to_semi(std::make_shared<SegmentComplement>(), box_approx({Interval(Q(-2), Q(2))}));
  Budget b(100000);
  Verdict v = s->covered_by({{{Q(1, 2)}, Q(3, 4)}}, b);
  CHECK(v == Verdict::yes);
  Budget tiny(5);
  CHECK(s->covered_by({{{Q(1, 2)}, Q(3, 4)}}, tiny) == Verdict::unknown);
  Budget c(5000);
  CHECK(s->covered_by({{{Q(1, 2)}, Q(1, 2)}}, c) != Verdict::yes);
}

TEST_CASE("subtract and unions") {
  SemiPtr s = subtract(interval_semi(0, 1), {{{Q(0)}, Q(1, 2)}});
  Budget b(10);
  CHECK(s->covered_by({{{Q(3, 4)}, Q(1, 3)}}, b) == Verdict::yes);
  PointSet u = union_points({{{Q(1)}, {Q(2)}}, {{Q(2)}, {Q(0)}}});
  CHECK(u == PointSet{{Q(1)}, {Q(2)}, {Q(0)}});
  UpToApprox x{"S", "a", segment_approx()}, y{"T", "b", segment_approx()};
  CHECK_THROWS_AS(upto_union(x, y), PreconditionError);
  UpToApprox z = upto_union(x, UpToApprox{"S", "c", segment_approx()});
  CHECK(z.approx->at(2) == segment_approx()->at(2));
  CHECK_THROWS_AS(glue({}), PreconditionError);
}

TEST_CASE("points cover with margin") {
  OpenSet u{{{Q(0)}, Q(1)}};
  CHECK(points_cover({{Q(1, 2)}}, Q(1, 4), u));
  CHECK_FALSE(points_cover({{Q(1, 2)}}, Q(1, 2), u));
  CHECK(points_cover({}, Q(1), {}));
}
