#include "cma/instances.hpp"
#include "cma/reconstruction.hpp"

#include <doctest.h>

#include <cstdint>
#include <cstdio>
#include <random>

using namespace cma;

namespace {

const ChartWitness& chart_named(const std::vector<ChartWitness>& atlas, const std::string& name) {
  for (const ChartWitness& c : atlas)
    if (c.name == name) return c;
  throw std::runtime_error("no chart " + name);
}

// FNV-1a over the rendered fields, each followed by a 0xff separator.
std::string fnv_oracle(const GridChain& c) {
  std::uint64_t h = 14695981039346656037ull;
  auto feed = [&](const std::string& s) {
    std::string t = s + '\xff';
    for (unsigned char ch : t) h = (h ^ ch) * 1099511628211ull;
  };
  feed(std::to_string(c.n));
  feed(std::to_string(c.side));
  for (const OpenSet& u : c.links) {
    for (const Ball& b : u) feed(ball_str(b));
    feed(";");
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Candidate fresh_copy(const Candidate& c) {
  Candidate out = c;
  out.cache = std::make_shared<StructuralVerdicts>();
  return out;
}

struct SegmentFixture {
  Instance in = make_instance("segment");
  const ChartWitness& chart = chart_named(in.atlas, "segment-interior");
  Anchors an = derive_anchors(chart);
  SemiPtr s_prime = subtract(in.semi, chart.m0);
};

}  // namespace

TEST_CASE("segment anchors") {
  SegmentFixture fx;
  CHECK(fx.an.gamma > 0);
  for (const Q& d : fx.an.separations) {
    CHECK(d > 0);
    CHECK(fx.an.gamma <= d / 4);
  }
  REQUIRE(fx.an.a.size() == 1);
  Point fa = fx.chart.eval({Q(-2)}, 30), fb = fx.chart.eval({Q(2)}, 30), f0 = fx.chart.eval({Q(0)}, 30);
  CHECK(mem_open(fa, fx.an.a[0]));
  CHECK(mem_open(fb, fx.an.b[0]));
  CHECK(mem_ball(f0, fx.an.x[0]));
  CHECK(formally_disjoint(fx.an.a[0], fx.an.x));
  CHECK(formally_disjoint(fx.an.b[0], fx.an.x));
  const ChartWitness& left = chart_named(fx.in.atlas, "segment-left");
  Anchors al = derive_anchors(left);
  CHECK(al.a[0].empty());
  CHECK_FALSE(al.b[0].empty());
}

TEST_CASE("the constructive candidate passes and corruptions fail") {
  SegmentFixture fx;
  const unsigned k = 3;
  Candidate c = synth_candidate(k, fx.chart, fx.an);
  CHECK(c.t.e == static_cast<long>(3 * c.m + 3));
  CHECK(c.t.h == static_cast<long>(5 * c.m + 4));
  CHECK_FALSE(c.t.u);
  CHECK(c.chain.side == 8 * c.m + 7);
  CHECK(c.delta_min > 0);
  Budget b(50000000);
  CheckReport rep = check_conditions(c, *fx.s_prime, nullptr, fx.an, b);
  CHECK(rep.verdict == Verdict::yes);
  CHECK(rep.conditions.size() == 6);
  CHECK(gamma_indices(c).size() == 2 * c.m + 2);
  for (const Point& p : gamma_points(c)) CHECK(fx.in.truth.dist_le(p, pow2(-static_cast<long>(k))));

  Candidate empty = fresh_copy(c);
  empty.chain.links[3].clear();
  Budget b1(50000000);
  CHECK(check_conditions(empty, *fx.s_prime, nullptr, fx.an, b1).verdict == Verdict::no);

  Candidate fat = fresh_copy(c);
  fat.chain.links[c.chain.size() / 2][0].r = 2;
  Budget b2(50000000);
  CheckReport r2 = check_conditions(fat, *fx.s_prime, nullptr, fx.an, b2);
  CHECK(r2.verdict == Verdict::no);
  CHECK(r2.conditions[1].verdict == Verdict::no);  // formal chain
  CHECK(r2.conditions[5].verdict == Verdict::no);  // fmesh

  Candidate wide = fresh_copy(c);
  wide.t.e = 0;
  Budget b3(50000000);
  CHECK(check_conditions(wide, *fx.s_prime, nullptr, fx.an, b3).verdict == Verdict::no);

  // Translating every link keeps the structure but loses the cover.
  Candidate moved = fresh_copy(c);
  for (OpenSet& l : moved.chain.links)
    for (Ball& ball : l) ball.c[0] += 3;
  Budget b4(50000000);
  CheckReport r4 = check_conditions(moved, *fx.s_prime, nullptr, fx.an, b4);
  CHECK(r4.verdict != Verdict::yes);
  CHECK(r4.conditions[0].verdict != Verdict::yes);

  // Shrinking every link to a speck around its first centre loses the cover.
  Candidate specks = fresh_copy(c);
  for (OpenSet& l : specks.chain.links) l = {Ball{l[0].c, c.delta_min / 64}};
  Budget b5(50000000);
  CheckReport r5 = check_conditions(specks, *fx.s_prime, nullptr, fx.an, b5);
  CHECK(r5.verdict != Verdict::yes);
  CHECK(r5.conditions[1].verdict == Verdict::yes);
}

TEST_CASE("budget starvation and cached verdicts") {
  SegmentFixture fx;
  Candidate c = synth_candidate(2, fx.chart, fx.an);
  Budget tiny(3);
  CHECK(check_conditions(c, *fx.s_prime, nullptr, fx.an, tiny).verdict == Verdict::unknown);
  Budget b1(50000000), b2(50000000);
  CHECK(check_conditions(c, *fx.s_prime, nullptr, fx.an, b1).verdict == Verdict::yes);
  CHECK(check_conditions(c, *fx.s_prime, nullptr, fx.an, b2).verdict == Verdict::yes);
  // Cached verdicts are charged again.
  CHECK(b1.used == b2.used);
}

TEST_CASE("boundary charts carry u and check the lower boundary") {
  Instance in = make_instance("segment");
  const ChartWitness& left = chart_named(in.atlas, "segment-left");
  Anchors an = derive_anchors(left);
  Candidate c = synth_candidate(2, left, an);
  REQUIRE(c.t.u);
  CHECK(*c.t.u == static_cast<long>(c.m));
  Budget b(50000000);
  SemiPtr sp = subtract(in.semi, left.m0), tp = subtract(in.boundary_semi, left.m0);
  CheckReport rep = check_conditions(c, *sp, tp.get(), an, b);
  CHECK(rep.verdict == Verdict::yes);
  CHECK(rep.conditions.size() == 9);
  Budget b2(100);
  CHECK_THROWS_AS(check_conditions(c, *sp, nullptr, an, b2), PreconditionError);
  // A boundary oracle claiming an extra point f(2) far from the lower face is not covered.
  SemiPtr wrong = subtract(finite_semi({{Q(0)}, left.eval({Q(2)}, 40), {Q(1)}}), left.m0);
  Budget b3(50000000);
  CHECK(check_conditions(fresh_copy(c), *sp, wrong.get(), an, b3).verdict != Verdict::yes);
}

TEST_CASE("chain digests") {
  SegmentFixture fx;
  Candidate c = synth_candidate(1, fx.chart, fx.an);
  std::string d = chain_digest(c.chain);
  CHECK(d.size() == 16);
  CHECK(d == fnv_oracle(c.chain));
  GridChain g;
  g.n = 1;
  g.side = 1;
  g.links = {{{{Q(0)}, Q(1, 4)}}, {{{Q(1, 2)}, Q(1, 4)}}};
  CHECK(chain_digest(g) == fnv_oracle(g));
  g.links[1][0].r = Q(1, 3);
  CHECK(chain_digest(g) == fnv_oracle(g));
  CHECK(chain_digest(g) != fnv_oracle(c.chain));
}

TEST_CASE("segment reconstruction is within 2^-k of [0,1]") {
  Instance in = make_instance("segment");
  Reconstruction r = reconstruct(in.semi, in.boundary_semi, in.atlas, 200000000);
  std::vector<TruthSample> truth = in.truth.samples();
  for (unsigned k = 1; k <= 3; ++k) {
    ReconstructionRun run = run_reconstruction(r, k, 200000000);
    REQUIRE_FALSE(run.points.empty());
    const Q eps = pow2(-static_cast<long>(k));
    for (const Point& p : run.points) CHECK(in.truth.dist_le(p, eps));
    PointSet tp;
    for (const TruthSample& t : truth) tp.push_back(t.lo);
    CHECK(prec_le(tp, run.points, eps - in.truth.slack));
    CHECK(run.steps.size() == 3);
    // A second run recalls the steps and charges them again.
    ReconstructionRun again = run_reconstruction(r, k, 200000000);
    CHECK(again.steps_used == run.steps_used);
    CHECK(again.points == run.points);
    CHECK_THROWS_AS(run_reconstruction(r, k, run.steps_used - 1), BudgetExhausted);
  }
  Reconstruction fresh = reconstruct(in.semi, in.boundary_semi, in.atlas, 200000000);
  CHECK_THROWS_AS(run_reconstruction(fresh, 2, 10), BudgetExhausted);
  CHECK_THROWS_AS(reconstruct(in.semi, in.boundary_semi, {}, 10), PreconditionError);
}

TEST_CASE("enumerated candidates decode small codes") {
  for (unsigned code = 0; code < 50; ++code) {
    std::optional<Candidate> c = enumerated_candidate(Z(code), 2, 1, false);
    if (!c) continue;
    CHECK_FALSE(c->t.u);
    CHECK(c->origin == "enumerated " + std::to_string(code));
  }
  std::optional<Candidate> h = enumerated_candidate(Z(7), 2, 1, true);
  if (h) CHECK(h->t.u);
}
