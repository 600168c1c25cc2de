// Acceptance run: one PASS/FAIL line per criterion. Arguments select criteria (default: all).
#include "cma/codes.hpp"
#include "cma/instances.hpp"
#include "cma/reconstruction.hpp"
#include "cma/report.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace cma;

namespace {

// Pinned thresholds.
constexpr unsigned kMaxK = 6;
constexpr double kCircleSeconds = 300.0;
constexpr std::uint64_t kApproxBudget = 100000000;
constexpr std::uint64_t kRoundTripBudget = 2000000000;
constexpr int kBallPairs = 10000;
constexpr int kOpenSets = 1000;
constexpr std::uint64_t kLevelSetSteps = 20000;
constexpr std::uint64_t kGapBudget = 100000;
constexpr unsigned kIndependentStages = 120;

struct Outcome {
  bool pass = true;
  std::string detail;
};

void report(int n, const Outcome& o) {
  std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << std::endl;
}

struct Run {
  int code = -1;
  std::string out;
  double seconds = 0;
};

Run cli(const std::string& args) {
  std::string cmd = std::string(CMA_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  auto t0 = std::chrono::steady_clock::now();
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, got);
  int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// Exact columns of the CSV rows.
PointSet csv_points(const std::string& csv, unsigned n) {
  PointSet pts;
  std::istringstream in(csv);
  std::string line;
  bool body = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!body) {
      body = true;  // column names
      continue;
    }
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
    if (cols.size() != 2 * n) throw std::runtime_error("bad csv row: " + line);
    Point p;
    for (unsigned i = 0; i < n; ++i) p.push_back(parse_rational(cols[n + i]));
    pts.push_back(std::move(p));
  }
  return pts;
}

// d(c, S) < r, exactly.
bool circle_meets(const Ball& b) {
  Q n2 = b.c[0] * b.c[0] + b.c[1] * b.c[1];
  if (n2 >= (1 + b.r) * (1 + b.r)) return false;
  return b.r >= 1 || n2 > (1 - b.r) * (1 - b.r);
}
bool segment_meets(const Ball& b) { return b.c[0] + b.r > 0 && b.c[0] - b.r < 1; }
bool circle_misses(const Ball& b) {
  Q n2 = b.c[0] * b.c[0] + b.c[1] * b.c[1];
  if (n2 >= (1 + b.r) * (1 + b.r)) return true;
  return b.r <= 1 && n2 <= (1 - b.r) * (1 - b.r);
}

// Points on the unit circle, parameter spacing 2^-9 (speed <= 2, so 2^-8 dense).
PointSet circle_sample() {
  PointSet s;
  const Q h = pow2(-9);
  for (Q u = -1; u <= 1; u += h) {
    Point p = circle_point(u);
    s.push_back(p);
    s.push_back({-p[0], -p[1]});
  }
  return s;
}

PointSet segment_sample() {
  PointSet s;
  for (Q x = 0; x <= 1; x += pow2(-9)) s.push_back({x});
  return s;
}

struct ReconCheck {
  bool bound_ok = true;
  bool links_ok = true;
  bool u_ok = true;
  std::size_t links = 0, bad_links = 0;
  double seconds = 0;
  std::map<unsigned, std::string> csv;
  std::string note;
};

// Criteria 1-3 for one instance: CLI output checked against the truth, Gamma links from an
// in-process run checked for analytic membership.
ReconCheck check_reconstruction(const std::string& name, const PointSet& sample,
                                const std::function<bool(const Point&, const Q&)>& near,
                                const std::function<bool(const Ball&)>& meets, bool expect_u) {
  ReconCheck rc;
  Instance in = make_instance(name);
  Reconstruction rec = reconstruct(in.semi, in.boundary_semi, in.atlas, kApproxBudget);
  std::ostringstream note;
  for (unsigned k = 1; k <= kMaxK; ++k) {
    Run r = cli("approximate --instance " + name + " --k " + std::to_string(k) +
                " --budget " + std::to_string(kApproxBudget));
    rc.seconds += r.seconds;
    if (r.code != 0) {
      rc.bound_ok = false;
      note << " k=" << k << " exit " << r.code;
      continue;
    }
    rc.csv[k] = r.out;
    const Q eps = pow2(-static_cast<long>(k));
    PointSet lambda = csv_points(r.out, in.ambient);
    bool up = !lambda.empty(), down = true;
    for (const Point& p : lambda) up = up && near(p, eps);
    down = prec_le(sample, lambda, eps);
    if (!(up && down)) {
      rc.bound_ok = false;
      note << " k=" << k << (up ? "" : " lambda-far") << (down ? "" : " sample-uncovered");
    }
    if (expect_u) {
      std::istringstream is(r.out);
      std::string line;
      int with_u = 0;
      while (std::getline(is, line))
        if (line.rfind("# chart ", 0) == 0 && line.find(" u=") != std::string::npos) ++with_u;
      if (with_u < 2) rc.u_ok = false;
    }
    ReconstructionRun run = run_reconstruction(rec, k, kApproxBudget);
    for (const LocalStep* st : run.steps)
      for (const Index& v : gamma_indices(st->cand)) {
        ++rc.links;
        const OpenSet& link = st->cand.chain.at(v);
        bool hit = false;
        for (const Ball& b : link) hit = hit || meets(b);
        if (!hit) ++rc.bad_links;
      }
    if (render_csv(make_report(name, run, kApproxBudget)) != r.out) note << " k=" << k << " in-process csv differs";
  }
  rc.links_ok = rc.bad_links == 0;
  rc.note = note.str();
  return rc;
}

Outcome criterion4() {
  ApproxPtr base = circle_approx();
  SemiCeApprox a(approx_to_semi(base), approx_to_ce(base), kRoundTripBudget);
  Outcome o;
  std::ostringstream d;
  for (unsigned k = 0; k <= kMaxK; ++k) {
    ApproxOutcome r = a.search(k, kRoundTripBudget);
    const Q bound = pow2(1 - static_cast<long>(k));
    bool ok = r.status == ApproxOutcome::found && hausdorff_le(base->at(k), r.points, bound);
    d << " k=" << k << (ok ? ":ok" : ":fail") << "(" << r.points.size() << " pts, " << r.steps << " steps)";
    o.pass = o.pass && ok;
  }
  o.detail = "circle Approx -> semi/ce -> re-synthesis, rho <= 2^-k+1;" + d.str();
  return o;
}

Q rand_q(std::mt19937_64& g, const Q& lo, const Q& hi, long den) {
  Q t(static_cast<long>(g() % static_cast<unsigned long>(den + 1)), den);
  t.canonicalize();
  return lo + t * (hi - lo);
}

// A rational point of the closed ball, by rejection from its bounding box.
Point point_in_ball(std::mt19937_64& g, const Ball& b) {
  while (true) {
    Point p;
    for (const Q& c : b.c) p.push_back(rand_q(g, c - b.r, c + b.r, 64));
    if (sq_dist(p, b.c) <= b.r * b.r) return p;
  }
}

Z random_code(std::mt19937_64& g, unsigned bits) {
  Z z = 0;
  for (unsigned i = 0; i < bits; i += 32) z = (z << 32) + static_cast<unsigned long>(g() & 0xffffffffu);
  return z >> (bits % 32 == 0 ? 0 : 32 - bits % 32);
}

Outcome criterion5() {
  std::mt19937_64 g(5005);
  Space sp{2};
  std::size_t disjoint = 0, viol_d = 0, viol_f = 0, samples = 0;
  for (int t = 0; t < kBallPairs; ++t) {
    // Codes of up to 24 bits keep centres and radii moderate.
    Ball a = sp.ball(random_code(g, 8 + g() % 17)), b = sp.ball(random_code(g, 8 + g() % 17));
    if (!formally_disjoint(a, b)) continue;
    ++disjoint;
    std::vector<Point> probes;
    for (int s = 0; s < 8; ++s) probes.push_back(point_in_ball(g, a));
    // The centre line is where a common point would have to appear first.
    for (int s = 0; s <= 16; ++s) {
      Q t2(s, 16);
      t2.canonicalize();
      probes.push_back({a.c[0] + t2 * (b.c[0] - a.c[0]), a.c[1] + t2 * (b.c[1] - a.c[1])});
    }
    for (const Point& p : probes)
      if (mem_ball(p, a) && mem_ball(p, b)) ++viol_d;
  }
  for (int t = 0; t < kOpenSets; ++t) {
    std::vector<Z> codes(1 + g() % 5);
    for (Z& c : codes) c = random_code(g, 8 + g() % 17);
    OpenSet u = sp.open(list_encode(codes));
    Q hi = fdiam_upper(u, 20);
    std::vector<Point> pts;
    for (const Ball& b : u)
      for (int s = 0; s < 6; ++s) pts.push_back(point_in_ball(g, b));
    samples += pts.size();
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        if (sq_dist(pts[i], pts[j]) > hi * hi) ++viol_f;
  }
  Outcome o;
  o.pass = viol_d == 0 && viol_f == 0 && disjoint > 0;
  o.detail = std::to_string(kBallPairs) + " ball pairs (" + std::to_string(disjoint) + " formally disjoint, " +
             std::to_string(viol_d) + " shared points); " + std::to_string(kOpenSets) + " open sets (" +
             std::to_string(samples) + " samples, " + std::to_string(viol_f) + " over fdiam)";
  return o;
}

// Cells are products of per-axis intervals; far cells must be disjoint and the cells must
// cover exactly the domain on a 2^-4 grid.
Outcome criterion6() {
  std::size_t violations = 0, cells_seen = 0, points = 0;
  for (unsigned long m = 0; m <= 2; ++m)
    for (unsigned n = 1; n <= 3; ++n)
      for (bool half : {false, true}) {
        const unsigned long side = 8 * m + 7;
        std::vector<GridCell> cells = grid_chain(m, n, half);
        cells_seen += cells.size();
        // Per-axis tables read off the cells along the axes.
        std::vector<std::vector<Interval>> axis(n);
        for (unsigned i = 0; i < n; ++i)
          for (unsigned long v = 0; v <= side; ++v) {
            Index idx(n, 0);
            idx[i] = static_cast<long>(v);
            const GridCell& c = cells[flat_index(idx, side)];
            axis[i].push_back(Interval(c.lo[i], c.hi[i]));
          }
        for (std::size_t f = 0; f < cells.size(); ++f) {
          Index v = unflatten(f, n, side);
          for (unsigned i = 0; i < n; ++i)
            if (cells[f].lo[i] != axis[i][v[i]].lo || cells[f].hi[i] != axis[i][v[i]].hi) ++violations;
        }
        for (unsigned i = 0; i < n; ++i)
          for (unsigned long a = 0; a <= side; ++a)
            for (unsigned long b = a + 1; b <= side; ++b) {
              const Interval &x = axis[i][a], &y = axis[i][b];
              bool disjoint = x.hi < y.lo || y.hi < x.lo;
              if (disjoint != (b - a > 1)) ++violations;
            }
        // Brute force on the smaller boxes.
        if (cells.size() <= 600)
          for (std::size_t a = 0; a < cells.size(); ++a)
            for (std::size_t b = a + 1; b < cells.size(); ++b) {
              if (p_metric(unflatten(a, n, side), unflatten(b, n, side)) <= 1) continue;
              bool sep = false;
              for (unsigned i = 0; i < n && !sep; ++i)
                sep = cells[a].hi[i] < cells[b].lo[i] || cells[b].hi[i] < cells[a].lo[i];
              if (!sep) ++violations;
            }
        // Grid points of [-5, 5]^n: inside the domain iff in some cell.
        const Q h = pow2(-4);
        std::vector<Q> grid;
        for (Q x = -5; x <= 5; x += h) grid.push_back(x);
        Index gi(n, 0);
        while (true) {
          Point p;
          for (unsigned i = 0; i < n; ++i) p.push_back(grid[gi[i]]);
          bool inside = true;
          for (unsigned i = 0; i < n; ++i) {
            Q lo = (half && i == n - 1) ? Q(0) : Q(-4);
            inside = inside && lo <= p[i] && p[i] <= 4;
          }
          // Candidate index per axis, then the cell itself decides.
          Index v(n);
          bool any_axis = true;
          for (unsigned i = 0; i < n && any_axis; ++i) {
            any_axis = false;
            for (unsigned long a = 0; a <= side; ++a)
              if (axis[i][a].contains(p[i])) {
                v[i] = static_cast<long>(a);
                any_axis = true;
                break;
              }
          }
          bool hit = false;
          if (any_axis) {
            const GridCell& c = cells[flat_index(v, side)];
            hit = true;
            for (unsigned i = 0; i < n; ++i) hit = hit && c.lo[i] <= p[i] && p[i] <= c.hi[i];
          }
          if (hit != inside) ++violations;
          ++points;
          unsigned i = 0;
          while (i < n && ++gi[i] == static_cast<long>(grid.size())) gi[i++] = 0;
          if (i == n) break;
        }
      }
  Outcome o;
  o.pass = violations == 0;
  o.detail = "m<=2, n<=3, full and half: " + std::to_string(cells_seen) + " cells, " + std::to_string(points) +
             " grid points, " + std::to_string(violations) + " violations";
  return o;
}

Outcome criterion7() {
  Outcome o;
  std::ostringstream d;
  // The circle file, against exact samples and the analytic complement.
  {
    Instance in = make_instance(std::string(CMA_SOURCE_DIR) + "/instances/circle.inst");
    std::vector<Ball> balls = coce_emissions(*in.coce, kLevelSetSteps);
    PointSet sample = circle_sample();
    std::size_t bad = 0;
    for (const Ball& b : balls) {
      if (!circle_misses(b)) ++bad;
      for (const Point& p : sample)
        if (mem_ball(p, b)) ++bad;
    }
    d << "circle.inst " << balls.size() << " balls " << bad << " violations; ";
    o.pass = o.pass && bad == 0 && !balls.empty();
  }
  // Example (i): any part of a bracketing segment inside a ball counts as a violation.
  {
    Instance in = make_instance(std::string(CMA_SOURCE_DIR) + "/instances/example_i.inst");
    std::vector<Ball> balls = coce_emissions(*in.coce, kLevelSetSteps);
    std::vector<TruthSample> sample = in.truth.samples();
    std::size_t bad = 0;
    for (const Ball& b : balls)
      for (const TruthSample& s : sample)
        if (sample_in_ball(s, b)) ++bad;
    d << "example_i.inst " << balls.size() << " balls vs " << sample.size() << " samples " << bad << " violations";
    o.pass = o.pass && bad == 0 && !balls.empty();
  }
  o.detail = std::to_string(kLevelSetSteps) + " steps each: " + d.str();
  return o;
}

Outcome criterion8(std::string& cli_out) {
  GapReport r = adversarial_gap_demo(kGapBudget);
  // Independent bracket, run further than the demo's budget reaches.
  HaltingEnumerator en;
  for (unsigned s = 0; s < kIndependentStages; ++s) en.advance_stage();
  const Q c_hi = en.c_hi();
  Space sp{1};
  std::size_t sound_semi = 0, sound_coce = 0;
  for (const TraceLine& t : r.semi_emissions)
    if (interval_covered(0, c_hi, sp.open(t.code))) ++sound_semi;
  for (const Ball& b : r.coce_emissions)
    if (sgn(b.c[0] + b.r) <= 0 || b.c[0] - b.r >= c_hi) ++sound_coce;
  Run c = cli("demo adversarial --budget " + std::to_string(kGapBudget));
  cli_out = c.out;
  Outcome o;
  o.pass = !r.semi_emissions.empty() && sound_semi == r.semi_emissions.size() && !r.straddle_certified &&
           sound_coce == r.coce_emissions.size() && r.all_sound() && c.code == 0 && c.out == format_gap_report(r);
  o.detail = "budget " + std::to_string(kGapBudget) + ": " + std::to_string(r.semi_emissions.size()) +
             " semi covers (" + std::to_string(sound_semi) + " sound), straddle " +
             (r.straddle_certified ? "certified" : "never certified") + ", " +
             std::to_string(r.coce_emissions.size()) + " coce balls (" + std::to_string(sound_coce) + " sound)";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> only;
  for (int i = 1; i < argc; ++i) only.insert(std::stoi(argv[i]));
  auto want = [&](int n) { return only.empty() || only.count(n) > 0; };
  bool all = true;
  auto emit = [&](int n, const Outcome& o) {
    report(n, o);
    all = all && o.pass;
  };

  ReconCheck circle, segment;
  const bool recon = want(1) || want(2) || want(3) || want(9);
  if (recon) {
    Instance c = make_instance("circle");
    circle = check_reconstruction("circle", circle_sample(), c.truth.dist_le, circle_meets, false);
    Instance s = make_instance("segment");
    segment = check_reconstruction("segment", segment_sample(), s.truth.dist_le, segment_meets, true);
  }
  if (want(1)) {
    Outcome o;
    o.pass = circle.bound_ok && circle.seconds < kCircleSeconds;
    std::ostringstream d;
    d << "circle k=1.." << kMaxK << " rho <= 2^-k against a 2^-8-dense sample; cli time " << circle.seconds
      << " s (limit " << kCircleSeconds << ")" << circle.note;
    o.detail = d.str();
    emit(1, o);
  }
  if (want(2)) {
    Outcome o;
    o.pass = segment.bound_ok && segment.u_ok;
    o.detail = std::string("segment k=1..6 rho <= 2^-k; boundary tuples with u: ") + (segment.u_ok ? "yes" : "no") +
               segment.note;
    emit(2, o);
  }
  if (want(3)) {
    Outcome o;
    o.pass = circle.links_ok && segment.links_ok;
    o.detail = std::to_string(circle.links + segment.links) + " Gamma links, " +
               std::to_string(circle.bad_links + segment.bad_links) + " missing the set";
    emit(3, o);
  }
  if (want(4)) emit(4, criterion4());
  if (want(5)) emit(5, criterion5());
  if (want(6)) emit(6, criterion6());
  if (want(7)) emit(7, criterion7());
  std::string demo;
  if (want(8) || want(9)) {
    Outcome o = criterion8(demo);
    if (want(8)) emit(8, o);
  }
  if (want(9)) {
    std::size_t same = 0, total = 0;
    for (const auto* rc : {&circle, &segment}) {
      const std::string name = rc == &circle ? "circle" : "segment";
      for (const auto& [k, out] : rc->csv) {
        ++total;
        Run again = cli("approximate --instance " + name + " --k " + std::to_string(k) + " --budget " +
                        std::to_string(kApproxBudget));
        if (again.code == 0 && again.out == out) ++same;
      }
    }
    ++total;
    if (cli("demo adversarial --budget " + std::to_string(kGapBudget)).out == demo && !demo.empty()) ++same;
    Outcome o;
    o.pass = same == total && total == 2 * kMaxK + 1;
    o.detail = "reruns of criteria 1, 2, 8: " + std::to_string(same) + "/" + std::to_string(total) + " byte-identical";
    emit(9, o);
  }
  std::cout << (all ? "acceptance: PASS" : "acceptance: FAIL") << std::endl;
  return all ? 0 : 1;
}
