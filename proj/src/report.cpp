#include "cma/report.hpp"

#include "cma/codes.hpp"

#include <json.hpp>

#include <sstream>

namespace cma {

ApproxReport make_report(const std::string& instance, const ReconstructionRun& run, std::uint64_t budget) {
  ApproxReport r;
  r.instance = instance;
  r.k = run.k;
  r.bound = pow2(-static_cast<long>(run.k));
  r.budget = budget;
  r.steps_used = run.steps_used;
  r.points = run.points;
  for (const LocalStep* st : run.steps) {
    ChartCertificate c;
    c.chart = st->chart;
    c.tuple = st->cand.t;
    c.m = st->cand.m;
    c.links = st->cand.chain.size();
    c.balls = st->balls;
    c.gamma = st->gamma_size;
    c.lambda = st->lambda.size();
    c.stage = st->stage;
    c.steps = st->steps;
    c.origin = st->cand.origin;
    c.digest = chain_digest(st->cand.chain);
    c.conditions = st->report.conditions;
    r.charts.push_back(std::move(c));
  }
  return r;
}

std::string tuple_str(const OmegaTuple& t) {
  std::string s = "k=" + std::to_string(t.k) + " e=" + std::to_string(t.e) + " h=" + std::to_string(t.h);
  if (t.u) s += " u=" + std::to_string(*t.u);
  return s;
}

std::string render_csv(const ApproxReport& r) {
  std::ostringstream o;
  o << "# instance " << r.instance << "\n";
  o << "# k " << r.k << "\n";
  o << "# bound " << to_exact(r.bound) << "\n";
  o << "# budget " << r.budget << " used " << r.steps_used << "\n";
  o << "# decimals " << kDecimalDigits << " digits, half away from zero\n";
  for (const ChartCertificate& c : r.charts) {
    o << "# chart " << c.chart << " " << tuple_str(c.tuple) << " m=" << c.m << " links=" << c.links
      << " balls=" << c.balls << " gamma=" << c.gamma << " stage=" << c.stage << " steps=" << c.steps
      << " origin=" << c.origin << " digest=" << c.digest << "\n";
    for (const ConditionResult& cond : c.conditions) o << "#   " << cond.name << ": " << verdict_str(cond.verdict) << "\n";
  }
  o << "# points " << r.points.size() << "\n";
  const std::size_t n = r.points.empty() ? 0 : r.points[0].size();
  for (std::size_t i = 0; i < n; ++i) o << (i ? "," : "") << "x" << i + 1;
  for (std::size_t i = 0; i < n; ++i) o << ",x" << i + 1 << "_exact";
  o << "\n";
  for (const Point& p : r.points) {
    for (std::size_t i = 0; i < n; ++i) o << (i ? "," : "") << to_decimal(p[i], kDecimalDigits);
    for (std::size_t i = 0; i < n; ++i) o << "," << to_exact(p[i]);
    o << "\n";
  }
  return o.str();
}

std::string render_json(const ApproxReport& r) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["instance"] = r.instance;
  j["k"] = r.k;
  j["bound"] = to_exact(r.bound);
  j["budget"] = r.budget;
  j["steps_used"] = r.steps_used;
  j["decimal_digits"] = kDecimalDigits;
  ordered_json charts = ordered_json::array();
  for (const ChartCertificate& c : r.charts) {
    ordered_json t;
    t["k"] = c.tuple.k;
    t["e"] = c.tuple.e;
    t["h"] = c.tuple.h;
    if (c.tuple.u) t["u"] = *c.tuple.u;
    ordered_json conds = ordered_json::object();
    for (const ConditionResult& cond : c.conditions) conds[cond.name] = verdict_str(cond.verdict);
    charts.push_back({{"chart", c.chart},
                      {"tuple", t},
                      {"m", c.m},
                      {"links", c.links},
                      {"balls", c.balls},
                      {"gamma", c.gamma},
                      {"lambda", c.lambda},
                      {"stage", c.stage},
                      {"steps", c.steps},
                      {"origin", c.origin},
                      {"digest", c.digest},
                      {"conditions", conds}});
  }
  j["charts"] = charts;
  ordered_json pts = ordered_json::array();
  for (const Point& p : r.points) {
    ordered_json ex = ordered_json::array(), dec = ordered_json::array();
    for (const Q& x : p) {
      ex.push_back(to_exact(x));
      dec.push_back(to_decimal(x, kDecimalDigits));
    }
    pts.push_back({{"exact", ex}, {"decimal", dec}});
  }
  j["points"] = pts;
  return j.dump(1) + "\n";
}

std::vector<VerifyLine> verify_run(const Reconstruction& r, const ReconstructionRun& run, std::uint64_t budget) {
  std::vector<VerifyLine> out;
  for (std::size_t i = 0; i < run.steps.size(); ++i) {
    const LocalApprox& local = *r.locals.at(i);
    Candidate cand = run.steps[i]->cand;
    cand.cache = std::make_shared<StructuralVerdicts>();
    Budget b(budget);
    CheckReport rep = check_conditions(cand, local.s_prime(), local.t_prime(), local.anchors(), b);
    out.push_back({run.steps[i]->chart, rep.verdict, b.used});
  }
  return out;
}

std::string render_verify(const std::vector<VerifyLine>& lines) {
  std::string s;
  for (const VerifyLine& l : lines)
    s += "verify " + l.chart + " " + verdict_str(l.verdict) + " steps " + std::to_string(l.steps) + "\n";
  return s;
}

std::string certify_chain_report(const GridChain& c) {
  std::ostringstream o;
  o << "dim " << c.n << " side " << c.side << " links " << c.size() << "\n";
  std::vector<ChainOffender> bad = chain_offenders(c, 5);
  o << "formal chain: " << (bad.empty() ? "yes" : "no") << "\n";
  auto idx = [](const Index& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + ")";
  };
  for (const ChainOffender& f : bad)
    o << "  offender " << idx(f.v) << " ball " << f.ball_v << " vs " << idx(f.w) << " ball " << f.ball_w << "\n";
  Q mesh = 0;
  bool empty_link = false;
  for (std::size_t f = 0; f < c.size(); ++f) {
    const Index v = unflatten(f, c.n, c.side);
    if (c.links[f].empty()) {
      o << "link " << idx(v) << " empty\n";
      empty_link = true;
      continue;
    }
    Q d = fdiam_upper(c.links[f], 20);
    if (d > mesh) mesh = d;
    o << "link " << idx(v) << " balls " << c.links[f].size() << " fdiam <= " << to_exact(d) << "\n";
  }
  if (!empty_link) o << "fmesh <= " << to_exact(mesh) << " (" << to_decimal(mesh, 6) << ")\n";
  o << "lower boundary balls " << chain_lower_boundary(c).size() << "\n";
  return o.str();
}

std::string inspect_code(const Z& n) {
  std::ostringstream o;
  auto [a, b] = unpair(n);
  o << "code " << n.get_str() << "\n";
  o << "unpair " << a.get_str() << " " << b.get_str() << "\n";
  o << "rational q " << to_exact(rat_pos(n)) << "\n";
  o << "signed rational " << to_exact(signed_rat(n)) << "\n";
  try {
    std::vector<Z> seq = list_decode(n, 64);
    o << "list [";
    for (std::size_t i = 0; i < seq.size(); ++i) o << (i ? " " : "") << seq[i].get_str();
    o << "]\n";
  } catch (const PreconditionError&) {
    o << "list longer than 64 entries\n";
  }
  o << "grid side " << grid_side(n).get_str() << "\n";
  return o.str();
}

std::string inspect_ball(const Z& n, unsigned dim) {
  Space sp{dim};
  Ball b = sp.ball(n);
  return "ball " + ball_str(b) + "\n";
}

std::string inspect_open(const Z& n, unsigned dim) {
  Space sp{dim};
  OpenSet u = sp.open(n);
  std::string s = "open set with " + std::to_string(u.size()) + " balls\n";
  for (const Ball& b : u) s += "  " + ball_str(b) + "\n";
  return s;
}

}  // namespace cma
