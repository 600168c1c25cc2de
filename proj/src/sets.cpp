#include "cma/sets.hpp"

#include "cma/codes.hpp"
#include "cma/index.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace cma {

const char* verdict_str(Verdict v) {
  switch (v) {
    case Verdict::yes: return "yes";
    case Verdict::no: return "no";
    default: return "unknown";
  }
}

PointSet CachedApprox::at(unsigned k) const {
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find(k);
    if (it != memo_.end()) return it->second;
  }
  PointSet p = inner_->at(k);
  std::lock_guard<std::mutex> lock(mu_);
  memo_.emplace(k, p);
  return p;
}

// ---- traces -----------------------------------------------------------------

std::string format_trace(const std::vector<TraceLine>& lines) {
  std::string out;
  for (const TraceLine& t : lines) out += std::to_string(t.budget) + ", " + t.kind + ", " + t.code.get_str() + "\n";
  return out;
}

std::vector<TraceLine> parse_trace(const std::string& text) {
  std::vector<TraceLine> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) throw PreconditionError("bad trace line: " + line);
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(' '));
      s.erase(s.find_last_not_of(' ') + 1);
      return s;
    };
    TraceLine t;
    t.budget = std::stoull(trim(line.substr(0, c1)));
    t.kind = trim(line.substr(c1 + 1, c2 - c1 - 1));
    t.code = Z(trim(line.substr(c2 + 1)), 10);
    out.push_back(t);
  }
  return out;
}

namespace {

// One query unit at a time over codes j < 2^s with per-query budget 2^s.
template <class Query>
class Dovetail {
 public:
  explicit Dovetail(Query q) : q_(std::move(q)) {}

  // Returns the code emitted by this unit, if any; false when the budget is gone.
  bool step(Budget& g, std::optional<Z>& emitted) {
    emitted.reset();
    if (j_ >= (Z(1) << stage_)) {
      ++stage_;
      j_ = 0;
    }
    Z j = j_;
    ++j_;
    if (done_.count(j)) return true;
    if (!g.take(1)) return false;
    std::uint64_t per = stage_ >= 40 ? (1ull << 40) : (1ull << stage_);
    Budget q = g.sub(per);
    Verdict v = q_(j, stage_, q);
    g.settle(q);
    if (v == Verdict::yes) {
      done_.insert(j);
      emitted = j;
    }
    return !g.exhausted();
  }

 private:
  Query q_;
  unsigned stage_ = 0;
  Z j_ = 0;
  std::set<Z> done_;
};

template <class Query>
std::vector<TraceLine> run_dovetail(Query q, const char* kind, std::uint64_t budget) {
  std::vector<TraceLine> out;
  Dovetail<Query> d(std::move(q));
  Budget g(budget);
  std::optional<Z> e;
  while (true) {
    bool more = d.step(g, e);
    if (e) out.push_back({g.used, kind, *e});
    if (!more) break;
  }
  return out;
}

}  // namespace

std::vector<TraceLine> semi_trace(const SemiOracle& s, std::uint64_t budget) {
  Space sp{s.dim()};
  auto q = [&s, sp](const Z& j, unsigned stage, Budget& b) {
    OpenSet u;
    try {
      std::vector<Z> codes = list_decode(j, stage + 1);
      for (const Z& c : codes) u.push_back(sp.ball(c));
    } catch (const PreconditionError&) {
      return Verdict::unknown;
    }
    return s.covered_by(u, b);
  };
  return run_dovetail(q, "semi", budget);
}

std::vector<TraceLine> ce_trace(const CeOracle& c, std::uint64_t budget) {
  Space sp{c.dim()};
  auto q = [&c, sp](const Z& i, unsigned, Budget& b) { return c.meets(sp.ball(i), b); };
  return run_dovetail(q, "ce", budget);
}

std::vector<TraceLine> coce_trace(const CoCeOracle& c, std::uint64_t budget) {
  Space sp{c.dim()};
  std::vector<TraceLine> out;
  auto st = c.start();
  Budget g(budget);
  Ball x;
  while (st->next(x, g)) out.push_back({g.used, "coce", sp.ball_index(x)});
  return out;
}

std::vector<Ball> coce_emissions(const CoCeOracle& c, std::uint64_t budget) {
  std::vector<Ball> out;
  auto st = c.start();
  Budget g(budget);
  Ball x;
  while (st->next(x, g)) out.push_back(x);
  return out;
}

// ---- helpers ----------------------------------------------------------------

bool points_cover(const PointSet& pts, const Q& margin, const OpenSet& u) {
  if (pts.empty()) return true;
  if (u.empty()) return false;
  BoxIndex idx(static_cast<unsigned>(u[0].c.size()));
  for (std::size_t i = 0; i < u.size(); ++i) idx.insert_ball(u[i], i);
  std::vector<std::size_t> cand;
  for (const Point& p : pts) {
    idx.query_point(p, cand);
    bool ok = false;
    for (std::size_t i : cand)
      if (formally_contained(u[i], p, margin)) {
        ok = true;
        break;
      }
    if (!ok) return false;
  }
  return true;
}

bool interval_covered(const Q& a, const Q& b, const OpenSet& u) {
  std::vector<std::pair<Q, Q>> iv;
  for (const Ball& x : u) iv.emplace_back(x.c[0] - x.r, x.c[0] + x.r);
  std::sort(iv.begin(), iv.end());
  Q x = a;
  std::size_t p = 0;
  bool have = false;
  Q reach;
  while (true) {
    while (p < iv.size() && iv[p].first < x) {
      if (!have || iv[p].second > reach) reach = iv[p].second;
      have = true;
      ++p;
    }
    if (!have || reach <= x) return false;
    x = reach;
    if (x > b) return true;
  }
}

// ---- semi -> co-c.e. ----------------------------------------------------------

namespace {

class SemiToCoceStream : public CoCeStream {
 public:
  explicit SemiToCoceStream(SemiPtr s) : s_(std::move(s)), sp_{s_->dim()}, dt_(Query{s_.get(), sp_}) {}

  bool next(Ball& out, Budget& b) override {
    while (pending_.empty()) {
      if (!b.take(1)) return false;
      std::optional<Z> e;
      bool more = dt_.step(b, e);
      // A new candidate ball each round.
      Z l = rounds_++;
      cands_.push_back(l);
      if (e) {
        OpenSet cover;
        for (const Z& c : list_decode(*e)) cover.push_back(sp_.ball(c));
        covers_.push_back(std::move(cover));
        if (!check_all(b)) return false;
      } else if (!covers_.empty()) {
        if (!check_one(cands_.size() - 1, b)) return false;
      }
      if (!more && pending_.empty()) return false;
    }
    out = pending_.front();
    pending_.pop_front();
    return true;
  }

 private:
  struct Query {
    const SemiOracle* s;
    Space sp;
    Verdict operator()(const Z& j, unsigned stage, Budget& b) const {
      OpenSet u;
      try {
        for (const Z& c : list_decode(j, stage + 1)) u.push_back(sp.ball(c));
      } catch (const PreconditionError&) {
        return Verdict::unknown;
      }
      return s->covered_by(u, b);
    }
  };

  bool check_one(std::size_t idx, Budget& b) {
    if (emitted_.count(cands_[idx])) return true;
    Ball x = sp_.ball(cands_[idx]);
    for (const OpenSet& cover : covers_) {
      if (!b.take(1)) return false;
      bool apart = std::all_of(cover.begin(), cover.end(), [&](const Ball& y) { return formally_disjoint(x, y); });
      if (apart) {
        emitted_.insert(cands_[idx]);
        pending_.push_back(x);
        break;
      }
    }
    return true;
  }

  bool check_all(Budget& b) {
    for (std::size_t i = 0; i < cands_.size(); ++i)
      if (!check_one(i, b)) return false;
    return true;
  }

  SemiPtr s_;
  Space sp_;
  Dovetail<Query> dt_;
  Z rounds_ = 0;
  std::vector<Z> cands_;
  std::vector<OpenSet> covers_;
  std::set<Z> emitted_;
  std::deque<Ball> pending_;
};

class SemiToCoce : public CoCeOracle {
 public:
  explicit SemiToCoce(SemiPtr s) : s_(std::move(s)) {}
  unsigned dim() const override { return s_->dim(); }
  std::unique_ptr<CoCeStream> start() const override { return std::make_unique<SemiToCoceStream>(s_); }

 private:
  SemiPtr s_;
};

std::uint64_t pow2_cap(unsigned k) { return k >= 62 ? (1ull << 62) : (1ull << k); }

// Stage k of an approximation-driven search runs only with 2^k (and |at(k)|) steps left.
bool affordable(const Approx& a, unsigned k, const Budget& b) {
  if (b.left < pow2_cap(k)) return false;
  auto hint = a.size_hint(k);
  return !hint || b.left >= *hint;
}

class CoceToSemi : public SemiOracle {
 public:
  CoceToSemi(CoCePtr s, ApproxPtr k) : s_(std::move(s)), k_(std::move(k)) {}
  unsigned dim() const override { return s_->dim(); }

  Verdict covered_by(const OpenSet& u, Budget& b) const override {
    auto st = s_->start();
    OpenSet all = u;
    std::size_t extra = 0;
    for (unsigned s = 0;; ++s) {
      while (extra < pow2_cap(s)) {
        Ball x;
        if (!st->next(x, b)) return Verdict::unknown;
        all.push_back(std::move(x));
        ++extra;
      }
      // Stage s looks at the box approximation at 2^-s only when affordable.
      if (!affordable(*k_, s, b)) return Verdict::unknown;
      PointSet pts = k_->at(s);
      if (!b.take(pts.size())) return Verdict::unknown;
      if (points_cover(pts, pow2(-static_cast<long>(s)), all)) return Verdict::yes;
    }
  }

 private:
  CoCePtr s_;
  ApproxPtr k_;
};

class ApproxToSemi : public SemiOracle {
 public:
  explicit ApproxToSemi(ApproxPtr k) : k_(std::move(k)) {}
  unsigned dim() const override { return k_->dim(); }

  Verdict covered_by(const OpenSet& u, Budget& b) const override {
    for (unsigned k = 0;; ++k) {
      if (!affordable(*k_, k, b)) {
        b.take(b.left);
        return Verdict::unknown;
      }
      PointSet pts = k_->at(k);
      if (!b.take(1 + pts.size())) return Verdict::unknown;
      if (points_cover(pts, pow2(-static_cast<long>(k)), u)) return Verdict::yes;
    }
  }

 private:
  ApproxPtr k_;
};

class ApproxToCe : public CeOracle {
 public:
  explicit ApproxToCe(ApproxPtr k) : k_(std::move(k)) {}
  unsigned dim() const override { return k_->dim(); }

  Verdict meets(const Ball& ball, Budget& b) const override {
    std::vector<std::size_t> cand;
    for (unsigned k = 0;; ++k) {
      if (b.left < pow2_cap(k)) {
        b.take(b.left);
        return Verdict::unknown;
      }
      const Level& lv = level(k);
      lv.idx.query_ball(ball, cand);
      if (!b.take(1 + cand.size())) return Verdict::unknown;
      Q margin = pow2(-static_cast<long>(k));
      for (std::size_t i : cand)
        if (formally_contained(ball, lv.pts[i], margin)) return Verdict::yes;
    }
  }

 private:
  struct Level {
    PointSet pts;
    BoxIndex idx;
  };
  // Cache only; step charges do not depend on it.
  const Level& level(unsigned k) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = levels_.find(k);
    if (it != levels_.end()) return *it->second;
    auto lv = std::make_unique<Level>(Level{k_->at(k), BoxIndex(k_->dim(), -static_cast<int>(k))});
    for (std::size_t i = 0; i < lv->pts.size(); ++i) lv->idx.insert_point(lv->pts[i], i);
    return *levels_.emplace(k, std::move(lv)).first->second;
  }

  ApproxPtr k_;
  mutable std::mutex mu_;
  mutable std::map<unsigned, std::unique_ptr<Level>> levels_;
};

class Subtract : public SemiOracle {
 public:
  Subtract(SemiPtr s, OpenSet m) : s_(std::move(s)), m_(std::move(m)) {}
  unsigned dim() const override { return s_->dim(); }
  Verdict covered_by(const OpenSet& u, Budget& b) const override {
    OpenSet all = u;
    all.insert(all.end(), m_.begin(), m_.end());
    return s_->covered_by(all, b);
  }

 private:
  SemiPtr s_;
  OpenSet m_;
};

// Smallest rational above sqrt(n)/2 on a 1/20 grid.
Q cell_ball_factor(unsigned n) {
  for (unsigned t = 1;; ++t) {
    Q r(t, 20);
    r.canonicalize();
    if (4 * r * r > n) return r;
  }
}

}  // namespace

PointSet union_points(const std::vector<PointSet>& parts) {
  PointSet out;
  std::set<Point> seen;
  for (const PointSet& p : parts)
    for (const Point& x : p)
      if (seen.insert(x).second) out.push_back(x);
  return out;
}

CoCePtr semi_to_coce(SemiPtr s) { return std::make_shared<SemiToCoce>(std::move(s)); }
SemiPtr coce_to_semi(CoCePtr s, ApproxPtr k) { return std::make_shared<CoceToSemi>(std::move(s), std::move(k)); }
SemiPtr approx_to_semi(ApproxPtr k) { return std::make_shared<ApproxToSemi>(std::move(k)); }
CePtr approx_to_ce(ApproxPtr k) { return std::make_shared<ApproxToCe>(std::move(k)); }
SemiPtr subtract(SemiPtr s, const OpenSet& m) { return std::make_shared<Subtract>(std::move(s), m); }

// ---- semi + ce -> approximation -------------------------------------------------

SemiCeApprox::SemiCeApprox(SemiPtr s, CePtr c, std::uint64_t budget)
    : s_(std::move(s)), c_(std::move(c)), budget_(budget) {
  if (s_->dim() != c_->dim()) throw PreconditionError("semi and ce oracles disagree on dimension");
}

ApproxOutcome SemiCeApprox::search(unsigned k, std::uint64_t budget) const {
  const unsigned n = dim();
  const Q factor = cell_ball_factor(n);
  Budget g(budget);
  for (unsigned s = 0;; ++s) {
    std::uint64_t per = 64 * pow2_cap(s);
    // A bounding ball B(0, 2^r) certified by the semi oracle.
    int r = -1;
    for (unsigned t = 0; t <= s && r < 0; ++t) {
      Budget q = g.sub(per);
      Verdict v = s_->covered_by({Ball{Point(n, Q(0)), pow2(static_cast<long>(t))}}, q);
      g.settle(q);
      if (v == Verdict::yes) r = static_cast<int>(t);
      if (g.exhausted()) return {ApproxOutcome::stalled, {}, {}, g.used};
    }
    if (r < 0) continue;
    // Cells of side 2^-t; the root cell is [-2^r, 2^r]^n.
    std::vector<Point> frontier{Point(n, Q(0))};
    long t = -(r + 1);
    OpenSet cover;
    while (true) {
      Q side = pow2(-t);
      std::vector<Point> certified;
      for (const Point& c : frontier) {
        Budget q = g.sub(per);
        Verdict v = c_->meets(Ball{c, factor * side}, q);
        g.settle(q);
        if (v == Verdict::yes) certified.push_back(c);
        if (g.exhausted()) return {ApproxOutcome::stalled, {}, {}, g.used};
      }
      if (t == static_cast<long>(k) + 1) {
        for (const Point& c : certified) cover.push_back(Ball{c, factor * side});
        break;
      }
      frontier.clear();
      Q quarter = side / 4;
      for (const Point& c : certified) {
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
          Point ch = c;
          for (unsigned i = 0; i < n; ++i) ch[i] += (mask >> (n - 1 - i)) & 1 ? quarter : Q(-quarter);
          frontier.push_back(std::move(ch));
        }
      }
      ++t;
    }
    if (cover.empty()) continue;
    Budget q = g.sub(per * cover.size());
    Verdict v = s_->covered_by(cover, q);
    g.settle(q);
    if (v == Verdict::yes) {
      ApproxOutcome out{ApproxOutcome::found, {}, cover, g.used};
      for (const Ball& b : cover) out.points.push_back(b.c);
      return out;
    }
    if (g.exhausted()) return {ApproxOutcome::stalled, {}, {}, g.used};
  }
}

PointSet SemiCeApprox::at(unsigned k) const {
  ApproxOutcome o = search(k, budget_);
  if (o.status != ApproxOutcome::found)
    throw BudgetExhausted("semi/ce search stalled at k=" + std::to_string(k));
  return o.points;
}

std::shared_ptr<SemiCeApprox> semi_ce_to_approx(SemiPtr s, CePtr c, std::uint64_t budget) {
  return std::make_shared<SemiCeApprox>(std::move(s), std::move(c), budget);
}

// ---- computable-up-to calculus ---------------------------------------------------

UpToApprox upto_union(const UpToApprox& u, const UpToApprox& v) {
  if (u.target != v.target) throw PreconditionError("upto_union: target mismatch");
  ApproxPtr a = u.approx, b = v.approx;
  auto f = std::make_shared<FunctionApprox>(a->dim(), [a, b](unsigned k) { return union_points({a->at(k), b->at(k)}); });
  return UpToApprox{u.target, u.piece + " + " + v.piece, f};
}

ApproxPtr glue(const std::vector<UpToApprox>& pieces) {
  if (pieces.empty()) throw PreconditionError("glue needs at least one piece");
  if (pieces.size() == 1) return pieces[0].approx;
  for (const UpToApprox& p : pieces)
    if (p.target != pieces[0].target) throw PreconditionError("glue: target mismatch");
  std::vector<ApproxPtr> parts;
  for (const UpToApprox& p : pieces) parts.push_back(p.approx);
  return std::make_shared<FunctionApprox>(parts[0]->dim(), [parts](unsigned k) {
    std::vector<PointSet> all;
    for (const ApproxPtr& a : parts) all.push_back(a->at(k));
    return union_points(all);
  });
}

}  // namespace cma
