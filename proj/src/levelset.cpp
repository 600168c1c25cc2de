#include "cma/levelset.hpp"

#include <cctype>
#include <deque>
#include <sstream>

namespace cma {

// ---- expressions ------------------------------------------------------------

namespace {

std::vector<std::string> tokenize(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == '(' || ch == ')' || std::isspace(static_cast<unsigned char>(ch))) {
      if (!cur.empty()) out.push_back(cur), cur.clear();
      if (ch == '(' || ch == ')') out.emplace_back(1, ch);
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

ExprPtr make(Expr::Op op, std::vector<ExprPtr> args) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->args = std::move(args);
  return e;
}

ExprPtr fold(Expr::Op op, const std::vector<ExprPtr>& args) {
  ExprPtr acc = args[0];
  for (std::size_t i = 1; i < args.size(); ++i) acc = make(op, {acc, args[i]});
  return acc;
}

class Parser {
 public:
  Parser(std::vector<std::string> toks, unsigned n) : t_(std::move(toks)), n_(n) {}

  bool done() const { return p_ >= t_.size(); }

  ExprPtr parse() {
    if (done()) throw PreconditionError("expression ends early");
    std::string tok = t_[p_++];
    if (tok == ")") throw PreconditionError("unexpected ')'");
    if (tok != "(") return atom(tok);
    if (done()) throw PreconditionError("expression ends early");
    std::string head = t_[p_++];
    std::vector<ExprPtr> args;
    while (!done() && t_[p_] != ")") args.push_back(parse());
    if (done()) throw PreconditionError("missing ')'");
    ++p_;
    auto arity = [&](std::size_t lo, std::size_t hi) {
      if (args.size() < lo || args.size() > hi) throw PreconditionError("wrong argument count for '" + head + "'");
    };
    if (head == "+") {
      arity(1, 1000);
      return fold(Expr::add, args);
    }
    if (head == "*") {
      arity(1, 1000);
      return fold(Expr::mul, args);
    }
    if (head == "-") {
      arity(1, 1000);
      if (args.size() == 1) return make(Expr::neg, args);
      return fold(Expr::sub, args);
    }
    if (head == "sq") {
      arity(1, 1);
      return make(Expr::sq, args);
    }
    if (head == "sin") {
      arity(1, 1);
      return make(Expr::sin, args);
    }
    if (head == "exp") {
      arity(1, 1);
      return make(Expr::exp, args);
    }
    throw PreconditionError("unknown operator '" + head + "'");
  }

 private:
  ExprPtr atom(const std::string& tok) {
    auto e = std::make_shared<Expr>();
    static const std::string alias = "xyzw";
    if (tok.size() == 1 && alias.find(tok[0]) != std::string::npos) {
      e->op = Expr::var;
      e->index = static_cast<unsigned>(alias.find(tok[0]));
    } else if (tok.size() > 1 && tok[0] == 'x' && std::isdigit(static_cast<unsigned char>(tok[1]))) {
      e->op = Expr::var;
      unsigned long v = std::stoul(tok.substr(1));
      if (v == 0) throw PreconditionError("variables are numbered from x1");
      e->index = static_cast<unsigned>(v - 1);
    } else {
      e->op = Expr::constant;
      e->value = parse_rational(tok);
      return e;
    }
    if (e->index >= n_) throw PreconditionError("variable '" + tok + "' exceeds dimension");
    return e;
  }

  std::vector<std::string> t_;
  std::size_t p_ = 0;
  unsigned n_;
};

}  // namespace

ExprPtr parse_expr(const std::string& text, unsigned n) {
  Parser p(tokenize(text), n);
  ExprPtr e = p.parse();
  if (!p.done()) throw PreconditionError("trailing input after expression");
  return e;
}

std::vector<ExprPtr> parse_exprs(const std::string& text, unsigned n) {
  Parser p(tokenize(text), n);
  std::vector<ExprPtr> out;
  while (!p.done()) out.push_back(p.parse());
  if (out.empty()) throw PreconditionError("no expressions");
  return out;
}

std::string expr_str(const ExprPtr& e) {
  switch (e->op) {
    case Expr::var: return "x" + std::to_string(e->index + 1);
    case Expr::constant: return to_exact(e->value);
    case Expr::add: return "(+ " + expr_str(e->args[0]) + " " + expr_str(e->args[1]) + ")";
    case Expr::sub: return "(- " + expr_str(e->args[0]) + " " + expr_str(e->args[1]) + ")";
    case Expr::neg: return "(- " + expr_str(e->args[0]) + ")";
    case Expr::mul: return "(* " + expr_str(e->args[0]) + " " + expr_str(e->args[1]) + ")";
    case Expr::sq: return "(sq " + expr_str(e->args[0]) + ")";
    case Expr::sin: return "(sin " + expr_str(e->args[0]) + ")";
    case Expr::exp: return "(exp " + expr_str(e->args[0]) + ")";
  }
  return "?";
}

Interval ieval(const ExprPtr& e, const Box& box, unsigned k) {
  const unsigned p = k + 16;
  switch (e->op) {
    case Expr::var:
      if (e->index >= box.size()) throw PreconditionError("ieval: variable outside the box");
      return box[e->index];
    case Expr::constant: return Interval(e->value);
    case Expr::add: return widen(ieval(e->args[0], box, k) + ieval(e->args[1], box, k), p);
    case Expr::sub: return widen(ieval(e->args[0], box, k) - ieval(e->args[1], box, k), p);
    case Expr::neg: return -ieval(e->args[0], box, k);
    case Expr::mul: return widen(ieval(e->args[0], box, k) * ieval(e->args[1], box, k), p);
    case Expr::sq: return widen(sqr(ieval(e->args[0], box, k)), p);
    case Expr::sin: return widen(isin(widen(ieval(e->args[0], box, k), p), p), p);
    case Expr::exp: return widen(iexp(widen(ieval(e->args[0], box, k), p), p), p);
  }
  throw PreconditionError("ieval: bad expression");
}

Interval eval_point(const ExprPtr& e, const Point& pt, unsigned k) {
  Box b;
  for (const Q& x : pt) b.emplace_back(x);
  // Depth of the tree bounds how much the widenings add up.
  for (unsigned extra = 8;; extra += 16) {
    Interval r = ieval(e, b, k + extra);
    if (r.width() < pow2(-static_cast<long>(k))) return r;
  }
}

// ---- instance files ---------------------------------------------------------------

LevelSetInstance parse_instance(const std::string& text) {
  LevelSetInstance inst;
  std::string exprs_text;
  std::vector<Q> box_nums;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& what) {
    throw PreconditionError("instance line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;
    std::string rest((std::istreambuf_iterator<char>(ls)), std::istreambuf_iterator<char>());
    std::istringstream rs(rest);
    std::string tok;
    if (key == "dim") {
      if (!(rs >> inst.n) || inst.n == 0 || inst.n > 4) fail("dim must be 1..4");
    } else if (key == "exprs" || key == "expr") {
      exprs_text += " " + rest;
    } else if (key == "target") {
      while (rs >> tok) inst.target.push_back(parse_rational(tok));
    } else if (key == "box") {
      while (rs >> tok) box_nums.push_back(parse_rational(tok));
    } else if (key == "atlas") {
      rs >> inst.atlas;
    } else if (key == "regular") {
      rs >> tok;
      inst.regular = tok == "yes" || tok == "true";
    } else if (key == "name") {
      rs >> inst.name;
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (inst.n == 0) throw PreconditionError("instance needs dim");
  inst.exprs = parse_exprs(exprs_text, inst.n);
  if (inst.target.size() != inst.exprs.size()) throw PreconditionError("target arity differs from exprs");
  if (box_nums.size() != 2 * inst.n) throw PreconditionError("box needs lo hi per coordinate");
  for (unsigned i = 0; i < inst.n; ++i) {
    if (!(box_nums[2 * i] < box_nums[2 * i + 1])) throw PreconditionError("box needs lo < hi");
    inst.box.emplace_back(box_nums[2 * i], box_nums[2 * i + 1]);
  }
  return inst;
}

// ---- co-c.e. enumeration -----------------------------------------------------------

bool ball_misses_box(const Ball& b, const Box& box) {
  Point lo, hi;
  for (const Interval& i : box) lo.push_back(i.lo), hi.push_back(i.hi);
  return sq_dist_to_box(b.c, lo, hi) > b.r * b.r;
}

namespace {

// Cells of side 2^-t/4 around the box covering {p : 2^-t <= d(p, box) <= 2^-t+1}, t = 0,1,-1,2,-2,...
class Layers {
 public:
  explicit Layers(Box box) : box_(std::move(box)), n_(static_cast<unsigned>(box_.size())) { begin_layer(); }

  Ball next() {
    while (true) {
      if (pos_ == end_) {
        ++layer_;
        begin_layer();
        continue;
      }
      Ball b = cell_ball();
      advance();
      if (ball_misses_box(b, box_)) return b;
    }
  }

 private:
  long current_t() const {
    if (layer_ == 0) return 0;
    long h = static_cast<long>((layer_ + 1) / 2);
    return layer_ % 2 ? h : -h;
  }

  void begin_layer() {
    long t = current_t();
    sigma_ = pow2(-t - 2);
    Q outer = pow2(-t + 1), inner = pow2(-t) / 2;
    lo_.assign(n_, 0), hi_.assign(n_, 0), ilo_.assign(n_, 0), ihi_.assign(n_, 0);
    for (unsigned i = 0; i < n_; ++i) {
      lo_[i] = floor_q((box_[i].lo - outer) / sigma_).get_si();
      hi_[i] = ceil_q((box_[i].hi + outer) / sigma_).get_si() - 1;
      ilo_[i] = floor_q((box_[i].lo - inner) / sigma_).get_si() + 1;
      ihi_[i] = ceil_q((box_[i].hi + inner) / sigma_).get_si() - 2;
    }
    pos_ = lo_;
    end_.assign(n_, 0);
    end_[0] = hi_[0] + 1;
    for (unsigned i = 1; i < n_; ++i) end_[i] = lo_[i];
    skip_inner();
    // Rho constant for the cell ball: > sqrt(n)/2.
    static const Q rho[5] = {Q(0), Q(3, 5), Q(3, 4), Q(9, 10), Q(11, 10)};
    radius_ = rho[n_] * sigma_;
  }

  Ball cell_ball() const {
    Ball b;
    for (unsigned i = 0; i < n_; ++i) b.c.push_back(sigma_ * pos_[i] + sigma_ / 2);
    b.r = radius_;
    return b;
  }

  void advance() {
    for (unsigned i = n_; i-- > 0;) {
      if (pos_[i] < hi_[i]) {
        ++pos_[i];
        for (unsigned j = i + 1; j < n_; ++j) pos_[j] = lo_[j];
        skip_inner();
        return;
      }
    }
    pos_ = end_;
  }

  // Jump the last coordinate over cells lying in the inner region.
  void skip_inner() {
    if (pos_ == end_) return;
    for (unsigned i = 0; i + 1 < n_; ++i)
      if (pos_[i] < ilo_[i] || pos_[i] > ihi_[i]) return;
    unsigned l = n_ - 1;
    if (pos_[l] >= ilo_[l] && pos_[l] <= ihi_[l]) {
      pos_[l] = ihi_[l] + 1;
      if (pos_[l] > hi_[l]) {
        pos_[l] = hi_[l];
        advance();
      }
    }
  }

  Box box_;
  unsigned n_;
  unsigned long layer_ = 0;
  Q sigma_, radius_;
  std::vector<long> lo_, hi_, ilo_, ihi_, pos_, end_;
};

class LevelSetStream : public CoCeStream {
 public:
  explicit LevelSetStream(std::shared_ptr<const LevelSetInstance> inst)
      : keep_(std::move(inst)), inst_(*keep_), layers_(inst_.box) {
    queue_.push_back({inst_.box, 0});
  }

  bool next(Ball& out, Budget& b) override {
    while (true) {
      if (!b.take(1)) return false;
      phase_ = !phase_;
      if (!phase_) {
        out = layers_.next();
        return true;
      }
      if (queue_.empty()) continue;
      Cell c = std::move(queue_.front());
      queue_.pop_front();
      Ball ball;
      if (excluded(c, ball)) {
        out = std::move(ball);
        return true;
      }
      split(c);
    }
  }

 private:
  struct Cell {
    Box box;
    unsigned depth;
  };

  bool excluded(const Cell& c, Ball& ball) const {
    const unsigned n = inst_.n;
    Q h2 = 0;
    for (unsigned i = 0; i < n; ++i) {
      ball.c.push_back(c.box[i].mid());
      Q h = c.box[i].width() / 2;
      h2 += h * h;
    }
    // Radius 5/4 of the half diagonal, rounded up.
    ball.r = sqrt_hi(h2 * Q(25, 16), c.depth + 8);
    Box cube;
    for (unsigned i = 0; i < n; ++i) {
      Q lo = ball.c[i] - ball.r, hi = ball.c[i] + ball.r;
      if (lo < inst_.box[i].lo) lo = inst_.box[i].lo;
      if (hi > inst_.box[i].hi) hi = inst_.box[i].hi;
      cube.emplace_back(lo, hi);
    }
    for (std::size_t j = 0; j < inst_.exprs.size(); ++j)
      if (!ieval(inst_.exprs[j], cube, c.depth + 4).contains(inst_.target[j])) return true;
    return false;
  }

  void split(const Cell& c) {
    unsigned w = 0;
    for (unsigned i = 1; i < inst_.n; ++i)
      if (c.box[i].width() > c.box[w].width()) w = i;
    Cell a = c, b = c;
    Q mid = c.box[w].mid();
    a.box[w].hi = mid;
    b.box[w].lo = mid;
    a.depth = b.depth = c.depth + 1;
    queue_.push_back(std::move(a));
    queue_.push_back(std::move(b));
  }

  std::shared_ptr<const LevelSetInstance> keep_;
  const LevelSetInstance& inst_;
  Layers layers_;
  std::deque<Cell> queue_;
  bool phase_ = false;
};

class LevelSetCoce : public CoCeOracle {
 public:
  explicit LevelSetCoce(LevelSetInstance inst) : inst_(std::make_shared<const LevelSetInstance>(std::move(inst))) {}
  unsigned dim() const override { return inst_->n; }
  std::unique_ptr<CoCeStream> start() const override { return std::make_unique<LevelSetStream>(inst_); }

 private:
  std::shared_ptr<const LevelSetInstance> inst_;
};

class BoxApprox : public Approx {
 public:
  explicit BoxApprox(Box box) : box_(std::move(box)) {}
  unsigned dim() const override { return static_cast<unsigned>(box_.size()); }

  PointSet at(unsigned k) const override {
    std::vector<std::vector<Q>> axes;
    for (const Interval& iv : box_) axes.push_back(axis(iv, k));
    PointSet out;
    Point p(box_.size());
    build(axes, 0, p, out);
    return out;
  }

  std::optional<std::uint64_t> size_hint(unsigned k) const override {
    std::uint64_t total = 1;
    for (const Interval& iv : box_) {
      Q count = iv.width() * pow2(static_cast<long>(k) + 1) + 2;
      Z c = ceil_q(count);
      if (!c.fits_ulong_p() || c > (1ul << 31)) return std::uint64_t(1) << 62;
      total *= c.get_ui();
      if (total > (std::uint64_t(1) << 62)) return std::uint64_t(1) << 62;
    }
    return total;
  }

 private:
  // Spacing 2^-(k+1) keeps every box point within sqrt(n)/2 * 2^-(k+1) < 2^-k for n <= 4.
  static std::vector<Q> axis(const Interval& iv, unsigned k) {
    Q s = pow2(-static_cast<long>(k) - 1);
    std::vector<Q> out;
    for (Q x = iv.lo; x < iv.hi; x += s) out.push_back(x);
    out.push_back(iv.hi);
    return out;
  }

  static void build(const std::vector<std::vector<Q>>& axes, std::size_t i, Point& p, PointSet& out) {
    if (i == axes.size()) {
      out.push_back(p);
      return;
    }
    for (const Q& x : axes[i]) {
      p[i] = x;
      build(axes, i + 1, p, out);
    }
  }

  Box box_;
};

}  // namespace

CoCePtr coce_from_levelset(const LevelSetInstance& inst) { return std::make_shared<LevelSetCoce>(inst); }

ApproxPtr box_approx(const Box& box) { return std::make_shared<BoxApprox>(box); }

SemiPtr semi_from_levelset(const LevelSetInstance& inst) {
  return coce_to_semi(coce_from_levelset(inst), box_approx(inst.box));
}

}  // namespace cma
