#pragma once

#include "cma/interval.hpp"
#include "cma/sets.hpp"

#include <memory>
#include <string>
#include <vector>

namespace cma {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  enum Op { var, constant, add, sub, neg, mul, sq, sin, exp } op;
  unsigned index = 0;  // variable number, 0-based
  Q value;             // constant
  std::vector<ExprPtr> args;
};

// S-expressions over x1..xn (aliases x y z w), rationals, + - * sq sin exp.
ExprPtr parse_expr(const std::string& text, unsigned n);
std::vector<ExprPtr> parse_exprs(const std::string& text, unsigned n);
std::string expr_str(const ExprPtr& e);

// Outward enclosure of e over the box; results are widened to multiples of 2^-(k+16).
Interval ieval(const ExprPtr& e, const Box& box, unsigned k);
// Enclosure of e at a rational point, of width below 2^-k.
Interval eval_point(const ExprPtr& e, const Point& p, unsigned k);

struct LevelSetInstance {
  std::string name;
  unsigned n = 0;
  std::vector<ExprPtr> exprs;
  std::vector<Q> target;
  Box box;
  std::string atlas;     // built-in chart family, empty if none
  bool regular = false;  // claimed regular value; not checked
};

// Text format: "dim", "exprs" (one s-expression per component), "target", "box lo hi ...",
// optional "atlas <family>", "regular yes|no", "name".
LevelSetInstance parse_instance(const std::string& text);

// Complement enumeration of f^-1{y} inside the box: bisection cells whose enclosures
// exclude y alternate with a layered family of balls outside the box.
CoCePtr coce_from_levelset(const LevelSetInstance& inst);
ApproxPtr box_approx(const Box& box);
SemiPtr semi_from_levelset(const LevelSetInstance& inst);

// Exact check that a closed ball misses the closed box.
bool ball_misses_box(const Ball& b, const Box& box);

}  // namespace cma
