#pragma once

#include "cma/space.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cma {

enum class Verdict { yes, no, unknown };
const char* verdict_str(Verdict v);

// Step budget shared by a computation; every oracle step spends one unit.
struct Budget {
  std::uint64_t left;
  std::uint64_t used = 0;

  explicit Budget(std::uint64_t n) : left(n) {}
  bool take(std::uint64_t n = 1) {
    if (left < n) {
      used += left;
      left = 0;
      return false;
    }
    left -= n;
    used += n;
    return true;
  }
  bool exhausted() const { return left == 0; }
  // Budget for a sub-computation, charged back by `settle`.
  Budget sub(std::uint64_t cap) const { return Budget(cap < left ? cap : left); }
  void settle(const Budget& child) { take(child.used); }
};

struct BudgetExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultBudget = 1000000;

// Semi-computable compact K: the semi-decision "K is contained in J_u".
// `yes` is final and sound; `no` is only returned when the question is decided.
class SemiOracle {
 public:
  virtual ~SemiOracle() = default;
  virtual unsigned dim() const = 0;
  virtual Verdict covered_by(const OpenSet& u, Budget& b) const = 0;
};
using SemiPtr = std::shared_ptr<const SemiOracle>;

// Co-c.e. closed S: a deterministic stream of balls whose union is X \ S.
class CoCeStream {
 public:
  virtual ~CoCeStream() = default;
  // Produces the next ball, or returns false when the budget ran out first.
  virtual bool next(Ball& out, Budget& b) = 0;
};
class CoCeOracle {
 public:
  virtual ~CoCeOracle() = default;
  virtual unsigned dim() const = 0;
  virtual std::unique_ptr<CoCeStream> start() const = 0;
};
using CoCePtr = std::shared_ptr<const CoCeOracle>;

// C.e. closed S: the semi-decision "S meets I".
class CeOracle {
 public:
  virtual ~CeOracle() = default;
  virtual unsigned dim() const = 0;
  virtual Verdict meets(const Ball& ball, Budget& b) const = 0;
};
using CePtr = std::shared_ptr<const CeOracle>;

// k -> Lambda_{f(k)} with rho(K, Lambda) < 2^-k. May throw BudgetExhausted.
class Approx {
 public:
  virtual ~Approx() = default;
  virtual unsigned dim() const = 0;
  virtual PointSet at(unsigned k) const = 0;
  // Upper bound on |at(k)| when cheaply known.
  virtual std::optional<std::uint64_t> size_hint(unsigned) const { return std::nullopt; }
};
using ApproxPtr = std::shared_ptr<const Approx>;

// Memoizing wrapper; the wrapped approximation is assumed deterministic.
class CachedApprox : public Approx {
 public:
  explicit CachedApprox(ApproxPtr inner) : inner_(std::move(inner)) {}
  unsigned dim() const override { return inner_->dim(); }
  PointSet at(unsigned k) const override;
  std::optional<std::uint64_t> size_hint(unsigned k) const override { return inner_->size_hint(k); }

 private:
  ApproxPtr inner_;
  mutable std::mutex mu_;
  mutable std::map<unsigned, PointSet> memo_;
};

class FunctionApprox : public Approx {
 public:
  FunctionApprox(unsigned n, std::function<PointSet(unsigned)> f) : n_(n), f_(std::move(f)) {}
  unsigned dim() const override { return n_; }
  PointSet at(unsigned k) const override { return f_(k); }

 private:
  unsigned n_;
  std::function<PointSet(unsigned)> f_;
};

// A computable-up-to witness: A <_{2^-k} at(k) and at(k) <_{2^-k} S, same k for both.
struct UpToApprox {
  std::string target;  // designation of S
  std::string piece;   // designation of A
  ApproxPtr approx;
};

// ---- trace view -------------------------------------------------------------

struct TraceLine {
  std::uint64_t budget;  // steps spent when the code was emitted
  std::string kind;      // semi | coce | ce
  Z code;
};
std::string format_trace(const std::vector<TraceLine>& lines);
std::vector<TraceLine> parse_trace(const std::string& text);

// Dovetails the semi-decision over open-set codes j: stage s tries every j < 2^s
// with a per-query budget of 2^s steps. Emission order is the order of success.
std::vector<TraceLine> semi_trace(const SemiOracle& s, std::uint64_t budget);
std::vector<TraceLine> ce_trace(const CeOracle& c, std::uint64_t budget);
std::vector<TraceLine> coce_trace(const CoCeOracle& c, std::uint64_t budget);
std::vector<Ball> coce_emissions(const CoCeOracle& c, std::uint64_t budget);

// ---- conversions ------------------------------------------------------------

CoCePtr semi_to_coce(SemiPtr s);
SemiPtr coce_to_semi(CoCePtr s, ApproxPtr k);

struct ApproxOutcome {
  enum Status { found, stalled } status;
  PointSet points;
  OpenSet cover;  // the accepted [j]
  std::uint64_t steps = 0;
};

// Search for (j, k) with K in J_j, every ball of j certified to meet K and of radius < 2^-k.
class SemiCeApprox : public Approx {
 public:
  SemiCeApprox(SemiPtr s, CePtr c, std::uint64_t budget = kDefaultBudget);
  unsigned dim() const override { return s_->dim(); }
  ApproxOutcome search(unsigned k, std::uint64_t budget) const;
  PointSet at(unsigned k) const override;

 private:
  SemiPtr s_;
  CePtr c_;
  std::uint64_t budget_;
};
std::shared_ptr<SemiCeApprox> semi_ce_to_approx(SemiPtr s, CePtr c, std::uint64_t budget = kDefaultBudget);

SemiPtr approx_to_semi(ApproxPtr k);
CePtr approx_to_ce(ApproxPtr k);

// S \ J_m as a semi-computable set.
SemiPtr subtract(SemiPtr s, const OpenSet& m);

// Union in first-seen order, duplicates dropped.
PointSet union_points(const std::vector<PointSet>& parts);

UpToApprox upto_union(const UpToApprox& u, const UpToApprox& v);
ApproxPtr glue(const std::vector<UpToApprox>& pieces);

// Points of Lambda (an approximation at margin 2^-k) all inside some ball of u at that margin.
bool points_cover(const PointSet& pts, const Q& margin, const OpenSet& u);

// Exact decision: closed interval [a,b] inside the union of open 1-d balls.
bool interval_covered(const Q& a, const Q& b, const OpenSet& u);

}  // namespace cma
