#pragma once

#include "cma/chains.hpp"
#include "cma/charts.hpp"
#include "cma/sets.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace cma {

struct Anchors {
  // a[i] covers f(A_i) (x_i = -2 face), b[i] covers f(B_i) (x_i = 2 face).
  // In the half case a[n-1] is unused and left empty.
  std::vector<OpenSet> a, b;
  // Covers f of the core cube; its first ball is centred near f(0).
  OpenSet x;
  Q gamma;
  // Lower bounds on the distances of the separated pairs, in the order a_1, b_1, ..., core.
  std::vector<Q> separations;
};
Anchors derive_anchors(const ChartWitness& c);

struct OmegaTuple {
  unsigned k = 0;  // internal precision: links have fdiam < 2^-k
  long e = 0, h = 0;
  std::optional<long> u;
};

// Exact verdicts of the structural conditions, kept across dovetail stages.
struct StructuralVerdicts {
  std::optional<Verdict> formal, adis, bdis, bn, xin, xlast, mesh;
};

struct Candidate {
  OmegaTuple t;
  GridChain chain;  // l, held structurally
  unsigned long m = 0;
  std::string origin;
  Q delta_min, delta_max;
  // Filled by check_conditions; the steps are charged on every call regardless.
  std::shared_ptr<StructuralVerdicts> cache = std::make_shared<StructuralVerdicts>();
};

// The constructive candidate for precision k (the tuple's k, i.e. already shifted).
Candidate synth_candidate(unsigned k, const ChartWitness& c, const Anchors& a);
// Exhaustive branch: c -> (l, e, h[, u]) by nu-inverse; nullopt when l does not decode
// to an n-dimensional chain of manageable size.
std::optional<Candidate> enumerated_candidate(const Z& code, unsigned k, unsigned n, bool half);

struct ConditionResult {
  std::string name;
  Verdict verdict;
};
struct CheckReport {
  Verdict verdict = Verdict::unknown;
  std::vector<ConditionResult> conditions;
};

// Conditions (1)-(6), or (1)-(9) when `t_prime` is given (boundary chart).
CheckReport check_conditions(const Candidate& cand, const SemiOracle& s_prime, const SemiOracle* t_prime,
                             const Anchors& a, Budget& b);

// Gamma: interior e <= v_i <= h for all i; boundary v_n <= u and e <= v_i <= h for i < n.
std::vector<Index> gamma_indices(const Candidate& cand);
// First-ball centres of the Gamma links, deduplicated.
PointSet gamma_points(const Candidate& cand);

struct LocalStep {
  std::string chart;
  unsigned k = 0;  // requested k; the tuple uses k + 1
  Candidate cand;
  CheckReport report;
  std::size_t gamma_size = 0;
  std::size_t balls = 0;
  PointSet lambda;
  unsigned stage = 0;
  std::uint64_t steps = 0;
};

class LocalApprox : public Approx {
 public:
  LocalApprox(SemiPtr s, ChartWitness chart, SemiPtr boundary, std::uint64_t budget);
  unsigned dim() const override { return chart_.ambient; }
  PointSet at(unsigned k) const override;
  // Runs (or recalls) the search for k, charging `b`; throws BudgetExhausted.
  const LocalStep& step(unsigned k, Budget& b) const;
  const LocalStep& step(unsigned k) const;
  const Anchors& anchors() const;
  const ChartWitness& chart() const { return chart_; }
  const SemiOracle& s_prime() const { return *s_prime_; }
  const SemiOracle* t_prime() const { return t_prime_.get(); }

 private:
  ChartWitness chart_;
  SemiPtr s_prime_, t_prime_;
  std::uint64_t budget_;
  mutable std::mutex mu_;
  mutable std::optional<Anchors> anchors_;
  mutable std::map<unsigned, std::unique_ptr<LocalStep>> steps_;
};

// S' = S \ J_m0, T' = dS \ J_m0; S' cap J_x' <_{2^-k} at(k) and at(k) <_{2^-k} S.
std::shared_ptr<LocalApprox> local_upto_approx(SemiPtr s, const ChartWitness& chart, SemiPtr boundary,
                                               std::uint64_t budget = kDefaultBudget);
UpToApprox local_upto(SemiPtr s, const ChartWitness& chart, SemiPtr boundary, std::uint64_t budget = kDefaultBudget);

struct Reconstruction {
  std::vector<std::shared_ptr<LocalApprox>> locals;
  ApproxPtr glued;
};
// Charts flagged `half` take the boundary oracle; the J_x' neighbourhoods must cover S.
Reconstruction reconstruct(SemiPtr s, SemiPtr boundary, const std::vector<ChartWitness>& atlas,
                           std::uint64_t budget = kDefaultBudget);

struct ReconstructionRun {
  unsigned k = 0;
  PointSet points;
  std::vector<const LocalStep*> steps;
  std::uint64_t steps_used = 0;
};
// One budget shared by all charts for this k.
ReconstructionRun run_reconstruction(const Reconstruction& r, unsigned k, std::uint64_t budget);

// Deterministic 64-bit digest of a chain's balls, for certificates.
std::string chain_digest(const GridChain& c);

}  // namespace cma
