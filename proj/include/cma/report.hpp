#pragma once

#include "cma/instances.hpp"
#include "cma/reconstruction.hpp"

#include <string>
#include <vector>

namespace cma {

// Fractional digits of the decimal columns; rounding is half away from zero.
inline constexpr unsigned kDecimalDigits = 20;

struct ChartCertificate {
  std::string chart;
  OmegaTuple tuple;
  unsigned long m = 0;
  std::size_t links = 0, balls = 0, gamma = 0, lambda = 0;
  unsigned stage = 0;
  std::uint64_t steps = 0;
  std::string origin, digest;
  std::vector<ConditionResult> conditions;
};

struct ApproxReport {
  std::string instance;
  unsigned k = 0;
  Q bound;  // 2^-k
  std::uint64_t budget = 0, steps_used = 0;
  PointSet points;
  std::vector<ChartCertificate> charts;
};

ApproxReport make_report(const std::string& instance, const ReconstructionRun& run, std::uint64_t budget);

std::string tuple_str(const OmegaTuple& t);
// Header comment lines ("# ..."), then "x1,...,xn,x1_exact,...,xn_exact" and one row per point.
std::string render_csv(const ApproxReport& r);
std::string render_json(const ApproxReport& r);

struct VerifyLine {
  std::string chart;
  Verdict verdict;
  std::uint64_t steps;
};
// Re-runs check_conditions on each recorded tuple from scratch; every chart must re-accept.
std::vector<VerifyLine> verify_run(const Reconstruction& r, const ReconstructionRun& run, std::uint64_t budget);
std::string render_verify(const std::vector<VerifyLine>& lines);

// certify-chain: formal chain, fdiam bounds per link, fmesh bound and the lower boundary.
std::string certify_chain_report(const GridChain& c);

// inspect: decodings of a code n.
std::string inspect_code(const Z& n);
std::string inspect_ball(const Z& n, unsigned dim);
std::string inspect_open(const Z& n, unsigned dim);

}  // namespace cma
