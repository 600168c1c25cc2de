#include "cma/instances.hpp"
#include "cma/reconstruction.hpp"
#include "cma/report.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace cma;

namespace {

constexpr int kExitBudget = 2;
constexpr int kExitPrecondition = 3;
constexpr std::uint64_t kDefaultSteps = 1000000;

std::uint64_t default_budget(std::uint64_t fallback) {
  if (const char* env = std::getenv("CMA_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return v;
    throw PreconditionError("CMA_BUDGET must be a positive integer");
  }
  return fallback;
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw PreconditionError("cannot write " + path);
  f << text;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw PreconditionError("cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Z parse_code(const std::string& s) {
  Z z;
  if (s.empty() || s[0] == '-' || z.set_str(s, 10) != 0) throw PreconditionError("not a natural number: " + s);
  return z;
}

struct ApproximateArgs {
  std::string instance, out, format = "csv";
  unsigned k = 0;
  std::uint64_t budget = 0;
  bool verify = false;
};

int cmd_approximate(const ApproximateArgs& a) {
  Instance in = make_instance(a.instance);
  if (in.atlas.empty()) throw PreconditionError(in.no_atlas_reason.empty() ? "no atlas" : in.no_atlas_reason);
  Reconstruction r = reconstruct(in.semi, in.boundary_semi, in.atlas, a.budget);
  ReconstructionRun run = run_reconstruction(r, a.k, a.budget);
  ApproxReport rep = make_report(in.name, run, a.budget);
  write_out(a.out, a.format == "json" ? render_json(rep) : render_csv(rep));
  std::cerr << "points " << rep.points.size() << " bound " << to_exact(rep.bound) << " steps " << rep.steps_used << "\n";
  if (a.verify) {
    std::vector<VerifyLine> lines = verify_run(r, run, a.budget);
    std::cerr << render_verify(lines);
    for (const VerifyLine& l : lines)
      if (l.verdict != Verdict::yes) {
        std::cerr << "error: certificate for " << l.chart << " did not re-accept\n";
        return 1;
      }
  }
  return 0;
}

int cmd_run_oracle(const std::string& ref, const std::string& kind, std::uint64_t budget, const std::string& out) {
  Instance in = make_instance(ref);
  std::vector<TraceLine> lines;
  if (kind == "semi") {
    if (!in.semi) throw PreconditionError("instance has no semi oracle");
    lines = semi_trace(*in.semi, budget);
  } else if (kind == "coce") {
    if (!in.coce) throw PreconditionError("instance has no co-c.e. oracle");
    lines = coce_trace(*in.coce, budget);
  } else {
    if (!in.ce) throw PreconditionError("instance has no c.e. oracle");
    lines = ce_trace(*in.ce, budget);
  }
  write_out(out, format_trace(lines));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified approximation of computable compact manifolds"};
  app.require_subcommand(1);

  std::uint64_t budget = 0;
  auto resolve_budget = [&](std::uint64_t fallback) {
    if (budget == 0) budget = default_budget(fallback);
  };

  ApproximateArgs ap;
  auto* approximate = app.add_subcommand("approximate", "Reconstruct a finite 2^-k approximation from an atlas");
  approximate->add_option("--instance", ap.instance, "Built-in name or level-set file")->required();
  approximate->add_option("--k", ap.k, "Precision")->required();
  approximate->add_option("--budget", budget, "Step budget (default $CMA_BUDGET or 10^8)")->check(CLI::PositiveNumber);
  approximate->add_option("--out", ap.out, "Output file (default stdout)");
  approximate->add_option("--format", ap.format)->check(CLI::IsMember({"csv", "json"}));
  approximate->add_flag("--verify", ap.verify, "Re-check the accepted tuples from scratch");

  std::string what, code;
  unsigned dim = 1;
  auto* inspect = app.add_subcommand("inspect", "Decode a natural-number code");
  inspect->add_option("what", what)->required()->check(CLI::IsMember({"code", "ball", "open"}));
  inspect->add_option("n", code)->required();
  inspect->add_option("--dim", dim, "Ambient dimension for ball/open")->check(CLI::Range(1u, 4u));

  std::string chain_file;
  auto* certify = app.add_subcommand("certify-chain", "Check a grid chain file");
  certify->add_option("file", chain_file)->required();

  std::string oracle_ref, kind = "semi", oracle_out;
  auto* oracle = app.add_subcommand("run-oracle", "Dovetail an oracle and print its trace");
  oracle->add_option("--instance", oracle_ref)->required();
  oracle->add_option("--kind", kind)->check(CLI::IsMember({"semi", "coce", "ce"}));
  oracle->add_option("--budget", budget, "Step budget (default $CMA_BUDGET or 10^4)")->check(CLI::PositiveNumber);
  oracle->add_option("--out", oracle_out);

  std::string demo_name, demo_out;
  std::uint64_t demo_budget = 100000;
  auto* demo = app.add_subcommand("demo", "Run a demonstration");
  demo->add_option("name", demo_name)->required()->check(CLI::IsMember({"adversarial"}));
  demo->add_option("--budget", demo_budget)->check(CLI::PositiveNumber);
  demo->add_option("--out", demo_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitPrecondition;
  }

  try {
    if (*approximate) {
      resolve_budget(kDefaultSteps);
      ap.budget = budget;
      return cmd_approximate(ap);
    }
    if (*inspect) {
      Z n = parse_code(code);
      std::cout << (what == "code" ? inspect_code(n) : what == "ball" ? inspect_ball(n, dim) : inspect_open(n, dim));
      return 0;
    }
    if (*certify) {
      std::cout << certify_chain_report(parse_chain(read_file(chain_file)));
      return 0;
    }
    if (*oracle) {
      resolve_budget(kDefaultSteps);
      return cmd_run_oracle(oracle_ref, kind, budget, oracle_out);
    }
    if (*demo) {
      write_out(demo_out, format_gap_report(adversarial_gap_demo(demo_budget)));
      return 0;
    }
  } catch (const BudgetExhausted& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return kExitBudget;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPrecondition;
  }
  return 0;
}
