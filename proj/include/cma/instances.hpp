#pragma once

#include "cma/charts.hpp"
#include "cma/levelset.hpp"
#include "cma/machine.hpp"
#include "cma/sets.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace cma {

// Closed segment [lo, hi] known to contain a point of S (lo == hi for exact points).
struct TruthSample {
  Point lo, hi;
};

struct Truth {
  // Exact decision d(p, S) <= q; empty when no closed form is known.
  std::function<bool(const Point&, const Q&)> dist_le;
  // Dense samples of S; when they are exact points every point of S lies within `slack` of one.
  std::function<std::vector<TruthSample>()> samples;
  Q slack;
  bool exact_samples = true;
};

// Some point of the sample segment lies in the open ball.
bool sample_in_ball(const TruthSample& s, const Ball& b);
// The whole closed segment lies in the open ball.
bool sample_inside_ball(const TruthSample& s, const Ball& b);

struct Instance {
  std::string name;
  unsigned ambient = 1;
  unsigned dim = 1;
  SemiPtr semi;
  CoCePtr coce;
  CePtr ce;
  // Semi oracle for the boundary; null when the boundary is empty.
  SemiPtr boundary_semi;
  bool has_boundary = false;
  std::vector<ChartWitness> atlas;
  std::string no_atlas_reason;
  Truth truth;
  ApproxPtr approx;  // analytic approximation, when one is known
  std::vector<std::string> notes;
  std::shared_ptr<const LevelSetInstance> levelset;
};

const std::vector<std::string>& builtin_instance_names();
// A built-in name, or a path to a level-set instance file.
Instance make_instance(const std::string& ref);
Instance instance_from_levelset(const LevelSetInstance& inst);

// ---- oracles shared by the instances ---------------------------------------------

// K = union of images of parameter boxes. `enclose` must return a box containing the image
// of its argument box and shrink with it; `at` is an exact point of K.
struct ParamPiece {
  Box domain;
  std::function<Box(const Box&)> enclose;
  std::function<Point(const Point&)> at;
};
SemiPtr param_semi(unsigned ambient, std::vector<ParamPiece> pieces);
// The finite set itself.
SemiPtr finite_semi(PointSet pts);
// A closed interval [a, b] in R.
SemiPtr interval_semi(Q a, Q b);

std::vector<ParamPiece> circle_pieces();
std::vector<ParamPiece> sphere_pieces();
std::vector<ParamPiece> torus_pieces();

// Circle points g(u), u on a 2^-(k+1) grid of [-1, 1], and their negatives.
ApproxPtr circle_approx();

// ---- the right-c.e. segment [0, c] -------------------------------------------

// Stage history of the halting enumeration, extended on demand and shared by the oracles.
class Bracket {
 public:
  struct Stage {
    std::uint64_t cost;  // cumulative steps to reach this stage
    Q lo, hi;
  };
  // Last stage whose cumulative cost fits in `steps`.
  Stage within(std::uint64_t steps) const;
  Stage stage(unsigned s) const;

 private:
  void extend() const;
  mutable std::mutex mu_;
  mutable HaltingEnumerator en_;
  mutable std::vector<Stage> stages_;
};

struct Adversarial {
  std::shared_ptr<Bracket> bracket;
  SemiPtr semi;
  CoCePtr coce;
  CePtr ce;
};
Adversarial make_adversarial();

struct GapReport {
  std::uint64_t budget = 0;
  unsigned stages = 0;
  Q c_lo, c_hi;
  std::size_t halted = 0, looping = 0;
  std::vector<TraceLine> semi_emissions;
  std::size_t semi_sound = 0;
  Ball inner, straddle;
  bool inner_certified = false;
  std::uint64_t inner_steps = 0;
  bool straddle_certified = false;
  std::uint64_t straddle_steps = 0;
  std::vector<Ball> coce_emissions;
  std::size_t coce_sound = 0;
  bool all_sound() const {
    return semi_sound == semi_emissions.size() && coce_sound == coce_emissions.size();
  }
};
GapReport adversarial_gap_demo(std::uint64_t budget);
std::string format_gap_report(const GapReport& r);

}  // namespace cma
