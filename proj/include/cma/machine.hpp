#pragma once

#include "cma/rational.hpp"

#include <cstdint>
#include <vector>

namespace cma {

// Two-register counter machines. Program i is list_decode(i); entry e has
// kind e mod 3 (0 halt, 1 inc, 2 dec-or-jump), register (e/3) mod 2 and target e/6.
// inc r: r += 1, jump to target. dec r: if r > 0 then r -= 1 and fall through, else jump.
// A jump outside the program halts. Registers start at 0.
struct Instr {
  int kind;
  int reg;
  std::uint64_t target;
};

std::vector<Instr> decode_program(const Z& i);

struct MachineState {
  std::uint64_t pc = 0;
  std::uint64_t r[2] = {0, 0};
  bool operator==(const MachineState& o) const { return pc == o.pc && r[0] == o.r[0] && r[1] == o.r[1]; }
};

class MachineRun {
 public:
  explicit MachineRun(std::vector<Instr> prog) : prog_(std::move(prog)) {}
  enum Status { running, halted, looping };
  // Runs at most `steps` more steps with Brent cycle detection on the full state.
  Status run(std::uint64_t steps);
  Status status() const { return status_; }
  std::uint64_t steps_taken() const { return taken_; }

 private:
  bool step();
  std::vector<Instr> prog_;
  MachineState s_, saved_;
  std::uint64_t power_ = 1, lam_ = 0, taken_ = 0;
  Status status_ = running;
};

// Dovetailed enumeration of W = {i : program i halts}; stage s runs programs i < s for s more steps.
class HaltingEnumerator {
 public:
  void advance_stage();
  unsigned stage() const { return stage_; }
  // c_hi = 1 - sum_{i in W_s} 2^-i-2 and c_lo = c_hi - (mass of undecided indices).
  Q c_hi() const { return c_hi_; }
  Q c_lo() const;
  const std::vector<unsigned>& halted() const { return halted_; }
  std::size_t looping_count() const;
  // Steps of machine work done so far.
  std::uint64_t work() const { return work_; }

 private:
  unsigned stage_ = 0;
  std::vector<MachineRun> runs_;
  std::vector<unsigned> halted_;
  Q c_hi_ = 1;
  std::uint64_t work_ = 0;
};

}  // namespace cma
