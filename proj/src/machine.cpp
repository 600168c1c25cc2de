#include "cma/machine.hpp"

#include "cma/codes.hpp"

namespace cma {

std::vector<Instr> decode_program(const Z& i) {
  std::vector<Instr> prog;
  for (const Z& e : list_decode(i, 64)) {
    Z kind = e % 3, reg = (e / 3) % 2, target = e / 6;
    prog.push_back({static_cast<int>(kind.get_ui()), static_cast<int>(reg.get_ui()),
                    target.fits_ulong_p() ? target.get_ui() : ~std::uint64_t(0)});
  }
  return prog;
}

bool MachineRun::step() {
  if (s_.pc >= prog_.size()) return false;
  const Instr& in = prog_[s_.pc];
  switch (in.kind) {
    case 0: return false;
    case 1:
      ++s_.r[in.reg];
      s_.pc = in.target;
      break;
    default:
      if (s_.r[in.reg] > 0) {
        --s_.r[in.reg];
        ++s_.pc;
      } else {
        s_.pc = in.target;
      }
  }
  return s_.pc < prog_.size();
}

MachineRun::Status MachineRun::run(std::uint64_t steps) {
  for (std::uint64_t t = 0; t < steps && status_ == running; ++t) {
    ++taken_;
    if (!step()) {
      status_ = halted;
      break;
    }
    // Brent: compare against the state saved at the last power of two.
    ++lam_;
    if (s_ == saved_) {
      status_ = looping;
      break;
    }
    if (lam_ == power_) {
      saved_ = s_;
      power_ *= 2;
      lam_ = 0;
    }
  }
  return status_;
}

void HaltingEnumerator::advance_stage() {
  runs_.emplace_back(decode_program(Z(stage_)));
  ++stage_;
  for (unsigned i = 0; i < runs_.size(); ++i) {
    MachineRun& r = runs_[i];
    if (r.status() != MachineRun::running) continue;
    std::uint64_t before = r.steps_taken();
    if (r.run(stage_) == MachineRun::halted) {
      halted_.push_back(i);
      c_hi_ -= pow2(-static_cast<long>(i) - 2);
    }
    work_ += r.steps_taken() - before;
  }
}

Q HaltingEnumerator::c_lo() const {
  Q lo = c_hi_;
  for (unsigned i = 0; i < runs_.size(); ++i)
    if (runs_[i].status() == MachineRun::running) lo -= pow2(-static_cast<long>(i) - 2);
  // Indices not started yet.
  lo -= pow2(-static_cast<long>(stage_) - 1);
  return lo;
}

std::size_t HaltingEnumerator::looping_count() const {
  std::size_t n = 0;
  for (const MachineRun& r : runs_) n += r.status() == MachineRun::looping;
  return n;
}

}  // namespace cma
