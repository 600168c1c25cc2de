#include "cma/index.hpp"

#include <climits>

namespace cma {

BoxIndex::BoxIndex(unsigned n, int min_level) : n_(n), min_level_(min_level) {
  if (n == 0 || n > kMaxDim) throw PreconditionError("BoxIndex supports dimensions 1..4");
}

std::size_t BoxIndex::KeyHash::operator()(const Key& k) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (long v : k) {
    h ^= static_cast<std::size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

int BoxIndex::level_at_least(const Q& w) {
  return static_cast<int>(static_cast<long>(bit_length(w.get_num())) - static_cast<long>(bit_length(w.get_den())) + 1);
}

long BoxIndex::cell_of(const Q& x, int level) const {
  Z num = x.get_num(), den = x.get_den();
  if (level >= 0)
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<unsigned long>(level));
  else
    mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), static_cast<unsigned long>(-level));
  Z f;
  mpz_fdiv_q(f.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  constexpr long lim = LONG_MAX / 4;
  if (f > lim) return lim;
  if (f < -lim) return -lim;
  return f.get_si();
}

int BoxIndex::level_for(const Point& lo, const Point& hi) const {
  int level = min_level_;
  for (unsigned i = 0; i < n_; ++i) {
    Q w = hi[i] - lo[i];
    if (sgn(w) <= 0) continue;
    long l = static_cast<long>(bit_length(w.get_num())) - static_cast<long>(bit_length(w.get_den())) + 1;
    if (l > level) level = static_cast<int>(l);
  }
  return level;
}

void BoxIndex::insert(const Point& lo, const Point& hi, std::size_t id) {
  int level = level_for(lo, hi);
  Level& lv = levels_[level];
  lv.items.push_back(id);
  ++count_;
  std::array<long, kMaxDim> a{}, b{};
  for (unsigned i = 0; i < n_; ++i) {
    a[i] = cell_of(lo[i], level);
    b[i] = cell_of(hi[i], level);
  }
  Key k{};
  // Enumerate the (at most 2^n) cells of the box.
  std::array<long, kMaxDim> cur = a;
  while (true) {
    for (unsigned i = 0; i < n_; ++i) k[i] = cur[i];
    lv.cells[k].push_back(id);
    unsigned d = 0;
    while (d < n_ && cur[d] == b[d]) {
      cur[d] = a[d];
      ++d;
    }
    if (d == n_) break;
    ++cur[d];
  }
}

void BoxIndex::insert_ball(const Ball& b, std::size_t id) {
  Point lo(n_), hi(n_);
  for (unsigned i = 0; i < n_; ++i) {
    lo[i] = b.c[i] - b.r;
    hi[i] = b.c[i] + b.r;
  }
  insert(lo, hi, id);
}

void BoxIndex::insert_point(const Point& p, std::size_t id) { insert(p, p, id); }

void BoxIndex::query(const Point& lo, const Point& hi, std::vector<std::size_t>& out) const {
  out.clear();
  if (count_ == 0) return;
  // Ids are arbitrary; stamps are sized lazily by the largest id seen.
  if (++epoch_ == 0) {
    std::fill(stamp_.begin(), stamp_.end(), 0u);
    epoch_ = 1;
  }
  auto take = [&](std::size_t id) {
    if (id >= stamp_.size()) stamp_.resize(id + 1 + id / 2, 0u);
    if (stamp_[id] != epoch_) {
      stamp_[id] = epoch_;
      out.push_back(id);
    }
  };
  for (const auto& [level, lv] : levels_) {
    std::array<long, kMaxDim> a{}, b{};
    double cells = 1;
    for (unsigned i = 0; i < n_; ++i) {
      a[i] = cell_of(lo[i], level);
      b[i] = cell_of(hi[i], level);
      cells *= static_cast<double>(b[i] - a[i] + 1);
    }
    if (cells >= static_cast<double>(lv.items.size())) {
      for (std::size_t id : lv.items) take(id);
      continue;
    }
    Key k{};
    std::array<long, kMaxDim> cur = a;
    while (true) {
      for (unsigned i = 0; i < n_; ++i) k[i] = cur[i];
      auto it = lv.cells.find(k);
      if (it != lv.cells.end())
        for (std::size_t id : it->second) take(id);
      unsigned d = 0;
      while (d < n_ && cur[d] == b[d]) {
        cur[d] = a[d];
        ++d;
      }
      if (d == n_) break;
      ++cur[d];
    }
  }
}

void BoxIndex::query_ball(const Ball& b, std::vector<std::size_t>& out) const {
  Point lo(n_), hi(n_);
  for (unsigned i = 0; i < n_; ++i) {
    lo[i] = b.c[i] - b.r;
    hi[i] = b.c[i] + b.r;
  }
  query(lo, hi, out);
}

void BoxIndex::query_point(const Point& p, std::vector<std::size_t>& out) const { query(p, p, out); }

}  // namespace cma
