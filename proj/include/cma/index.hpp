#pragma once

#include "cma/space.hpp"

#include <array>
#include <cstddef>
#include <map>
#include <unordered_map>
#include <vector>

namespace cma {

// Multi-level uniform hash of closed boxes. A query returns every stored box that
// meets the closed query box, plus possibly some that do not; callers decide exactly.
class BoxIndex {
 public:
  // Boxes smaller than 2^min_level share cells of side 2^min_level.
  explicit BoxIndex(unsigned n, int min_level = -64);

  void insert(const Point& lo, const Point& hi, std::size_t id);
  void insert_ball(const Ball& b, std::size_t id);
  void insert_point(const Point& p, std::size_t id);

  void query(const Point& lo, const Point& hi, std::vector<std::size_t>& out) const;
  void query_ball(const Ball& b, std::vector<std::size_t>& out) const;
  void query_point(const Point& p, std::vector<std::size_t>& out) const;

  std::size_t size() const { return count_; }

  static constexpr unsigned kMaxDim = 4;
  // Smallest level l with 2^l >= w, for w > 0; a good min_level for point sets queried at radius w.
  static int level_at_least(const Q& w);

 private:
  using Key = std::array<long, kMaxDim>;
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  struct Level {
    std::unordered_map<Key, std::vector<std::size_t>, KeyHash> cells;
    std::vector<std::size_t> items;
  };

  long cell_of(const Q& x, int level) const;
  int level_for(const Point& lo, const Point& hi) const;

  unsigned n_;
  int min_level_;
  std::size_t count_ = 0;
  std::map<int, Level> levels_;
  mutable std::vector<unsigned> stamp_;
  mutable unsigned epoch_ = 0;
};

}  // namespace cma
