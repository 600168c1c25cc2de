#include "cma/codes.hpp"

namespace cma {

Z pair(const Z& a, const Z& b) {
  if (a < 0 || b < 0) throw PreconditionError("pair of a negative number");
  Z s = a + b;
  return s * (s + 1) / 2 + b;
}

std::pair<Z, Z> unpair(const Z& i) {
  if (i < 0) throw PreconditionError("unpair of a negative number");
  // w = floor((sqrt(8i+1)-1)/2) is the diagonal containing i.
  Z r;
  Z t = 8 * i + 1;
  mpz_sqrt(r.get_mpz_t(), t.get_mpz_t());
  Z w = (r - 1) / 2;
  Z b = i - w * (w + 1) / 2;
  return {w - b, b};
}

Q rat_pos(const Z& i) {
  auto [a, b] = unpair(i);
  Q q(a + 1, b + 1);
  q.canonicalize();
  return q;
}

Z rat_pos_index(const Q& q) {
  if (sgn(q) <= 0) throw PreconditionError("rat_pos_index needs a positive rational");
  return pair(q.get_num() - 1, q.get_den() - 1);
}

Q signed_rat(const Z& i) {
  auto [ab, c] = unpair(i);
  auto [a, b] = unpair(ab);
  Q q(a, b + 1);
  q.canonicalize();
  if (mpz_odd_p(c.get_mpz_t())) q = -q;
  return q;
}

Z signed_rat_index(const Q& q) {
  Z a = abs(q.get_num());
  Z c = sgn(q) < 0 ? 1 : 0;
  return pair(pair(a, q.get_den() - 1), c);
}

Z list_encode(const std::vector<Z>& seq) {
  if (seq.empty()) throw PreconditionError("cannot encode an empty sequence");
  Z fold = seq.back();
  for (std::size_t i = seq.size() - 1; i-- > 0;) fold = pair(seq[i], fold);
  return pair(Z(static_cast<unsigned long>(seq.size() - 1)), fold);
}

std::vector<Z> list_decode(const Z& j, std::size_t max_len) {
  auto [last, fold] = unpair(j);
  if (last >= max_len) throw PreconditionError("list longer than the decode limit");
  std::size_t len = last.get_ui() + 1;
  std::vector<Z> out;
  out.reserve(len);
  for (std::size_t i = 0; i + 1 < len; ++i) {
    auto [x, rest] = unpair(fold);
    out.push_back(x);
    fold = rest;
  }
  out.push_back(fold);
  return out;
}

Z list_last_index(const Z& j) { return tau1(j); }

Z list_entry(const Z& j, const Z& i) {
  auto [last, fold] = unpair(j);
  Z idx = i > last ? Z(0) : i;
  for (Z s = 0; s < idx; ++s) fold = tau2(fold);
  if (idx == last) return fold;
  return tau1(fold);
}

Z nu(const std::vector<Z>& v) {
  if (v.empty()) throw PreconditionError("nu of an empty index vector");
  Z c = v.back();
  for (std::size_t i = v.size() - 1; i-- > 0;) c = pair(v[i], c);
  return c;
}

std::vector<Z> nu_inverse(const Z& c, unsigned n) {
  std::vector<Z> v;
  Z rest = c;
  for (unsigned i = 0; i + 1 < n; ++i) {
    auto [a, b] = unpair(rest);
    v.push_back(a);
    rest = b;
  }
  v.push_back(rest);
  return v;
}

Z grid_side(const Z& l) { return tau2(l); }

Z grid_entry(const Z& l, unsigned n, const std::vector<Z>& v) {
  if (v.size() != n) throw PreconditionError("grid index arity mismatch");
  Z side = grid_side(l);
  for (const Z& x : v)
    if (x < 0 || x > side) throw PreconditionError("grid index outside the declared cube");
  return list_entry(tau1(l), nu(v));
}

Z grid_encode(unsigned n, unsigned long side, const std::vector<Z>& table) {
  std::size_t count = 1;
  for (unsigned i = 0; i < n; ++i) count *= side + 1;
  if (table.size() != count) throw PreconditionError("grid table size mismatch");
  std::vector<Z> idx(n, Z(0));
  Z top = 0;
  std::vector<std::pair<Z, Z>> slots;
  slots.reserve(count);
  for (std::size_t t = 0; t < count; ++t) {
    std::size_t r = t;
    for (unsigned i = n; i-- > 0;) {
      idx[i] = static_cast<unsigned long>(r % (side + 1));
      r /= side + 1;
    }
    Z p = nu(idx);
    if (p > top) top = p;
    slots.emplace_back(p, table[t]);
  }
  if (top > Z(1u << 24)) throw PreconditionError("grid too large to encode");
  std::vector<Z> list(top.get_ui() + 1, Z(0));
  for (auto& [p, val] : slots) list[p.get_ui()] = val;
  return pair(list_encode(list), Z(side));
}

}  // namespace cma
