#include "cma/rational.hpp"

#include <cctype>

namespace cma {

Q pow2(long e) {
  Q r;
  if (e >= 0) {
    Z n;
    mpz_ui_pow_ui(n.get_mpz_t(), 2, static_cast<unsigned long>(e));
    r = Q(n);
  } else {
    Z d;
    mpz_ui_pow_ui(d.get_mpz_t(), 2, static_cast<unsigned long>(-e));
    r = Q(Z(1), d);
  }
  return r;
}

Z floor_q(const Q& x) {
  Z r;
  mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return r;
}

Z ceil_q(const Q& x) {
  Z r;
  mpz_cdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return r;
}

namespace {

Z isqrt(const Z& n) {
  Z r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

Q scaled(const Z& n, unsigned bits) {
  Q r(n, Z(1));
  mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), bits);
  return r;
}

Q times4pow(const Q& x, unsigned bits) {
  Q y = x;
  mpq_mul_2exp(y.get_mpq_t(), y.get_mpq_t(), 2 * bits);
  return y;
}

}  // namespace

Q sqrt_lo(const Q& x, unsigned k) {
  if (sgn(x) < 0) throw PreconditionError("sqrt of a negative rational");
  unsigned b = k + 2;
  Z t = isqrt(floor_q(times4pow(x, b)));
  return scaled(t, b);
}

Q sqrt_hi(const Q& x, unsigned k) {
  if (sgn(x) < 0) throw PreconditionError("sqrt of a negative rational");
  unsigned b = k + 2;
  Z c = ceil_q(times4pow(x, b));
  Z t = isqrt(c);
  if (t * t < c) t += 1;
  return scaled(t, b);
}

Q round_down(const Q& x, unsigned bits) {
  Q y = x;
  mpq_mul_2exp(y.get_mpq_t(), y.get_mpq_t(), bits);
  return scaled(floor_q(y), bits);
}

Q round_up(const Q& x, unsigned bits) {
  Q y = x;
  mpq_mul_2exp(y.get_mpq_t(), y.get_mpq_t(), bits);
  return scaled(ceil_q(y), bits);
}

Q dyadic_below(const Q& x, unsigned bits) {
  Q y = x;
  mpq_mul_2exp(y.get_mpq_t(), y.get_mpq_t(), bits);
  return scaled(ceil_q(y) - 1, bits);
}

std::string to_exact(const Q& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

std::string to_decimal(const Q& x, unsigned digits) {
  Z scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
  Q a = abs(x) * scale + Q(1, 2);
  Z n = floor_q(a);
  std::string s = n.get_str();
  if (s.size() <= digits) s.insert(0, digits + 1 - s.size(), '0');
  std::string out;
  if (sgn(x) < 0 && n != 0) out = "-";
  out += s.substr(0, s.size() - digits);
  if (digits > 0) out += "." + s.substr(s.size() - digits);
  return out;
}

Q parse_rational(const std::string& s) {
  if (s.empty()) throw PreconditionError("empty rational literal");
  auto dot = s.find('.');
  if (dot != std::string::npos) {
    std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
    bool neg = !ip.empty() && ip[0] == '-';
    if (neg || (!ip.empty() && ip[0] == '+')) ip = ip.substr(1);
    if (ip.empty()) ip = "0";
    for (char c : ip + fp)
      if (!std::isdigit(static_cast<unsigned char>(c))) throw PreconditionError("bad rational literal: " + s);
    Z den;
    mpz_ui_pow_ui(den.get_mpz_t(), 10, fp.size());
    Q r(Z(ip + fp, 10), den);
    r.canonicalize();
    return neg ? Q(-r) : r;
  }
  Q r;
  std::string t = s[0] == '+' ? s.substr(1) : s;
  if (r.set_str(t, 10) != 0 || r.get_den() == 0) throw PreconditionError("bad rational literal: " + s);
  r.canonicalize();
  return r;
}

std::size_t bit_length(const Z& x) {
  if (x == 0) return 0;
  return mpz_sizeinbase(x.get_mpz_t(), 2);
}

}  // namespace cma
