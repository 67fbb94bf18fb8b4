#include "dwork/integer.hpp"

#include <stdexcept>

namespace dwork {

int valuation(const Integer& x, std::uint32_t p) {
  if (x == 0) return kInfiniteValuation;
  Integer rest;
  Integer pp = p;
  return static_cast<int>(mpz_remove(rest.get_mpz_t(), x.get_mpz_t(), pp.get_mpz_t()));
}

int valuation(const Rational& x, std::uint32_t p) {
  if (x == 0) return kInfiniteValuation;
  return valuation(Integer(x.get_num()), p) - valuation(Integer(x.get_den()), p);
}

Integer ipow(const Integer& base, unsigned long e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

Integer ipow(std::uint32_t base, unsigned long e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), base, e);
  return r;
}

Integer mod(const Integer& x, const Integer& m) {
  Integer r;
  mpz_mod(r.get_mpz_t(), x.get_mpz_t(), m.get_mpz_t());
  return r;
}

Integer rational_mod(const Rational& x, std::uint32_t p, const Integer& pM) {
  Integer den = x.get_den();
  if (mpz_divisible_ui_p(den.get_mpz_t(), p) != 0)
    throw std::domain_error("rational_mod: denominator divisible by p");
  Integer inv;
  if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), pM.get_mpz_t()) == 0)
    throw std::domain_error("rational_mod: denominator not invertible");
  return mod(Integer(x.get_num()) * inv, pM);
}

Integer factorial(unsigned long k) {
  Integer r;
  mpz_fac_ui(r.get_mpz_t(), k);
  return r;
}

Integer binomial(unsigned long n, unsigned long k) {
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

int factorial_valuation(std::uint64_t k, std::uint32_t p) {
  int v = 0;
  while (k > 0) {
    k /= p;
    v += static_cast<int>(k);
  }
  return v;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::string to_string(const Integer& x) { return x.get_str(); }

}  // namespace dwork
