#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <vector>

namespace dwork {

using Integer = mpz_class;
using Rational = mpq_class;

using IntVec = std::vector<std::int64_t>;

inline constexpr int kInfiniteValuation = 1 << 30;

// p-adic valuation of x; kInfiniteValuation for x == 0.
int valuation(const Integer& x, std::uint32_t p);
int valuation(const Rational& x, std::uint32_t p);

Integer ipow(const Integer& base, unsigned long e);
Integer ipow(std::uint32_t base, unsigned long e);

// Representative of x in [0, m).
Integer mod(const Integer& x, const Integer& m);

// Image of a p-integral rational in Z/p^M; throws if the denominator is divisible by p.
Integer rational_mod(const Rational& x, std::uint32_t p, const Integer& pM);

Integer factorial(unsigned long k);
Integer binomial(unsigned long n, unsigned long k);

// v_p(k!) by Legendre's formula.
int factorial_valuation(std::uint64_t k, std::uint32_t p);

bool is_prime(std::uint64_t n);

std::string to_string(const Integer& x);

}  // namespace dwork
