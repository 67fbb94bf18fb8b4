#pragma once

// Independent reference computations used by the tests: brute-force scans,
// closed forms and naive arithmetic that share no code path with the
// library routines they check (beyond the finite-field tables).

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "dwork/family.hpp"
#include "dwork/integer.hpp"
#include "dwork/ring_tower.hpp"

#ifndef DWORK_FIXTURES
#define DWORK_FIXTURES "fixtures"
#endif

namespace oracle {

using dwork::Integer;
using dwork::IntVec;
using dwork::Rational;

inline std::string fixture(const std::string& name) { return std::string(DWORK_FIXTURES) + "/" + name; }

inline Integer powmod(Integer b, unsigned long e, const Integer& m) {
  Integer r;
  mpz_powm_ui(r.get_mpz_t(), b.get_mpz_t(), e, m.get_mpz_t());
  return r;
}

inline Integer reduce(const Integer& x, const Integer& m) {
  Integer r = x % m;
  if (r < 0) r += m;
  return r;
}

// Teichmuller lift in Z_p: iterate x <- x^p mod p^M until it stops moving.
inline Integer teichmuller_zp(unsigned long r, std::uint32_t p, int M) {
  Integer pM;
  mpz_ui_pow_ui(pM.get_mpz_t(), p, M);
  Integer x = r, prev = -1;
  while (x != prev) {
    prev = x;
    x = powmod(x, p, pM);
  }
  return x;
}

// Lexicographically least monic irreducible of degree 2 or 3 over F_p
// (irreducible iff rootless), coefficients listed from x^{d-1} down.
inline std::vector<std::uint32_t> least_rootless(std::uint32_t p, int d) {
  std::vector<std::uint32_t> c(d, 0);  // c[0] is the x^{d-1} coefficient
  for (;;) {
    bool rootless = true;
    for (std::uint32_t x = 0; x < p && rootless; ++x) {
      std::uint64_t v = 1;
      for (int k = 0; k < d; ++k) v = (v * x + c[k]) % p;
      if (v == 0) rootless = false;
    }
    if (rootless) {
      std::vector<std::uint32_t> low_first(d + 1, 1);
      for (int k = 0; k < d; ++k) low_first[d - 1 - k] = c[k];
      return low_first;
    }
    int k = d - 1;
    while (k >= 0 && ++c[k] == p) c[k--] = 0;
    if (k < 0) return {};
  }
}

// c = gamma0^{p-1} in Z_p is the root of 1 + sum_{i>=1} c^{(p^i-1)/(p-1)}/p^i
// with ord c = 1; fixed-point iteration c <- -p (1 + sum_{i>=2} ...).
inline Integer gamma0_pm1_fixed_point(std::uint32_t p, int M) {
  const int extra = 64;
  Integer big;
  mpz_ui_pow_ui(big.get_mpz_t(), p, M + extra);
  Integer c = -Integer(p);
  for (int it = 0; it < M + 4; ++it) {
    Integer s = 1;
    Integer pi = p;  // p^i
    for (int i = 2;; ++i) {
      pi *= p;
      Integer e = (pi - 1) / (p - 1);
      if (e - i > M + 2) break;
      Integer num;
      mpz_powm(num.get_mpz_t(), c.get_mpz_t(), e.get_mpz_t(), big.get_mpz_t());
      s += num / pi;  // exact: ord num >= e >= i
    }
    c = reduce(-Integer(p) * s, big);
  }
  Integer pM;
  mpz_ui_pow_ui(pM.get_mpz_t(), p, M);
  return reduce(c, pM);
}

// Integer row echelon form of a generator list, used for lattice membership.
class Lattice {
 public:
  explicit Lattice(std::vector<std::vector<Integer>> gens) {
    if (gens.empty()) return;
    const std::size_t dim = gens[0].size();
    std::size_t row = 0;
    for (std::size_t col = 0; col < dim && row < gens.size(); ++col) {
      for (;;) {
        std::size_t piv = gens.size();
        for (std::size_t r = row; r < gens.size(); ++r)
          if (gens[r][col] != 0 && (piv == gens.size() || abs(gens[r][col]) < abs(gens[piv][col]))) piv = r;
        if (piv == gens.size()) break;
        std::swap(gens[row], gens[piv]);
        bool cleared = true;
        for (std::size_t r = row + 1; r < gens.size(); ++r) {
          if (gens[r][col] == 0) continue;
          Integer q = gens[r][col] / gens[row][col];
          for (std::size_t k = 0; k < dim; ++k) gens[r][k] -= q * gens[row][k];
          if (gens[r][col] != 0) cleared = false;
        }
        if (cleared) {
          pivots_.push_back(col);
          rows_.push_back(gens[row]);
          ++row;
          break;
        }
      }
    }
  }
  bool contains(std::vector<Integer> v) const {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const std::size_t col = pivots_[i];
      if (v[col] % rows_[i][col] != 0) return false;
      Integer q = v[col] / rows_[i][col];
      for (std::size_t k = 0; k < v.size(); ++k) v[k] -= q * rows_[i][k];
    }
    return std::all_of(v.begin(), v.end(), [](const Integer& x) { return x == 0; });
  }

 private:
  std::vector<std::vector<Integer>> rows_;
  std::vector<std::size_t> pivots_;
};

inline Lattice column_lattice(const dwork::FamilyData& fam) {
  std::vector<std::vector<Integer>> g;
  for (const auto& a : fam.A_plus) {
    std::vector<Integer> r;
    for (auto x : a) r.emplace_back(static_cast<long>(x));
    g.push_back(r);
  }
  return Lattice(g);
}

inline IntVec apply(const dwork::FamilyData& fam, const IntVec& l) {
  IntVec w(fam.n + 2, 0);
  for (int j = 0; j < fam.N; ++j)
    for (int i = 0; i < fam.n + 2; ++i) w[i] += l[j] * fam.A_plus[j][i];
  return w;
}

// Call f on every vector with entries lo[j] <= v[j] <= hi[j].
template <class F>
void box_scan(const IntVec& lo, const IntVec& hi, F&& f) {
  IntVec v = lo;
  for (;;) {
    f(v);
    std::size_t k = v.size();
    while (k > 0) {
      --k;
      if (v[k] < hi[k]) {
        ++v[k];
        break;
      }
      v[k] = lo[k];
      if (k == 0) return;
    }
    if (v.empty()) return;
  }
}

// Cone relations l with positive part <= bound by scanning a box.
inline std::vector<IntVec> cone_relations_scan(const dwork::FamilyData& fam, int bound) {
  IntVec lo(fam.N), hi(fam.N);
  for (int j = 0; j < fam.N; ++j) {
    lo[j] = j <= fam.mu ? -bound : 0;
    hi[j] = j <= fam.mu ? 0 : bound;
  }
  std::vector<IntVec> out;
  box_scan(lo, hi, [&](const IntVec& l) {
    std::int64_t pos = 0;
    for (int j = fam.mu + 1; j < fam.N; ++j) pos += l[j];
    if (pos > bound) return;
    IntVec w = apply(fam, l);
    if (std::all_of(w.begin(), w.end(), [](std::int64_t x) { return x == 0; })) out.push_back(l);
  });
  std::sort(out.begin(), out.end());
  return out;
}

// M_- points of depth <= T: negative vectors in the column lattice.
inline std::vector<IntVec> interior_scan(const dwork::FamilyData& fam, int T) {
  Lattice L = column_lattice(fam);
  std::vector<IntVec> out;
  for (int k = 1; k <= T; ++k) {
    IntVec lo(fam.n + 1, -static_cast<std::int64_t>(fam.d) * k), hi(fam.n + 1, -1);
    box_scan(lo, hi, [&](const IntVec& x) {
      std::int64_t s = std::accumulate(x.begin(), x.end(), std::int64_t{0});
      if (s != -static_cast<std::int64_t>(fam.d) * k) return;
      IntVec u = x;
      u.push_back(-k);
      std::vector<Integer> v;
      for (auto e : u) v.emplace_back(static_cast<long>(e));
      if (L.contains(v)) out.push_back(u);
    });
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Hasse polynomial by scanning [0,p-1]^N.
inline std::map<IntVec, Rational> hasse_scan(const dwork::FamilyData& fam, std::uint32_t p) {
  IntVec target(fam.n + 2, p - 1);
  target.back() = static_cast<std::int64_t>(p - 1) * (fam.mu + 1);
  std::map<IntVec, Rational> out;
  box_scan(IntVec(fam.N, 0), IntVec(fam.N, p - 1), [&](const IntVec& u) {
    if (apply(fam, u) != target) return;
    Integer den = 1;
    for (auto x : u) den *= dwork::factorial(static_cast<unsigned long>(x));
    out[u] = Rational(1) / Rational(den);
  });
  return out;
}

// Dwork family closed form (-1)^{(n+1)l} ((n+1)l)! / (l!)^{n+1}.
inline Integer dwork_coefficient(int n, int l) {
  Integer num = dwork::factorial((n + 1) * l), den = 1;
  for (int i = 0; i <= n; ++i) den *= dwork::factorial(l);
  Integer r = num / den;
  return ((n + 1) * l) % 2 ? Integer(-r) : r;
}

// Two-cubic closed form (-1)^{l1+l2} (3l1)!(3l2)! / ((l1!)^3 (l2!)^3).
inline Integer cubic_pair_coefficient(int l1, int l2) {
  Integer a = dwork::factorial(3 * l1), b = dwork::factorial(3 * l2);
  Integer f1 = dwork::factorial(l1), f2 = dwork::factorial(l2);
  Integer r = a * b / (f1 * f1 * f1 * f2 * f2 * f2);
  return (l1 + l2) % 2 ? Integer(-r) : r;
}

// Naive projective point count: evaluate every monomial by repeated
// multiplication at every normalized representative of P^n(F).
inline std::uint64_t naive_projective_count(const dwork::FamilyData& fam, const dwork::FiniteField& F,
                                            const std::vector<dwork::FiniteField::Elt>& coeffs) {
  const int n = fam.n;
  const std::uint64_t q = F.order();
  std::uint64_t count = 0;
  std::vector<dwork::FiniteField::Elt> x(n + 1);
  for (int lead = 0; lead <= n; ++lead) {
    std::uint64_t free = 1;
    for (int i = lead + 1; i <= n; ++i) free *= q;
    for (std::uint64_t code = 0; code < free; ++code) {
      std::uint64_t c = code;
      for (int i = 0; i <= n; ++i) {
        if (i < lead) x[i] = 0;
        else if (i == lead) x[i] = 1;
        else {
          x[i] = static_cast<dwork::FiniteField::Elt>(c % q);
          c /= q;
        }
      }
      dwork::FiniteField::Elt v = 0;
      for (int j = 0; j < fam.N; ++j) {
        dwork::FiniteField::Elt m = coeffs[j];
        for (int i = 0; i <= n; ++i)
          for (std::int64_t e = 0; e < fam.A[j][i]; ++e) m = F.mul(m, x[i]);
        v = F.add(v, m);
      }
      count += v == 0 ? 1 : 0;
    }
  }
  return count;
}

// Unit root of 1 - a t + q t^2 mod p^m by exhaustive search over units.
inline std::optional<Integer> unit_root_search(const Integer& a, const Integer& q, std::uint32_t p, int m) {
  Integer pm;
  mpz_ui_pow_ui(pm.get_mpz_t(), p, m);
  std::optional<Integer> found;
  for (Integer x = 1; x < pm; ++x) {
    if (x % p == 0) continue;
    if (reduce(x * x - a * x + q, pm) == 0) {
      if (found) return std::nullopt;  // not unique
      found = x;
    }
  }
  return found;
}

}  // namespace oracle
