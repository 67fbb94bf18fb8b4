#include <gtest/gtest.h>

#include <functional>
#include <tuple>

#include "dwork/hasse.hpp"
#include "oracles.hpp"

using namespace dwork;

namespace {

FamilyData load(const char* f) { return load_family_file(oracle::fixture(f)); }

// H-bar(lambda) from the scanned term list, by direct evaluation.
FiniteField::Elt naive_residue(const std::map<IntVec, Rational>& terms, const FiniteField& F,
                               const std::vector<FiniteField::Elt>& lam) {
  FiniteField::Elt s = 0;
  const std::uint32_t p = F.p();
  for (const auto& [u, c] : terms) {
    Integer cm = rational_mod(c, p, Integer(p));
    FiniteField::Elt v = F.from_int(cm.get_si());
    for (std::size_t j = 0; j < u.size(); ++j) v = F.mul(v, F.pow(lam[j], u[j]));
    s = F.add(s, v);
  }
  return s;
}

void for_each_fiber(const FiniteField& F, int N, const std::function<void(const std::vector<FiniteField::Elt>&)>& f) {
  std::vector<FiniteField::Elt> l(N, 1);
  for (;;) {
    f(l);
    int k = N - 1;
    while (k >= 0 && ++l[k] == F.order()) l[k--] = 1;
    if (k < 0) return;
  }
}

}  // namespace

TEST(Hasse, HesseSmallPrimes) {
  FamilyData f = load("hesse.json");
  auto H2 = hasse_polynomial(f, 2);
  ASSERT_EQ(H2.terms.size(), 1u);
  EXPECT_EQ(H2.terms[0].u, (IntVec{1, 0, 0, 0}));
  EXPECT_EQ(H2.terms[0].coeff, 1);
  auto H3 = hasse_polynomial(f, 3);
  ASSERT_EQ(H3.terms.size(), 1u);
  EXPECT_EQ(H3.terms[0].u, (IntVec{2, 0, 0, 0}));
  EXPECT_EQ(H3.terms[0].coeff, Rational(1, 2));
  EXPECT_EQ(H3.terms[0].coeff_mod_p, 2u);
}

TEST(Hasse, MatchesExhaustiveScan) {
  for (auto [file, primes] : {std::pair{"hesse.json", std::vector<std::uint32_t>{2, 3, 5, 7, 11, 13}},
                              std::pair{"cubic_pair.json", std::vector<std::uint32_t>{2, 3, 5}},
                              std::pair{"dwork_quintic.json", std::vector<std::uint32_t>{2, 3, 5, 7}}}) {
    FamilyData f = load(file);
    for (auto p : primes) {
      auto H = hasse_polynomial(f, p);
      auto scan = oracle::hasse_scan(f, p);
      std::map<IntVec, Rational> got;
      for (const auto& t : H.terms) {
        got[t.u] = t.coeff;
        EXPECT_EQ(Integer(t.coeff_mod_p), rational_mod(t.coeff, p, Integer(p)));
      }
      EXPECT_EQ(got, scan) << file << " p=" << p;
    }
  }
}

TEST(Hasse, DistinguishedMonomialCoefficient) {
  for (const char* file : {"hesse.json", "cubic_pair.json", "dwork_quintic.json"}) {
    FamilyData f = load(file);
    for (std::uint32_t p : {2u, 3u, 5u, 7u}) {
      auto H = hasse_polynomial(f, p);
      IntVec u(f.N, 0);
      for (int j = 0; j <= f.mu; ++j) u[j] = p - 1;
      Integer fp = factorial(p - 1), den = 1;
      for (int j = 0; j <= f.mu; ++j) den *= fp;
      bool found = false;
      for (const auto& t : H.terms)
        if (t.u == u) {
          found = true;
          EXPECT_EQ(t.coeff, Rational(1) / Rational(den));
        }
      EXPECT_TRUE(found) << file << " p=" << p;
    }
  }
}

TEST(HasseResidue, Examples) {
  FamilyData f = load("hesse.json");
  FiniteField F2(2, 1);
  auto r = hasse_residue(hasse_polynomial(f, 2), F2, {1, 1, 1, 1});
  EXPECT_EQ(r.value, 1u);
  EXPECT_TRUE(r.in_domain);
  FiniteField F3(3, 1);
  auto H3 = hasse_polynomial(f, 3);
  for_each_fiber(F3, 4, [&](const auto& l) { EXPECT_TRUE(hasse_residue(H3, F3, l).in_domain); });
  EXPECT_THROW(hasse_residue(H3, F3, {1, 0, 1, 1}), std::invalid_argument);
}

TEST(HasseResidue, MatchesNaiveEvaluationAndFrobenius) {
  for (auto [file, p, a] : {std::tuple{"hesse.json", 5u, 1u}, std::tuple{"hesse.json", 7u, 1u},
                            std::tuple{"hesse.json", 3u, 2u}, std::tuple{"hesse.json", 2u, 3u},
                            std::tuple{"cubic_pair.json", 3u, 1u}, std::tuple{"cubic_pair.json", 2u, 2u}}) {
    FamilyData f = load(file);
    FiniteField F(p, a);
    auto H = hasse_polynomial(f, p);
    auto scan = oracle::hasse_scan(f, p);
    for_each_fiber(F, f.N, [&](const std::vector<FiniteField::Elt>& l) {
      auto r = hasse_residue(H, F, l);
      ASSERT_EQ(r.value, naive_residue(scan, F, l));
      std::vector<FiniteField::Elt> lp(l.size());
      for (std::size_t j = 0; j < l.size(); ++j) lp[j] = F.frobenius(l[j]);
      ASSERT_EQ(hasse_residue(H, F, lp).value, F.frobenius(r.value));
      // the norm lies in F_p and vanishes exactly off the domain
      FiniteField::Elt norm = 1, x = r.value;
      for (std::uint32_t i = 0; i < a; ++i) {
        norm = F.mul(norm, x);
        x = F.frobenius(x);
      }
      std::uint32_t n = hasse_norm(H, F, l);
      ASSERT_LT(n, p);
      ASSERT_EQ(F.from_int(n), norm);
      ASSERT_EQ(n != 0, r.in_domain);
    });
  }
}
