#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "dwork/point_count.hpp"
#include "oracles.hpp"

using namespace dwork;

namespace {

FamilyData load(const char* f) { return load_family_file(oracle::fixture(f)); }

using Fiber = std::vector<FiniteField::Elt>;

void for_each_fiber(const FiniteField& F, int N, const std::function<void(const Fiber&)>& f) {
  Fiber l(N, 1);
  for (;;) {
    f(l);
    int k = N - 1;
    while (k >= 0 && ++l[k] == F.order()) l[k--] = 1;
    if (k < 0) return;
  }
}

std::vector<Fiber> random_fibers(const FiniteField& F, int N, int count, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<FiniteField::Elt> d(1, F.order() - 1);
  std::vector<Fiber> out(count, Fiber(N));
  for (auto& l : out)
    for (auto& x : l) x = d(rng);
  return out;
}

Fiber embed(const std::vector<FiniteField::Elt>& emb, const Fiber& l) {
  Fiber r;
  for (auto x : l) r.push_back(emb[x]);
  return r;
}

}  // namespace

TEST(Count, HesseOverF2AllOnes) {
  FamilyData f = load("hesse.json");
  FiniteField F(2, 1);
  auto c = count_projective(f, F, {1, 1, 1, 1}, 1);
  EXPECT_EQ(c.projective_count, 4);
  EXPECT_EQ(c.q_s, 2u);
  EXPECT_EQ(c.affine_cone_count, 1 + (2 - 1) * 4);
}

TEST(Count, MatchesNaiveEnumeration) {
  for (auto [file, p, a] : {std::tuple{"hesse.json", 5u, 1u}, std::tuple{"hesse.json", 2u, 2u},
                            std::tuple{"cubic_pair.json", 2u, 1u}}) {
    FamilyData f = load(file);
    FiniteField F(p, a);
    for_each_fiber(F, f.N, [&](const Fiber& l) {
      auto c = count_projective(f, F, l, 1);
      ASSERT_EQ(c.projective_count, oracle::naive_projective_count(f, F, l));
      ASSERT_EQ(c.affine_cone_count, 1 + (c.q_s - 1) * c.projective_count);
    });
  }
  FamilyData c = load("cubic_pair.json");
  FiniteField F3(3, 1);
  for (const auto& l : random_fibers(F3, c.N, 6, 1))
    EXPECT_EQ(count_projective(c, F3, l, 1).projective_count, oracle::naive_projective_count(c, F3, l));
}

TEST(Count, ExtensionCountsViaEmbedding) {
  for (auto [file, p, a] : {std::tuple{"hesse.json", 3u, 1u}, std::tuple{"hesse.json", 2u, 2u},
                            std::tuple{"cubic_pair.json", 2u, 1u}}) {
    FamilyData f = load(file);
    FiniteField F(p, a), F2(p, 2 * a);
    auto emb = field_embedding(F, F2);
    for (const auto& l : random_fibers(F, f.N, 4, p + a)) {
      auto c = count_projective(f, F, l, 2);
      EXPECT_EQ(c.s, 2);
      EXPECT_EQ(c.q_s, F2.order());
      EXPECT_EQ(c.projective_count, oracle::naive_projective_count(f, F2, embed(emb, l)));
    }
  }
}

TEST(Buckets, MatchBruteForceAndIdentities) {
  for (auto [file, p, a, s] : {std::tuple{"hesse.json", 3u, 1u, 1}, std::tuple{"hesse.json", 5u, 1u, 1},
                               std::tuple{"hesse.json", 3u, 1u, 2}, std::tuple{"hesse.json", 2u, 2u, 1}}) {
    FamilyData f = load(file);
    FiniteField F(p, a);
    for (const auto& l : random_fibers(F, f.N, 3, 11 * p + s)) {
      auto c = count_projective(f, F, l, s);
      ASSERT_EQ(c.buckets.size(), p);
      EXPECT_EQ(c.buckets, brute_force_buckets(f, F, l, s));
      EXPECT_TRUE(bucket_check(f, p, {c}).all_passed());
      EXPECT_EQ(c.buckets[0] - c.buckets[1], Integer(static_cast<unsigned long>(c.q_s)) * c.affine_cone_count);
    }
  }
}

TEST(AxKatz, CubicPairAndHesse) {
  FamilyData c = load("cubic_pair.json");
  FiniteField F3(3, 1);
  for (const auto& l : random_fibers(F3, c.N, 8, 5)) {
    auto r = count_projective(c, F3, l, 1);
    EXPECT_EQ(r.affine_cone_count % 3, 0);  // q^mu with mu = 1
    EXPECT_TRUE(ax_katz_check(c, 3, 1, {r}).all_passed());
    EXPECT_TRUE(bucket_check(c, 3, {r}).all_passed());
  }
  // mu = 0 imposes nothing, but the check still has one row per count
  FamilyData h = load("hesse.json");
  FiniteField F5(5, 1);
  auto r = count_projective(h, F5, {1, 2, 3, 4}, 1);
  auto rep = ax_katz_check(h, 5, 1, {r});
  EXPECT_TRUE(rep.all_passed());
  EXPECT_FALSE(rep.rows.empty());
}

TEST(AxKatz, DetectsAWrongCount) {
  FamilyData c = load("cubic_pair.json");
  FiniteField F3(3, 1);
  auto r = count_projective(c, F3, Fiber(c.N, 1), 1);
  r.affine_cone_count += 1;
  EXPECT_FALSE(ax_katz_check(c, 3, 1, {r}).all_passed());
}

TEST(Smoothness, RuleMatchesSingularPointSearch) {
  FamilyData f = load("hesse.json");
  for (auto [p, a] : {std::pair{5u, 1u}, std::pair{2u, 2u}, std::pair{3u, 1u}}) {
    FiniteField F(p, a);
    int singular = 0;
    for_each_fiber(F, f.N, [&](const Fiber& l) {
      Integer N1 = count_projective(f, F, l, 1).projective_count;
      bool direct = singular_point_count(f, F, l, 1) == 0 && singular_point_count(f, F, l, 2) == 0 &&
                    singular_point_count(f, F, l, 3) == 0;
      ASSERT_EQ(cubic_curve_is_smooth(f, F, l, N1), direct) << format_vector(IntVec(l.begin(), l.end()));
      singular += direct ? 0 : 1;
    });
    if (p != 3) EXPECT_GT(singular, 0) << p << "^" << a;
  }
}

TEST(Smoothness, SingularExamples) {
  FamilyData f = load("hesse.json");
  FiniteField F7(7, 1), F2(2, 1);
  EXPECT_FALSE(cubic_curve_is_smooth(f, F7, {1, 1, 1, 1}, count_projective(f, F7, {1, 1, 1, 1}, 1).projective_count));
  EXPECT_GT(singular_point_count(f, F7, {1, 1, 1, 1}, 1), 0u);
  auto cu = curve_unit_root(f, F2, {1, 1, 1, 1}, 3);
  EXPECT_EQ(cu.status, CurveUnitRoot::Status::kSingular);
  EXPECT_EQ(cu.N1, 4);
  EXPECT_THROW(curve_unit_root(load("cubic_pair.json"), F2, Fiber(8, 1), 2), std::invalid_argument);
}

TEST(CurveUnitRoot, MatchesExhaustiveSearch) {
  FamilyData f = load("hesse.json");
  for (auto [p, a, m] : {std::tuple{5u, 1u, 3}, std::tuple{7u, 1u, 3}, std::tuple{3u, 2u, 4}, std::tuple{2u, 2u, 5}}) {
    FiniteField F(p, a);
    const Integer q = static_cast<unsigned long>(F.order());
    int ordinary = 0;
    for (const auto& l : random_fibers(F, f.N, 30, p * 31 + a)) {
      auto cu = curve_unit_root(f, F, l, m);
      EXPECT_EQ(cu.trace, q + 1 - cu.N1);
      if (cu.status == CurveUnitRoot::Status::kSupersingular) {
        EXPECT_EQ(cu.trace % p, 0);
        continue;
      }
      if (cu.status != CurveUnitRoot::Status::kOk) continue;
      ++ordinary;
      auto expect = oracle::unit_root_search(cu.trace, q, p, m);
      ASSERT_TRUE(expect.has_value());
      EXPECT_EQ(cu.rho, *expect);
      EXPECT_EQ(refine_unit_root(cu.trace, q, p, m), *expect);
      // N_2 from the Frobenius eigenvalues
      auto c2 = count_projective(f, F, l, 2);
      EXPECT_EQ(c2.projective_count, q * q + 1 - (cu.trace * cu.trace - 2 * q));
    }
    EXPECT_GT(ordinary, 0);
  }
}

TEST(VerifyUnitRoot, TrueRootPassesPerturbedRootFails) {
  FamilyData f = load("hesse.json");
  for (auto [p, a] : {std::pair{5u, 1u}, std::pair{3u, 2u}}) {
    FiniteField F(p, a);
    const Integer q = static_cast<unsigned long>(F.order());
    const int m = 2 * static_cast<int>(a);
    int checked = 0;
    for (const auto& l : random_fibers(F, f.N, 20, 3 * p + a)) {
      auto cu = curve_unit_root(f, F, l, m);
      if (cu.status != CurveUnitRoot::Status::kOk) continue;
      ++checked;
      std::vector<CountReport> counts{count_projective(f, F, l, 1), count_projective(f, F, l, 2)};
      EXPECT_TRUE(verify_unit_root(f, p, a, cu.rho, m, counts).all_passed());
      // q^{mu+1}/p lies just below the required modulus q^{mu+1}
      Integer bad = cu.rho + ipow(q, f.mu + 1) / p;
      auto rep = verify_unit_root(f, p, a, bad, m, {counts[0]});
      EXPECT_FALSE(rep.all_passed());
      EXPECT_EQ(rep.rows[0].margin, rep.rows[0].required - 1);
      EXPECT_THROW(verify_unit_root(f, p, a, cu.rho, static_cast<int>(a) * (f.mu + 1) - 1, {counts[0]}), std::invalid_argument);
    }
    EXPECT_GT(checked, 0);
  }
}

TEST(CountResidue, HoldsOnEveryFiber) {
  for (auto [file, p, a] : {std::tuple{"hesse.json", 5u, 1u}, std::tuple{"hesse.json", 3u, 2u},
                            std::tuple{"cubic_pair.json", 2u, 1u}}) {
    FamilyData f = load(file);
    FiniteField F(p, a);
    auto H = hasse_polynomial(f, p);
    int zero_norm = 0;
    for_each_fiber(F, f.N, [&](const Fiber& l) {
      auto c = count_projective(f, F, l, 1);
      std::uint32_t hn = hasse_norm(H, F, l);
      zero_norm += hn == 0;
      auto row = count_residue_check(f, p, a, hn, c.projective_count);
      ASSERT_TRUE(row.passed()) << format_vector(IntVec(l.begin(), l.end()));
      ASSERT_EQ(row.required, static_cast<int>(a) * f.mu + 1);
      // a wrong norm is caught
      ASSERT_FALSE(count_residue_check(f, p, a, (hn + 1) % p, c.projective_count).passed());
    });
    if (p == 5) EXPECT_EQ(zero_norm, 64);
  }
}

TEST(Count, BudgetIsEnforced) {
  FamilyData c = load("cubic_pair.json");
  FiniteField F3(3, 1);
  CountOptions opt;
  opt.budget = 1000;
  EXPECT_THROW(count_projective(c, F3, Fiber(c.N, 1), 1, opt), std::length_error);
}

TEST(Count, ThreadCountDoesNotChangeResult) {
  FamilyData f = load("hesse.json");
  FiniteField F(3, 2);
  CountOptions one, four;
  four.threads = 4;
  for (const auto& l : random_fibers(F, f.N, 3, 9)) {
    auto a = count_projective(f, F, l, 2, one), b = count_projective(f, F, l, 2, four);
    EXPECT_EQ(a.projective_count, b.projective_count);
    EXPECT_EQ(a.buckets, b.buckets);
  }
}
