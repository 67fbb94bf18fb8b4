#pragma once

// Brute-force counting oracle: points of X_lambda over F_{q^s}, the trace
// buckets of the character sum, Ax-Katz divisibility, unit roots of smooth
// plane cubics and the congruences tying rho_min to the counts.

#include <cstdint>
#include <optional>
#include <vector>

#include "dwork/family.hpp"
#include "dwork/hasse.hpp"
#include "dwork/margins.hpp"
#include "dwork/ring_tower.hpp"

namespace dwork {

struct CountReport {
  int s = 1;
  std::uint64_t q_s = 0;
  Integer affine_cone_count;  // #X'(F_{q^s}) in A^{n+1}, origin included
  Integer projective_count;   // #X(F_{q^s})
  std::vector<Integer> buckets;  // c_t, t in F_p: #{(x, x_{n+1}) : Tr(x_{n+1} f(x)) = t}
};

struct CountOptions {
  double budget = 1e9;  // monomial evaluations
  int threads = 1;
  bool buckets = true;
};

// lambda in internal column order, entries of `base` (zeros allowed here).
// Throws std::length_error if the enumeration exceeds the budget.
CountReport count_projective(const FamilyData& fam, const FiniteField& base,
                             const std::vector<FiniteField::Elt>& lambda, int s,
                             const CountOptions& opt = {});

// Direct enumeration of A^{n+2}(F_{q^s}) for the bucket vector; small cases only.
std::vector<Integer> brute_force_buckets(const FamilyData& fam, const FiniteField& base,
                                         const std::vector<FiniteField::Elt>& lambda, int s);

// Number of points of P^n(F_{q^k}) where f and every partial derivative vanish.
std::uint64_t singular_point_count(const FamilyData& fam, const FiniteField& base,
                                   const std::vector<FiniteField::Elt>& lambda, int k,
                                   const CountOptions& opt = {});

// Smoothness of a plane cubic fiber: a singular orbit of a plane cubic
// either contains a point over F_{q^2} or is a Frobenius-cyclic triangle of
// lines, which has no F_q-point; so F_{q^3} is searched only when N_1 = 0.
bool cubic_curve_is_smooth(const FamilyData& fam, const FiniteField& base,
                           const std::vector<FiniteField::Elt>& lambda, const Integer& N1,
                           const CountOptions& opt = {});

struct CurveUnitRoot {
  enum class Status { kOk, kSingular, kSupersingular };
  Status status = Status::kOk;
  Integer N1;
  Integer trace;  // a = q + 1 - N_1
  Integer rho;    // unit root mod p^m
  int m = 0;
};

// n = 2, d = 3 only (std::invalid_argument otherwise).
CurveUnitRoot curve_unit_root(const FamilyData& fam, const FiniteField& base,
                              const std::vector<FiniteField::Elt>& lambda, int m,
                              const CountOptions& opt = {});
// Root refinement x <- a - q/x from x = a, mod p^m; a must be a unit.
Integer refine_unit_root(const Integer& a, const Integer& q, std::uint32_t p, int m);

// q^{mu s} | #X'(F_{q^s}) for each supplied count (p-adic margins), and the
// equivalent card X = 1/(1 - q^s) mod q^{mu s}.
MarginReport ax_katz_check(const FamilyData& fam, std::uint32_t p, std::uint32_t a,
                           const std::vector<CountReport>& counts);

// Bucket identities: sum c_t = q^{s(n+2)}, c_t equal for t >= 1,
// c_0 - c_1 = q^s #X'.
MarginReport bucket_check(const FamilyData& fam, std::uint32_t p, const std::vector<CountReport>& counts);

// N_s = sum_{i<n} q^{is} + (-1)^{n-1} rho^s mod q^{(mu+1)s} for each count,
// with rho known mod p^{certified} and ord_p rho = a mu. Throws
// std::invalid_argument if the precision cannot support the largest s.
MarginReport verify_unit_root(const FamilyData& fam, std::uint32_t p, std::uint32_t a, const Integer& rho,
                              int certified, const std::vector<CountReport>& counts);

// N_1 = sum_{i<n} q^i + (-1)^{n-1} q^mu prod_i ((-1)^{mu+1} H(lambda^{p^i})) mod p q^mu,
// valid on every fiber.
MarginRow count_residue_check(const FamilyData& fam, std::uint32_t p, std::uint32_t a, std::uint32_t hasse_norm,
                               const Integer& N1);

}  // namespace dwork
