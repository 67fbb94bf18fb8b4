#pragma once

#include <cstdint>
#include <vector>

#include "dwork/family.hpp"
#include "dwork/margins.hpp"
#include "dwork/ring_tower.hpp"

namespace dwork {

struct HasseTerm {
  IntVec u;                    // 0 <= u_j <= p-1, internal column order
  Rational coeff;              // 1 / prod u_j!
  std::uint32_t coeff_mod_p;   // reduction of coeff
};

struct HassePolynomial {
  std::uint32_t p = 0;
  std::vector<HasseTerm> terms;  // sorted by u
  bool empty() const { return terms.empty(); }
};

// Terms u in [0,p-1]^N with sum_j u_j a_j^+ = (p-1)(1,...,1,mu+1), found by
// meet-in-the-middle over the two halves of the columns.
HassePolynomial hasse_polynomial(const FamilyData& fam, std::uint32_t p);

struct HasseResidue {
  FiniteField::Elt value = 0;
  bool in_domain = false;
};

// H-bar(lambda) for lambda in (F_q^*)^N given in internal column order.
// Throws std::invalid_argument if some lambda_j = 0.
HasseResidue hasse_residue(const HassePolynomial& H, const FiniteField& F,
                           const std::vector<FiniteField::Elt>& lambda);

// prod_{i<a} H-bar(lambda^{p^i}), the norm of H-bar(lambda) to F_p.
std::uint32_t hasse_norm(const HassePolynomial& H, const FiniteField& F,
                         const std::vector<FiniteField::Elt>& lambda);

// Per-monomial comparison of (-p)^{mu+1} H(Lambda) with theta_{-(p-1)b}(Lambda)
// in the ramified ring at precision K; margins in pi-adic units, required
// (p-1)(mu+2). Throws std::invalid_argument if K is below that.
MarginReport check_theta_congruence(const FamilyData& fam, std::uint32_t p, int K);

}  // namespace dwork
