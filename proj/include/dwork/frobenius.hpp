#pragma once

// Truncated dual Frobenius operator at a Teichmuller point and its
// distinguished eigenvalue.
//
// Entries are kept in a normalized form over Z_q. Writing c = gamma0^{p-1},
// P_w(L) = sum_{nu : A^+ nu = w} prod_j AH_{nu_j} L^nu and depth(u) = -u_{n+1},
// the step matrix at the twist L = lambda-hat^{p^i} is
//
//   S(u, v) = c^{depth(v) - mu - 1} P_{u - p v}(L),
//
// which is conjugate to the operator on the basis {gamma0^{p u_{n+1}} x^u}
// up to the scalar c^{mu+1}: the literal entry there is
// theta_{u-pv}(L) gamma0^{p(v_{n+1}-u_{n+1})} = c^{depth(u)} P_{u-pv}(L).
// The (b,b) entry of S is H(L) exactly.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dwork/family.hpp"
#include "dwork/hasse.hpp"
#include "dwork/margins.hpp"
#include "dwork/ring_tower.hpp"

namespace dwork {

// lambda-independent data for a fixed (family, p, a, T, M): the basis, the
// nonzero pattern and the coefficients c^{depth(v)-mu-1} prod AH_{nu_j}.
class FrobeniusPlan {
 public:
  FrobeniusPlan(const FamilyData& fam, std::uint32_t p, std::uint32_t a, int T, int M);

  const FamilyData& family() const { return fam_; }
  std::uint32_t p() const { return p_; }
  std::uint32_t degree() const { return a_; }
  int depth_cut() const { return T_; }
  int precision() const { return M_; }
  const std::vector<IntVec>& basis() const { return basis_; }
  std::size_t b_index() const { return 0; }
  const FiniteField& field() const { return *field_; }
  std::shared_ptr<const FiniteField> field_ptr() const { return field_; }
  const UnramifiedRing& ring() const { return *ring_; }
  const Integer& c() const { return c_; }  // gamma0^{p-1} mod p^M
  const Integer& c_over_p() const { return c_over_p_; }
  // Teichmuller lift of g^k for the fixed generator g, k mod q-1.
  const UnramifiedElement& teichmuller_power(std::uint64_t k) const { return teich_[k % teich_.size()]; }
  std::size_t term_count() const { return coef_.size(); }
  const HassePolynomial& hasse() const { return hasse_; }

  // S(u,v) entries (row-major, basis order) at the twist lambda^{p^i}.
  std::vector<UnramifiedElement> step_entries(const std::vector<FiniteField::Elt>& lambda, std::uint32_t i) const;
  // P_w(lambda-hat^{p^i}) for an arbitrary w in N A.
  UnramifiedElement weight_value(const IntVec& w, const std::vector<FiniteField::Elt>& lambda,
                                 std::uint32_t i) const;

 private:
  FamilyData fam_;
  std::uint32_t p_, a_;
  int T_, M_;
  std::shared_ptr<const FiniteField> field_;
  std::shared_ptr<const UnramifiedRing> ring_;
  std::vector<IntVec> basis_;
  Integer c_, c_over_p_, pM_;
  std::vector<Integer> ah_;  // AH_k mod p^M
  std::vector<UnramifiedElement> teich_;
  // nonzero pairs: entry index row*size+col, terms [begin_[k], begin_[k+1])
  std::vector<std::size_t> pair_entry_, begin_;
  std::vector<std::uint16_t> nu_;  // N exponents per term
  std::vector<Integer> coef_;
  HassePolynomial hasse_;
};

struct FrobeniusMatrix {
  std::shared_ptr<const FrobeniusPlan> plan;
  int step_index = 0;  // twist i of a step matrix, -1 for the composite
  // normalized entries, row-major; the operator on the literal basis is
  // c^{scale} D^{-1} entries D with D = diag(c^{depth})
  std::vector<UnramifiedElement> entries;
  int scale = 0;
  std::size_t size() const { return plan->basis().size(); }
  const UnramifiedElement& at(std::size_t r, std::size_t c) const { return entries[r * size() + c]; }
};

FrobeniusMatrix build_step_matrix(std::shared_ptr<const FrobeniusPlan> plan,
                                  const std::vector<FiniteField::Elt>& lambda, std::uint32_t i);
// S_0 S_1 ... S_{a-1}, S_i built at lambda^{p^i}.
FrobeniusMatrix frobenius_matrix(std::shared_ptr<const FrobeniusPlan> plan,
                                 const std::vector<FiniteField::Elt>& lambda);

// Column v of the matrix scaled by c^{scale} has ord_p >= depth(v) + (a-1)(mu+1)
// (in p units; times p-1 for pi units). One row per column.
MarginReport check_column_bounds(const FrobeniusMatrix& mat);

struct EigenDiagnostics {
  std::vector<UnramifiedElement> estimates;  // normalized estimates, one per iteration
  // delta_ord[k-1] = ord_p(raw_k - raw_{k-1}), capped at the known precision
  std::vector<int> delta_ord;
  bool contraction_ok = true;  // delta_ord[k-1] >= (mu+1) + k for every k >= 1
  bool unit_start = true;      // the first estimate is a unit
};

// Power iteration from e_b on the product of the given factors (applied
// right to left), reading the b-component ratio. Stops after the estimate
// index reaches `target` and two consecutive estimates agree mod p^target,
// or after max_iters.
EigenDiagnostics minimal_eigenvalue(const std::vector<FrobeniusMatrix>& factors, int target, int max_iters);

struct EngineOptions {
  int m = 3;          // target p-adic precision of rho_min
  int T = 0;          // depth cut; 0 selects mu + 1 + m
  int max_iters = 0;  // 0 selects target + 8
};

struct UnitRootResult {
  enum class Status { kOk, kOutOfDomain, kNoConvergence, kNotRational };
  Status status = Status::kOk;
  Integer rho;        // rho_min mod p^certified (only when status is kOk)
  int certified = 0;  // exponent of the certified modulus
  int ord = 0;        // ord_p rho_min
  UnramifiedElement eigen_normalized;  // limit of the normalized estimates
  int iterations = 0;
  int T_used = 0;
  int M_work = 0;
  std::uint32_t hasse_norm = 0;
  EigenDiagnostics diagnostics;
  std::string message;
};

std::string status_name(UnitRootResult::Status s);

// Working precision and depth chosen by unit_root for the given options.
int engine_working_precision(const FamilyData& fam, std::uint32_t a, const EngineOptions& opt);
int engine_depth(const FamilyData& fam, const EngineOptions& opt);

// A plan suitable for unit_root with the given options.
std::shared_ptr<const FrobeniusPlan> make_engine_plan(const FamilyData& fam, std::uint32_t p,
                                                      std::uint32_t a, const EngineOptions& opt);

UnitRootResult unit_root(const std::shared_ptr<const FrobeniusPlan>& plan,
                         const std::vector<FiniteField::Elt>& lambda, const EngineOptions& opt);
UnitRootResult unit_root(const FamilyData& fam, std::uint32_t p, std::uint32_t a,
                         const std::vector<FiniteField::Elt>& lambda, const EngineOptions& opt);

// c^{a(mu+1)} Tr(S_0...S_{a-1}) against prod_i theta_{-(p-1)b}(lambda-hat^{p^i}),
// both in Z_q[pi]; required margin (p-1)(1 + a(mu+1)) pi-digits. A second
// row compares the normalized trace with prod_i H(lambda-hat^{p^i}) mod p.
MarginReport trace_congruence_check(const std::shared_ptr<const FrobeniusPlan>& plan,
                                    const std::vector<FiniteField::Elt>& lambda);

// Dual-route check of individual entries: theta_w(L) gamma0^{p depth(u)}
// against c^{depth(u)} P_w(L) gamma0^{p depth(v)} with w = u - p v, in
// Z_q[pi] mod pi^K, over all nonzero pairs of a step matrix.
MarginReport check_literal_entries(const std::shared_ptr<const FrobeniusPlan>& plan,
                                   const std::vector<FiniteField::Elt>& lambda, std::uint32_t i, int K);

}  // namespace dwork
