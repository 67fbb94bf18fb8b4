#pragma once

// Residue field F_q, the unramified ring Z_q / p^M and the ramified ring
// Z_q[pi] / pi^K with Phi_p(1 + pi) = 0.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dwork/integer.hpp"

namespace dwork {

using FpPoly = std::vector<std::uint32_t>;  // coefficients, lowest degree first

bool is_irreducible(const FpPoly& f, std::uint32_t p);
// Least monic irreducible polynomial of the given degree, ordering the
// non-leading coefficients from x^{degree-1} down to x^0.
FpPoly least_irreducible(std::uint32_t p, std::uint32_t degree);

class FiniteField {
 public:
  using Elt = std::uint32_t;  // base-p digits are the power-basis coordinates

  FiniteField(std::uint32_t p, std::uint32_t degree);
  FiniteField(std::uint32_t p, FpPoly modulus);

  std::uint32_t p() const { return p_; }
  std::uint32_t degree() const { return degree_; }
  std::uint64_t order() const { return q_; }
  const FpPoly& modulus() const { return modulus_; }

  Elt from_coords(const std::vector<std::uint32_t>& c) const;
  std::vector<std::uint32_t> coords(Elt x) const;
  Elt from_int(std::int64_t v) const;

  Elt add(Elt x, Elt y) const;
  Elt sub(Elt x, Elt y) const;
  Elt neg(Elt x) const;
  Elt mul(Elt x, Elt y) const {
    if (x == 0 || y == 0) return 0;
    std::uint64_t s = std::uint64_t(log_[x]) + log_[y];
    if (s >= q_ - 1) s -= q_ - 1;
    return exp_[s];
  }
  Elt inv(Elt x) const;
  Elt pow(Elt x, std::uint64_t e) const;
  Elt frobenius(Elt x) const { return pow(x, p_); }
  // Discrete logarithm to the fixed primitive element; x must be nonzero.
  std::uint32_t log(Elt x) const { return log_[x]; }
  Elt exp(std::uint64_t k) const { return exp_[k % (q_ - 1)]; }
  Elt generator() const { return exp_[q_ > 2 ? 1 : 0]; }
  // Absolute trace to F_p.
  std::uint32_t trace(Elt x) const;

  std::string to_string(Elt x) const;

 private:
  void build_tables();
  Elt poly_mul(Elt x, Elt y) const;

  std::uint32_t p_;
  std::uint32_t degree_;
  std::uint64_t q_;
  FpPoly modulus_;
  std::vector<Elt> exp_;
  std::vector<std::uint32_t> log_;
};

// Image of F_q in F_{q^s}: the generator goes to the least root of the
// modulus of `small` in `big`. Returns the table of images indexed by Elt.
std::vector<FiniteField::Elt> field_embedding(const FiniteField& small, const FiniteField& big);

struct UnramifiedElement {
  std::vector<Integer> coords;
  bool operator==(const UnramifiedElement&) const = default;
};

class UnramifiedRing {
 public:
  using Elt = UnramifiedElement;

  UnramifiedRing(std::shared_ptr<const FiniteField> field, int M);

  std::uint32_t p() const { return field_->p(); }
  std::uint32_t degree() const { return field_->degree(); }
  int precision() const { return M_; }
  const Integer& modulus_pM() const { return pM_; }
  const FiniteField& field() const { return *field_; }
  std::shared_ptr<const FiniteField> field_ptr() const { return field_; }

  Elt zero() const;
  Elt one() const;
  Elt from_integer(const Integer& v) const;
  Elt from_rational(const Rational& v) const;
  // Lift of the residue digits (not the Teichmuller lift).
  Elt from_residue(FiniteField::Elt r) const;
  FiniteField::Elt residue(const Elt& x) const;

  Elt add(const Elt& x, const Elt& y) const;
  Elt sub(const Elt& x, const Elt& y) const;
  Elt neg(const Elt& x) const;
  Elt mul(const Elt& x, const Elt& y) const;
  Elt scale(const Elt& x, const Integer& s) const;
  Elt pow(const Elt& x, std::uint64_t e) const;
  // Inverse of a unit; throws std::domain_error for non-units.
  Elt inverse(const Elt& x) const;
  // Exact division by p^k; requires every coordinate divisible by p^k.
  // The result is only meaningful mod p^{M-k}.
  Elt divide_by_p_power(const Elt& x, int k) const;
  // Reduce coordinates mod p^m (m <= M).
  Elt truncate(const Elt& x, int m) const;

  bool is_zero(const Elt& x) const;
  // Minimum p-valuation over coordinates, capped at M.
  int valuation(const Elt& x) const;
  bool is_rational(const Elt& x) const;

  // Teichmuller lift: the unique root of x^q = x congruent to r mod p.
  Elt teichmuller(FiniteField::Elt r) const;
  // Teichmuller lifts of every element of F_q, indexed by Elt.
  std::vector<Elt> teichmuller_table() const;

  std::string to_string(const Elt& x) const;

 private:
  std::shared_ptr<const FiniteField> field_;
  int M_;
  Integer pM_;
  std::vector<Integer> lifted_modulus_;  // non-leading coefficients
};

// Element of Z_q[pi] known modulo pi^prec.
struct RamifiedElement {
  std::vector<UnramifiedElement> coeffs;  // length p-1, power basis in pi
  int prec = 0;
};

class RamifiedRing {
 public:
  using Elt = RamifiedElement;

  RamifiedRing(std::shared_ptr<const FiniteField> field, int K);

  std::uint32_t p() const { return base_->p(); }
  int rank() const { return e_; }
  int precision() const { return K_; }
  const UnramifiedRing& base() const { return *base_; }

  Elt zero() const;
  Elt one() const;
  Elt pi() const;
  Elt from_integer(const Integer& v) const;
  Elt from_rational(const Rational& v) const;
  Elt from_unramified(const UnramifiedElement& x) const;
  // Embed an element whose coordinates are length-1 vectors over Z_p.
  Elt from_prime_subring(const Elt& x) const;

  Elt add(const Elt& x, const Elt& y) const;
  Elt sub(const Elt& x, const Elt& y) const;
  Elt neg(const Elt& x) const;
  Elt mul(const Elt& x, const Elt& y) const;
  Elt scale(const Elt& x, const Integer& s) const;
  Elt pow(const Elt& x, std::uint64_t e) const;
  // Inverse of a unit (valuation 0).
  Elt inverse(const Elt& x) const;
  // Exact division by p; requires ord_pi(x) >= p-1. Precision drops by p-1.
  Elt divide_by_p(const Elt& x) const;
  // Lower the precision tag to k (k <= x.prec).
  Elt truncate(const Elt& x, int k) const;

  // Exact ord_pi if below the precision tag, else the tag (meaning ">= tag").
  int valuation(const Elt& x) const;
  bool is_exact_valuation(const Elt& x) const { return valuation(x) < x.prec; }
  // Returns the degree-0 coordinate after checking that the others vanish
  // to the stored precision; throws std::runtime_error otherwise. The
  // result is meaningful mod p^{floor(prec/(p-1))}.
  UnramifiedElement project_unramified(const Elt& x) const;

  std::string to_string(const Elt& x) const;

 private:
  Elt canonical(Elt x) const;

  std::shared_ptr<const UnramifiedRing> base_;
  int e_;
  int K_;
  std::vector<Integer> relation_;  // pi^{p-1} = sum relation_[k] pi^k
};

struct RingTower {
  std::shared_ptr<const FiniteField> field;
  std::shared_ptr<const UnramifiedRing> unramified;
  std::shared_ptr<const RamifiedRing> ramified;
};

// Throws std::invalid_argument for non-prime p or inconsistent precisions.
RingTower make_ring_tower(std::uint32_t p, std::uint32_t a, int M, int K);

// gamma_0 = root of sum_i t^{p^i}/p^i with ord_pi = 1, congruent to pi mod
// pi^2, known mod pi^K (working precision is raised internally).
RamifiedElement compute_gamma0(std::uint32_t p, int K);

// gamma_j = sum_{i<=j} gamma_0^{p^i}/p^i, to precision K.
RamifiedElement compute_gamma_j(std::uint32_t p, int j, int K);

// gamma_0^{p-1} in Z_p to p-adic precision M, computed through the
// ramified ring.
Integer gamma0_power_pm1(std::uint32_t p, int M);

}  // namespace dwork
