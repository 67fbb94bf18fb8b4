#pragma once

// Truncations of the A-hypergeometric series F(Lambda) and its contiguous
// family F_u(Lambda), with exact integer coefficients, and the differential
// identities they satisfy.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "dwork/family.hpp"

namespace dwork {

struct ConeSeries {
  IntVec degree;       // common value of A^+ nu over all exponents nu
  int trunc_bound = 0; // complete for positive part sum_{j>mu} nu_j <= trunc_bound
  std::map<IntVec, Integer> terms;  // exponent nu in Z^N -> coefficient
};

// Positive part of an exponent: the total degree in Lambda_j, j > mu.
std::int64_t positive_part(const FamilyData& fam, const IntVec& nu);

// Coefficient attached to a cone point l of the series F_u.
Integer hypergeometric_coefficient(const FamilyData& fam, const IntVec& l);

ConeSeries f_series(const FamilyData& fam, int bound);
// Throws std::invalid_argument unless u lies in M_-.
ConeSeries f_u_series(const FamilyData& fam, const IntVec& u, int bound);

// prod_j (d/dLambda_j)^{k_j} applied termwise.
ConeSeries differentiate(const FamilyData& fam, const ConeSeries& s, const IntVec& k);

struct IdentityReport {
  std::string name;
  std::size_t compared = 0;
  std::size_t mismatches = 0;
  std::string first_mismatch;
  bool no_evidence() const { return compared == 0; }
  bool passed() const { return compared > 0 && mismatches == 0; }
};

IdentityReport check_contiguity(const FamilyData& fam, const IntVec& u, int j, int bound);

struct Annihilator {
  enum class Kind { kBox, kEuler } kind = Kind::kBox;
  IntVec l;       // relation for a box operator
  int index = 0;  // row i of A^+ for an Euler operator, beta = u
};

IdentityReport check_annihilation(const FamilyData& fam, const IntVec& u, const Annihilator& op,
                                  int bound);

// Every coefficient is an integer by construction; this checks divisibility
// by K_u, the lcm of prod k_j! over k in N^N with u + sum k_j a_j^+ in M_-.
Integer k_u_constant(const FamilyData& fam, const IntVec& u);
IdentityReport check_k_u_divisibility(const FamilyData& fam, const IntVec& u, int bound);

// One line per term: exponent vector (original column order) and coefficient.
std::string dump_series(const FamilyData& fam, const ConeSeries& s);

}  // namespace dwork
