#pragma once

// Monomial families f = sum_j lambda_j x^{a_j} of degree d in P^n with
// d | n+1, together with their lattice data.
//
// Indices are 0-based: after canonical reordering the columns 0..mu sum to
// (1,...,1). The a_j^+ are the augmented columns (a_j, 1).

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dwork/integer.hpp"

namespace dwork {

enum class FamilyErrorCode {
  kEmpty,
  kRagged,
  kNegativeExponent,
  kDuplicateMonomial,
  kNotHomogeneous,
  kDegreeDoesNotDivide,
  kNoOnesSubset,
  kParse,
};

class FamilyError : public std::runtime_error {
 public:
  FamilyError(FamilyErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  FamilyErrorCode code() const { return code_; }

 private:
  FamilyErrorCode code_;
};

struct FamilyData {
  std::string name;
  int n = 0;
  int d = 0;
  int N = 0;
  int mu = 0;
  std::vector<IntVec> A;        // reordered columns a_j in N^{n+1}
  std::vector<IntVec> A_plus;   // (a_j, 1)
  IntVec b;                     // (-1,...,-1,-mu-1)
  std::vector<int> ones_subset; // original indices placed at positions 0..mu
  std::vector<int> permutation; // permutation[new_index] = original index
  std::vector<std::string> monomial_names;  // in internal order
  std::vector<IntVec> original_exponents;

  // Diagonal form U A^+ V = D used for membership in M = Z A^+.
  std::vector<std::vector<Integer>> snf_U;
  std::vector<Integer> snf_diag;
  std::vector<std::vector<Integer>> snf_V;
  int rank = 0;
  std::vector<int> owner;  // owner[i] = the j <= mu with a_{ij} = 1

  bool in_group_M(const IntVec& u) const;
  // A^+ applied to an exponent vector.
  IntVec apply(const IntVec& l) const;
  // Reorder a vector given in the user's column order into internal order.
  template <class T>
  std::vector<T> to_internal(const std::vector<T>& original) const {
    std::vector<T> r(original.size());
    for (std::size_t k = 0; k < permutation.size(); ++k) r[k] = original[permutation[k]];
    return r;
  }
  template <class T>
  std::vector<T> to_original(const std::vector<T>& internal) const {
    std::vector<T> r(internal.size());
    for (std::size_t k = 0; k < permutation.size(); ++k) r[permutation[k]] = internal[k];
    return r;
  }
  std::uint64_t hash() const;
};

inline int depth(const IntVec& u) { return static_cast<int>(-u.back()); }

FamilyData validate_family(int n, int d, const std::vector<IntVec>& exponents,
                           const std::vector<std::string>& names = {}, const std::string& name = "");

// JSON family description: {"name": str?, "n": int, "d": int,
// "exponents": [[int,...],...], "names": [str,...]?}.
FamilyData parse_family(const std::string& text, const std::string& source = "<string>");
FamilyData load_family_file(const std::string& path);

struct LatticeBasis {
  int rank = 0;
  std::vector<IntVec> basis;  // rows in Hermite normal form
};

LatticeBasis relation_lattice_basis(const FamilyData& fam);

// All l in L' = L cap E with positive part sum_{j>mu} l_j <= bound, in
// graded lexicographic order.
std::vector<IntVec> enumerate_cone_relations(const FamilyData& fam, int bound);

// All l in E with A^+ l = target and positive part <= bound.
std::vector<IntVec> enumerate_cone_offsets(const FamilyData& fam, const IntVec& target, int bound);

// All u in M_- with depth <= T, sorted by (depth, lex). Throws for T < mu+1.
std::vector<IntVec> enumerate_interior_support(const FamilyData& fam, int T);

// All nu in N^N with A^+ nu = w.
std::vector<IntVec> nonnegative_decompositions(const FamilyData& fam, const IntVec& w);

bool in_M_minus(const FamilyData& fam, const IntVec& u);

std::string format_vector(const IntVec& v);

}  // namespace dwork
