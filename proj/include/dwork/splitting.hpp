#pragma once

// Splitting-function coefficients: Artin-Hasse, theta, the normalized
// theta-hat families and the one-variable series Q.
//
// "Normalized" coefficients x_i are those of a series written as
// sum_i x_i (gamma0 t)^i / i!  (theta_hat, theta_hat1 and its inverse), or
// sum_i x_i i! gamma0^{-i-1} t^{-i-1}  (the negative-index series q and Q).
// They all lie in Z_p, and are computed there from c = gamma0^{p-1}, so the
// only genuinely ramified quantities are theta_i = AH_i gamma0^i.

#include <cstdint>
#include <utility>
#include <vector>

#include "dwork/family.hpp"
#include "dwork/integer.hpp"
#include "dwork/margins.hpp"
#include "dwork/ring_tower.hpp"

namespace dwork {

enum class CoeffKind { kArtinHasse, kTheta, kThetaHat, kThetaHat1, kThetaHat1Inverse, kQ };

struct CoeffTable {
  CoeffKind kind;
  std::uint32_t p = 0;
  int K = 0;  // pi-adic precision of the entries
  std::vector<RamifiedElement> entries;
  std::vector<Rational> exact;  // Artin-Hasse only
  int max_index() const { return static_cast<int>(entries.size()) - 1; }
};

// Exact coefficients of exp(sum_i t^{p^i}/p^i) via
// k AH_k = sum_{p^i <= k} AH_{k - p^i}.
std::vector<Rational> artin_hasse_exact(std::uint32_t p, int kmax);
// Same, reduced mod p^M.
std::vector<Integer> artin_hasse_mod(std::uint32_t p, int kmax, int M);

// Z_p data shared by the normalized series, at p-adic precision W.
struct SplittingData {
  std::uint32_t p = 0;
  int W = 0;
  Integer pW;
  Integer c;               // gamma0^{p-1} mod p^W
  Integer c_over_p;        // c / p, a unit congruent to -1, mod p^{W-1}
  std::vector<Integer> g;  // g_j = p^j gamma_j gamma0^{-p^j} mod p^W, g_0 = 1
};

SplittingData make_splitting_data(std::uint32_t p, int W, int jmax);

// Normalized theta_hat1 (or its reciprocal) coefficients 0..imax mod p^W,
// from the integral recursion for exp(sum_{j>=1} gamma_j t^{p^j}).
std::vector<Integer> theta_hat1_normalized(const SplittingData& sd, int imax, bool inverse);
// Normalized theta_hat = exp(gamma0 t) theta_hat1.
std::vector<Integer> theta_hat_normalized(const SplittingData& sd, int imax);
// Normalized Q_k, k <= kmax, truncating where theta_hat1 terms exceed p^W.
std::vector<Integer> q_capital_normalized(const SplittingData& sd, int kmax);

CoeffTable artin_hasse(std::uint32_t p, int kmax, int M);
// theta_i = AH_i gamma0^i in the given ring.
CoeffTable theta_coefficients(const RamifiedRing& R, int kmax);
CoeffTable theta_hat_coefficients(std::uint32_t p, int kmax, int K);
CoeffTable theta_hat1_coefficients(std::uint32_t p, int kmax, int K, bool inverse);
CoeffTable q_capital_series(std::uint32_t p, int kmax, int K);

struct WeightPolynomial {
  IntVec u;
  std::vector<std::pair<IntVec, RamifiedElement>> terms;  // nu -> prod_j theta_{nu_j}
};

// theta_u(Lambda) = sum over nu in N^N with A^+ nu = u of prod theta_{nu_j} Lambda^nu.
WeightPolynomial theta_u_weights(const FamilyData& fam, const RamifiedRing& R, const IntVec& u);
// Evaluate at a point given by Z_q coordinates (internal column order).
RamifiedElement evaluate_weights(const WeightPolynomial& w, const RamifiedRing& R,
                                 const std::vector<UnramifiedElement>& point);

// delta_-(theta(t) Q(t^p)) - p Q(t), plus the row for Q_0 being a unit.
MarginReport check_alpha_prime_eigen(std::uint32_t p, int kmax, int K);
// D'(Q) with D' = delta_- o (t d/dt - sum_j gamma_j p^j t^{p^j}).
MarginReport check_dprime_kernel(std::uint32_t p, int kmax, int K);

}  // namespace dwork
