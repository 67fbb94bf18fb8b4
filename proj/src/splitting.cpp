#include "dwork/splitting.hpp"

#include <algorithm>
#include <stdexcept>

namespace dwork {

namespace {

Integer falling(std::int64_t top, std::int64_t count, const Integer& modulus) {
  Integer r = 1;
  for (std::int64_t t = 0; t < count; ++t) {
    r *= Integer(static_cast<long>(top - t));
    mpz_mod(r.get_mpz_t(), r.get_mpz_t(), modulus.get_mpz_t());
  }
  return r;
}

Integer powm(const Integer& b, const Integer& e, const Integer& m) {
  Integer r;
  mpz_powm(r.get_mpz_t(), b.get_mpz_t(), e.get_mpz_t(), m.get_mpz_t());
  return r;
}

int ceil_div(int a, int b) { return (a + b - 1) / b; }

// Highest index of theta_hat1 needed so that the dropped terms of the Q
// convolution have ord_p >= W (ord theta_hat1_i >= i(p-1)/p).
int q_convolution_length(std::uint32_t p, int W) {
  return static_cast<int>((static_cast<long>(W) * p) / (p - 1)) + 1;
}

int jmax_for(std::uint32_t p, int imax) {
  int j = 0;
  long pj = 1;
  while (pj * p <= imax) {
    pj *= p;
    ++j;
  }
  return j;
}

}  // namespace

std::vector<Rational> artin_hasse_exact(std::uint32_t p, int kmax) {
  std::vector<Rational> ah(kmax + 1);
  if (kmax >= 0) ah[0] = 1;
  for (int k = 1; k <= kmax; ++k) {
    Rational s = 0;
    for (long pi = 1; pi <= k; pi *= p) s += ah[k - pi];
    s /= k;
    ah[k] = s;
  }
  return ah;
}

std::vector<Integer> artin_hasse_mod(std::uint32_t p, int kmax, int M) {
  auto ex = artin_hasse_exact(p, kmax);
  Integer pM = ipow(p, M);
  std::vector<Integer> r(ex.size());
  for (std::size_t i = 0; i < ex.size(); ++i) r[i] = rational_mod(ex[i], p, pM);
  return r;
}

SplittingData make_splitting_data(std::uint32_t p, int W, int jmax) {
  SplittingData sd;
  sd.p = p;
  sd.W = W;
  sd.pW = ipow(p, W);
  // g_j = -sum_{k>=1} c^{p^j (p^k-1)/(p-1)} / p^k; the j = 1 series has the
  // most terms that survive mod p^W, and each needs c to p^{W+k}.
  int kterms = 1;
  while (Integer(p) * (ipow(p, kterms) - 1) / (p - 1) - kterms < W) ++kterms;
  Integer c_big = gamma0_power_pm1(p, W + kterms + 2);
  sd.c = mod(c_big, sd.pW);
  sd.c_over_p = mod(Integer(c_big / p), sd.pW);  // exact: ord c = 1
  sd.g.assign(jmax + 1, 0);
  sd.g[0] = 1;
  for (int j = 1; j <= jmax; ++j) {
    Integer pj = ipow(p, j);
    Integer s = 0;
    for (int k = 1;; ++k) {
      Integer expo = pj * (ipow(p, k) - 1) / (p - 1);
      if (expo - k >= W) break;
      Integer pk = ipow(p, k);
      Integer m = ipow(p, W + k);
      Integer t = powm(c_big, expo, m);
      // ord_p(c^expo) = expo >= k, so the division is exact
      mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), pk.get_mpz_t());
      s += t;
      if (k > 64) throw std::logic_error("make_splitting_data: runaway series");
    }
    sd.g[j] = mod(-s, sd.pW);
  }
  return sd;
}

std::vector<Integer> theta_hat1_normalized(const SplittingData& sd, int imax, bool inverse) {
  const std::uint32_t p = sd.p;
  if (static_cast<int>(sd.g.size()) - 1 < jmax_for(p, imax))
    throw std::invalid_argument("theta_hat1_normalized: g_j table too short");
  std::vector<Integer> h(imax + 1, 0);
  h[0] = 1;
  for (int m = 1; m <= imax; ++m) {
    Integer s = 0;
    long pj = p;
    for (int j = 1; pj <= m; ++j, pj *= p) {
      Integer term = falling(m - 1, pj - 1, sd.pW) * sd.g[j];
      term *= h[m - pj];
      s += inverse ? -term : term;
    }
    h[m] = mod(s, sd.pW);
  }
  return h;
}

std::vector<Integer> theta_hat_normalized(const SplittingData& sd, int imax) {
  auto h = theta_hat1_normalized(sd, imax, false);
  std::vector<Integer> r(imax + 1, 0);
  for (int i = 0; i <= imax; ++i) {
    Integer s = 0;
    for (int k = 0; k <= i; ++k) s += binomial(i, k) * h[k];
    r[i] = mod(s, sd.pW);
  }
  return r;
}

std::vector<Integer> q_capital_normalized(const SplittingData& sd, int kmax) {
  const int imax = q_convolution_length(sd.p, sd.W);
  auto h = theta_hat1_normalized(sd, imax, false);
  std::vector<Integer> Q(kmax + 1, 0);
  for (int k = 0; k <= kmax; ++k) {
    Integer s = 0;
    for (int i = 0; i <= imax; ++i) {
      Integer t = binomial(i + k, i) * h[i];
      if ((i + k) % 2) s -= t;
      else s += t;
    }
    Q[k] = mod(s, sd.pW);
  }
  return Q;
}

CoeffTable artin_hasse(std::uint32_t p, int kmax, int M) {
  CoeffTable t{CoeffKind::kArtinHasse, p, static_cast<int>(p - 1) * M, {}, {}};
  t.exact = artin_hasse_exact(p, kmax);
  RamifiedRing R(std::make_shared<FiniteField>(p, 1), t.K);
  for (const auto& x : t.exact) t.entries.push_back(R.from_rational(x));
  return t;
}

CoeffTable theta_coefficients(const RamifiedRing& R, int kmax) {
  const std::uint32_t p = R.p();
  const int K = R.precision();
  CoeffTable t{CoeffKind::kTheta, p, K, {}, {}};
  RamifiedElement g0 = R.from_prime_subring(compute_gamma0(p, K));
  auto ah = artin_hasse_exact(p, kmax);
  RamifiedElement gp = R.one();
  for (int i = 0; i <= kmax; ++i) {
    t.entries.push_back(R.mul(R.from_rational(ah[i]), gp));
    gp = R.mul(gp, g0);
  }
  return t;
}

namespace {

CoeffTable wrap_zp(CoeffKind kind, std::uint32_t p, int K, const std::vector<Integer>& v) {
  CoeffTable t{kind, p, K, {}, {}};
  RamifiedRing R(std::make_shared<FiniteField>(p, 1), K);
  for (const auto& x : v) t.entries.push_back(R.from_integer(x));
  return t;
}

}  // namespace

CoeffTable theta_hat_coefficients(std::uint32_t p, int kmax, int K) {
  const int W = ceil_div(K, static_cast<int>(p) - 1);
  auto sd = make_splitting_data(p, W, jmax_for(p, kmax));
  return wrap_zp(CoeffKind::kThetaHat, p, K, theta_hat_normalized(sd, kmax));
}

CoeffTable theta_hat1_coefficients(std::uint32_t p, int kmax, int K, bool inverse) {
  const int W = ceil_div(K, static_cast<int>(p) - 1);
  auto sd = make_splitting_data(p, W, jmax_for(p, kmax));
  return wrap_zp(inverse ? CoeffKind::kThetaHat1Inverse : CoeffKind::kThetaHat1, p, K,
                 theta_hat1_normalized(sd, kmax, inverse));
}

CoeffTable q_capital_series(std::uint32_t p, int kmax, int K) {
  const int W = ceil_div(K, static_cast<int>(p) - 1);
  auto sd = make_splitting_data(p, W, jmax_for(p, q_convolution_length(p, W)));
  return wrap_zp(CoeffKind::kQ, p, K, q_capital_normalized(sd, kmax));
}

WeightPolynomial theta_u_weights(const FamilyData& fam, const RamifiedRing& R, const IntVec& u) {
  WeightPolynomial w;
  w.u = u;
  auto decomps = nonnegative_decompositions(fam, u);
  if (decomps.empty()) return w;
  std::int64_t top = 0;
  for (const auto& nu : decomps)
    for (auto x : nu) top = std::max(top, x);
  CoeffTable th = theta_coefficients(R, static_cast<int>(top));
  for (const auto& nu : decomps) {
    RamifiedElement c = R.one();
    for (auto x : nu)
      if (x > 0) c = R.mul(c, th.entries[x]);
    w.terms.emplace_back(nu, c);
  }
  return w;
}

RamifiedElement evaluate_weights(const WeightPolynomial& w, const RamifiedRing& R,
                                 const std::vector<UnramifiedElement>& point) {
  const UnramifiedRing& B = R.base();
  RamifiedElement s = R.zero();
  for (const auto& [nu, c] : w.terms) {
    UnramifiedElement mono = B.one();
    for (std::size_t j = 0; j < nu.size(); ++j)
      if (nu[j] > 0) mono = B.mul(mono, B.pow(B.truncate(point[j], B.precision()), nu[j]));
    s = R.add(s, R.mul(c, R.from_unramified(mono)));
  }
  return s;
}

MarginReport check_alpha_prime_eigen(std::uint32_t p, int kmax, int K) {
  const int e = static_cast<int>(p) - 1;
  const int P = ceil_div(K, e);
  const int vk = factorial_valuation(kmax, p);
  const int W = P + vk + 2;
  const int Imax = P + vk + 2;
  auto sd = make_splitting_data(p, W, jmax_for(p, q_convolution_length(p, W)));
  auto Q = q_capital_normalized(sd, std::max(Imax, kmax));
  auto ah = artin_hasse_mod(p, static_cast<int>(p) * (Imax + 1), W);

  MarginReport rep;
  rep.name = "alpha' Q = p Q";
  rep.unit = "pi";
  for (int k = 0; k <= kmax; ++k) {
    Integer S = 0;
    Integer cpow = sd.c;  // c^{i+1}
    Integer ifact = 1;
    for (int i = 0; i <= Imax; ++i) {
      long j = static_cast<long>(p) * (i + 1) - k - 1;
      if (j >= 0) S += ah[j] * Q[i] % sd.pW * ifact % sd.pW * cpow;
      cpow = cpow * sd.c % sd.pW;
      ifact = ifact * (i + 1) % sd.pW;
    }
    S = mod(S, sd.pW);
    const int v = factorial_valuation(k, p);
    Integer pv = ipow(p, v);
    if (mpz_divisible_p(S.get_mpz_t(), pv.get_mpz_t()) == 0)
      throw std::logic_error("check_alpha_prime_eigen: k! does not divide the numerator");
    mpz_divexact(S.get_mpz_t(), S.get_mpz_t(), pv.get_mpz_t());
    Integer unit = factorial(k) / pv;
    Integer inv;
    mpz_invert(inv.get_mpz_t(), unit.get_mpz_t(), sd.pW.get_mpz_t());
    Integer d = mod(S * inv, sd.pW);
    // known mod p^{W - v}; tail terms have ord >= Imax + 2 - v
    const int known = std::min(W - v, Imax + 2 - v);
    Integer diff = mod(d - Integer(p) * Q[k], ipow(p, known));
    int m = diff == 0 ? known : std::min(known, valuation(diff, p));
    rep.rows.push_back({"k=" + std::to_string(k), e * m, K, e * known >= K});
  }
  rep.rows.push_back({"Q_0 unit", valuation(Q[0], p) == 0 ? 1 : 0, 1, true});
  return rep;
}

MarginReport check_dprime_kernel(std::uint32_t p, int kmax, int K) {
  const int e = static_cast<int>(p) - 1;
  const int P = ceil_div(K, e);
  const int W = P + 2;
  int jmax = 0;
  long pj = 1;
  while (pj * p - 1 < W) {
    pj *= p;
    ++jmax;
  }
  const int need = kmax + static_cast<int>(pj) + 1;
  auto sd = make_splitting_data(p, W, std::max(jmax, jmax_for(p, q_convolution_length(p, W))));
  auto Q = q_capital_normalized(sd, need);
  MarginReport rep;
  rep.name = "D' Q = 0";
  rep.unit = "pi";
  for (int k = 0; k <= kmax; ++k) {
    Integer s = -Integer(k + 1) * (Q[k] + Q[k + 1]);
    long pw = 1;
    for (int j = 1; j <= jmax; ++j) {
      pw *= p;
      s -= sd.g[j] * falling(k + pw, pw, sd.pW) % sd.pW * Q[k + pw];
    }
    s = mod(s, sd.pW);
    int m = s == 0 ? W : std::min(W, valuation(s, p));
    rep.rows.push_back({"k=" + std::to_string(k), e * m, K, e * W >= K});
  }
  return rep;
}

}  // namespace dwork
