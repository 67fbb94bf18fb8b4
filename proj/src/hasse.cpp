#include "dwork/hasse.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "dwork/splitting.hpp"

namespace dwork {

namespace {

// All u in [0,p-1]^{cols} (cols = [lo,hi)) with their partial sums
// sum_j u_j a_j^+.
void enumerate_half(const FamilyData& fam, std::uint32_t p, int lo, int hi, const IntVec& cap,
                    std::vector<std::pair<IntVec, IntVec>>& out) {
  const std::size_t rows = fam.A_plus[0].size();
  IntVec u(hi - lo, 0), s(rows, 0);
  auto rec = [&](auto&& self, int j) -> void {
    if (j == hi) {
      out.emplace_back(u, s);
      return;
    }
    std::int64_t added = 0;
    for (std::uint32_t x = 0; x < p; ++x) {
      bool ok = true;
      for (std::size_t i = 0; i < rows; ++i)
        if (s[i] > cap[i]) ok = false;
      if (!ok) break;
      u[j - lo] = x;
      self(self, j + 1);
      for (std::size_t i = 0; i < rows; ++i) s[i] += fam.A_plus[j][i];
      ++added;
    }
    for (std::size_t i = 0; i < rows; ++i) s[i] -= added * fam.A_plus[j][i];
    u[j - lo] = 0;
  };
  rec(rec, lo);
}

}  // namespace

HassePolynomial hasse_polynomial(const FamilyData& fam, std::uint32_t p) {
  if (!is_prime(p)) throw std::invalid_argument("hasse_polynomial: p must be prime");
  HassePolynomial H;
  H.p = p;
  IntVec target(fam.n + 2, static_cast<std::int64_t>(p) - 1);
  target.back() = static_cast<std::int64_t>(p - 1) * (fam.mu + 1);

  const int half = fam.N / 2;
  std::vector<std::pair<IntVec, IntVec>> left, right;
  enumerate_half(fam, p, 0, half, target, left);
  enumerate_half(fam, p, half, fam.N, target, right);
  std::map<IntVec, std::vector<std::size_t>> by_sum;
  for (std::size_t k = 0; k < left.size(); ++k) by_sum[left[k].second].push_back(k);

  Integer pZ = p;
  for (const auto& [ur, sr] : right) {
    IntVec need(target.size());
    bool ok = true;
    for (std::size_t i = 0; i < target.size(); ++i) {
      need[i] = target[i] - sr[i];
      if (need[i] < 0) ok = false;
    }
    if (!ok) continue;
    auto it = by_sum.find(need);
    if (it == by_sum.end()) continue;
    for (std::size_t k : it->second) {
      HasseTerm t;
      t.u = left[k].first;
      t.u.insert(t.u.end(), ur.begin(), ur.end());
      Integer den = 1;
      for (auto x : t.u) den *= factorial(static_cast<int>(x));
      t.coeff = Rational(1, 1) / Rational(den);
      t.coeff_mod_p = static_cast<std::uint32_t>(rational_mod(t.coeff, p, pZ).get_ui());
      H.terms.push_back(std::move(t));
    }
  }
  std::sort(H.terms.begin(), H.terms.end(),
            [](const HasseTerm& x, const HasseTerm& y) { return x.u < y.u; });
  return H;
}

HasseResidue hasse_residue(const HassePolynomial& H, const FiniteField& F,
                           const std::vector<FiniteField::Elt>& lambda) {
  for (auto x : lambda)
    if (x == 0) throw std::invalid_argument("hasse_residue: fiber coordinates must be nonzero");
  FiniteField::Elt v = 0;
  for (const auto& t : H.terms) {
    FiniteField::Elt m = F.from_int(t.coeff_mod_p);
    for (std::size_t j = 0; j < t.u.size(); ++j)
      if (t.u[j]) m = F.mul(m, F.pow(lambda[j], static_cast<std::uint64_t>(t.u[j])));
    v = F.add(v, m);
  }
  return {v, v != 0};
}

std::uint32_t hasse_norm(const HassePolynomial& H, const FiniteField& F,
                         const std::vector<FiniteField::Elt>& lambda) {
  FiniteField::Elt prod = F.from_int(1);
  std::vector<FiniteField::Elt> l = lambda;
  for (std::uint32_t i = 0; i < F.degree(); ++i) {
    prod = F.mul(prod, hasse_residue(H, F, l).value);
    for (auto& x : l) x = F.frobenius(x);
  }
  // prod lies in F_p, whose elements are the indices 0..p-1
  return prod;
}

MarginReport check_theta_congruence(const FamilyData& fam, std::uint32_t p, int K) {
  const int e = static_cast<int>(p) - 1;
  const int required = e * (fam.mu + 2);
  if (K < required)
    throw std::invalid_argument("check_theta_congruence: K must be at least (p-1)(mu+2)");
  auto H = hasse_polynomial(fam, p);
  RamifiedRing R(std::make_shared<FiniteField>(p, 1), K);
  IntVec w(fam.b.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = -e * fam.b[i];
  WeightPolynomial theta = theta_u_weights(fam, R, w);

  MarginReport rep;
  rep.name = "(-p)^{mu+1} H = theta_{-(p-1)b}";
  rep.unit = "pi";
  Integer scale = ipow(Integer(-static_cast<long>(p)), fam.mu + 1);
  std::map<IntVec, RamifiedElement> lhs;
  for (const auto& t : H.terms) lhs[t.u] = R.from_rational(t.coeff * Rational(scale));
  std::map<IntVec, RamifiedElement> rhs(theta.terms.begin(), theta.terms.end());

  std::map<IntVec, int> keys;
  for (const auto& kv : lhs) keys[kv.first] = 0;
  for (const auto& kv : rhs) keys[kv.first] = 0;
  for (const auto& kv : keys) {
    const IntVec& u = kv.first;
    RamifiedElement a = lhs.count(u) ? lhs[u] : R.zero();
    RamifiedElement b = rhs.count(u) ? rhs[u] : R.zero();
    RamifiedElement d = R.sub(a, b);
    rep.rows.push_back({format_vector(u), R.valuation(d), required, d.prec >= required});
  }
  if (rep.rows.empty()) rep.rows.push_back({"empty Hasse polynomial", 0, 1, true});
  return rep;
}

}  // namespace dwork
