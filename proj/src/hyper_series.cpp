#include "dwork/hyper_series.hpp"

#include <functional>
#include <sstream>
#include <stdexcept>

namespace dwork {

std::int64_t positive_part(const FamilyData& fam, const IntVec& nu) {
  std::int64_t s = 0;
  for (int j = fam.mu + 1; j < fam.N; ++j) s += nu[j];
  return s;
}

Integer hypergeometric_coefficient(const FamilyData& fam, const IntVec& l) {
  Integer num = 1, den = 1;
  std::int64_t neg = 0;
  for (int j = 0; j <= fam.mu; ++j) {
    num *= factorial(static_cast<int>(-l[j]));
    neg += l[j];
  }
  for (int j = fam.mu + 1; j < fam.N; ++j) den *= factorial(static_cast<int>(l[j]));
  if (num % den != 0) throw std::logic_error("hypergeometric_coefficient: non-integral term");
  Integer c = num / den;
  return (neg % 2 == 0) ? c : Integer(-c);
}

ConeSeries f_series(const FamilyData& fam, int bound) {
  ConeSeries s;
  s.degree.assign(fam.n + 2, 0);
  s.trunc_bound = bound;
  for (const auto& l : enumerate_cone_relations(fam, bound)) s.terms[l] = hypergeometric_coefficient(fam, l);
  return s;
}

ConeSeries f_u_series(const FamilyData& fam, const IntVec& u, int bound) {
  if (!in_M_minus(fam, u)) throw std::invalid_argument("f_u_series: u is not in M_-: " + format_vector(u));
  ConeSeries s;
  s.degree = u;
  s.trunc_bound = bound;
  IntVec target(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) target[i] = u[i] - fam.b[i];
  for (const auto& l : enumerate_cone_offsets(fam, target, bound)) {
    IntVec nu = l;
    for (int j = 0; j <= fam.mu; ++j) nu[j] -= 1;
    s.terms[nu] = hypergeometric_coefficient(fam, l);
  }
  return s;
}

ConeSeries differentiate(const FamilyData& fam, const ConeSeries& s, const IntVec& k) {
  ConeSeries r;
  r.degree = s.degree;
  for (int j = 0; j < fam.N; ++j)
    for (std::int64_t t = 0; t < k[j]; ++t)
      for (std::size_t i = 0; i < r.degree.size(); ++i) r.degree[i] -= fam.A_plus[j][i];
  // positive-part truncation drops by the derivative order in the j > mu slots
  std::int64_t drop = 0;
  for (int j = fam.mu + 1; j < fam.N; ++j) drop += k[j];
  r.trunc_bound = s.trunc_bound - static_cast<int>(drop);
  for (const auto& [nu, c] : s.terms) {
    Integer v = c;
    IntVec e = nu;
    for (int j = 0; j < fam.N && v != 0; ++j)
      for (std::int64_t t = 0; t < k[j]; ++t) {
        v *= Integer(static_cast<long>(e[j]));
        e[j] -= 1;
      }
    if (v != 0) r.terms[e] += v;
  }
  for (auto it = r.terms.begin(); it != r.terms.end();)
    it = it->second == 0 ? r.terms.erase(it) : std::next(it);
  return r;
}

namespace {

void compare_series(const FamilyData& fam, const ConeSeries& x, const ConeSeries& y, int complete_to,
                    IdentityReport& rep) {
  std::map<IntVec, std::pair<Integer, Integer>> all;
  for (const auto& [nu, c] : x.terms) all[nu].first = c;
  for (const auto& [nu, c] : y.terms) all[nu].second = c;
  for (const auto& [nu, cc] : all) {
    if (positive_part(fam, nu) > complete_to) continue;
    ++rep.compared;
    if (cc.first != cc.second) {
      if (rep.mismatches++ == 0)
        rep.first_mismatch = format_vector(nu) + ": " + cc.first.get_str() + " vs " + cc.second.get_str();
    }
  }
}

IntVec minus_column(const FamilyData& fam, const IntVec& u, int j) {
  IntVec r = u;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= fam.A_plus[j][i];
  return r;
}

}  // namespace

IdentityReport check_contiguity(const FamilyData& fam, const IntVec& u, int j, int bound) {
  IdentityReport rep;
  rep.name = "d/dLambda_" + std::to_string(j) + " F_u = F_{u-a_j}";
  if (j < 0 || j >= fam.N) throw std::invalid_argument("check_contiguity: column index out of range");
  IntVec k(fam.N, 0);
  k[j] = 1;
  ConeSeries lhs = differentiate(fam, f_u_series(fam, u, bound), k);
  ConeSeries rhs = f_u_series(fam, minus_column(fam, u, j), bound);
  compare_series(fam, lhs, rhs, lhs.trunc_bound, rep);
  return rep;
}

IdentityReport check_annihilation(const FamilyData& fam, const IntVec& u, const Annihilator& op,
                                  int bound) {
  IdentityReport rep;
  ConeSeries F = f_u_series(fam, u, bound);
  if (op.kind == Annihilator::Kind::kEuler) {
    rep.name = "Z_" + std::to_string(op.index) + " with beta = u";
    for (const auto& [nu, c] : F.terms) {
      std::int64_t w = -u[op.index];
      for (int j = 0; j < fam.N; ++j) w += fam.A_plus[j][op.index] * nu[j];
      ++rep.compared;
      if (w != 0 && rep.mismatches++ == 0)
        rep.first_mismatch = format_vector(nu) + ": weight " + std::to_string(w);
    }
    return rep;
  }
  rep.name = "box_" + format_vector(op.l);
  if (fam.apply(op.l) != IntVec(fam.n + 2, 0))
    throw std::invalid_argument("check_annihilation: l is not a relation");
  IntVec kp(fam.N, 0), km(fam.N, 0);
  for (int j = 0; j < fam.N; ++j) (op.l[j] > 0 ? kp : km)[j] = op.l[j] > 0 ? op.l[j] : -op.l[j];
  ConeSeries a = differentiate(fam, F, kp);
  ConeSeries b = differentiate(fam, F, km);
  compare_series(fam, a, b, std::min(a.trunc_bound, b.trunc_bound), rep);
  return rep;
}

Integer k_u_constant(const FamilyData& fam, const IntVec& u) {
  Integer K = 1;
  IntVec w = u;
  IntVec k(fam.N, 0);
  const std::size_t m = u.size();
  std::function<void(int)> rec = [&](int j) {
    if (j == fam.N) {
      Integer prod = 1;
      for (auto x : k) prod *= factorial(static_cast<int>(x));
      mpz_lcm(K.get_mpz_t(), K.get_mpz_t(), prod.get_mpz_t());
      return;
    }
    rec(j + 1);
    std::int64_t added = 0;
    for (;;) {
      bool ok = true;
      for (std::size_t i = 0; i < m; ++i)
        if (w[i] + fam.A_plus[j][i] >= 0) ok = false;
      if (!ok) break;
      for (std::size_t i = 0; i < m; ++i) w[i] += fam.A_plus[j][i];
      ++added;
      k[j] = added;
      rec(j + 1);
    }
    for (std::size_t i = 0; i < m; ++i) w[i] -= added * fam.A_plus[j][i];
    k[j] = 0;
  };
  rec(0);
  return K;
}

IdentityReport check_k_u_divisibility(const FamilyData& fam, const IntVec& u, int bound) {
  IdentityReport rep;
  Integer K = k_u_constant(fam, u);
  rep.name = "K_u = " + K.get_str() + " divides F_u";
  for (const auto& [nu, c] : f_u_series(fam, u, bound).terms) {
    ++rep.compared;
    if (c % K != 0 && rep.mismatches++ == 0) rep.first_mismatch = format_vector(nu) + ": " + c.get_str();
  }
  return rep;
}

std::string dump_series(const FamilyData& fam, const ConeSeries& s) {
  std::ostringstream os;
  os << "# degree " << format_vector(s.degree) << " complete to positive part " << s.trunc_bound << "\n";
  for (const auto& [nu, c] : s.terms) os << format_vector(fam.to_original(nu)) << " " << c.get_str() << "\n";
  return os.str();
}

}  // namespace dwork
