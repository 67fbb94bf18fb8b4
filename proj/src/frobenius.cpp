#include "dwork/frobenius.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "dwork/splitting.hpp"

namespace dwork {

namespace {

Integer powm(const Integer& b, unsigned long e, const Integer& m) {
  Integer r;
  mpz_powm_ui(r.get_mpz_t(), b.get_mpz_t(), e, m.get_mpz_t());
  return r;
}

std::uint64_t frobenius_shift(std::uint64_t log, std::uint32_t p, std::uint32_t i, std::uint64_t order) {
  // log of x^{p^i}
  std::uint64_t r = log;
  for (std::uint32_t t = 0; t < i; ++t) r = (r * p) % order;
  return r;
}

IntVec minus_p_times(const IntVec& u, const IntVec& v, std::uint32_t p) {
  IntVec w(u.size());
  for (std::size_t k = 0; k < u.size(); ++k) w[k] = u[k] - static_cast<std::int64_t>(p) * v[k];
  return w;
}

bool nonnegative(const IntVec& w) {
  for (auto x : w)
    if (x < 0) return false;
  return true;
}

}  // namespace

FrobeniusPlan::FrobeniusPlan(const FamilyData& fam, std::uint32_t p, std::uint32_t a, int T, int M)
    : fam_(fam), p_(p), a_(a), T_(T), M_(M) {
  if (!is_prime(p)) throw std::invalid_argument("FrobeniusPlan: p must be prime");
  if (a < 1 || M < 1) throw std::invalid_argument("FrobeniusPlan: need a >= 1 and M >= 1");
  field_ = std::make_shared<FiniteField>(p, a);
  ring_ = std::make_shared<UnramifiedRing>(field_, M);
  basis_ = enumerate_interior_support(fam, T);
  pM_ = ipow(p, M);
  Integer c_big = gamma0_power_pm1(p, M + 1);
  c_ = mod(c_big, pM_);
  c_over_p_ = mod(Integer(c_big / p), pM_);
  hasse_ = hasse_polynomial(fam, p);

  const std::uint64_t order = field_->order() - 1;
  teich_.resize(order);
  UnramifiedElement g = ring_->teichmuller(field_->generator());
  UnramifiedElement cur = ring_->one();
  for (std::uint64_t k = 0; k < order; ++k) {
    teich_[k] = cur;
    cur = ring_->mul(cur, g);
  }

  ah_ = artin_hasse_mod(p, static_cast<int>(p) * T, M);
  const std::size_t n = basis_.size();
  const int N = fam.N;
  begin_.push_back(0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t col = 0; col < n; ++col) {
      const IntVec& u = basis_[r];
      const IntVec& v = basis_[col];
      IntVec w = minus_p_times(u, v, p);
      if (!nonnegative(w)) continue;
      const int e = depth(v) - fam.mu - 1;
      if (e >= M) continue;
      Integer ce = powm(c_, e, pM_);
      std::size_t added = 0;
      for (const auto& nu : nonnegative_decompositions(fam, w)) {
        Integer coef = ce;
        for (int j = 0; j < N; ++j)
          if (nu[j] > 0) coef = coef * ah_[nu[j]] % pM_;
        if (coef == 0) continue;
        for (int j = 0; j < N; ++j) nu_.push_back(static_cast<std::uint16_t>(nu[j]));
        coef_.push_back(coef);
        ++added;
      }
      if (added == 0) continue;
      pair_entry_.push_back(r * n + col);
      begin_.push_back(coef_.size());
    }
  }
}

std::vector<UnramifiedElement> FrobeniusPlan::step_entries(const std::vector<FiniteField::Elt>& lambda,
                                                           std::uint32_t i) const {
  const std::size_t n = basis_.size();
  const int N = fam_.N;
  const std::uint64_t order = field_->order() - 1;
  std::vector<std::uint64_t> logs(N);
  for (int j = 0; j < N; ++j) {
    if (lambda[j] == 0) throw std::invalid_argument("step_entries: fiber coordinates must be nonzero");
    logs[j] = frobenius_shift(field_->log(lambda[j]), p_, i, order);
  }
  std::vector<UnramifiedElement> out(n * n, ring_->zero());
  std::vector<Integer> acc(a_);
  for (std::size_t k = 0; k < pair_entry_.size(); ++k) {
    for (auto& x : acc) x = 0;
    for (std::size_t t = begin_[k]; t < begin_[k + 1]; ++t) {
      std::uint64_t e = 0;
      const std::uint16_t* nu = &nu_[t * N];
      for (int j = 0; j < N; ++j) e += static_cast<std::uint64_t>(nu[j]) * logs[j];
      const UnramifiedElement& w = teich_[e % order];
      for (std::uint32_t c = 0; c < a_; ++c) acc[c] += coef_[t] * w.coords[c];
    }
    UnramifiedElement& dst = out[pair_entry_[k]];
    for (std::uint32_t c = 0; c < a_; ++c) dst.coords[c] = mod(acc[c], pM_);
  }
  return out;
}

UnramifiedElement FrobeniusPlan::weight_value(const IntVec& w, const std::vector<FiniteField::Elt>& lambda,
                                              std::uint32_t i) const {
  const std::uint64_t order = field_->order() - 1;
  auto decomps = nonnegative_decompositions(fam_, w);
  std::int64_t top = 0;
  for (const auto& nu : decomps)
    for (auto x : nu) top = std::max(top, x);
  auto ah = artin_hasse_mod(p_, static_cast<int>(top), M_);
  UnramifiedElement s = ring_->zero();
  for (const auto& nu : decomps) {
    Integer coef = 1;
    std::uint64_t e = 0;
    for (int j = 0; j < fam_.N; ++j) {
      coef = coef * ah[nu[j]] % pM_;
      e += static_cast<std::uint64_t>(nu[j]) * frobenius_shift(field_->log(lambda[j]), p_, i, order);
    }
    s = ring_->add(s, ring_->scale(teich_[e % order], coef));
  }
  return s;
}

FrobeniusMatrix build_step_matrix(std::shared_ptr<const FrobeniusPlan> plan,
                                  const std::vector<FiniteField::Elt>& lambda, std::uint32_t i) {
  FrobeniusMatrix m;
  m.entries = plan->step_entries(lambda, i);
  m.step_index = static_cast<int>(i);
  m.scale = plan->family().mu + 1;
  m.plan = std::move(plan);
  return m;
}

FrobeniusMatrix frobenius_matrix(std::shared_ptr<const FrobeniusPlan> plan,
                                 const std::vector<FiniteField::Elt>& lambda) {
  FrobeniusMatrix acc = build_step_matrix(plan, lambda, 0);
  if (plan->degree() == 1) return acc;
  const UnramifiedRing& R = plan->ring();
  const std::size_t n = acc.size();
  for (std::uint32_t i = 1; i < plan->degree(); ++i) {
    FrobeniusMatrix s = build_step_matrix(plan, lambda, i);
    std::vector<UnramifiedElement> prod(n * n, R.zero());
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t k = 0; k < n; ++k) {
        const auto& x = acc.at(r, k);
        if (R.is_zero(x)) continue;
        for (std::size_t c = 0; c < n; ++c) {
          const auto& y = s.at(k, c);
          if (R.is_zero(y)) continue;
          prod[r * n + c] = R.add(prod[r * n + c], R.mul(x, y));
        }
      }
    acc.entries = std::move(prod);
    acc.scale += s.scale;
  }
  acc.step_index = -1;
  return acc;
}

MarginReport check_column_bounds(const FrobeniusMatrix& mat) {
  const FrobeniusPlan& plan = *mat.plan;
  const UnramifiedRing& R = plan.ring();
  const int M = plan.precision();
  const int e = static_cast<int>(plan.p()) - 1;
  const int extra = (static_cast<int>(plan.degree()) - 1) * (plan.family().mu + 1);
  MarginReport rep;
  rep.name = "column valuation bound";
  rep.unit = "pi";
  const std::size_t n = mat.size();
  for (std::size_t c = 0; c < n; ++c) {
    int mn = M;
    for (std::size_t r = 0; r < n; ++r) mn = std::min(mn, R.valuation(mat.at(r, c)));
    const int required = depth(plan.basis()[c]) + extra;
    const bool certified = mn < M || M + mat.scale >= required;
    rep.rows.push_back({format_vector(plan.basis()[c]), e * (mn + mat.scale), e * required, certified});
  }
  return rep;
}

EigenDiagnostics minimal_eigenvalue(const std::vector<FrobeniusMatrix>& factors, int target, int max_iters) {
  if (factors.empty()) throw std::invalid_argument("minimal_eigenvalue: no factors");
  const FrobeniusPlan& plan = *factors.front().plan;
  const UnramifiedRing& R = plan.ring();
  const int M = plan.precision();
  const std::size_t n = factors.front().size();
  const std::size_t b = plan.b_index();
  const int mu1 = plan.family().mu + 1;
  int scale = 0;
  for (const auto& f : factors) scale += f.scale;

  EigenDiagnostics d;
  std::vector<UnramifiedElement> v(n, R.zero());
  v[b] = R.one();
  for (int k = 0; k < max_iters; ++k) {
    for (std::size_t f = factors.size(); f-- > 0;) {
      std::vector<UnramifiedElement> w(n, R.zero());
      for (std::size_t c = 0; c < n; ++c) {
        if (R.is_zero(v[c])) continue;
        for (std::size_t r = 0; r < n; ++r) {
          const auto& x = factors[f].at(r, c);
          if (!R.is_zero(x)) w[r] = R.add(w[r], R.mul(x, v[c]));
        }
      }
      v = std::move(w);
    }
    UnramifiedElement est = v[b];
    if (R.valuation(est) > 0) {
      if (k == 0) d.unit_start = false;
      d.contraction_ok = false;
      d.estimates.push_back(est);
      break;
    }
    UnramifiedElement inv = R.inverse(est);
    for (auto& x : v) x = R.mul(x, inv);
    if (!d.estimates.empty()) {
      const int o = std::min(M, R.valuation(R.sub(est, d.estimates.back())));
      const int delta = scale + o;
      d.delta_ord.push_back(delta);
      if (delta < mu1 + k) d.contraction_ok = false;
    }
    d.estimates.push_back(est);
    if (k + 1 >= target && k >= 1 && d.delta_ord.back() - scale >= target) break;
  }
  return d;
}

std::string status_name(UnitRootResult::Status s) {
  switch (s) {
    case UnitRootResult::Status::kOk: return "ok";
    case UnitRootResult::Status::kOutOfDomain: return "no distinguished root";
    case UnitRootResult::Status::kNoConvergence: return "no convergence";
    case UnitRootResult::Status::kNotRational: return "not rational";
  }
  return "unknown";
}

namespace {

int eigen_target(const FamilyData& fam, std::uint32_t a, int m) {
  return std::max(1, m - static_cast<int>(a) * fam.mu);
}

}  // namespace

int engine_working_precision(const FamilyData& fam, std::uint32_t a, const EngineOptions& opt) {
  return eigen_target(fam, a, opt.m) + 2;
}

int engine_depth(const FamilyData& fam, const EngineOptions& opt) {
  return opt.T > 0 ? opt.T : fam.mu + 1 + opt.m;
}

std::shared_ptr<const FrobeniusPlan> make_engine_plan(const FamilyData& fam, std::uint32_t p, std::uint32_t a,
                                                      const EngineOptions& opt) {
  if (opt.m < 1) throw std::invalid_argument("unit_root: precision m must be >= 1");
  return std::make_shared<FrobeniusPlan>(fam, p, a, engine_depth(fam, opt), engine_working_precision(fam, a, opt));
}

UnitRootResult unit_root(const std::shared_ptr<const FrobeniusPlan>& plan,
                         const std::vector<FiniteField::Elt>& lambda, const EngineOptions& opt) {
  const FamilyData& fam = plan->family();
  const std::uint32_t a = plan->degree();
  const std::uint32_t p = plan->p();
  const UnramifiedRing& R = plan->ring();
  UnitRootResult res;
  res.T_used = plan->depth_cut();
  res.M_work = plan->precision();
  res.hasse_norm = hasse_norm(plan->hasse(), plan->field(), lambda);
  const int target = eigen_target(fam, a, opt.m);
  const int max_iters = opt.max_iters > 0 ? opt.max_iters : target + 8;

  std::vector<FrobeniusMatrix> factors;
  for (std::uint32_t i = 0; i < a; ++i) factors.push_back(build_step_matrix(plan, lambda, i));
  res.diagnostics = minimal_eigenvalue(factors, target, res.hasse_norm == 0 ? 1 : max_iters);
  res.iterations = static_cast<int>(res.diagnostics.estimates.size());
  if (res.hasse_norm == 0 || !res.diagnostics.unit_start) {
    res.status = UnitRootResult::Status::kOutOfDomain;
    res.message = "H(lambda) vanishes: no distinguished root";
    return res;
  }
  const auto& est = res.diagnostics.estimates;
  res.eigen_normalized = est.back();
  const int k = static_cast<int>(est.size()) - 1;
  int cert = std::min({plan->depth_cut() - fam.mu, k + 1, plan->precision()});
  if (!res.diagnostics.delta_ord.empty()) {
    // the last two estimates must agree to the claimed precision
    int scale = static_cast<int>(a) * (fam.mu + 1);
    cert = std::min(cert, res.diagnostics.delta_ord.back() - scale);
  }
  if (cert < target || R.valuation(est.back()) > 0) {
    res.status = UnitRootResult::Status::kNoConvergence;
    res.message = "estimates did not stabilize to the requested precision";
  }
  for (std::uint32_t c = 1; c < a; ++c) {
    Integer x = mod(est.back().coords[c], ipow(p, cert));
    if (x != 0) {
      res.status = UnitRootResult::Status::kNotRational;
      res.message = "eigenvalue is not in Z_p to the certified precision";
    }
  }
  const int amu = static_cast<int>(a) * fam.mu;
  res.certified = amu + cert;
  res.ord = amu;
  Integer modulus = ipow(p, res.certified);
  Integer unit = powm(plan->c_over_p(), a * (fam.mu + 1), ipow(p, plan->precision()));
  res.rho = mod(unit * est.back().coords[0] % ipow(p, cert) * ipow(p, amu), modulus);
  return res;
}

UnitRootResult unit_root(const FamilyData& fam, std::uint32_t p, std::uint32_t a,
                         const std::vector<FiniteField::Elt>& lambda, const EngineOptions& opt) {
  return unit_root(make_engine_plan(fam, p, a, opt), lambda, opt);
}

namespace {

std::vector<UnramifiedElement> teichmuller_point(const UnramifiedRing& B, const FiniteField& F,
                                                 const std::vector<FiniteField::Elt>& lambda, std::uint32_t i) {
  std::vector<UnramifiedElement> pt;
  std::uint64_t e = 1;
  for (std::uint32_t t = 0; t < i; ++t) e *= F.p();
  for (auto x : lambda) pt.push_back(B.teichmuller(F.pow(x, e)));
  return pt;
}

// prod_j theta_{nu_j} L^nu summed over the decompositions of w.
RamifiedElement theta_value(const FamilyData& fam, const RamifiedRing& RR, const CoeffTable& theta,
                            const IntVec& w, const std::vector<UnramifiedElement>& point) {
  const UnramifiedRing& B = RR.base();
  RamifiedElement s = RR.zero();
  for (const auto& nu : nonnegative_decompositions(fam, w)) {
    RamifiedElement c = RR.one();
    UnramifiedElement mono = B.one();
    for (int j = 0; j < fam.N; ++j) {
      if (nu[j] == 0) continue;
      c = RR.mul(c, theta.entries.at(nu[j]));
      mono = B.mul(mono, B.pow(point[j], static_cast<std::uint64_t>(nu[j])));
    }
    s = RR.add(s, RR.mul(c, RR.from_unramified(mono)));
  }
  return s;
}

}  // namespace

MarginReport trace_congruence_check(const std::shared_ptr<const FrobeniusPlan>& plan,
                                    const std::vector<FiniteField::Elt>& lambda) {
  const FamilyData& fam = plan->family();
  const std::uint32_t p = plan->p(), a = plan->degree();
  const int e = static_cast<int>(p) - 1;
  const int M = plan->precision();
  const UnramifiedRing& R = plan->ring();
  const FiniteField& F = plan->field();

  FrobeniusMatrix X = frobenius_matrix(plan, lambda);
  UnramifiedElement tr = R.zero();
  for (std::size_t u = 0; u < X.size(); ++u) tr = R.add(tr, X.at(u, u));
  // dropped basis elements and intermediate indices deeper than T act with
  // normalized ord >= T - mu
  const int trunc = std::min(M, plan->depth_cut() - fam.mu);

  MarginReport rep;
  rep.name = "trace congruence";
  rep.unit = "pi";

  // Unit level: normalized trace against prod_i H(lambda-hat^{p^i}) with H
  // taken from the exact Hasse term list.
  UnramifiedElement hprod = R.one();
  for (std::uint32_t i = 0; i < a; ++i) {
    auto pt = teichmuller_point(R, F, lambda, i);
    UnramifiedElement h = R.zero();
    for (const auto& t : plan->hasse().terms) {
      UnramifiedElement mono = R.from_rational(t.coeff);
      for (int j = 0; j < fam.N; ++j)
        if (t.u[j]) mono = R.mul(mono, R.pow(pt[j], static_cast<std::uint64_t>(t.u[j])));
      h = R.add(h, mono);
    }
    hprod = R.mul(hprod, h);
  }
  {
    int v = std::min(trunc, R.valuation(R.sub(tr, hprod)));
    rep.rows.push_back({"normalized trace vs prod H", e * v, e, trunc >= 1});
  }

  // Literal: c^{a(mu+1)} Tr against prod theta_{-(p-1)b}(lambda-hat^{p^i}).
  const int K = e * M;
  RamifiedRing RR(plan->field_ptr(), K);
  RamifiedElement g0 = RR.from_prime_subring(compute_gamma0(p, K));
  RamifiedElement cR = RR.pow(g0, p - 1);
  IntVec w(fam.b.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = -static_cast<std::int64_t>(e) * fam.b[i];
  std::int64_t top = 0;
  for (const auto& nu : nonnegative_decompositions(fam, w))
    for (auto x : nu) top = std::max(top, x);
  CoeffTable theta = theta_coefficients(RR, static_cast<int>(top));
  RamifiedElement rhs = RR.one();
  for (std::uint32_t i = 0; i < a; ++i)
    rhs = RR.mul(rhs, theta_value(fam, RR, theta, w, teichmuller_point(RR.base(), F, lambda, i)));
  const int scale = static_cast<int>(a) * (fam.mu + 1);
  RamifiedElement lhs = RR.mul(RR.pow(cR, scale), RR.from_unramified(tr));
  RamifiedElement diff = RR.truncate(RR.sub(lhs, rhs), e * (scale + trunc));
  const int required = e * (1 + scale);
  rep.rows.push_back({"c^{a(mu+1)} Tr vs prod theta", RR.valuation(diff), required, diff.prec >= required});
  return rep;
}

MarginReport check_literal_entries(const std::shared_ptr<const FrobeniusPlan>& plan,
                                   const std::vector<FiniteField::Elt>& lambda, std::uint32_t i, int K) {
  const FamilyData& fam = plan->family();
  const std::uint32_t p = plan->p();
  const int e = static_cast<int>(p) - 1;
  if (K > e * plan->precision())
    throw std::invalid_argument("check_literal_entries: K exceeds the plan precision");
  RamifiedRing RR(plan->field_ptr(), K);
  RamifiedElement g0 = RR.from_prime_subring(compute_gamma0(p, K));
  RamifiedElement cR = RR.pow(g0, p - 1);
  CoeffTable theta = theta_coefficients(RR, static_cast<int>(p) * plan->depth_cut());
  auto pt = teichmuller_point(RR.base(), plan->field(), lambda, i);

  MarginReport rep;
  rep.name = "literal dual entries";
  rep.unit = "pi";
  const auto& basis = plan->basis();
  for (const auto& u : basis)
    for (const auto& v : basis) {
      IntVec w = minus_p_times(u, v, p);
      if (!nonnegative(w)) continue;
      RamifiedElement lhs = RR.mul(theta_value(fam, RR, theta, w, pt), RR.pow(g0, p * depth(u)));
      RamifiedElement P = RR.from_unramified(plan->weight_value(w, lambda, i));
      RamifiedElement rhs = RR.mul(RR.mul(RR.pow(cR, depth(u)), P), RR.pow(g0, p * depth(v)));
      RamifiedElement d = RR.sub(lhs, rhs);
      rep.rows.push_back({format_vector(u) + "|" + format_vector(v), RR.valuation(d), K, d.prec >= K});
    }
  return rep;
}

}  // namespace dwork
