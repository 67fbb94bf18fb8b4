#include "dwork/point_count.hpp"

#include <algorithm>
#include <stdexcept>
#include <thread>

namespace dwork {

namespace {

using Elt = FiniteField::Elt;

struct Term {
  Elt coef;
  IntVec exps;
};
using Poly = std::vector<Term>;

// Evaluation of a few polynomials on F_Q through log tables, with an
// addition table for small Q.
class Evaluator {
 public:
  Evaluator(const FiniteField& F) : F_(F), Q_(F.order()) {
    if (Q_ <= 1024 && F.degree() > 1) {
      add_.resize(Q_ * Q_);
      for (Elt x = 0; x < Q_; ++x)
        for (Elt y = 0; y < Q_; ++y) add_[x * Q_ + y] = F.add(x, y);
    }
  }
  Elt add(Elt x, Elt y) const { return add_.empty() ? F_.add(x, y) : add_[x * Q_ + y]; }

  Elt eval(const Poly& f, const std::vector<Elt>& x) const {
    const std::uint64_t ord = Q_ - 1;
    Elt s = 0;
    for (const auto& t : f) {
      if (t.coef == 0) continue;
      std::uint64_t e = F_.log(t.coef);
      bool zero = false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (t.exps[i] == 0) continue;
        if (x[i] == 0) {
          zero = true;
          break;
        }
        e += static_cast<std::uint64_t>(t.exps[i]) * F_.log(x[i]);
      }
      if (!zero) s = add(s, F_.exp(e % ord));
    }
    return s;
  }

 private:
  const FiniteField& F_;
  std::uint64_t Q_;
  std::vector<Elt> add_;
};

struct BigFiber {
  std::shared_ptr<FiniteField> big;
  std::vector<Elt> lambda;
};

BigFiber lift_fiber(const FiniteField& base, const std::vector<Elt>& lambda, int s) {
  if (s < 1) throw std::invalid_argument("count: extension step s must be >= 1");
  BigFiber r;
  r.big = std::make_shared<FiniteField>(base.p(), base.modulus());
  if (s == 1) {
    r.lambda = lambda;
    return r;
  }
  r.big = std::make_shared<FiniteField>(base.p(), base.degree() * static_cast<std::uint32_t>(s));
  auto emb = field_embedding(base, *r.big);
  for (auto x : lambda) r.lambda.push_back(emb[x]);
  return r;
}

Poly family_poly(const FamilyData& fam, const FiniteField&, const std::vector<Elt>& lambda) {
  Poly f;
  for (int j = 0; j < fam.N; ++j) f.push_back({lambda[j], fam.A[j]});
  return f;
}

Poly partial(const FamilyData& fam, const FiniteField& F, const std::vector<Elt>& lambda, int i) {
  Poly f;
  for (int j = 0; j < fam.N; ++j) {
    if (fam.A[j][i] == 0) continue;
    Elt c = F.mul(F.from_int(fam.A[j][i]), lambda[j]);
    if (c == 0) continue;
    IntVec e = fam.A[j];
    e[i] -= 1;
    f.push_back({c, e});
  }
  return f;
}

std::uint64_t checked_points(std::uint64_t Q, int n, std::size_t cost, double budget) {
  double pts = 0, qp = 1;
  for (int k = 0; k <= n; ++k) {
    pts += qp;
    qp *= static_cast<double>(Q);
  }
  if (pts * static_cast<double>(std::max<std::size_t>(cost, 1)) > budget)
    throw std::length_error("count: enumeration exceeds the work budget");
  return static_cast<std::uint64_t>(pts);
}

// Calls visit(x) for every normalized representative of P^n(F_Q) whose first
// free coordinate lies in the worker's share; visit returns nothing and
// accumulates into worker-local state.
template <class State, class Visit>
std::vector<State> enumerate_projective(const FiniteField& F, int n, int threads, Visit visit) {
  const std::uint64_t Q = F.order();
  threads = std::max(1, threads);
  std::vector<State> states(threads);
  auto work = [&](int w) {
    std::vector<Elt> x(n + 1, 0);
    for (int L = 0; L <= n; ++L) {
      std::fill(x.begin(), x.end(), 0);
      x[L] = 1;
      const int free = n - L;
      if (free == 0) {
        if (w == 0) visit(states[w], x);
        continue;
      }
      for (Elt lead = 0; lead < Q; ++lead) {
        if (static_cast<int>(lead % threads) != w) continue;
        x[L + 1] = lead;
        for (int k = L + 2; k <= n; ++k) x[k] = 0;
        for (;;) {
          visit(states[w], x);
          int k = n;
          while (k > L + 1 && ++x[k] == Q) x[k--] = 0;
          if (k == L + 1) break;
        }
      }
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  return states;
}

}  // namespace

CountReport count_projective(const FamilyData& fam, const FiniteField& base, const std::vector<Elt>& lambda,
                             int s, const CountOptions& opt) {
  BigFiber bf = lift_fiber(base, lambda, s);
  const FiniteField& F = *bf.big;
  const std::uint64_t Q = F.order();
  checked_points(Q, fam.n, fam.N, opt.budget);
  Poly f = family_poly(fam, F, bf.lambda);
  Evaluator ev(F);

  using Hist = std::vector<std::uint64_t>;
  auto parts = enumerate_projective<Hist>(F, fam.n, opt.threads, [&](Hist& h, const std::vector<Elt>& x) {
    if (h.empty()) h.assign(Q, 0);
    ++h[ev.eval(f, x)];
  });
  Hist cnt(Q, 0);
  for (const auto& h : parts)
    for (std::size_t y = 0; y < h.size(); ++y) cnt[y] += h[y];

  CountReport rep;
  rep.s = s;
  rep.q_s = Q;
  rep.projective_count = Integer(static_cast<unsigned long>(cnt[0]));
  rep.affine_cone_count = 1 + Integer(static_cast<unsigned long>(Q - 1)) * rep.projective_count;
  if (!opt.buckets) return rep;

  // Value histogram on A^{n+1}: f(t x) = t^d f(x) for t in F^*.
  std::vector<Integer> h(Q, 0);
  h[0] = rep.affine_cone_count;
  for (Elt y0 = 1; y0 < Q; ++y0) {
    if (cnt[y0] == 0) continue;
    for (std::uint64_t k = 0; k + 1 < Q; ++k) {
      Elt t = F.exp(k);
      h[F.mul(F.pow(t, fam.d), y0)] += static_cast<unsigned long>(cnt[y0]);
    }
  }
  const std::uint32_t p = F.p();
  std::vector<std::uint32_t> tr(Q);
  for (Elt z = 0; z < Q; ++z) tr[z] = F.trace(z);
  rep.buckets.assign(p, 0);
  rep.buckets[0] += h[0] * static_cast<unsigned long>(Q);
  for (Elt y = 1; y < Q; ++y) {
    if (h[y] == 0) continue;
    std::vector<unsigned long> by_t(p, 0);
    for (Elt z = 0; z < Q; ++z) ++by_t[tr[F.mul(z, y)]];
    for (std::uint32_t t = 0; t < p; ++t) rep.buckets[t] += h[y] * by_t[t];
  }
  return rep;
}

std::vector<Integer> brute_force_buckets(const FamilyData& fam, const FiniteField& base,
                                         const std::vector<Elt>& lambda, int s) {
  BigFiber bf = lift_fiber(base, lambda, s);
  const FiniteField& F = *bf.big;
  const std::uint64_t Q = F.order();
  double total = 1;
  for (int k = 0; k < fam.n + 2; ++k) total *= static_cast<double>(Q);
  if (total > 5e7) throw std::length_error("brute_force_buckets: too many points");
  Poly f = family_poly(fam, F, bf.lambda);
  Evaluator ev(F);
  std::vector<Integer> c(F.p(), 0);
  std::vector<Elt> x(fam.n + 1, 0);
  for (;;) {
    Elt v = ev.eval(f, x);
    for (Elt z = 0; z < Q; ++z) c[F.trace(F.mul(z, v))] += 1;
    int k = fam.n;
    while (k >= 0 && ++x[k] == Q) x[k--] = 0;
    if (k < 0) break;
  }
  return c;
}

std::uint64_t singular_point_count(const FamilyData& fam, const FiniteField& base, const std::vector<Elt>& lambda,
                                   int k, const CountOptions& opt) {
  BigFiber bf = lift_fiber(base, lambda, k);
  const FiniteField& F = *bf.big;
  checked_points(F.order(), fam.n, static_cast<std::size_t>(fam.N) * (fam.n + 2), opt.budget);
  std::vector<Poly> polys{family_poly(fam, F, bf.lambda)};
  for (int i = 0; i <= fam.n; ++i) polys.push_back(partial(fam, F, bf.lambda, i));
  Evaluator ev(F);
  auto parts = enumerate_projective<std::uint64_t>(F, fam.n, opt.threads, [&](std::uint64_t& c, const std::vector<Elt>& x) {
    for (const auto& g : polys)
      if (ev.eval(g, x) != 0) return;
    ++c;
  });
  std::uint64_t total = 0;
  for (auto c : parts) total += c;
  return total;
}

bool cubic_curve_is_smooth(const FamilyData& fam, const FiniteField& base, const std::vector<Elt>& lambda,
                           const Integer& N1, const CountOptions& opt) {
  if (fam.n != 2 || fam.d != 3) throw std::invalid_argument("cubic_curve_is_smooth: plane cubics only");
  if (singular_point_count(fam, base, lambda, 2, opt) > 0) return false;
  if (N1 == 0 && singular_point_count(fam, base, lambda, 3, opt) > 0) return false;
  return true;
}

Integer refine_unit_root(const Integer& a, const Integer& q, std::uint32_t p, int m) {
  Integer pm = ipow(p, m);
  Integer x = mod(a, pm);
  for (int it = 0; it <= m + 1; ++it) {
    Integer inv;
    if (mpz_invert(inv.get_mpz_t(), x.get_mpz_t(), pm.get_mpz_t()) == 0)
      throw std::domain_error("refine_unit_root: trace is not a unit");
    x = mod(a - q * inv, pm);
  }
  return x;
}

CurveUnitRoot curve_unit_root(const FamilyData& fam, const FiniteField& base, const std::vector<Elt>& lambda, int m,
                              const CountOptions& opt) {
  if (fam.n != 2 || fam.d != 3) throw std::invalid_argument("curve_unit_root: plane cubics only");
  CountOptions o = opt;
  o.buckets = false;
  CurveUnitRoot r;
  r.m = m;
  r.N1 = count_projective(fam, base, lambda, 1, o).projective_count;
  const Integer q = static_cast<unsigned long>(base.order());
  r.trace = q + 1 - r.N1;
  if (!cubic_curve_is_smooth(fam, base, lambda, r.N1, o)) {
    r.status = CurveUnitRoot::Status::kSingular;
    return r;
  }
  if (mod(r.trace, Integer(base.p())) == 0) {
    r.status = CurveUnitRoot::Status::kSupersingular;
    return r;
  }
  r.rho = refine_unit_root(r.trace, q, base.p(), m);
  return r;
}

MarginReport ax_katz_check(const FamilyData& fam, std::uint32_t p, std::uint32_t a,
                           const std::vector<CountReport>& counts) {
  MarginReport rep;
  rep.name = "Ax-Katz";
  rep.unit = "p";
  for (const auto& c : counts) {
    const int required = static_cast<int>(a) * fam.mu * c.s;
    const int v = valuation(c.affine_cone_count, p);
    rep.rows.push_back({"s=" + std::to_string(c.s) + " cone", v, required, true});
    // (1 - q^s) card X = 1 mod q^{mu s}
    Integer qs = static_cast<unsigned long>(c.q_s);
    Integer r = (1 - qs) * c.projective_count - 1;
    const int vr = r == 0 ? required : valuation(r, p);
    rep.rows.push_back({"s=" + std::to_string(c.s) + " projective", vr, required, true});
  }
  return rep;
}

MarginReport bucket_check(const FamilyData& fam, std::uint32_t p, const std::vector<CountReport>& counts) {
  MarginReport rep;
  rep.name = "character-sum buckets";
  rep.unit = "bool";
  for (const auto& c : counts) {
    if (c.buckets.size() != p) continue;
    const std::string tag = "s=" + std::to_string(c.s) + " ";
    Integer total = 0;
    for (const auto& x : c.buckets) total += x;
    Integer qs = static_cast<unsigned long>(c.q_s);
    rep.rows.push_back({tag + "sum", total == ipow(qs, fam.n + 2) ? 1 : 0, 1, true});
    bool equal = true;
    for (std::uint32_t t = 2; t < p; ++t) equal = equal && c.buckets[t] == c.buckets[1];
    rep.rows.push_back({tag + "equal t>=1", equal ? 1 : 0, 1, true});
    const Integer c1 = p > 1 ? c.buckets[1] : Integer(0);
    rep.rows.push_back({tag + "c0-c1 = q^s #X'", c.buckets[0] - c1 == qs * c.affine_cone_count ? 1 : 0, 1, true});
  }
  return rep;
}

MarginReport verify_unit_root(const FamilyData& fam, std::uint32_t p, std::uint32_t a, const Integer& rho,
                              int certified, const std::vector<CountReport>& counts) {
  const int amu = static_cast<int>(a) * fam.mu;
  MarginReport rep;
  rep.name = "N_s = sum q^{is} + (-1)^{n-1} rho^s";
  rep.unit = "p";
  for (const auto& c : counts) {
    const int required = static_cast<int>(a) * (fam.mu + 1) * c.s;
    const int known = certified + amu * (c.s - 1);
    if (known < required)
      throw std::invalid_argument("verify_unit_root: rho precision p^" + std::to_string(certified) +
                                  " is too low for s=" + std::to_string(c.s));
    Integer qs = static_cast<unsigned long>(c.q_s);
    Integer rhs = 0;
    for (int i = 0; i < fam.n; ++i) rhs += ipow(qs, i);
    Integer rs = ipow(rho, c.s);
    if (fam.n % 2 == 1) rhs += rs;  // (-1)^{n-1} = +1 for odd n
    else rhs -= rs;
    Integer diff = mod(c.projective_count - rhs, ipow(p, required));
    const int margin = diff == 0 ? required : valuation(diff, p);
    rep.rows.push_back({"s=" + std::to_string(c.s), margin, required, true});
  }
  return rep;
}

MarginRow count_residue_check(const FamilyData& fam, std::uint32_t p, std::uint32_t a, std::uint32_t hasse_norm,
                               const Integer& N1) {
  const Integer q = ipow(p, a);
  const Integer qmu = ipow(q, fam.mu);
  const int required = static_cast<int>(a) * fam.mu + 1;
  Integer C = static_cast<unsigned long>(hasse_norm);
  if ((static_cast<long>(a) * (fam.mu + 1)) % 2 == 1) C = -C;
  Integer rhs = 0;
  for (int i = 0; i < fam.n; ++i) rhs += ipow(q, i);
  if (fam.n % 2 == 1) rhs += qmu * C;
  else rhs -= qmu * C;
  Integer diff = mod(N1 - rhs, ipow(p, required));
  return {"N_1 residue", diff == 0 ? required : valuation(diff, p), required, true};
}

}  // namespace dwork
