#include "dwork/ring_tower.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace dwork {

namespace {

using u64 = std::uint64_t;

void trim(FpPoly& f) {
  while (!f.empty() && f.back() == 0) f.pop_back();
}

FpPoly poly_mod(FpPoly a, const FpPoly& m, std::uint32_t p) {
  trim(a);
  std::size_t dm = m.size() - 1;
  // m.back()^{p-2} is its inverse
  u64 inv_lead = 1;
  for (u64 k = 0; k + 2 < p; ++k) inv_lead = inv_lead * m.back() % p;
  while (a.size() > dm) {
    u64 c = a.back() * inv_lead % p;
    std::size_t shift = a.size() - 1 - dm;
    for (std::size_t i = 0; i <= dm; ++i)
      a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + (p - c) * m[i]) % p);
    trim(a);
  }
  return a;
}

FpPoly poly_mulmod(const FpPoly& a, const FpPoly& b, const FpPoly& m, std::uint32_t p) {
  if (a.empty() || b.empty()) return {};
  FpPoly r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      r[i + j] = static_cast<std::uint32_t>((r[i + j] + u64(a[i]) * b[j]) % p);
  return poly_mod(std::move(r), m, p);
}

FpPoly poly_gcd(FpPoly a, FpPoly b, std::uint32_t p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    FpPoly r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

}  // namespace

bool is_irreducible(const FpPoly& f_in, std::uint32_t p) {
  FpPoly f = f_in;
  trim(f);
  if (f.size() < 2) return false;
  std::size_t deg = f.size() - 1;
  if (deg == 1) return true;
  // x^{p^k} mod f for k = 1..deg; need gcd(x^{p^k} - x, f) = 1 for k < deg
  // and x^{p^deg} = x.
  FpPoly x = {0, 1};
  FpPoly cur = x;
  for (std::size_t k = 1; k <= deg; ++k) {
    FpPoly acc = {1};
    FpPoly base = cur;
    for (u64 e = p; e > 0; e >>= 1) {
      if (e & 1) acc = poly_mulmod(acc, base, f, p);
      base = poly_mulmod(base, base, f, p);
    }
    cur = acc;
    FpPoly diff = cur;
    diff.resize(std::max<std::size_t>(diff.size(), 2), 0);
    diff[1] = (diff[1] + p - 1) % p;
    trim(diff);
    if (k < deg) {
      if (diff.empty()) return false;
      FpPoly g = poly_gcd(f, diff, p);
      if (g.size() > 1) return false;
    } else if (!diff.empty()) {
      return false;
    }
  }
  return true;
}

FpPoly least_irreducible(std::uint32_t p, std::uint32_t degree) {
  if (degree == 0) throw std::invalid_argument("least_irreducible: degree must be >= 1");
  u64 count = 1;
  for (std::uint32_t i = 0; i < degree; ++i) count *= p;
  for (u64 k = 0; k < count; ++k) {
    FpPoly f(degree + 1, 0);
    f[degree] = 1;
    u64 t = k;
    // most significant digit is the x^{degree-1} coefficient
    for (std::uint32_t i = 0; i < degree; ++i) {
      f[i] = static_cast<std::uint32_t>(t % p);
      t /= p;
    }
    if (is_irreducible(f, p)) return f;
  }
  throw std::logic_error("least_irreducible: none found");
}

FiniteField::FiniteField(std::uint32_t p, std::uint32_t degree)
    : FiniteField(p, (is_prime(p) ? least_irreducible(p, degree)
                                  : throw std::invalid_argument("FiniteField: p is not prime"))) {}

FiniteField::FiniteField(std::uint32_t p, FpPoly modulus) : p_(p), modulus_(std::move(modulus)) {
  if (!is_prime(p)) throw std::invalid_argument("FiniteField: p is not prime");
  trim(modulus_);
  if (modulus_.size() < 2 || modulus_.back() != 1)
    throw std::invalid_argument("FiniteField: modulus must be monic of degree >= 1");
  for (auto c : modulus_)
    if (c >= p) throw std::invalid_argument("FiniteField: modulus coefficient out of range");
  if (!is_irreducible(modulus_, p))
    throw std::invalid_argument("FiniteField: modulus is not irreducible");
  degree_ = static_cast<std::uint32_t>(modulus_.size() - 1);
  q_ = 1;
  for (std::uint32_t i = 0; i < degree_; ++i) {
    q_ *= p;
    if (q_ > (u64(1) << 24)) throw std::invalid_argument("FiniteField: order too large for tables");
  }
  build_tables();
}

FiniteField::Elt FiniteField::from_coords(const std::vector<std::uint32_t>& c) const {
  if (c.size() > degree_) throw std::invalid_argument("FiniteField: too many coordinates");
  u64 v = 0;
  for (std::size_t i = c.size(); i-- > 0;) v = v * p_ + (c[i] % p_);
  return static_cast<Elt>(v);
}

std::vector<std::uint32_t> FiniteField::coords(Elt x) const {
  std::vector<std::uint32_t> c(degree_);
  for (std::uint32_t i = 0; i < degree_; ++i) {
    c[i] = x % p_;
    x /= p_;
  }
  return c;
}

FiniteField::Elt FiniteField::from_int(std::int64_t v) const {
  std::int64_t r = v % static_cast<std::int64_t>(p_);
  if (r < 0) r += p_;
  return static_cast<Elt>(r);
}

FiniteField::Elt FiniteField::add(Elt x, Elt y) const {
  if (degree_ == 1) {
    Elt s = x + y;
    return s >= p_ ? s - p_ : s;
  }
  Elt r = 0, scale = 1;
  while (x != 0 || y != 0) {
    Elt d = x % p_ + y % p_;
    if (d >= p_) d -= p_;
    r += d * scale;
    scale *= p_;
    x /= p_;
    y /= p_;
  }
  return r;
}

FiniteField::Elt FiniteField::neg(Elt x) const {
  if (degree_ == 1) return x == 0 ? 0 : p_ - x;
  Elt r = 0, scale = 1;
  while (x != 0) {
    Elt d = x % p_;
    r += (d == 0 ? 0 : p_ - d) * scale;
    scale *= p_;
    x /= p_;
  }
  return r;
}

FiniteField::Elt FiniteField::sub(Elt x, Elt y) const { return add(x, neg(y)); }

FiniteField::Elt FiniteField::inv(Elt x) const {
  if (x == 0) throw std::domain_error("FiniteField: inverse of zero");
  std::uint32_t l = log_[x];
  return exp_[l == 0 ? 0 : (q_ - 1 - l)];
}

FiniteField::Elt FiniteField::pow(Elt x, u64 e) const {
  if (e == 0) return 1;
  if (x == 0) return 0;
  return exp_[(u64(log_[x]) * (e % (q_ - 1))) % (q_ - 1)];
}

std::uint32_t FiniteField::trace(Elt x) const {
  Elt s = 0, y = x;
  for (std::uint32_t k = 0; k < degree_; ++k) {
    s = add(s, y);
    y = frobenius(y);
  }
  return s;  // lies in F_p, so the index is the integer value
}

std::string FiniteField::to_string(Elt x) const {
  if (degree_ == 1) return std::to_string(x);
  std::ostringstream os;
  auto c = coords(x);
  os << '[';
  for (std::size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
  os << ']';
  return os.str();
}

FiniteField::Elt FiniteField::poly_mul(Elt x, Elt y) const {
  FpPoly a = coords(x);
  FpPoly b = coords(y);
  FpPoly r = poly_mulmod(a, b, modulus_, p_);
  r.resize(degree_, 0);
  return from_coords(std::vector<std::uint32_t>(r.begin(), r.end()));
}

void FiniteField::build_tables() {
  exp_.assign(q_ - 1 == 0 ? 1 : q_ - 1, 0);
  log_.assign(q_, 0);
  if (q_ == 2) {
    exp_[0] = 1;
    return;
  }
  // factor q-1 to test generators
  std::vector<u64> primes;
  u64 m = q_ - 1;
  for (u64 d = 2; d * d <= m; ++d)
    if (m % d == 0) {
      primes.push_back(d);
      while (m % d == 0) m /= d;
    }
  if (m > 1) primes.push_back(m);
  auto slow_pow = [&](Elt x, u64 e) {
    Elt r = 1;
    for (; e > 0; e >>= 1) {
      if (e & 1) r = poly_mul(r, x);
      x = poly_mul(x, x);
    }
    return r;
  };
  Elt g = 0;
  for (Elt cand = 2; cand < q_; ++cand) {
    bool ok = true;
    for (u64 r : primes)
      if (slow_pow(cand, (q_ - 1) / r) == 1) {
        ok = false;
        break;
      }
    if (ok) {
      g = cand;
      break;
    }
  }
  if (g == 0) throw std::logic_error("FiniteField: no primitive element");
  Elt cur = 1;
  for (u64 k = 0; k < q_ - 1; ++k) {
    exp_[k] = cur;
    log_[cur] = static_cast<std::uint32_t>(k);
    cur = poly_mul(cur, g);
  }
}

std::vector<FiniteField::Elt> field_embedding(const FiniteField& small, const FiniteField& big) {
  if (small.p() != big.p() || big.degree() % small.degree() != 0)
    throw std::invalid_argument("field_embedding: not a subfield");
  const FpPoly& m = small.modulus();
  FiniteField::Elt root = 0;
  bool found = false;
  for (FiniteField::Elt r = 0; r < big.order() && !found; ++r) {
    FiniteField::Elt v = 0;
    for (std::size_t i = m.size(); i-- > 0;) v = big.add(big.mul(v, r), big.from_int(m[i]));
    if (v == 0) {
      root = r;
      found = true;
    }
  }
  if (!found) throw std::logic_error("field_embedding: modulus has no root");
  std::vector<FiniteField::Elt> table(small.order());
  for (FiniteField::Elt x = 0; x < small.order(); ++x) {
    auto c = small.coords(x);
    FiniteField::Elt v = 0;
    for (std::size_t i = c.size(); i-- > 0;) v = big.add(big.mul(v, root), big.from_int(c[i]));
    table[x] = v;
  }
  return table;
}

// ---------------------------------------------------------------- Z_q / p^M

UnramifiedRing::UnramifiedRing(std::shared_ptr<const FiniteField> field, int M)
    : field_(std::move(field)), M_(M) {
  if (M < 1) throw std::invalid_argument("UnramifiedRing: precision must be >= 1");
  pM_ = ipow(field_->p(), M);
  const FpPoly& m = field_->modulus();
  lifted_modulus_.assign(m.begin(), m.end() - 1);
}

UnramifiedElement UnramifiedRing::zero() const { return {std::vector<Integer>(degree(), 0)}; }

UnramifiedElement UnramifiedRing::one() const {
  auto r = zero();
  r.coords[0] = pM_ == 1 ? 0 : 1;
  return r;
}

UnramifiedElement UnramifiedRing::from_integer(const Integer& v) const {
  auto r = zero();
  r.coords[0] = mod(v, pM_);
  return r;
}

UnramifiedElement UnramifiedRing::from_rational(const Rational& v) const {
  auto r = zero();
  r.coords[0] = rational_mod(v, p(), pM_);
  return r;
}

UnramifiedElement UnramifiedRing::from_residue(FiniteField::Elt x) const {
  auto c = field_->coords(x);
  auto r = zero();
  for (std::uint32_t i = 0; i < degree(); ++i) r.coords[i] = c[i];
  return r;
}

FiniteField::Elt UnramifiedRing::residue(const Elt& x) const {
  std::vector<std::uint32_t> c(degree());
  for (std::uint32_t i = 0; i < degree(); ++i) c[i] = static_cast<std::uint32_t>(mpz_fdiv_ui(x.coords[i].get_mpz_t(), p()));
  return field_->from_coords(c);
}

UnramifiedElement UnramifiedRing::add(const Elt& x, const Elt& y) const {
  Elt r = x;
  for (std::uint32_t i = 0; i < degree(); ++i) {
    r.coords[i] += y.coords[i];
    if (r.coords[i] >= pM_) r.coords[i] -= pM_;
  }
  return r;
}

UnramifiedElement UnramifiedRing::sub(const Elt& x, const Elt& y) const {
  Elt r = x;
  for (std::uint32_t i = 0; i < degree(); ++i) {
    r.coords[i] -= y.coords[i];
    if (r.coords[i] < 0) r.coords[i] += pM_;
  }
  return r;
}

UnramifiedElement UnramifiedRing::neg(const Elt& x) const { return sub(zero(), x); }

UnramifiedElement UnramifiedRing::mul(const Elt& x, const Elt& y) const {
  const std::uint32_t a = degree();
  if (a == 1) {
    Elt r{{x.coords[0] * y.coords[0]}};
    mpz_mod(r.coords[0].get_mpz_t(), r.coords[0].get_mpz_t(), pM_.get_mpz_t());
    return r;
  }
  std::vector<Integer> prod(2 * a - 1, 0);
  for (std::uint32_t i = 0; i < a; ++i) {
    if (x.coords[i] == 0) continue;
    for (std::uint32_t j = 0; j < a; ++j) prod[i + j] += x.coords[i] * y.coords[j];
  }
  for (std::uint32_t k = 2 * a - 2; k >= a; --k) {
    if (prod[k] == 0) continue;
    Integer c = prod[k];
    prod[k] = 0;
    for (std::uint32_t i = 0; i < a; ++i)
      if (lifted_modulus_[i] != 0) prod[k - a + i] -= c * lifted_modulus_[i];
  }
  Elt r;
  r.coords.resize(a);
  for (std::uint32_t i = 0; i < a; ++i) r.coords[i] = mod(prod[i], pM_);
  return r;
}

UnramifiedElement UnramifiedRing::scale(const Elt& x, const Integer& s) const {
  Elt r = x;
  for (auto& c : r.coords) c = mod(c * s, pM_);
  return r;
}

UnramifiedElement UnramifiedRing::pow(const Elt& x, std::uint64_t e) const {
  Elt r = one(), b = x;
  for (; e > 0; e >>= 1) {
    if (e & 1) r = mul(r, b);
    if (e > 1) b = mul(b, b);
  }
  return r;
}

UnramifiedElement UnramifiedRing::inverse(const Elt& x) const {
  FiniteField::Elt r = residue(x);
  if (r == 0) throw std::domain_error("UnramifiedRing: inverse of a non-unit");
  Elt y = from_residue(field_->inv(r));
  // Newton: y <- y (2 - x y), doubling the number of correct digits.
  Elt two = from_integer(2);
  for (int prec = 1; prec < M_; prec *= 2) y = mul(y, sub(two, mul(x, y)));
  return y;
}

UnramifiedElement UnramifiedRing::divide_by_p_power(const Elt& x, int k) const {
  Integer pk = ipow(p(), k);
  Elt r = x;
  for (auto& c : r.coords) {
    if (mpz_divisible_p(c.get_mpz_t(), pk.get_mpz_t()) == 0)
      throw std::domain_error("UnramifiedRing: inexact division by p^k");
    mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), pk.get_mpz_t());
  }
  return r;
}

UnramifiedElement UnramifiedRing::truncate(const Elt& x, int m) const {
  Integer pm = ipow(p(), std::max(m, 0));
  Elt r = x;
  for (auto& c : r.coords) c = mod(c, pm);
  return r;
}

bool UnramifiedRing::is_zero(const Elt& x) const {
  for (const auto& c : x.coords)
    if (c != 0) return false;
  return true;
}

int UnramifiedRing::valuation(const Elt& x) const {
  int v = M_;
  for (const auto& c : x.coords)
    if (c != 0) v = std::min(v, dwork::valuation(c, p()));
  return v;
}

bool UnramifiedRing::is_rational(const Elt& x) const {
  for (std::uint32_t i = 1; i < degree(); ++i)
    if (x.coords[i] != 0) return false;
  return true;
}

UnramifiedElement UnramifiedRing::teichmuller(FiniteField::Elt r) const {
  if (r == 0) return zero();
  // x -> x^q is a contraction on the residue class of r: each step gains a digit.
  Elt x = from_residue(r);
  for (int k = 0; k < M_; ++k) {
    Elt y = pow(x, field_->order());
    if (y == x) break;
    x = std::move(y);
  }
  return x;
}

std::vector<UnramifiedElement> UnramifiedRing::teichmuller_table() const {
  std::vector<Elt> t(field_->order());
  t[0] = zero();
  if (field_->order() == 2) {
    t[1] = one();
    return t;
  }
  // Multiplicativity: lift the generator once and take powers.
  Elt g = teichmuller(field_->generator());
  Elt cur = one();
  for (std::uint64_t k = 0; k + 1 < field_->order(); ++k) {
    t[field_->exp(k)] = cur;
    cur = mul(cur, g);
  }
  return t;
}

std::string UnramifiedRing::to_string(const Elt& x) const {
  std::ostringstream os;
  if (degree() == 1) {
    os << x.coords[0].get_str();
  } else {
    os << '[';
    for (std::size_t i = 0; i < x.coords.size(); ++i) os << (i ? "," : "") << x.coords[i].get_str();
    os << ']';
  }
  return os.str();
}

// ------------------------------------------------------------ Z_q[pi] / pi^K

RamifiedRing::RamifiedRing(std::shared_ptr<const FiniteField> field, int K)
    : e_(static_cast<int>(field->p()) - 1), K_(K) {
  if (K < 1) throw std::invalid_argument("RamifiedRing: precision must be >= 1");
  int M = (K + e_ - 1) / e_;
  base_ = std::make_shared<UnramifiedRing>(std::move(field), M);
  // Phi_p(1 + pi) = sum_{k=0}^{p-1} C(p, k+1) pi^k, monic of degree p-1.
  const std::uint32_t p = base_->p();
  relation_.resize(e_);
  for (int k = 0; k < e_; ++k) relation_[k] = -binomial(p, k + 1);
}

RamifiedElement RamifiedRing::canonical(Elt x) const {
  x.prec = std::min(x.prec, K_);
  for (int i = 0; i < e_; ++i) {
    int digits = x.prec - i <= 0 ? 0 : (x.prec - i + e_ - 1) / e_;
    x.coeffs[i] = base_->truncate(x.coeffs[i], digits);
  }
  return x;
}

RamifiedElement RamifiedRing::zero() const {
  Elt r;
  r.coeffs.assign(e_, base_->zero());
  r.prec = K_;
  return r;
}

RamifiedElement RamifiedRing::one() const { return from_integer(1); }

RamifiedElement RamifiedRing::pi() const {
  if (e_ == 1) return from_integer(-2);
  Elt r = zero();
  r.coeffs[1] = base_->one();
  return canonical(r);
}

RamifiedElement RamifiedRing::from_integer(const Integer& v) const {
  Elt r = zero();
  r.coeffs[0] = base_->from_integer(v);
  return canonical(r);
}

RamifiedElement RamifiedRing::from_rational(const Rational& v) const {
  Elt r = zero();
  r.coeffs[0] = base_->from_rational(v);
  return canonical(r);
}

RamifiedElement RamifiedRing::from_unramified(const UnramifiedElement& x) const {
  Elt r = zero();
  r.coeffs[0] = base_->truncate(x, base_->precision());
  return canonical(r);
}

RamifiedElement RamifiedRing::from_prime_subring(const Elt& x) const {
  Elt r = zero();
  for (int i = 0; i < e_; ++i) r.coeffs[i].coords[0] = x.coeffs[i].coords[0];
  r.prec = std::min(x.prec, K_);
  return canonical(std::move(r));
}

RamifiedElement RamifiedRing::add(const Elt& x, const Elt& y) const {
  Elt r;
  r.coeffs.resize(e_);
  for (int i = 0; i < e_; ++i) r.coeffs[i] = base_->add(x.coeffs[i], y.coeffs[i]);
  r.prec = std::min(x.prec, y.prec);
  return canonical(std::move(r));
}

RamifiedElement RamifiedRing::sub(const Elt& x, const Elt& y) const {
  Elt r;
  r.coeffs.resize(e_);
  for (int i = 0; i < e_; ++i) r.coeffs[i] = base_->sub(x.coeffs[i], y.coeffs[i]);
  r.prec = std::min(x.prec, y.prec);
  return canonical(std::move(r));
}

RamifiedElement RamifiedRing::neg(const Elt& x) const { return sub(zero(), x); }

RamifiedElement RamifiedRing::mul(const Elt& x, const Elt& y) const {
  std::vector<UnramifiedElement> prod(2 * e_ - 1, base_->zero());
  for (int i = 0; i < e_; ++i) {
    if (base_->is_zero(x.coeffs[i])) continue;
    for (int j = 0; j < e_; ++j) prod[i + j] = base_->add(prod[i + j], base_->mul(x.coeffs[i], y.coeffs[j]));
  }
  for (int k = 2 * e_ - 2; k >= e_; --k) {
    if (base_->is_zero(prod[k])) continue;
    for (int i = 0; i < e_; ++i)
      prod[k - e_ + i] = base_->add(prod[k - e_ + i], base_->scale(prod[k], relation_[i]));
    prod[k] = base_->zero();
  }
  Elt r;
  r.coeffs.assign(prod.begin(), prod.begin() + e_);
  // Errors are bounded by min(prec_x + ord y, prec_y + ord x).
  long px = x.prec, py = y.prec;
  long vx = valuation(x), vy = valuation(y);
  r.prec = static_cast<int>(std::min<long>({px + vy, py + vx, K_}));
  return canonical(std::move(r));
}

RamifiedElement RamifiedRing::scale(const Elt& x, const Integer& s) const {
  Elt r = x;
  for (auto& c : r.coeffs) c = base_->scale(c, s);
  int vs = s == 0 ? K_ : dwork::valuation(s, p()) * e_;
  r.prec = static_cast<int>(std::min<long>(long(x.prec) + vs, K_));
  return canonical(std::move(r));
}

RamifiedElement RamifiedRing::pow(const Elt& x, std::uint64_t e) const {
  Elt r = one(), b = x;
  for (; e > 0; e >>= 1) {
    if (e & 1) r = mul(r, b);
    if (e > 1) b = mul(b, b);
  }
  return r;
}

RamifiedElement RamifiedRing::inverse(const Elt& x) const {
  if (valuation(x) != 0) throw std::domain_error("RamifiedRing: inverse of a non-unit");
  // unit: its degree-0 coordinate is a unit of Z_q; start from that inverse
  Elt y = from_unramified(base_->inverse(x.coeffs[0]));
  Elt two = from_integer(2);
  for (int it = 0; it < 2 * K_ + 2; ++it) {
    Elt ny = mul(y, sub(two, mul(x, y)));
    Elt d = sub(ny, y);
    y = std::move(ny);
    if (valuation(d) >= std::min(K_, x.prec)) break;
  }
  y.prec = std::min(y.prec, x.prec);
  return canonical(std::move(y));
}

RamifiedElement RamifiedRing::divide_by_p(const Elt& x) const {
  if (valuation(x) < e_) throw std::domain_error("RamifiedRing: inexact division by p");
  Elt r = x;
  for (auto& c : r.coeffs) c = base_->divide_by_p_power(c, 1);
  r.prec = x.prec - e_;
  return canonical(std::move(r));
}

RamifiedElement RamifiedRing::truncate(const Elt& x, int k) const {
  Elt r = x;
  r.prec = std::min(x.prec, k);
  return canonical(std::move(r));
}

int RamifiedRing::valuation(const Elt& x) const {
  long v = x.prec;
  for (int i = 0; i < e_; ++i) {
    if (base_->is_zero(x.coeffs[i])) continue;
    v = std::min<long>(v, long(i) + long(e_) * base_->valuation(x.coeffs[i]));
  }
  return static_cast<int>(v);
}

UnramifiedElement RamifiedRing::project_unramified(const Elt& x) const {
  for (int i = 1; i < e_; ++i)
    if (!base_->is_zero(x.coeffs[i]))
      throw std::runtime_error("RamifiedRing: element is not in the unramified subring");
  return x.coeffs[0];
}

std::string RamifiedRing::to_string(const Elt& x) const {
  std::ostringstream os;
  os << '(';
  for (int i = 0; i < e_; ++i) os << (i ? ";" : "") << base_->to_string(x.coeffs[i]);
  os << ")+O(pi^" << x.prec << ')';
  return os.str();
}

// -------------------------------------------------------------- tower, gamma

RingTower make_ring_tower(std::uint32_t p, std::uint32_t a, int M, int K) {
  if (!is_prime(p)) throw std::invalid_argument("make_ring_tower: p is not prime");
  if (a < 1) throw std::invalid_argument("make_ring_tower: degree must be >= 1");
  if (M < 1 || K < 1) throw std::invalid_argument("make_ring_tower: precisions must be >= 1");
  if (static_cast<long>(K) > static_cast<long>(p - 1) * M)
    throw std::invalid_argument("make_ring_tower: K exceeds (p-1)M");
  RingTower t;
  t.field = std::make_shared<FiniteField>(p, a);
  t.unramified = std::make_shared<UnramifiedRing>(t.field, M);
  t.ramified = std::make_shared<RamifiedRing>(t.field, K);
  return t;
}

namespace {

// Largest i with p^i - i(p-1) < K; terms beyond it vanish mod pi^K.
int gamma_series_terms(std::uint32_t p, int K) {
  int i = 0;
  for (;;) {
    long long next = 1;
    for (int k = 0; k <= i; ++k) next *= p;
    if (next - static_cast<long long>(i + 1) * (p - 1) >= K) return i;
    ++i;
  }
}

}  // namespace

RamifiedElement compute_gamma0(std::uint32_t p, int K) {
  if (!is_prime(p)) throw std::invalid_argument("compute_gamma0: p is not prime");
  const int e = static_cast<int>(p) - 1;
  const int imax = gamma_series_terms(p, K + e);
  const int Kw = K + e * (imax + 2);
  auto field = std::make_shared<FiniteField>(p, 1);
  RamifiedRing R(field, Kw);
  auto g = [&](const RamifiedElement& t, RamifiedElement& deriv) {
    RamifiedElement sum = R.zero(), dsum = R.zero();
    RamifiedElement tp = t;  // t^{p^i}
    for (int i = 0; i <= imax; ++i) {
      RamifiedElement term = tp;
      for (int k = 0; k < i; ++k) term = R.divide_by_p(term);
      sum = R.add(sum, term);
      dsum = R.add(dsum, i == 0 ? R.one() : R.pow(t, static_cast<std::uint64_t>(ipow(p, i).get_ui()) - 1));
      tp = R.pow(tp, p);
    }
    deriv = dsum;
    return sum;
  };
  RamifiedElement t = R.pi();
  for (int it = 0; it < 64; ++it) {
    RamifiedElement d;
    RamifiedElement val = g(t, d);
    if (R.valuation(val) >= K + e) {
      // g' is a unit, so the residual bounds the distance to the root
      RamifiedRing RK(field, K);
      RamifiedElement r = RK.zero();
      for (int i = 0; i < e; ++i) r.coeffs[i] = t.coeffs[i];
      return RK.truncate(r, K);
    }
    t = R.sub(t, R.mul(val, R.inverse(d)));
  }
  throw std::runtime_error("compute_gamma0: refinement did not converge");
}

RamifiedElement compute_gamma_j(std::uint32_t p, int j, int K) {
  const int e = static_cast<int>(p) - 1;
  const int Kw = K + e * (j + 1);
  auto field = std::make_shared<FiniteField>(p, 1);
  RamifiedRing R(field, Kw);
  RamifiedElement g0 = compute_gamma0(p, Kw);
  RamifiedElement sum = R.zero(), tp = g0;
  sum.prec = Kw;
  for (int i = 0; i <= j; ++i) {
    RamifiedElement term = tp;
    for (int k = 0; k < i; ++k) term = R.divide_by_p(term);
    sum = R.add(sum, term);
    tp = R.pow(tp, p);
  }
  RamifiedRing RK(field, K);
  RamifiedElement r = RK.zero();
  for (int i = 0; i < e; ++i) r.coeffs[i] = sum.coeffs[i];
  r.prec = std::min(sum.prec, K);
  return RK.truncate(r, r.prec);
}

Integer gamma0_power_pm1(std::uint32_t p, int M) {
  const int e = static_cast<int>(p) - 1;
  const int K = e * M;
  RamifiedElement g0 = compute_gamma0(p, K);
  auto field = std::make_shared<FiniteField>(p, 1);
  RamifiedRing R(field, K);
  RamifiedElement c = R.pow(g0, e);
  // residual error of gamma_0 is >= pi^K, so c is known mod pi^{K + e - 1}
  c.prec = std::min(K, c.prec);
  UnramifiedElement u = R.project_unramified(c);
  return mod(u.coords[0], ipow(p, M));
}

}  // namespace dwork
