#include "dwork/family.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace dwork {

namespace {

using Mat = std::vector<std::vector<Integer>>;

Mat identity(std::size_t n) {
  Mat m(n, std::vector<Integer>(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

struct Diagonal {
  Mat U, D, V;
  int rank = 0;
};

// Row/column reduction to diagonal form: U * A * V = D with U, V unimodular.
Diagonal diagonalize(Mat A) {
  const std::size_t m = A.size();
  const std::size_t n = m ? A[0].size() : 0;
  Mat U = identity(m), V = identity(n);
  std::size_t t = 0;
  auto swap_rows = [&](std::size_t i, std::size_t j) {
    std::swap(A[i], A[j]);
    std::swap(U[i], U[j]);
  };
  auto swap_cols = [&](std::size_t i, std::size_t j) {
    for (auto& row : A) std::swap(row[i], row[j]);
    for (auto& row : V) std::swap(row[i], row[j]);
  };
  while (t < std::min(m, n)) {
    std::size_t bi = m, bj = n;
    for (std::size_t i = t; i < m; ++i)
      for (std::size_t j = t; j < n; ++j)
        if (A[i][j] != 0 && (bi == m || abs(A[i][j]) < abs(A[bi][bj]))) {
          bi = i;
          bj = j;
        }
    if (bi == m) break;
    swap_rows(t, bi);
    swap_cols(t, bj);
    for (;;) {
      bool clean = true;
      for (std::size_t i = t + 1; i < m; ++i) {
        if (A[i][t] == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), A[i][t].get_mpz_t(), A[t][t].get_mpz_t());
        for (std::size_t j = 0; j < n; ++j) A[i][j] -= q * A[t][j];
        for (std::size_t j = 0; j < m; ++j) U[i][j] -= q * U[t][j];
        if (A[i][t] != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (A[t][j] == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), A[t][j].get_mpz_t(), A[t][t].get_mpz_t());
        for (std::size_t i = 0; i < m; ++i) A[i][j] -= q * A[i][t];
        for (std::size_t i = 0; i < n; ++i) V[i][j] -= q * V[i][t];
        if (A[t][j] != 0) clean = false;
      }
      if (clean) break;
      std::size_t ri = t, cj = t;
      for (std::size_t i = t + 1; i < m; ++i)
        if (A[i][t] != 0 && abs(A[i][t]) < abs(A[ri][cj])) {
          ri = i;
          cj = t;
        }
      for (std::size_t j = t + 1; j < n; ++j)
        if (A[t][j] != 0 && abs(A[t][j]) < abs(A[ri][cj])) {
          ri = t;
          cj = j;
        }
      if (ri != t) swap_rows(t, ri);
      if (cj != t) swap_cols(t, cj);
    }
    ++t;
  }
  return {U, A, V, static_cast<int>(t)};
}

// Row Hermite normal form of an integer matrix (rows are lattice generators).
std::vector<IntVec> hermite_rows(Mat rows) {
  const std::size_t k = rows.size();
  const std::size_t n = k ? rows[0].size() : 0;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < k; ++c) {
    for (;;) {
      std::size_t best = k;
      for (std::size_t i = r; i < k; ++i)
        if (rows[i][c] != 0 && (best == k || abs(rows[i][c]) < abs(rows[best][c]))) best = i;
      if (best == k) break;
      std::swap(rows[r], rows[best]);
      bool single = true;
      for (std::size_t i = r + 1; i < k; ++i) {
        if (rows[i][c] == 0) continue;
        Integer q;
        mpz_fdiv_q(q.get_mpz_t(), rows[i][c].get_mpz_t(), rows[r][c].get_mpz_t());
        for (std::size_t j = 0; j < n; ++j) rows[i][j] -= q * rows[r][j];
        if (rows[i][c] != 0) single = false;
      }
      if (single) break;
    }
    if (rows[r][c] == 0) continue;
    if (rows[r][c] < 0)
      for (auto& x : rows[r]) x = -x;
    for (std::size_t i = 0; i < r; ++i) {
      Integer q;
      mpz_fdiv_q(q.get_mpz_t(), rows[i][c].get_mpz_t(), rows[r][c].get_mpz_t());
      for (std::size_t j = 0; j < n; ++j) rows[i][j] -= q * rows[r][j];
    }
    ++r;
  }
  std::vector<IntVec> out;
  for (std::size_t i = 0; i < r; ++i) {
    IntVec v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = rows[i][j].get_si();
    out.push_back(v);
  }
  return out;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

bool FamilyData::in_group_M(const IntVec& u) const {
  const std::size_t m = snf_U.size();
  if (u.size() != m) return false;
  for (std::size_t i = 0; i < m; ++i) {
    Integer y = 0;
    for (std::size_t j = 0; j < m; ++j)
      if (snf_U[i][j] != 0 && u[j] != 0) y += snf_U[i][j] * Integer(static_cast<long>(u[j]));
    if (static_cast<int>(i) < rank) {
      if (mpz_divisible_p(y.get_mpz_t(), snf_diag[i].get_mpz_t()) == 0) return false;
    } else if (y != 0) {
      return false;
    }
  }
  return true;
}

IntVec FamilyData::apply(const IntVec& l) const {
  IntVec r(n + 2, 0);
  for (int j = 0; j < N; ++j) {
    if (l[j] == 0) continue;
    for (int i = 0; i < n + 2; ++i) r[i] += l[j] * A_plus[j][i];
  }
  return r;
}

std::uint64_t FamilyData::hash() const {
  std::ostringstream os;
  os << n << ';' << d << ';';
  for (const auto& a : original_exponents) os << format_vector(a) << ';';
  return fnv1a(os.str());
}

std::string format_vector(const IntVec& v) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ')';
  return os.str();
}

FamilyData validate_family(int n, int d, const std::vector<IntVec>& exponents,
                           const std::vector<std::string>& names, const std::string& name) {
  if (exponents.empty()) throw FamilyError(FamilyErrorCode::kEmpty, "family: exponent list is empty");
  if (n < 1 || d < 1) throw FamilyError(FamilyErrorCode::kEmpty, "family: n and d must be positive");
  for (std::size_t j = 0; j < exponents.size(); ++j) {
    if (exponents[j].size() != static_cast<std::size_t>(n + 1))
      throw FamilyError(FamilyErrorCode::kRagged,
                        "family: exponent " + std::to_string(j) + " does not have n+1 entries");
    std::int64_t s = 0;
    for (auto e : exponents[j]) {
      if (e < 0)
        throw FamilyError(FamilyErrorCode::kNegativeExponent,
                          "family: exponent " + std::to_string(j) + " has a negative entry");
      s += e;
    }
    if (s != d)
      throw FamilyError(FamilyErrorCode::kNotHomogeneous,
                        "family: monomial " + std::to_string(j) + " has degree " + std::to_string(s) +
                            ", expected " + std::to_string(d));
  }
  {
    std::set<IntVec> seen(exponents.begin(), exponents.end());
    if (seen.size() != exponents.size())
      throw FamilyError(FamilyErrorCode::kDuplicateMonomial, "family: repeated monomial");
  }
  if ((n + 1) % d != 0)
    throw FamilyError(FamilyErrorCode::kDegreeDoesNotDivide,
                      "family: d = " + std::to_string(d) + " does not divide n+1 = " + std::to_string(n + 1));
  if (!names.empty() && names.size() != exponents.size())
    throw FamilyError(FamilyErrorCode::kRagged, "family: names must match the number of monomials");

  FamilyData fam;
  fam.name = name;
  fam.n = n;
  fam.d = d;
  fam.N = static_cast<int>(exponents.size());
  fam.mu = (n + 1) / d - 1;
  fam.original_exponents = exponents;
  const int k = fam.mu + 1;
  if (k > fam.N)
    throw FamilyError(FamilyErrorCode::kNoOnesSubset, "family: fewer than mu+1 monomials");

  // lexicographically least k-subset summing to (1,...,1)
  std::vector<int> comb(k);
  for (int i = 0; i < k; ++i) comb[i] = i;
  bool found = false;
  for (;;) {
    IntVec s(n + 1, 0);
    for (int j : comb)
      for (int i = 0; i <= n; ++i) s[i] += exponents[j][i];
    if (std::all_of(s.begin(), s.end(), [](std::int64_t x) { return x == 1; })) {
      found = true;
      break;
    }
    int i = k - 1;
    while (i >= 0 && comb[i] == fam.N - k + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int t = i + 1; t < k; ++t) comb[t] = comb[t - 1] + 1;
  }
  if (!found)
    throw FamilyError(FamilyErrorCode::kNoOnesSubset,
                      "family: no " + std::to_string(k) + " monomials multiply to x_0...x_n");
  fam.ones_subset = comb;
  std::vector<bool> used(fam.N, false);
  for (int j : comb) {
    fam.permutation.push_back(j);
    used[j] = true;
  }
  for (int j = 0; j < fam.N; ++j)
    if (!used[j]) fam.permutation.push_back(j);

  for (int j : fam.permutation) {
    fam.A.push_back(exponents[j]);
    IntVec ap = exponents[j];
    ap.push_back(1);
    fam.A_plus.push_back(ap);
    fam.monomial_names.push_back(names.empty() ? "L" + std::to_string(j + 1) : names[j]);
  }
  fam.b.assign(n + 2, -1);
  fam.b[n + 1] = -(fam.mu + 1);
  fam.owner.assign(n + 1, -1);
  for (int j = 0; j <= fam.mu; ++j)
    for (int i = 0; i <= n; ++i)
      if (fam.A[j][i] == 1) fam.owner[i] = j;

  Mat Ap(n + 2, std::vector<Integer>(fam.N));
  for (int i = 0; i < n + 2; ++i)
    for (int j = 0; j < fam.N; ++j) Ap[i][j] = static_cast<long>(fam.A_plus[j][i]);
  Diagonal dg = diagonalize(Ap);
  fam.snf_U = dg.U;
  fam.snf_V = dg.V;
  fam.rank = dg.rank;
  for (int i = 0; i < dg.rank; ++i) fam.snf_diag.push_back(abs(dg.D[i][i]));
  return fam;
}

FamilyData parse_family(const std::string& text, const std::string& source) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FamilyError(FamilyErrorCode::kParse, source + ": " + e.what());
  }
  auto field_error = [&](const std::string& field, const std::string& msg) {
    return FamilyError(FamilyErrorCode::kParse, source + ": field '" + field + "': " + msg);
  };
  if (!j.is_object()) throw FamilyError(FamilyErrorCode::kParse, source + ": top level must be an object");
  for (const char* key : {"n", "d", "exponents"})
    if (!j.contains(key)) throw field_error(key, "missing");
  if (!j["n"].is_number_integer()) throw field_error("n", "expected an integer");
  if (!j["d"].is_number_integer()) throw field_error("d", "expected an integer");
  if (!j["exponents"].is_array()) throw field_error("exponents", "expected a list of lists");
  std::vector<IntVec> exps;
  for (std::size_t r = 0; r < j["exponents"].size(); ++r) {
    const auto& row = j["exponents"][r];
    std::string where = "exponents[" + std::to_string(r) + "]";
    if (!row.is_array()) throw field_error(where, "expected a list of integers");
    IntVec v;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!row[c].is_number_integer())
        throw field_error(where + "[" + std::to_string(c) + "]", "expected an integer");
      v.push_back(row[c].get<std::int64_t>());
    }
    exps.push_back(v);
  }
  std::vector<std::string> names;
  if (j.contains("names")) {
    if (!j["names"].is_array()) throw field_error("names", "expected a list of strings");
    for (std::size_t r = 0; r < j["names"].size(); ++r) {
      if (!j["names"][r].is_string()) throw field_error("names[" + std::to_string(r) + "]", "expected a string");
      names.push_back(j["names"][r].get<std::string>());
    }
  }
  std::string name;
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw field_error("name", "expected a string");
    name = j["name"].get<std::string>();
  }
  try {
    return validate_family(j["n"].get<int>(), j["d"].get<int>(), exps, names, name);
  } catch (const FamilyError& e) {
    throw FamilyError(e.code(), source + ": " + e.what());
  }
}

FamilyData load_family_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FamilyError(FamilyErrorCode::kParse, path + ": cannot open file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_family(ss.str(), path);
}

LatticeBasis relation_lattice_basis(const FamilyData& fam) {
  Mat rows;
  for (int c = fam.rank; c < fam.N; ++c) {
    std::vector<Integer> v(fam.N);
    for (int i = 0; i < fam.N; ++i) v[i] = fam.snf_V[i][c];
    rows.push_back(v);
  }
  LatticeBasis lb;
  lb.basis = hermite_rows(rows);
  lb.rank = static_cast<int>(lb.basis.size());
  return lb;
}

std::vector<IntVec> enumerate_cone_offsets(const FamilyData& fam, const IntVec& target, int bound) {
  const int N = fam.N, n = fam.n, k = fam.mu + 1;
  std::vector<IntVec> out;
  IntVec l(N, 0);
  IntVec resid = target;
  // Positive part over columns k..N-1; negative part is then forced.
  std::function<void(int, int)> rec = [&](int j, int left) {
    if (j == N) {
      IntVec neg(k, 0);
      for (int i = 0; i <= n; ++i) neg[fam.owner[i]] = resid[i];
      for (int i = 0; i <= n; ++i)
        if (resid[i] != neg[fam.owner[i]]) return;
      std::int64_t s = 0;
      for (int t = 0; t < k; ++t) {
        if (neg[t] > 0) return;
        s += neg[t];
      }
      if (s != resid[n + 1]) return;
      for (int t = 0; t < k; ++t) l[t] = neg[t];
      out.push_back(l);
      for (int t = 0; t < k; ++t) l[t] = 0;
      return;
    }
    for (int v = 0; v <= left; ++v) {
      l[j] = v;
      rec(j + 1, left - v);
      for (int i = 0; i < n + 2; ++i) resid[i] -= fam.A_plus[j][i];
    }
    for (int i = 0; i < n + 2; ++i) resid[i] += (left + 1) * fam.A_plus[j][i];
    l[j] = 0;
  };
  rec(k, bound);
  std::sort(out.begin(), out.end(), [&](const IntVec& x, const IntVec& y) {
    std::int64_t px = 0, py = 0;
    for (int j = k; j < N; ++j) {
      px += x[j];
      py += y[j];
    }
    if (px != py) return px < py;
    return x < y;
  });
  return out;
}

std::vector<IntVec> enumerate_cone_relations(const FamilyData& fam, int bound) {
  return enumerate_cone_offsets(fam, IntVec(fam.n + 2, 0), bound);
}

bool in_M_minus(const FamilyData& fam, const IntVec& u) {
  if (u.size() != static_cast<std::size_t>(fam.n + 2)) return false;
  for (auto x : u)
    if (x >= 0) return false;
  return fam.in_group_M(u);
}

std::vector<IntVec> enumerate_interior_support(const FamilyData& fam, int T) {
  if (T < fam.mu + 1) throw std::invalid_argument("enumerate_interior_support: T < mu+1");
  std::vector<IntVec> out;
  const int parts = fam.n + 1;
  for (int k = fam.mu + 1; k <= T; ++k) {
    std::vector<IntVec> layer;
    IntVec u(fam.n + 2, 0);
    u[fam.n + 1] = -k;
    std::function<void(int, int)> rec = [&](int i, int left) {
      if (i == parts - 1) {
        u[i] = -left;
        if (fam.in_group_M(u)) layer.push_back(u);
        return;
      }
      for (int x = 1; x <= left - (parts - 1 - i); ++x) {
        u[i] = -x;
        rec(i + 1, left - x);
      }
    };
    rec(0, fam.d * k);
    std::sort(layer.begin(), layer.end());
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

std::vector<IntVec> nonnegative_decompositions(const FamilyData& fam, const IntVec& w) {
  const int N = fam.N, m = fam.n + 2;
  std::vector<IntVec> out;
  for (auto x : w)
    if (x < 0) return out;
  IntVec nu(N, 0);
  IntVec resid = w;
  std::function<void(int)> rec = [&](int j) {
    if (resid[m - 1] == 0) {
      for (int i = 0; i < m; ++i)
        if (resid[i] != 0) return;
      out.push_back(nu);
      return;
    }
    if (j == N) return;
    std::int64_t cap = resid[m - 1];
    for (int i = 0; i < m - 1; ++i)
      if (fam.A_plus[j][i] > 0) cap = std::min(cap, resid[i] / fam.A_plus[j][i]);
    for (std::int64_t v = cap; v >= 0; --v) {
      nu[j] = v;
      for (int i = 0; i < m; ++i) resid[i] -= v * fam.A_plus[j][i];
      rec(j + 1);
      for (int i = 0; i < m; ++i) resid[i] += v * fam.A_plus[j][i];
    }
    nu[j] = 0;
  };
  rec(0);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dwork
