// dwork: command-line front end. Exit status 0 when every check passes, 1
// when some check fails, 2 on a configuration error.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "dwork/family.hpp"
#include "dwork/frobenius.hpp"
#include "dwork/hasse.hpp"
#include "dwork/hyper_series.hpp"
#include "dwork/point_count.hpp"
#include "dwork/report.hpp"
#include "dwork/splitting.hpp"

using namespace dwork;
using nlohmann::json;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

IntVec parse_intvec(const std::string& text) {
  IntVec v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      long long x = std::stoll(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      v.push_back(x);
    } catch (const std::exception&) {
      throw ConfigError("bad integer vector '" + text + "'");
    }
  }
  return v;
}

json margins_to_json(const MarginReport& m) {
  json rows = json::array();
  for (const auto& r : m.rows)
    rows.push_back({{"label", r.label}, {"margin", r.margin}, {"required", r.required}, {"passed", r.passed()}});
  return {{"name", m.name}, {"unit", m.unit}, {"passed", m.all_passed()}, {"rows", rows}};
}

json identity_to_json(const IdentityReport& r) {
  json j{{"name", r.name}, {"compared", r.compared}, {"mismatches", r.mismatches}, {"passed", r.passed()}};
  if (!r.first_mismatch.empty()) j["first_mismatch"] = r.first_mismatch;
  return j;
}

void emit(const std::string& text, const std::string& output) {
  if (output.empty() || output == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(output);
  if (!out) throw ConfigError("cannot write " + output);
  out << text;
}

void check_prime(std::uint32_t p, std::uint32_t a) {
  if (!is_prime(p)) throw ConfigError("p = " + std::to_string(p) + " is not prime");
  if (a < 1) throw ConfigError("a must be at least 1");
  double q = 1;
  for (std::uint32_t i = 0; i < a; ++i) q *= p;
  if (q > 1 << 24) throw ConfigError("q = p^a is too large for the field tables");
}

std::vector<FiniteField::Elt> internal_fiber(const FamilyData& fam, const FiniteField& F, const std::string& text) {
  std::vector<FiniteField::Elt> l;
  try {
    l = parse_fiber(text, F, fam.N);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (auto x : l)
    if (x == 0) throw ConfigError("fiber entries must be nonzero");
  return fam.to_internal(l);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unit roots of monomial Calabi-Yau families and their point-count oracles"};
  app.require_subcommand(1);

  std::string family_path, output, fiber_text;
  std::vector<std::string> fiber_list;
  std::uint32_t p = 0, a = 1;
  int m = 3, T = 0, max_iters = 0, s = 1, s_max = 1, bound = 4, K = 0, threads = 1;
  double budget = 1e9;
  bool census = false, all = false, checks = false, no_cache = false, no_trace = false;
  std::size_t random = 0, sweep_bound = 100000;
  std::uint64_t seed = 1;
  std::string u_text;

  auto add_family = [&](CLI::App* c) { c->add_option("family", family_path, "family file (JSON)")->required(); };
  auto add_field = [&](CLI::App* c) {
    c->add_option("-p,--p", p, "characteristic")->required();
    c->add_option("-a,--a", a, "degree of F_q over F_p");
  };

  auto* fam_cmd = app.add_subcommand("family", "family file operations");
  auto* fam_check = fam_cmd->add_subcommand("check", "validate a family file and print its lattice data");
  fam_cmd->require_subcommand(1);
  add_family(fam_check);

  auto* hasse_cmd = app.add_subcommand("hasse", "Hasse polynomial, residues and domain census");
  add_family(hasse_cmd);
  add_field(hasse_cmd);
  hasse_cmd->add_option("--fiber", fiber_text, "fiber e1,...,eN (indices or c0:c1:... coordinates)");
  hasse_cmd->add_flag("--census", census, "count in-domain fibers over all of (F_q^*)^N");
  hasse_cmd->add_option("--sweep-bound", sweep_bound, "largest number of fibers for --census");

  auto* series_cmd = app.add_subcommand("series", "truncated hypergeometric series F or F_u");
  add_family(series_cmd);
  series_cmd->add_option("--bound", bound, "positive-part truncation bound");
  series_cmd->add_option("--u", u_text, "degree vector u in M_- (comma separated, last entry -depth)");
  series_cmd->add_flag("--check", checks, "run contiguity, annihilation and integrality checks");

  auto* theta_cmd = app.add_subcommand("theta", "splitting-function coefficients and their identities");
  theta_cmd->add_option("-p,--p", p, "prime")->required();
  theta_cmd->add_option("--K", K, "pi-adic precision (default 4(p-1))");
  theta_cmd->add_option("--kmax", bound, "largest coefficient index")->default_val(12);
  theta_cmd->add_option("--family", family_path, "also check the Hasse congruence for this family");

  auto* ur_cmd = app.add_subcommand("unit-root", "distinguished root of one fiber");
  add_family(ur_cmd);
  add_field(ur_cmd);
  ur_cmd->add_option("--fiber", fiber_text, "fiber")->required();
  ur_cmd->add_option("-m,--m", m, "target p-adic precision");
  ur_cmd->add_option("-T,--T", T, "depth cut (default mu+1+m)");
  ur_cmd->add_option("--max-iters", max_iters, "power-iteration cap");

  auto* count_cmd = app.add_subcommand("count", "point counts of one fiber");
  add_family(count_cmd);
  add_field(count_cmd);
  count_cmd->add_option("--fiber", fiber_text, "fiber")->required();
  count_cmd->add_option("-s,--s", s, "extension degree");
  count_cmd->add_option("--budget", budget, "monomial evaluation budget");
  count_cmd->add_option("--threads", threads, "worker threads");
  count_cmd->add_flag("--no-cache", no_cache, "ignore DWORK_CACHE_DIR");

  auto add_pipeline = [&](CLI::App* c) {
    add_family(c);
    add_field(c);
    c->add_option("-m,--m", m, "target p-adic precision");
    c->add_option("-T,--T", T, "depth cut (default mu+1+m)");
    c->add_option("--max-iters", max_iters, "power-iteration cap");
    c->add_option("--s-max", s_max, "largest extension degree counted");
    c->add_option("--budget", budget, "monomial evaluation budget per count");
    c->add_option("--threads", threads, "fiber worker threads");
    c->add_option("-o,--output", output, "report path (default stdout)");
    c->add_flag("--no-cache", no_cache, "ignore DWORK_CACHE_DIR");
    c->add_flag("--no-trace", no_trace, "skip the trace congruence");
  };
  auto* verify_cmd = app.add_subcommand("verify", "engine against the counting oracle on listed fibers");
  add_pipeline(verify_cmd);
  verify_cmd->add_option("--fiber", fiber_list, "fiber (repeatable)");

  auto* sweep_cmd = app.add_subcommand("sweep", "engine against the counting oracle over many fibers");
  add_pipeline(sweep_cmd);
  auto* all_opt = sweep_cmd->add_flag("--all", all, "every fiber of (F_q^*)^N");
  auto* rnd_opt = sweep_cmd->add_option("--random", random, "random sample of this size");
  all_opt->excludes(rnd_opt);
  sweep_cmd->add_option("--seed", seed, "sampling seed");
  sweep_cmd->add_option("--sweep-bound", sweep_bound, "largest number of fibers for --all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (fam_check->parsed()) {
      FamilyData fam = load_family_file(family_path);
      LatticeBasis L = relation_lattice_basis(fam);
      json j;
      j["name"] = fam.name;
      j["n"] = fam.n;
      j["d"] = fam.d;
      j["N"] = fam.N;
      j["mu"] = fam.mu;
      j["ones_subset"] = fam.ones_subset;
      j["internal_order"] = fam.permutation;
      j["b"] = fam.b;
      j["lattice_rank"] = L.rank;
      json basis = json::array();
      for (const auto& row : L.basis) basis.push_back(fam.to_original(row));
      j["lattice_basis"] = basis;
      std::cout << j.dump() << "\n";
      return 0;
    }

    if (theta_cmd->parsed()) {
      check_prime(p, 1);
      if (K == 0) K = 4 * static_cast<int>(p - 1);
      RamifiedRing R(std::make_shared<const FiniteField>(p, 1), K);
      CoeffTable th = theta_coefficients(R, bound);
      json j;
      j["p"] = p;
      j["K"] = K;
      json coeffs = json::array();
      for (int i = 0; i <= th.max_index(); ++i) coeffs.push_back(R.to_string(th.entries[i]));
      j["theta"] = coeffs;
      bool ok = true;
      if (p <= 5) {
        MarginReport ae = check_alpha_prime_eigen(p, 30, 40), dk = check_dprime_kernel(p, 30, 40);
        j["alpha_prime_eigen"] = margins_to_json(ae);
        j["dprime_kernel"] = margins_to_json(dk);
        ok = ok && ae.all_passed() && dk.all_passed();
      }
      if (!family_path.empty()) {
        FamilyData fam = load_family_file(family_path);
        int need = static_cast<int>(p - 1) * (fam.mu + 2);
        MarginReport tc = check_theta_congruence(fam, p, std::max(K, need));
        j["hasse_congruence"] = margins_to_json(tc);
        ok = ok && tc.all_passed();
      }
      std::cout << j.dump() << "\n";
      return ok ? 0 : 1;
    }

    FamilyData fam = load_family_file(family_path);

    if (series_cmd->parsed()) {
      if (bound < 0) throw ConfigError("bound must be nonnegative");
      ConeSeries sr;
      IntVec u;
      if (u_text.empty()) {
        sr = f_series(fam, bound);
        u = fam.b;
      } else {
        u = parse_intvec(u_text);
        if (static_cast<int>(u.size()) != fam.n + 2) throw ConfigError("u must have n+2 entries");
        if (!in_M_minus(fam, u)) throw ConfigError("u is not in M_-");
        sr = f_u_series(fam, u, bound);
      }
      std::cout << dump_series(fam, sr);
      if (!checks) return 0;
      bool ok = true;
      json j = json::array();
      for (int jj = 0; jj < fam.N; ++jj) {
        IdentityReport r = check_contiguity(fam, u, jj, bound);
        if (!r.no_evidence()) ok = ok && r.passed();
        j.push_back(identity_to_json(r));
      }
      for (int i = 0; i < fam.n + 2; ++i) {
        Annihilator op;
        op.kind = Annihilator::Kind::kEuler;
        op.index = i;
        IdentityReport r = check_annihilation(fam, u, op, bound);
        ok = ok && r.passed();
        j.push_back(identity_to_json(r));
      }
      for (const auto& l : relation_lattice_basis(fam).basis) {
        Annihilator op;
        op.l = l;
        IdentityReport r = check_annihilation(fam, u, op, bound);
        if (!r.no_evidence()) ok = ok && r.passed();
        j.push_back(identity_to_json(r));
      }
      IdentityReport kr = check_k_u_divisibility(fam, u, bound);
      ok = ok && kr.passed();
      j.push_back(identity_to_json(kr));
      std::cout << j.dump() << "\n";
      return ok ? 0 : 1;
    }

    check_prime(p, a);
    FiniteField F(p, a);

    if (hasse_cmd->parsed()) {
      HassePolynomial H = hasse_polynomial(fam, p);
      json j;
      j["p"] = p;
      json terms = json::array();
      for (const auto& t : H.terms) terms.push_back({{"u", fam.to_original(t.u)}, {"coeff", t.coeff.get_str()}});
      j["terms"] = terms;
      if (!fiber_text.empty()) {
        auto lam = internal_fiber(fam, F, fiber_text);
        HasseResidue r = hasse_residue(H, F, lam);
        j["residue"] = r.value;
        j["norm"] = hasse_norm(H, F, lam);
        j["in_domain"] = r.in_domain;
      }
      if (census) {
        PipelineConfig cfg;
        cfg.mode = PipelineConfig::FiberMode::kAll;
        cfg.sweep_bound = sweep_bound;
        std::vector<std::vector<FiniteField::Elt>> fibers;
        try {
          fibers = select_fibers(fam, F, cfg);
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
        std::size_t in = 0;
        for (const auto& l : fibers) in += hasse_residue(H, F, fam.to_internal(l)).in_domain ? 1 : 0;
        j["census"] = {{"fibers", fibers.size()}, {"in_domain", in}};
      }
      std::cout << j.dump() << "\n";
      return 0;
    }

    if (ur_cmd->parsed()) {
      if (m < 1) throw ConfigError("m must be at least 1");
      if (T != 0 && T < fam.mu + 1) throw ConfigError("T must be at least mu+1");
      auto lam = internal_fiber(fam, F, fiber_text);
      EngineOptions eo;
      eo.m = m;
      eo.T = T;
      eo.max_iters = max_iters;
      UnitRootResult r = unit_root(fam, p, a, lam, eo);
      json j;
      j["status"] = status_name(r.status);
      j["hasse_norm"] = r.hasse_norm;
      if (r.status == UnitRootResult::Status::kOk) {
        j["rho"] = r.rho.get_str();
        j["modulus"] = std::to_string(p) + "^" + std::to_string(r.certified);
        j["certified"] = r.certified;
        j["ord"] = r.ord;
      }
      j["iterations"] = r.iterations;
      j["T"] = r.T_used;
      j["M"] = r.M_work;
      j["delta_ord"] = r.diagnostics.delta_ord;
      if (!r.message.empty()) j["message"] = r.message;
      std::cout << j.dump() << "\n";
      return r.status == UnitRootResult::Status::kOk || r.status == UnitRootResult::Status::kOutOfDomain ? 0 : 1;
    }

    if (count_cmd->parsed()) {
      if (s < 1) throw ConfigError("s must be at least 1");
      std::vector<FiniteField::Elt> original;
      try {
        original = parse_fiber(fiber_text, F, fam.N);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
      auto lam = fam.to_internal(original);
      CountCache cache(no_cache ? std::string() : cache_dir_from_env());
      std::string key = CountCache::key(fam, p, a, original, s);
      CountReport c;
      if (auto hit = cache.get(key)) {
        c = *hit;
      } else {
        CountOptions opt;
        opt.budget = budget;
        opt.threads = threads;
        c = count_projective(fam, F, lam, s, opt);
        cache.put(key, c);
      }
      std::vector<CountReport> cs{c};
      MarginReport ak = ax_katz_check(fam, p, a, cs), bk = bucket_check(fam, p, cs);
      json j;
      j["s"] = c.s;
      j["q_s"] = c.q_s;
      j["projective"] = c.projective_count.get_str();
      j["affine"] = c.affine_cone_count.get_str();
      json b = json::array();
      for (const auto& x : c.buckets) b.push_back(x.get_str());
      j["buckets"] = b;
      j["ax_katz"] = margins_to_json(ak);
      j["bucket_identities"] = margins_to_json(bk);
      std::cout << j.dump() << "\n";
      return ak.all_passed() && bk.all_passed() ? 0 : 1;
    }

    PipelineConfig cfg;
    cfg.p = p;
    cfg.a = a;
    cfg.m = m;
    cfg.T = T;
    cfg.max_iters = max_iters;
    cfg.s_max = s_max;
    cfg.budget = budget;
    cfg.threads = threads;
    cfg.trace_check = !no_trace;
    cfg.seed = seed;
    cfg.sweep_bound = sweep_bound;
    if (verify_cmd->parsed()) {
      cfg.mode = PipelineConfig::FiberMode::kList;
      for (const auto& t : fiber_list) {
        try {
          cfg.fibers.push_back(parse_fiber(t, F, fam.N));
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }
    } else if (all) {
      cfg.mode = PipelineConfig::FiberMode::kAll;
    } else if (random > 0) {
      cfg.mode = PipelineConfig::FiberMode::kRandom;
      cfg.sample = random;
    } else {
      throw ConfigError("sweep needs --all or --random N");
    }
    CountCache cache(no_cache ? std::string() : cache_dir_from_env());
    VerificationReport rep;
    try {
      rep = run_pipeline(fam, cfg, &cache);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    emit(report_jsonl(fam, rep), output);
    return rep.failed() == 0 ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "dwork: " << e.what() << "\n";
    return 2;
  } catch (const FamilyError& e) {
    std::cerr << "dwork: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "dwork: " << e.what() << "\n";
    return 2;
  }
}
