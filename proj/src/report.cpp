#include "dwork/report.hpp"

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace dwork {

using nlohmann::json;

std::vector<FiniteField::Elt> parse_fiber(const std::string& text, const FiniteField& F, int N) {
  std::vector<FiniteField::Elt> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw std::invalid_argument("fiber '" + text + "': empty entry");
    std::vector<std::uint32_t> coords;
    std::stringstream cs(item);
    std::string c;
    while (std::getline(cs, c, ':')) {
      std::size_t used = 0;
      unsigned long v = 0;
      try {
        v = std::stoul(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != c.size()) throw std::invalid_argument("fiber '" + text + "': bad entry '" + item + "'");
      coords.push_back(static_cast<std::uint32_t>(v));
    }
    if (coords.size() == 1) {
      if (coords[0] >= F.order())
        throw std::invalid_argument("fiber '" + text + "': index " + item + " is not below q");
      out.push_back(coords[0]);
    } else {
      if (coords.size() != F.degree())
        throw std::invalid_argument("fiber '" + text + "': expected " + std::to_string(F.degree()) + " coordinates");
      for (auto x : coords)
        if (x >= F.p()) throw std::invalid_argument("fiber '" + text + "': coordinate not below p");
      out.push_back(F.from_coords(coords));
    }
  }
  if (static_cast<int>(out.size()) != N)
    throw std::invalid_argument("fiber '" + text + "': expected " + std::to_string(N) + " entries");
  return out;
}

std::string format_fiber(const std::vector<FiniteField::Elt>& lambda) {
  std::string s;
  for (std::size_t i = 0; i < lambda.size(); ++i) s += (i ? "," : "") + std::to_string(lambda[i]);
  return s;
}

// ------------------------------------------------------------------ cache

namespace {

json count_to_json(const CountReport& c) {
  json j;
  j["s"] = c.s;
  j["q_s"] = c.q_s;
  j["projective"] = c.projective_count.get_str();
  j["affine"] = c.affine_cone_count.get_str();
  json b = json::array();
  for (const auto& x : c.buckets) b.push_back(x.get_str());
  j["buckets"] = b;
  return j;
}

CountReport count_from_json(const json& j) {
  CountReport c;
  c.s = j.at("s").get<int>();
  c.q_s = j.at("q_s").get<std::uint64_t>();
  c.projective_count = Integer(j.at("projective").get<std::string>());
  c.affine_cone_count = Integer(j.at("affine").get<std::string>());
  for (const auto& x : j.at("buckets")) c.buckets.emplace_back(x.get<std::string>());
  return c;
}

}  // namespace

CountCache::CountCache(std::string dir) {
  if (dir.empty()) return;
  std::filesystem::create_directories(dir);
  path_ = (std::filesystem::path(dir) / "counts.jsonl").string();
  std::ifstream in(path_);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    try {
      json j = json::parse(line);
      mem_[j.at("key").get<std::string>()] = count_from_json(j.at("count"));
    } catch (const std::exception&) {
      // a torn last line from an interrupted run is skipped
    }
  }
  in.close();
  // terminate a torn last line so the next append starts a fresh record
  std::fstream tail(path_, std::ios::in | std::ios::out | std::ios::binary);
  if (tail && tail.seekg(0, std::ios::end).tellg() > 0) {
    tail.seekg(-1, std::ios::end);
    if (tail.get() != '\n') {
      tail.seekp(0, std::ios::end);
      tail.put('\n');
    }
  }
}

std::optional<CountReport> CountCache::get(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = mem_.find(key);
  if (it == mem_.end()) return std::nullopt;
  return it->second;
}

void CountCache::put(const std::string& key, const CountReport& c) {
  std::lock_guard<std::mutex> lock(mu_);
  if (mem_.count(key)) return;
  mem_[key] = c;
  if (path_.empty()) return;
  std::ofstream out(path_, std::ios::app);
  json j;
  j["key"] = key;
  j["count"] = count_to_json(c);
  out << j.dump() << "\n";
}

std::string CountCache::key(const FamilyData& fam, std::uint32_t p, std::uint32_t a,
                            const std::vector<FiniteField::Elt>& lambda_original, int s) {
  std::ostringstream os;
  os << std::hex << fam.hash() << std::dec << "/" << p << "/" << a << "/" << format_fiber(lambda_original) << "/" << s;
  return os.str();
}

std::string cache_dir_from_env() {
  const char* v = std::getenv("DWORK_CACHE_DIR");
  return v ? std::string(v) : std::string();
}

// --------------------------------------------------------------- pipeline

std::size_t VerificationReport::passed() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.passed() ? 1 : 0;
  return n;
}

std::size_t VerificationReport::in_domain() const {
  std::size_t n = 0;
  for (const auto& r : records) n += r.in_domain ? 1 : 0;
  return n;
}

std::vector<std::vector<FiniteField::Elt>> select_fibers(const FamilyData& fam, const FiniteField& F,
                                                         const PipelineConfig& cfg) {
  std::vector<std::vector<FiniteField::Elt>> out;
  const std::uint64_t units = F.order() - 1;
  switch (cfg.mode) {
    case PipelineConfig::FiberMode::kList:
      for (const auto& l : cfg.fibers) {
        if (static_cast<int>(l.size()) != fam.N) throw std::invalid_argument("fiber has the wrong length");
        for (auto x : l)
          if (x == 0 || x >= F.order()) throw std::invalid_argument("fiber entries must be nonzero elements of F_q");
        out.push_back(l);
      }
      break;
    case PipelineConfig::FiberMode::kAll: {
      double total = 1;
      for (int j = 0; j < fam.N; ++j) total *= static_cast<double>(units);
      if (total > static_cast<double>(cfg.sweep_bound))
        throw std::invalid_argument("sweep over " + std::to_string(static_cast<std::uint64_t>(total)) +
                                    " fibers exceeds the sweep bound");
      std::vector<FiniteField::Elt> l(fam.N, 1);
      for (;;) {
        out.push_back(l);
        int k = fam.N - 1;
        while (k >= 0 && ++l[k] == F.order()) l[k--] = 1;
        if (k < 0) break;
      }
      break;
    }
    case PipelineConfig::FiberMode::kRandom: {
      std::mt19937_64 rng(cfg.seed);
      std::uniform_int_distribution<std::uint64_t> dist(1, units);
      for (std::size_t i = 0; i < cfg.sample; ++i) {
        std::vector<FiniteField::Elt> l(fam.N);
        for (auto& x : l) x = static_cast<FiniteField::Elt>(dist(rng));
        out.push_back(l);
      }
      break;
    }
  }
  return out;
}

namespace {

CountReport cached_count(const FamilyData& fam, const FiniteField& F, const std::vector<FiniteField::Elt>& original,
                         const std::vector<FiniteField::Elt>& internal, int s, const PipelineConfig& cfg,
                         CountCache* cache) {
  const std::string key = CountCache::key(fam, F.p(), F.degree(), original, s);
  if (cache) {
    if (auto hit = cache->get(key)) return *hit;
  }
  CountOptions opt;
  opt.budget = cfg.budget;
  CountReport c = count_projective(fam, F, internal, s, opt);
  if (cache) cache->put(key, c);
  return c;
}

void require(FiberRecord& r, const MarginReport& rep) {
  for (const auto& row : rep.rows)
    if (!row.passed()) r.failures.push_back(rep.name + " " + row.label);
}

FiberRecord run_fiber(const FamilyData& fam, const std::shared_ptr<const FrobeniusPlan>& plan,
                      const PipelineConfig& cfg, const std::vector<FiniteField::Elt>& original, std::size_t index,
                      CountCache* cache) {
  FiberRecord r;
  r.index = index;
  r.lambda = original;
  const FiniteField& F = plan->field();
  const std::uint32_t p = cfg.p, a = cfg.a;
  try {
    std::vector<FiniteField::Elt> lam = fam.to_internal(original);
    HasseResidue hr = hasse_residue(plan->hasse(), F, lam);
    r.hasse_value = hr.value;
    r.hasse_norm = hasse_norm(plan->hasse(), F, lam);
    r.in_domain = r.hasse_norm != 0;

    for (int s = 1; s <= cfg.s_max; ++s) r.counts.push_back(cached_count(fam, F, original, lam, s, cfg, cache));
    r.ax_katz = ax_katz_check(fam, p, a, r.counts);
    r.buckets = bucket_check(fam, p, r.counts);
    require(r, r.ax_katz);
    require(r, r.buckets);
    r.count_residue = count_residue_check(fam, p, a, r.hasse_norm, r.counts[0].projective_count);
    if (!r.count_residue.passed()) r.failures.push_back("count residue");

    const bool curves = fam.n == 2 && fam.d == 3;
    bool smooth = true;
    if (curves) {
      CountOptions opt;
      opt.budget = cfg.budget;
      const Integer& N1 = r.counts[0].projective_count;
      CurveUnitRoot cu;
      cu.m = cfg.m;
      cu.N1 = N1;
      cu.trace = Integer(static_cast<unsigned long>(F.order())) + 1 - N1;
      smooth = cubic_curve_is_smooth(fam, F, lam, N1, opt);
      if (!smooth) {
        cu.status = CurveUnitRoot::Status::kSingular;
        r.findings.push_back("singular fiber");
      } else if (mod(cu.trace, Integer(p)) == 0) {
        cu.status = CurveUnitRoot::Status::kSupersingular;
      } else {
        cu.rho = refine_unit_root(cu.trace, Integer(static_cast<unsigned long>(F.order())), p, cfg.m);
      }
      if (smooth && (cu.status == CurveUnitRoot::Status::kOk) != r.in_domain)
        r.failures.push_back("Hasse domain differs from ordinarity");
      r.curve = cu;
    }

    EngineOptions eo;
    eo.m = cfg.m;
    eo.T = cfg.T;
    eo.max_iters = cfg.max_iters;
    if (!r.in_domain) {
      r.findings.push_back("no distinguished root");
      r.engine = unit_root(plan, lam, eo);
      if (r.engine->status != UnitRootResult::Status::kOutOfDomain)
        r.failures.push_back("engine did not flag the out-of-domain fiber");
      return r;
    }
    r.engine = unit_root(plan, lam, eo);
    const UnitRootResult& ur = *r.engine;
    if (ur.status != UnitRootResult::Status::kOk) {
      r.failures.push_back("engine: " + status_name(ur.status));
      return r;
    }
    if (!ur.diagnostics.contraction_ok) r.failures.push_back("contraction diagnostics");
    if (cfg.trace_check) {
      r.trace = trace_congruence_check(plan, lam);
      require(r, r.trace);
    }
    const int amu = static_cast<int>(a) * fam.mu;
    r.verify_s = std::min(cfg.s_max, (ur.certified - amu) / static_cast<int>(a));
    if (r.verify_s >= 1) {
      std::vector<CountReport> used(r.counts.begin(), r.counts.begin() + r.verify_s);
      r.verify = verify_unit_root(fam, p, a, ur.rho, ur.certified, used);
      require(r, r.verify);
    } else {
      r.findings.push_back("certified precision too low for the count congruence");
    }
    if (r.curve && r.curve->status == CurveUnitRoot::Status::kOk) {
      const int cmp = std::min(cfg.m, ur.certified);
      Integer pm = ipow(p, cmp);
      if (mod(ur.rho, pm) != mod(r.curve->rho, pm)) r.failures.push_back("engine differs from curve unit root");
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  return r;
}

}  // namespace

VerificationReport run_pipeline(const FamilyData& fam, const PipelineConfig& cfg, CountCache* cache) {
  if (!is_prime(cfg.p)) throw std::invalid_argument("p must be prime");
  if (cfg.a < 1) throw std::invalid_argument("a must be >= 1");
  if (cfg.m < 1) throw std::invalid_argument("m must be >= 1");
  if (cfg.s_max < 1) throw std::invalid_argument("s_max must be >= 1");
  if (cfg.T != 0 && cfg.T < fam.mu + 1) throw std::invalid_argument("T must be at least mu+1");
  EngineOptions eo;
  eo.m = cfg.m;
  eo.T = cfg.T;
  eo.max_iters = cfg.max_iters;
  auto plan = make_engine_plan(fam, cfg.p, cfg.a, eo);
  auto fibers = select_fibers(fam, plan->field(), cfg);

  VerificationReport rep;
  rep.family = fam.name;
  rep.config = cfg;
  rep.records.resize(fibers.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next++;
      if (i >= fibers.size()) return;
      rep.records[i] = run_fiber(fam, plan, cfg, fibers[i], i, cache);
    }
  };
  const int threads = std::max(1, cfg.threads);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rep;
}

// ------------------------------------------------------------------- JSON

namespace {

json margins_json(const MarginReport& m) {
  json j;
  j["name"] = m.name;
  j["unit"] = m.unit;
  j["passed"] = m.all_passed();
  json rows = json::array();
  for (const auto& r : m.rows)
    rows.push_back({{"label", r.label}, {"margin", r.margin}, {"required", r.required}, {"certified", r.certified}});
  j["rows"] = rows;
  return j;
}

}  // namespace

std::string fiber_json(const FamilyData& fam, const FiberRecord& r) {
  (void)fam;
  json j;
  j["fiber"] = r.index;
  j["lambda"] = r.lambda;
  j["hasse"] = r.hasse_value;
  j["hasse_norm"] = r.hasse_norm;
  j["in_domain"] = r.in_domain;
  json counts = json::array();
  for (const auto& c : r.counts) counts.push_back(count_to_json(c));
  j["counts"] = counts;
  if (!r.ax_katz.rows.empty()) j["ax_katz"] = margins_json(r.ax_katz);
  if (!r.buckets.rows.empty()) j["buckets"] = margins_json(r.buckets);
  if (!r.counts.empty())
    j["count_residue"] = {{"margin", r.count_residue.margin}, {"required", r.count_residue.required}, {"passed", r.count_residue.passed()}};
  if (r.engine) {
    const auto& e = *r.engine;
    json u;
    u["status"] = status_name(e.status);
    if (e.status == UnitRootResult::Status::kOk) {
      u["rho"] = e.rho.get_str();
      u["certified"] = e.certified;
      u["ord"] = e.ord;
    }
    u["iterations"] = e.iterations;
    u["T"] = e.T_used;
    u["M"] = e.M_work;
    u["delta_ord"] = e.diagnostics.delta_ord;
    u["contraction_ok"] = e.diagnostics.contraction_ok;
    j["unit_root"] = u;
  }
  if (r.curve) {
    const auto& c = *r.curve;
    json cj;
    cj["N1"] = c.N1.get_str();
    cj["trace"] = c.trace.get_str();
    cj["status"] = c.status == CurveUnitRoot::Status::kOk          ? "ordinary"
                   : c.status == CurveUnitRoot::Status::kSingular ? "singular"
                                                                   : "supersingular";
    if (c.status == CurveUnitRoot::Status::kOk) {
      cj["rho"] = c.rho.get_str();
      cj["m"] = c.m;
    }
    j["curve"] = cj;
  }
  if (!r.verify.rows.empty()) j["verify"] = margins_json(r.verify);
  if (!r.trace.rows.empty()) j["trace"] = margins_json(r.trace);
  j["findings"] = r.findings;
  j["failures"] = r.failures;
  if (!r.error.empty()) j["error"] = r.error;
  j["passed"] = r.passed();
  return j.dump();
}

std::string summary_json(const VerificationReport& rep) {
  json j;
  j["summary"] = true;
  j["family"] = rep.family;
  j["p"] = rep.config.p;
  j["a"] = rep.config.a;
  j["m"] = rep.config.m;
  j["s_max"] = rep.config.s_max;
  j["fibers"] = rep.records.size();
  j["in_domain"] = rep.in_domain();
  j["passed"] = rep.passed();
  j["failed"] = rep.failed();
  int worst_verify = 1 << 30, worst_trace = 1 << 30;
  for (const auto& r : rep.records) {
    if (!r.verify.rows.empty()) worst_verify = std::min(worst_verify, r.verify.worst_slack());
    if (!r.trace.rows.empty()) worst_trace = std::min(worst_trace, r.trace.worst_slack());
  }
  if (worst_verify != 1 << 30) j["worst_verify_slack"] = worst_verify;
  if (worst_trace != 1 << 30) j["worst_trace_slack"] = worst_trace;
  return j.dump();
}

std::string report_jsonl(const FamilyData& fam, const VerificationReport& rep) {
  std::string out;
  for (const auto& r : rep.records) out += fiber_json(fam, r) + "\n";
  out += summary_json(rep) + "\n";
  return out;
}

}  // namespace dwork
