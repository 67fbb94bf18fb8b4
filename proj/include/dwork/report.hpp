#pragma once

// Verification pipeline over a set of fibers, its JSON Lines report and the
// on-disk cache of point counts.

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "dwork/family.hpp"
#include "dwork/frobenius.hpp"
#include "dwork/point_count.hpp"

namespace dwork {

// Parse a fiber "e1,e2,...": each entry is an element index in [0,q) or
// colon-separated power-basis coordinates ("1:0:2"). Throws
// std::invalid_argument on malformed input or a wrong number of entries.
std::vector<FiniteField::Elt> parse_fiber(const std::string& text, const FiniteField& F, int N);
std::string format_fiber(const std::vector<FiniteField::Elt>& lambda);

// Count records keyed by (family hash, p, a, lambda, s), stored as one JSON
// object per line in <dir>/counts.jsonl. Thread-safe; writes are serialized.
class CountCache {
 public:
  CountCache() = default;
  explicit CountCache(std::string dir);
  bool enabled() const { return !path_.empty(); }
  std::optional<CountReport> get(const std::string& key) const;
  void put(const std::string& key, const CountReport& c);
  static std::string key(const FamilyData& fam, std::uint32_t p, std::uint32_t a,
                         const std::vector<FiniteField::Elt>& lambda_original, int s);

 private:
  std::string path_;
  mutable std::mutex mu_;
  std::map<std::string, CountReport> mem_;
};

// Directory named by DWORK_CACHE_DIR, or empty.
std::string cache_dir_from_env();

struct PipelineConfig {
  enum class FiberMode { kAll, kList, kRandom };
  std::uint32_t p = 0;
  std::uint32_t a = 1;
  FiberMode mode = FiberMode::kList;
  std::vector<std::vector<FiniteField::Elt>> fibers;  // user column order
  std::size_t sample = 0;
  std::uint64_t seed = 1;
  std::size_t sweep_bound = 100000;  // largest (q-1)^N accepted for kAll
  int m = 3;
  int T = 0;
  int max_iters = 0;
  int s_max = 1;
  double budget = 1e9;
  int threads = 1;
  bool trace_check = true;
};

struct FiberRecord {
  std::size_t index = 0;
  std::vector<FiniteField::Elt> lambda;  // user column order
  FiniteField::Elt hasse_value = 0;
  std::uint32_t hasse_norm = 0;
  bool in_domain = false;
  std::vector<CountReport> counts;
  MarginReport ax_katz, buckets, verify, trace;
  MarginRow count_residue;
  std::optional<UnitRootResult> engine;
  std::optional<CurveUnitRoot> curve;
  int verify_s = 0;
  std::vector<std::string> findings;
  std::vector<std::string> failures;
  std::string error;
  bool passed() const { return error.empty() && failures.empty(); }
};

struct VerificationReport {
  std::string family;
  PipelineConfig config;
  std::vector<FiberRecord> records;
  std::size_t passed() const;
  std::size_t failed() const { return records.size() - passed(); }
  std::size_t in_domain() const;
};

// Validates the configuration (std::invalid_argument) and runs every fiber;
// per-fiber failures are recorded, never thrown.
VerificationReport run_pipeline(const FamilyData& fam, const PipelineConfig& cfg, CountCache* cache = nullptr);

// The list of fibers the configuration selects, in user column order.
std::vector<std::vector<FiniteField::Elt>> select_fibers(const FamilyData& fam, const FiniteField& F,
                                                         const PipelineConfig& cfg);

// One JSON object per fiber followed by a summary object.
std::string report_jsonl(const FamilyData& fam, const VerificationReport& rep);
std::string fiber_json(const FamilyData& fam, const FiberRecord& r);
std::string summary_json(const VerificationReport& rep);

}  // namespace dwork
