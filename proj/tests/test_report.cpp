#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include "json.hpp"
#include <sstream>

#include "dwork/report.hpp"
#include "oracles.hpp"

using namespace dwork;
namespace fs = std::filesystem;

namespace {

FamilyData load(const char* f) { return load_family_file(oracle::fixture(f)); }

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("dwork_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<nlohmann::json> parse_lines(const std::string& text) {
  std::vector<nlohmann::json> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  return out;
}

PipelineConfig hesse_list(std::uint32_t p, std::vector<std::vector<FiniteField::Elt>> fibers) {
  PipelineConfig c;
  c.p = p;
  c.fibers = std::move(fibers);
  return c;
}

}  // namespace

TEST(ParseFiber, FormatsAndErrors) {
  FiniteField F9(3, 2);
  EXPECT_EQ(parse_fiber("1,2,3,8", F9, 4), (std::vector<FiniteField::Elt>{1, 2, 3, 8}));
  // coordinates low digit first: 1 + 2x is element 1 + 2*3 = 7
  EXPECT_EQ(parse_fiber("1:2,1,0:1,2", F9, 4), (std::vector<FiniteField::Elt>{7, 1, 3, 2}));
  EXPECT_EQ(format_fiber({1, 2, 3}), "1,2,3");
  EXPECT_THROW(parse_fiber("1,2,3", F9, 4), std::invalid_argument);
  EXPECT_THROW(parse_fiber("1,2,3,9", F9, 4), std::invalid_argument);
  EXPECT_THROW(parse_fiber("1,x,3,4", F9, 4), std::invalid_argument);
  EXPECT_THROW(parse_fiber("1:3,1,1,1", F9, 4), std::invalid_argument);
  EXPECT_THROW(parse_fiber("1,,1,1", F9, 4), std::invalid_argument);
}

TEST(SelectFibers, ModesAndBounds) {
  FamilyData f = load("hesse.json");
  FiniteField F5(5, 1);
  PipelineConfig c;
  c.p = 5;
  c.mode = PipelineConfig::FiberMode::kAll;
  auto all = select_fibers(f, F5, c);
  ASSERT_EQ(all.size(), 256u);
  EXPECT_EQ(all.front(), (std::vector<FiniteField::Elt>{1, 1, 1, 1}));
  EXPECT_EQ(all.back(), (std::vector<FiniteField::Elt>{4, 4, 4, 4}));
  c.sweep_bound = 255;
  EXPECT_THROW(select_fibers(f, F5, c), std::invalid_argument);

  c.mode = PipelineConfig::FiberMode::kRandom;
  c.sample = 20;
  c.seed = 7;
  auto r1 = select_fibers(f, F5, c), r2 = select_fibers(f, F5, c);
  EXPECT_EQ(r1, r2);
  ASSERT_EQ(r1.size(), 20u);
  for (const auto& l : r1)
    for (auto x : l) {
      EXPECT_GE(x, 1u);
      EXPECT_LT(x, 5u);
    }
  c.seed = 8;
  EXPECT_NE(select_fibers(f, F5, c), r1);

  c.mode = PipelineConfig::FiberMode::kList;
  c.fibers = {{1, 0, 1, 1}};
  EXPECT_THROW(select_fibers(f, F5, c), std::invalid_argument);
  c.fibers = {{1, 1, 1}};
  EXPECT_THROW(select_fibers(f, F5, c), std::invalid_argument);
}

TEST(Pipeline, RejectsBadConfiguration) {
  FamilyData f = load("hesse.json");
  PipelineConfig c = hesse_list(4, {});
  EXPECT_THROW(run_pipeline(f, c), std::invalid_argument);
  c.p = 5;
  c.m = 0;
  EXPECT_THROW(run_pipeline(f, c), std::invalid_argument);
  c.m = 3;
  c.T = -1;
  EXPECT_THROW(run_pipeline(f, c), std::invalid_argument);
  FamilyData g = load("cubic_pair.json");
  PipelineConfig d = hesse_list(3, {});
  d.T = g.mu;  // below the minimal depth mu + 1
  EXPECT_THROW(run_pipeline(g, d), std::invalid_argument);
  c.T = 0;
  c.s_max = 0;
  EXPECT_THROW(run_pipeline(f, c), std::invalid_argument);
}

TEST(Pipeline, EmptyListGivesEmptyReport) {
  FamilyData f = load("hesse.json");
  auto rep = run_pipeline(f, hesse_list(5, {}));
  EXPECT_TRUE(rep.records.empty());
  auto lines = parse_lines(report_jsonl(f, rep));
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0]["fibers"], 0);
  EXPECT_EQ(lines[0]["failed"], 0);
}

TEST(Pipeline, InAndOutOfDomainRecords) {
  FamilyData f = load("hesse.json");
  FiniteField F5(5, 1);
  auto H = hasse_polynomial(f, 5);
  std::vector<FiniteField::Elt> in, out;
  oracle::box_scan(IntVec(4, 1), IntVec(4, 4), [&](const IntVec& v) {
    std::vector<FiniteField::Elt> l(v.begin(), v.end());
    auto lam = f.to_internal(l);
    auto& slot = hasse_residue(H, F5, lam).in_domain ? in : out;
    if (slot.empty() && cubic_curve_is_smooth(f, F5, lam, count_projective(f, F5, lam, 1).projective_count)) slot = l;
  });
  ASSERT_FALSE(in.empty());
  ASSERT_FALSE(out.empty());
  PipelineConfig c = hesse_list(5, {in, out});
  c.s_max = 2;
  auto rep = run_pipeline(f, c);
  ASSERT_EQ(rep.records.size(), 2u);
  EXPECT_EQ(rep.failed(), 0u);
  EXPECT_EQ(rep.in_domain(), 1u);

  const auto& a = rep.records[0];
  EXPECT_TRUE(a.in_domain);
  ASSERT_TRUE(a.engine.has_value());
  EXPECT_EQ(a.engine->status, UnitRootResult::Status::kOk);
  EXPECT_EQ(a.counts.size(), 2u);
  EXPECT_EQ(a.verify_s, 2);
  EXPECT_TRUE(a.verify.all_passed());
  EXPECT_TRUE(a.trace.all_passed());
  ASSERT_TRUE(a.curve.has_value());
  ASSERT_EQ(a.curve->status, CurveUnitRoot::Status::kOk);
  EXPECT_EQ(mod(a.engine->rho, Integer(125)), a.curve->rho);

  const auto& b = rep.records[1];
  EXPECT_FALSE(b.in_domain);
  EXPECT_NE(std::find(b.findings.begin(), b.findings.end(), "no distinguished root"), b.findings.end());
  EXPECT_EQ(b.engine->status, UnitRootResult::Status::kOutOfDomain);
  EXPECT_TRUE(b.count_residue.passed());

  auto lines = parse_lines(report_jsonl(f, rep));
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0]["unit_root"]["status"], "ok");
  EXPECT_EQ(lines[1]["in_domain"], false);
  EXPECT_EQ(lines[2]["in_domain"], 1);
  EXPECT_EQ(lines[2]["passed"], 2);
}

TEST(Pipeline, SingularFiberIsAFindingNotAFailure) {
  FamilyData f = load("hesse.json");
  PipelineConfig c = hesse_list(7, {{1, 1, 1, 1}});
  c.s_max = 3;
  auto rep = run_pipeline(f, c);
  ASSERT_EQ(rep.records.size(), 1u);
  const auto& r = rep.records[0];
  EXPECT_EQ(r.verify.rows.size(), 3u);
  EXPECT_TRUE(r.verify.all_passed());
  EXPECT_TRUE(r.passed()) << (r.failures.empty() ? r.error : r.failures[0]);
  EXPECT_EQ(r.curve->status, CurveUnitRoot::Status::kSingular);
  EXPECT_EQ(r.counts[0].projective_count, 21);
  EXPECT_EQ(mod(r.engine->rho, Integer(7)), 1);
}

TEST(Pipeline, DeterministicAndThreadIndependent) {
  FamilyData f = load("hesse.json");
  PipelineConfig c;
  c.p = 5;
  c.mode = PipelineConfig::FiberMode::kRandom;
  c.sample = 12;
  c.seed = 3;
  c.s_max = 2;
  std::string one = report_jsonl(f, run_pipeline(f, c));
  c.threads = 3;
  std::string three = report_jsonl(f, run_pipeline(f, c));
  EXPECT_EQ(one, three);
}

TEST(CountCache, RoundTripAndWarmRunsAreIdentical) {
  TempDir tmp;
  FamilyData f = load("hesse.json");
  PipelineConfig c;
  c.p = 3;
  c.a = 2;
  c.mode = PipelineConfig::FiberMode::kRandom;
  c.sample = 5;
  c.s_max = 2;
  c.m = 2;
  std::string cold, warm;
  {
    CountCache cache(tmp.path.string());
    EXPECT_TRUE(cache.enabled());
    cold = report_jsonl(f, run_pipeline(f, c, &cache));
  }
  ASSERT_TRUE(fs::exists(tmp.path / "counts.jsonl"));
  {
    std::ifstream in(tmp.path / "counts.jsonl");
    std::size_t lines = 0;
    for (std::string l; std::getline(in, l);) lines += !l.empty();
    EXPECT_LE(lines, 10u);
    EXPECT_GT(lines, 0u);
  }
  {
    CountCache cache(tmp.path.string());
    warm = report_jsonl(f, run_pipeline(f, c, &cache));
  }
  EXPECT_EQ(cold, warm);
  EXPECT_EQ(cold, report_jsonl(f, run_pipeline(f, c)));

  CountCache cache(tmp.path.string());
  FiniteField F9(3, 2);
  auto lam = select_fibers(f, F9, c)[0];
  auto hit = cache.get(CountCache::key(f, 3, 2, lam, 1));
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->projective_count, count_projective(f, F9, f.to_internal(lam), 1).projective_count);
  EXPECT_FALSE(cache.get(CountCache::key(f, 3, 2, lam, 3)).has_value());
}

TEST(CountCache, SkipsTornLines) {
  TempDir tmp;
  fs::create_directories(tmp.path);
  {
    std::ofstream out(tmp.path / "counts.jsonl");
    out << "{\"key\": \"abc\", \"cou";
  }
  CountCache cache(tmp.path.string());
  EXPECT_FALSE(cache.get("abc").has_value());
  CountReport r;
  r.s = 1;
  r.q_s = 5;
  r.projective_count = 6;
  r.affine_cone_count = 25;
  cache.put("k", r);
  CountCache again(tmp.path.string());
  auto hit = again.get("k");
  ASSERT_TRUE(hit.has_value());
  EXPECT_EQ(hit->projective_count, 6);
  EXPECT_EQ(hit->affine_cone_count, 25);
}

TEST(CountCache, KeyDependsOnEveryField) {
  FamilyData f = load("hesse.json");
  std::vector<FiniteField::Elt> l{1, 2, 3, 4};
  std::string k = CountCache::key(f, 5, 1, l, 1);
  EXPECT_NE(k, CountCache::key(f, 5, 1, l, 2));
  EXPECT_NE(k, CountCache::key(f, 5, 2, l, 1));
  EXPECT_NE(k, CountCache::key(f, 7, 1, l, 1));
  EXPECT_NE(k, CountCache::key(f, 5, 1, {1, 2, 4, 3}, 1));
  EXPECT_NE(k, CountCache::key(load("cubic_pair.json"), 5, 1, l, 1));
}
