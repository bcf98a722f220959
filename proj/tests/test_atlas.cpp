#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "sicgram/atlas.hpp"
#include "sicgram/json_io.hpp"
#include "sicgram/permutation.hpp"
#include "sicgram/weyl_heisenberg.hpp"

using namespace sicgram;

namespace {

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& name) : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove(path);
  }
  ~TempFile() { std::filesystem::remove(path); }
};

SearchOutcome converged(int n, std::uint64_t trial) {
  SearchConfig c;
  c.n = n;
  c.seed = 31;
  Rng rng = trial_rng(c.seed, trial);
  SearchOutcome o = minimize(random_phase_vector(n, rng), c);
  REQUIRE(o.status == SearchStatus::converged);
  o.trial = trial;
  return o;
}

SolutionRecord record_of(const SearchOutcome& o, bool match = false) {
  ClassifyOptions co;
  co.match_reference = match;
  co.automorphisms = false;
  return make_record(o, classify(o.phases, co));
}

SearchOutcome shifted(SearchOutcome o, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  const std::size_t N = gram_size(o.phases.n());
  std::vector<double> c(N);
  for (double& x : c) x = u(rng);
  std::vector<double> v = o.phases.vector();
  std::size_t k = 0;
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = a + 1; b < N; ++b, ++k) v[k] = oracle::wrap(v[k] - c[a] + c[b]);
  o.phases = PhaseVector(o.phases.n(), v);
  return o;
}

}  // namespace

TEST_CASE("records carry consistent residuals and provenance") {
  const SearchOutcome o = converged(4, 0);
  const SolutionRecord r = record_of(o, true);
  CHECK(r.schema_version == 1);
  CHECK(r.n == 4);
  CHECK(r.phases.size() == 120);
  CHECK(r.residuals.s < 1e-16);
  CHECK(r.residuals.f_error < 1e-8);
  CHECK(r.residuals.grad_norm < 1e-6);
  CHECK(r.gen_set_size == 17);
  REQUIRE(r.matched_reference.has_value());
  CHECK(r.matched_reference->size() == 16);
  CHECK(r.provenance.seed == 31);
  CHECK(r.provenance.tool_version == SICGRAM_VERSION);
  CHECK(r.provenance.timestamp.size() == 20);
}

TEST_CASE("JSON round trips preserve records exactly") {
  SolutionRecord r = record_of(converged(3, 1));
  r.aut_group_order = 9;
  r.refined_phases = {"1.25", "0.5"};
  const std::string line = encode(r).dump();
  const SolutionRecord back = decode_solution_record(Json::parse(line));
  CHECK(back.phases == r.phases);
  CHECK(back.residuals.s == r.residuals.s);
  CHECK(back.island_hash == r.island_hash);
  CHECK(back.aut_group_order == r.aut_group_order);
  CHECK_FALSE(back.aut_h_order.has_value());
  CHECK(back.refined_phases == r.refined_phases);
  CHECK(back.provenance.timestamp == r.provenance.timestamp);

  Json bad = encode(r);
  bad["schema_version"] = 2;
  CHECK_THROWS_AS(decode_solution_record(bad), std::runtime_error);
  bad = encode(r);
  bad.erase("phases");
  CHECK_THROWS_AS(decode_solution_record(bad), std::invalid_argument);
  bad = encode(r);
  bad["phases"].erase(0);
  CHECK_THROWS_AS(decode_solution_record(bad), std::invalid_argument);

  const PhaseVector p = decode_phase_vector(encode(PhaseVector(2, {1, 2, 3, 4, 5, 6})));
  CHECK(p.vector() == std::vector<double>{1, 2, 3, 4, 5, 6});
  const Fiducial& f = reference_fiducial(3);
  CHECK(decode_fiducial(encode(f)).amplitudes() == f.amplitudes());
}

TEST_CASE("appending the same solution twice yields a duplicate") {
  Atlas atlas;
  const SearchOutcome o = converged(4, 2);
  CHECK(atlas.append(record_of(o)) == AppendVerdict::stored);
  CHECK(atlas.append(record_of(o)) == AppendVerdict::duplicate);
  CHECK(atlas.append(record_of(shifted(o, 1))) == AppendVerdict::duplicate);
  CHECK(atlas.records().size() == 1);
}

TEST_CASE("a permuted copy is a distinct island stored with the collision flag") {
  Atlas atlas;
  const SearchOutcome o = converged(4, 3);
  CHECK(atlas.append(record_of(o)) == AppendVerdict::stored);
  SearchOutcome p = o;
  p.phases = permute_phases(o.phases, PermutationMap({1, 0, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15}));
  const SolutionRecord rp = record_of(p);
  CHECK(rp.island_hash == atlas.records()[0].island_hash);
  CHECK(atlas.append(rp) == AppendVerdict::stored_collision);
  REQUIRE(atlas.records().size() == 2);
  CHECK(atlas.records()[1].collision);
  CHECK(atlas.island_count(4) == 2);
  CHECK(atlas.island_count(5) == 0);
}

TEST_CASE("inconsistent records are refused") {
  Atlas atlas;
  SolutionRecord r = record_of(converged(3, 4));
  SolutionRecord tampered = r;
  tampered.phases[7] += 1e-3;
  CHECK_THROWS_AS(atlas.append(tampered), InconsistentRecord);
  tampered = r;
  tampered.island_hash = "0000000000000000";
  CHECK_THROWS_AS(atlas.append(tampered), InconsistentRecord);
  CHECK(atlas.records().empty());
}

TEST_CASE("replaying the log rebuilds the same index and verdicts") {
  TempFile tmp("sicgram_replay.jsonl");
  std::vector<SolutionRecord> recs;
  for (std::uint64_t t = 0; t < 4; ++t) recs.push_back(record_of(converged(4, 10 + t)));
  std::vector<AppendVerdict> first;
  {
    Atlas atlas = Atlas::open(tmp.path);
    for (const auto& r : recs) first.push_back(atlas.append(r));
    atlas.append_batch(4, BatchSummary{4, 4, 0, 0, 4, 0, 0, 0, 0, 4}, 31);
  }
  const Atlas replay = Atlas::open(tmp.path);
  CHECK(replay.load_issues().empty());
  REQUIRE(replay.records().size() == 4);
  CHECK(replay.batches().size() == 1);
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(replay.records()[i].phases == recs[i].phases);
    CHECK(replay.check(recs[i]) == AppendVerdict::duplicate);
  }
  Atlas fresh;
  for (std::size_t i = 0; i < recs.size(); ++i) CHECK(fresh.append(recs[i]) == first[i]);
}

TEST_CASE("unknown schema versions are rejected loudly, malformed lines are listed") {
  TempFile tmp("sicgram_bad.jsonl");
  {
    std::ofstream out(tmp.path);
    out << "not json\n";
    out << R"({"schema_version": 1, "kind": "solution", "n": 2})" << "\n";
    out << R"({"kind": "solution"})" << "\n";
  }
  const Atlas a = Atlas::open(tmp.path);
  CHECK(a.records().empty());
  CHECK(a.load_issues().size() == 3);
  CHECK(a.load_issues()[0].line == 1);
  const VerifyReport v = verify_atlas(a);
  CHECK_FALSE(v.ok());
  CHECK(v.unreadable.size() == 3);
  {
    std::ofstream out(tmp.path, std::ios::app);
    out << R"({"schema_version": 7, "kind": "solution"})" << "\n";
  }
  CHECK_THROWS_AS(Atlas::open(tmp.path), std::runtime_error);
}

TEST_CASE("verification") {
  Atlas empty;
  const VerifyReport e = verify_atlas(empty);
  CHECK(e.ok());
  CHECK(e.checked == 0);

  TempFile tmp("sicgram_verify.jsonl");
  {
    Atlas atlas = Atlas::open(tmp.path);
    for (std::uint64_t t = 0; t < 3; ++t) atlas.append(record_of(converged(4, 20 + t), true));
  }
  const VerifyReport ok = verify_atlas(Atlas::open(tmp.path));
  CHECK(ok.ok());
  CHECK(ok.checked == 3);

  // Corrupt one phase on disk.
  std::vector<std::string> lines;
  {
    std::ifstream in(tmp.path);
    for (std::string l; std::getline(in, l);) lines.push_back(l);
  }
  Json j = Json::parse(lines[1]);
  j["phases"][5] = j["phases"][5].get<double>() + 1e-6;
  lines[1] = j.dump();
  {
    std::ofstream out(tmp.path);
    for (const auto& l : lines) out << l << "\n";
  }
  const VerifyReport bad = verify_atlas(Atlas::open(tmp.path));
  REQUIRE(bad.failures.size() >= 1);
  CHECK(bad.failures[0].record == 1);
  CHECK(bad.failures[0].reason.find("residual") != std::string::npos);
}

TEST_CASE("reports summarize per dimension") {
  Atlas atlas;
  for (std::uint64_t t = 0; t < 3; ++t) atlas.append(record_of(converged(4, 30 + t), true));
  atlas.append_batch(4, BatchSummary{5, 3, 2, 0, 3, 0, 0, 0, 3, 3}, 1);
  const AtlasReport r = report(atlas, 4);
  CHECK(r.solutions == 3);
  CHECK(r.distinct_islands == 3);
  CHECK(r.matched_fraction == 1.0);
  CHECK(r.gen_set_census.at(17) == 3);
  CHECK(r.local_minimum_rate == doctest::Approx(0.4));
  const AtlasReport none = report(atlas, 6);
  CHECK(none.solutions == 0);
  CHECK(none.matched_fraction == 0.0);
  CHECK(encode(r)["gen_set_census"]["17"] == 3);
}

TEST_CASE("expected tables") {
  CHECK(expected_null_dimension(3) == 10);
  CHECK(expected_null_dimension(4) == 15);
  CHECK(expected_null_dimension(7) == 48);
  CHECK_FALSE(expected_null_dimension(2).has_value());
  CHECK(expected_generating_set_size(4) == 17u);
  CHECK(expected_generating_set_size(5) == 73u);
  CHECK_FALSE(expected_generating_set_size(6).has_value());
}
