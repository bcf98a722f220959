#include "sicgram/atlas.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <stdexcept>

#include "sicgram/calculus.hpp"
#include "sicgram/json_io.hpp"
#include "sicgram/reconstruct.hpp"

namespace sicgram {

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

BargmannTensor tensor_of(const SolutionRecord& record) {
  return BargmannTensor::of(gram_from_phases(record.phase_vector()));
}

}  // namespace

RecordResiduals compute_residuals(const PhaseVector& phases) {
  const TraceReport tr = objective_S(phases);
  const CriticalPointReport cp = critical_point_check(phases);
  RecordResiduals r;
  r.s = tr.s;
  r.f_error = std::abs(tr.f - phases.n());
  r.g_error = std::abs(tr.g - phases.n());
  r.grad_norm = std::max(cp.grad_f_norm, cp.grad_g_norm);
  return r;
}

SolutionRecord make_record(const SearchOutcome& outcome, const ClassificationReport& classification) {
  SolutionRecord r;
  r.n = outcome.phases.n();
  r.phases = outcome.phases.canonical().vector();
  r.residuals = compute_residuals(PhaseVector(r.n, r.phases));
  r.island_hash = classification.island_hash;
  r.gen_set_size = classification.gen_set.size();
  if (classification.permutation) r.matched_reference = classification.permutation->one_based();
  r.reference_label = classification.reference_label;
  if (classification.automorphisms) {
    r.aut_group_order = classification.automorphisms->group_order;
    r.aut_h_order = classification.automorphisms->h_order;
  }
  r.provenance = {outcome.seed, outcome.trial, utc_timestamp(), SICGRAM_VERSION};
  if (outcome.refined) r.refined_phases = outcome.refined->phases;
  return r;
}

const char* to_string(AppendVerdict verdict) {
  switch (verdict) {
    case AppendVerdict::stored: return "stored";
    case AppendVerdict::duplicate: return "duplicate";
    case AppendVerdict::stored_collision: return "stored_collision";
  }
  return "unknown";
}

Atlas Atlas::open(const std::filesystem::path& path) {
  Atlas atlas;
  atlas.path_ = path;
  std::ifstream in(path);
  if (!in) return atlas;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j;
    try {
      j = Json::parse(line);
    } catch (const std::exception& e) {
      atlas.load_issues_.push_back({number, std::string("unparseable line: ") + e.what()});
      continue;
    }
    if (!j.is_object() || !j.contains("schema_version")) {
      atlas.load_issues_.push_back({number, "record without schema_version"});
      continue;
    }
    if (j["schema_version"] != kSchemaVersion) {
      throw std::runtime_error("line " + std::to_string(number) + ": unsupported schema_version " +
                               j["schema_version"].dump());
    }
    try {
      const std::string kind = j.value("kind", "");
      if (kind == "solution") {
        atlas.index_record(decode_solution_record(j));
      } else if (kind == "batch") {
        atlas.batches_.emplace_back(j.at("n").get<int>(), decode_batch_summary(j.at("summary")));
      } else {
        atlas.load_issues_.push_back({number, "unknown record kind '" + kind + "'"});
      }
    } catch (const std::exception& e) {
      atlas.load_issues_.push_back({number, std::string("malformed record: ") + e.what()});
    }
  }
  return atlas;
}

const BargmannTensor& Atlas::tensor(std::size_t index) const {
  auto it = tensors_.find(index);
  if (it == tensors_.end()) it = tensors_.emplace(index, tensor_of(records_[index])).first;
  return it->second;
}

AppendVerdict Atlas::check(const SolutionRecord& record) const {
  auto it = index_.find({record.n, record.island_hash});
  if (it == index_.end()) return AppendVerdict::stored;
  const BargmannTensor t = tensor_of(record);
  for (std::size_t idx : it->second) {
    if (same_island(tensor(idx), t)) return AppendVerdict::duplicate;
  }
  return AppendVerdict::stored_collision;
}

AppendVerdict Atlas::append(SolutionRecord record) {
  if (record.schema_version != kSchemaVersion) throw InconsistentRecord("unsupported schema_version");
  const PhaseVector pv = record.phase_vector();
  const RecordResiduals r = compute_residuals(pv);
  const double tol = 1e-12;
  if (std::abs(r.s - record.residuals.s) > tol || std::abs(r.f_error - record.residuals.f_error) > tol ||
      std::abs(r.g_error - record.residuals.g_error) > tol ||
      std::abs(r.grad_norm - record.residuals.grad_norm) > tol) {
    throw InconsistentRecord("stored residuals differ from the re-evaluated phases");
  }
  const GeneratingSet set = generating_set(gram_from_phases(pv));
  if (island_hash(set) != record.island_hash || set.size() != record.gen_set_size) {
    throw InconsistentRecord("island hash does not match the phases");
  }
  const AppendVerdict verdict = check(record);
  if (verdict == AppendVerdict::duplicate) return verdict;
  record.collision = verdict == AppendVerdict::stored_collision;
  if (path_) write_line(encode(record).dump());
  index_record(std::move(record));
  return verdict;
}

void Atlas::append_batch(int n, const BatchSummary& summary, std::uint64_t seed) {
  Json j{{"schema_version", kSchemaVersion}, {"kind", "batch"}, {"n", n}, {"seed", seed},
         {"timestamp", utc_timestamp()}, {"summary", encode(summary)}};
  if (path_) write_line(j.dump());
  batches_.emplace_back(n, summary);
}

std::size_t Atlas::island_count(int n) const {
  std::size_t count = 0;
  for (const auto& rec : records_) count += rec.n == n ? 1 : 0;
  return count;
}

void Atlas::index_record(SolutionRecord record) {
  const std::size_t idx = records_.size();
  index_[{record.n, record.island_hash}].push_back(idx);
  records_.push_back(std::move(record));
}

void Atlas::write_line(const std::string& line) {
  std::ofstream out(*path_, std::ios::app);
  out << line << '\n';
  out.flush();
  if (!out) throw std::runtime_error("cannot append to " + path_->string());
}

std::optional<int> expected_null_dimension(int n) {
  if (n == 3) return 10;
  if (n >= 4) return n * n - 1;
  return std::nullopt;
}

std::optional<std::size_t> expected_generating_set_size(int n) {
  if (n == 4) return 17;
  if (n == 5) return 73;
  return std::nullopt;
}

VerifyReport verify_atlas(const Atlas& atlas, const VerifyOptions& options) {
  VerifyReport report;
  report.unreadable = atlas.load_issues();
  const auto& records = atlas.records();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const SolutionRecord& rec = records[i];
    ++report.checked;
    auto fail = [&](std::string reason) { report.failures.push_back({i, rec.n, std::move(reason)}); };
    try {
      const PhaseVector pv = rec.phase_vector();
      const GramCandidate gram = gram_from_phases(pv);
      const SicCheck sic = check_sic(gram, options.sic_tol);
      if (!sic.is_sic) {
        fail("not a SIC Gram: |f-n|=" + std::to_string(sic.f_error) + " |g-n|=" + std::to_string(sic.g_error));
        continue;
      }
      const RecordResiduals r = compute_residuals(pv);
      if (std::abs(r.s - rec.residuals.s) > options.residual_tol ||
          std::abs(r.f_error - rec.residuals.f_error) > options.residual_tol ||
          std::abs(r.g_error - rec.residuals.g_error) > options.residual_tol ||
          std::abs(r.grad_norm - rec.residuals.grad_norm) > options.residual_tol) {
        fail("residual mismatch against stored values");
      }
      if (r.grad_norm >= options.gradient_tol) fail("gradient norm " + std::to_string(r.grad_norm));
      const GeneratingSet set = generating_set(gram);
      if (island_hash(set) != rec.island_hash) fail("island hash mismatch");
      if (set.size() != rec.gen_set_size) fail("generating-set size mismatch");
      if (auto expected = expected_generating_set_size(rec.n); expected && set.size() != *expected) {
        fail("generating set has " + std::to_string(set.size()) + " elements, expected " +
             std::to_string(*expected));
      }
      const ReconstructionCheck rc = check_reconstruction(gram, vectors_from_gram(gram));
      if (rc.gram_error >= 1e-8 || rc.overlap_error >= 1e-8 || rc.identity_error >= 1e-10) {
        fail("vector reconstruction outside tolerance");
      }
      if (options.hessian) {
        const NullSpaceReport ns = null_intersection_dim(hessian_pair(pv), rec.n);
        if (auto expected = expected_null_dimension(rec.n); expected && ns.dim_intersection != *expected) {
          fail("Hessian null intersection " + std::to_string(ns.dim_intersection) + ", expected " +
               std::to_string(*expected));
        }
      }
    } catch (const std::exception& e) {
      fail(std::string("verification error: ") + e.what());
    }
  }
  return report;
}

AtlasReport report(const Atlas& atlas, int n) {
  AtlasReport r;
  r.n = n;
  std::size_t matched_records = 0;
  for (const auto& rec : atlas.records()) {
    if (rec.n != n) continue;
    ++r.distinct_islands;
    ++r.gen_set_census[rec.gen_set_size];
    if (rec.matched_reference) ++matched_records;
    if (rec.aut_group_order) ++r.aut_group_order_census[*rec.aut_group_order];
    if (rec.aut_h_order) ++r.h_order_census[*rec.aut_h_order];
  }
  std::uint64_t converged = 0, matched = 0;
  for (const auto& [bn, summary] : atlas.batches()) {
    if (bn != n) continue;
    r.trials += summary.trials;
    r.local_minima += summary.local_minima;
    converged += summary.converged;
    matched += summary.matched_to_reference;
  }
  if (converged > 0) {
    r.solutions = converged;
    r.matched = matched;
  } else {
    r.solutions = r.distinct_islands;
    r.matched = matched_records;
  }
  r.matched_fraction = r.solutions > 0 ? static_cast<double>(r.matched) / static_cast<double>(r.solutions) : 0.0;
  r.local_minimum_rate = r.trials > 0 ? static_cast<double>(r.local_minima) / static_cast<double>(r.trials) : 0.0;
  return r;
}

}  // namespace sicgram
