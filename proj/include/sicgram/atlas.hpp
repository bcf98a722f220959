#pragma once
// Append-only JSON-lines store of classified SIC solutions.
//
// Each line is one JSON object with "schema_version": 1 and a "kind" of
// "solution" or "batch". Solutions are indexed by (n, island_hash); a record
// whose island is already present is reported as a duplicate and not written.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sicgram/classify.hpp"
#include "sicgram/search.hpp"

namespace sicgram {

inline constexpr int kSchemaVersion = 1;

struct RecordResiduals {
  double s = 0.0;
  double f_error = 0.0;
  double g_error = 0.0;
  double grad_norm = 0.0;  // max of the f and g gradient infinity norms
};

/// Residuals recomputed from the phases.
RecordResiduals compute_residuals(const PhaseVector& phases);

struct Provenance {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  std::string timestamp;
  std::string tool_version;
};

struct SolutionRecord {
  int schema_version = kSchemaVersion;
  int n = 0;
  std::vector<double> phases;  // chi order
  RecordResiduals residuals;
  std::string island_hash;
  std::size_t gen_set_size = 0;
  /// 1-based permutation onto the matched reference, if any.
  std::optional<std::vector<std::uint32_t>> matched_reference;
  std::string reference_label;
  std::optional<std::size_t> aut_group_order;
  std::optional<std::size_t> aut_h_order;
  Provenance provenance;
  bool collision = false;
  /// Extended-precision phases, when the solution was refined.
  std::vector<std::string> refined_phases;

  PhaseVector phase_vector() const { return PhaseVector(n, phases); }
};

SolutionRecord make_record(const SearchOutcome& outcome, const ClassificationReport& classification);

enum class AppendVerdict { stored, duplicate, stored_collision };
const char* to_string(AppendVerdict verdict);

/// Raised for records that fail the self-consistency precondition.
class InconsistentRecord : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LoadIssue {
  std::size_t line = 0;
  std::string message;
};

class Atlas {
 public:
  /// Memory-only store.
  Atlas() = default;

  /// Replays the log at path (a missing file is an empty atlas). Lines that
  /// cannot be parsed are listed in load_issues(); an unknown schema_version
  /// throws std::runtime_error.
  static Atlas open(const std::filesystem::path& path);

  /// Verdict without modifying the store.
  AppendVerdict check(const SolutionRecord& record) const;

  /// Validates the record, then appends it unless it is a duplicate.
  AppendVerdict append(SolutionRecord record);

  void append_batch(int n, const BatchSummary& summary, std::uint64_t seed);

  const std::vector<SolutionRecord>& records() const { return records_; }
  const std::vector<std::pair<int, BatchSummary>>& batches() const { return batches_; }
  const std::vector<LoadIssue>& load_issues() const { return load_issues_; }
  std::size_t island_count(int n) const;
  const std::optional<std::filesystem::path>& path() const { return path_; }

 private:
  void index_record(SolutionRecord record);
  void write_line(const std::string& line);
  const BargmannTensor& tensor(std::size_t index) const;

  std::optional<std::filesystem::path> path_;
  std::vector<SolutionRecord> records_;
  std::vector<std::pair<int, BatchSummary>> batches_;
  std::map<std::pair<int, std::string>, std::vector<std::size_t>> index_;
  mutable std::map<std::size_t, BargmannTensor> tensors_;
  std::vector<LoadIssue> load_issues_;
};

struct VerifyOptions {
  bool hessian = true;
  double sic_tol = 1e-8;
  double gradient_tol = 1e-6;
  double residual_tol = 1e-12;
};

struct VerifyFailure {
  std::size_t record = 0;  // 0-based position among solution records
  int n = 0;
  std::string reason;
};

struct VerifyReport {
  std::size_t checked = 0;
  std::vector<VerifyFailure> failures;
  std::vector<LoadIssue> unreadable;
  bool ok() const { return failures.empty() && unreadable.empty(); }
};

/// Expected Hessian null-intersection dimension, or nullopt when unknown.
std::optional<int> expected_null_dimension(int n);

/// Expected generating-set size, or nullopt when not tabulated.
std::optional<std::size_t> expected_generating_set_size(int n);

VerifyReport verify_atlas(const Atlas& atlas, const VerifyOptions& options = {});

struct AtlasReport {
  int n = 0;
  std::size_t solutions = 0;
  std::size_t distinct_islands = 0;
  std::size_t matched = 0;
  double matched_fraction = 0.0;
  std::map<std::size_t, std::size_t> gen_set_census;        // size -> records
  std::map<std::size_t, std::size_t> aut_group_order_census;
  std::map<std::size_t, std::size_t> h_order_census;
  std::uint64_t trials = 0;
  std::uint64_t local_minima = 0;
  double local_minimum_rate = 0.0;
};

AtlasReport report(const Atlas& atlas, int n);

}  // namespace sicgram
