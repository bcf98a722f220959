#pragma once
// Random-restart minimization of S = (f - n)^2 + (g - n)^2 over phase vectors.
//
// Each trial runs conjugate gradient until S drops below a handoff level,
// then a Gauss-Newton polish on P^2 - P finishes the job. Runs that stall
// above s_local_min_threshold are local minima.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>

#include "sicgram/classify.hpp"
#include "sicgram/gramspace.hpp"
#include "sicgram/refine.hpp"

namespace sicgram {

class Atlas;

struct SearchConfig {
  int n = 4;
  int max_iterations = 20000;
  double gradient_tolerance = 1e-12;
  double s_success_threshold = 1e-16;
  double s_local_min_threshold = 1e-10;
  /// CG hands over to the polish once S falls below this.
  double polish_handoff = 1e-12;
  /// Maximum number of trials a batch may run.
  std::uint64_t restart_budget = 1'000'000;
  std::uint64_t seed = 1;
  /// Extended-precision digits for refining converged outcomes; 0 disables.
  int refine_digits = 0;
  /// Worker threads for batch_search; 1 runs serially.
  int threads = 1;
  /// Automorphism analysis during batch classification.
  bool classify_automorphisms = true;

  /// Throws std::invalid_argument when inconsistent.
  void validate() const;
};

enum class SearchStatus { converged, local_minimum, budget_exhausted };
const char* to_string(SearchStatus status);

struct SearchOutcome {
  SearchStatus status = SearchStatus::budget_exhausted;
  PhaseVector phases;
  TraceReport report;
  int iterations = 0;      // conjugate-gradient iterations
  int polish_steps = 0;
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  std::string cg_status;
  std::optional<RefineResult> refined;
};

using Rng = std::mt19937_64;

/// Independent stream for trial `trial` of a batch seeded with `seed`.
Rng trial_rng(std::uint64_t seed, std::uint64_t trial);

/// Phases drawn i.i.d. uniform on [0, 2pi).
PhaseVector random_phase_vector(int n, Rng& rng);

/// Throws std::runtime_error if the objective becomes non-finite.
SearchOutcome minimize(const PhaseVector& start, const SearchConfig& config);

struct TrialReport {
  SearchOutcome outcome;
  std::optional<ClassificationReport> classification;
  std::string verdict;  // atlas verdict, "skipped" or "error: ..."
};

struct BatchSummary {
  std::uint64_t trials = 0;
  std::uint64_t converged = 0;
  std::uint64_t local_minima = 0;
  std::uint64_t budget_exhausted = 0;
  std::uint64_t stored = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t collisions = 0;
  std::uint64_t store_errors = 0;
  std::uint64_t matched_to_reference = 0;
  std::uint64_t distinct_islands = 0;  // new islands added to the store
};

/// Runs `trials` trials, classifies converged outcomes and appends them to
/// the atlas. Trials may run concurrently; commits happen in trial order, so
/// the store contents do not depend on the thread count.
BatchSummary batch_search(int n, std::uint64_t trials, const SearchConfig& config, Atlas& store,
                          const std::function<void(const TrialReport&)>& on_trial = {});

}  // namespace sicgram
