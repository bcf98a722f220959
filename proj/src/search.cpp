#include "sicgram/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "sicgram/atlas.hpp"
#include "sicgram/optimize.hpp"
#include "sicgram/polish.hpp"
#include "sicgram/trace_eval.hpp"

namespace sicgram {

void SearchConfig::validate() const {
  require_dimension(n);
  if (!(s_success_threshold < s_local_min_threshold)) {
    throw std::invalid_argument("s_success_threshold must be below s_local_min_threshold");
  }
  if (max_iterations < 0) throw std::invalid_argument("max_iterations must be non-negative");
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
  if (refine_digits < 0) throw std::invalid_argument("refine_digits must be non-negative");
}

const char* to_string(SearchStatus status) {
  switch (status) {
    case SearchStatus::converged: return "converged";
    case SearchStatus::local_minimum: return "local_minimum";
    case SearchStatus::budget_exhausted: return "budget_exhausted";
  }
  return "unknown";
}

Rng trial_rng(std::uint64_t seed, std::uint64_t trial) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  return Rng(seq);
}

PhaseVector random_phase_vector(int n, Rng& rng) {
  require_dimension(n);
  std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
  std::vector<double> phases(phase_count(n));
  for (double& p : phases) p = reduce_phase(uniform(rng));
  return PhaseVector(n, std::move(phases));
}

SearchOutcome minimize(const PhaseVector& start, const SearchConfig& config) {
  config.validate();
  const int n = start.n();
  if (n != config.n) throw std::invalid_argument("start vector dimension differs from the search config");

  TraceEvaluator eval(n);
  std::vector<double> gf(start.size()), gg(start.size());
  const optimize::Objective objective = [&](std::span<const double> x, std::span<double> grad) {
    const TraceValues tv = eval.evaluate(x, gf, gg);
    const double df = tv.f - n;
    const double dg = tv.g - n;
    for (std::size_t k = 0; k < grad.size(); ++k) grad[k] = 2.0 * df * gf[k] + 2.0 * dg * gg[k];
    return df * df + dg * dg;
  };

  optimize::CgOptions cg;
  cg.max_iterations = config.max_iterations;
  cg.gradient_tolerance = config.gradient_tolerance;
  cg.f_target = config.polish_handoff;
  const optimize::CgResult run = optimize::minimize_cg(objective, start.vector(), cg);
  if (run.status == optimize::CgStatus::non_finite) {
    throw std::runtime_error("objective became non-finite during minimization (iteration " +
                             std::to_string(run.iterations) + ")");
  }

  SearchOutcome out{SearchStatus::budget_exhausted, PhaseVector(n, run.x), {}, run.iterations, 0,
                    config.seed, 0, optimize::to_string(run.status), std::nullopt};
  if (run.f <= config.s_local_min_threshold) {
    const PolishResult polished = projector_polish(out.phases);
    out.phases = polished.phases;
    out.polish_steps = polished.steps;
  }
  out.report = objective_S(out.phases);
  if (out.report.s <= config.s_success_threshold && is_sic_gram(gram_from_phases(out.phases), 1e-8)) {
    out.status = SearchStatus::converged;
  } else if (run.status == optimize::CgStatus::iteration_limit && run.f > config.s_local_min_threshold) {
    out.status = SearchStatus::budget_exhausted;
  } else {
    out.status = SearchStatus::local_minimum;
  }
  if (out.status == SearchStatus::converged && config.refine_digits > 0) {
    RefineOptions ro;
    ro.target_digits = config.refine_digits;
    out.refined = refine(out.phases, ro);
  }
  return out;
}

namespace {

TrialReport run_trial(int n, std::uint64_t trial, const SearchConfig& config) {
  Rng rng = trial_rng(config.seed, trial);
  const PhaseVector start = random_phase_vector(n, rng);
  SearchConfig cfg = config;
  cfg.n = n;
  TrialReport report{minimize(start, cfg), std::nullopt, "skipped"};
  report.outcome.trial = trial;
  report.outcome.seed = config.seed;
  if (report.outcome.status == SearchStatus::converged) {
    ClassifyOptions co;
    co.automorphisms = config.classify_automorphisms;
    report.classification = classify(report.outcome.phases, co);
  }
  return report;
}

}  // namespace

BatchSummary batch_search(int n, std::uint64_t trials, const SearchConfig& config, Atlas& store,
                          const std::function<void(const TrialReport&)>& on_trial) {
  config.validate();
  BatchSummary summary;
  if (trials == 0) return summary;
  if (trials > config.restart_budget) throw std::invalid_argument("trial count exceeds the restart budget");

  auto commit = [&](TrialReport& report) {
    ++summary.trials;
    switch (report.outcome.status) {
      case SearchStatus::converged: ++summary.converged; break;
      case SearchStatus::local_minimum: ++summary.local_minima; break;
      case SearchStatus::budget_exhausted: ++summary.budget_exhausted; break;
    }
    if (report.classification) {
      const ClassificationReport& c = *report.classification;
      if (c.matched_reference) ++summary.matched_to_reference;
      try {
        const AppendVerdict v = store.append(make_record(report.outcome, c));
        report.verdict = to_string(v);
        if (v == AppendVerdict::stored) ++summary.stored;
        if (v == AppendVerdict::duplicate) ++summary.duplicates;
        if (v == AppendVerdict::stored_collision) ++summary.collisions;
      } catch (const std::exception& e) {
        ++summary.store_errors;
        report.verdict = std::string("error: ") + e.what();
      }
    }
    if (on_trial) on_trial(report);
  };

  const int threads = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(config.threads), trials));
  if (threads <= 1) {
    for (std::uint64_t t = 0; t < trials; ++t) {
      TrialReport report = run_trial(n, t, config);
      commit(report);
    }
  } else {
    // Workers fill slots; this thread commits them in trial order.
    std::vector<std::optional<TrialReport>> slots(trials);
    std::vector<std::exception_ptr> errors(trials);
    std::mutex mutex;
    std::condition_variable ready;
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&] {
        for (std::uint64_t t = next++; t < trials; t = next++) {
          std::optional<TrialReport> result;
          std::exception_ptr error;
          try {
            result = run_trial(n, t, config);
          } catch (...) {
            error = std::current_exception();
          }
          std::lock_guard<std::mutex> lock(mutex);
          slots[t] = std::move(result);
          errors[t] = error;
          ready.notify_all();
        }
      });
    }
    std::exception_ptr first_error;
    for (std::uint64_t t = 0; t < trials; ++t) {
      std::optional<TrialReport> report;
      {
        std::unique_lock<std::mutex> lock(mutex);
        ready.wait(lock, [&] { return slots[t].has_value() || errors[t]; });
        if (errors[t]) {
          if (!first_error) first_error = errors[t];
          continue;
        }
        report = std::move(slots[t]);
        slots[t].reset();
      }
      if (!first_error) commit(*report);
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }
  summary.distinct_islands = summary.stored + summary.collisions;
  store.append_batch(n, summary, config.seed);
  return summary;
}

}  // namespace sicgram
