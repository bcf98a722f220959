#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "oracles.hpp"
#include "sicgram/atlas.hpp"
#include "sicgram/calculus.hpp"
#include "sicgram/optimize.hpp"
#include "sicgram/polish.hpp"
#include "sicgram/search.hpp"
#include "sicgram/weyl_heisenberg.hpp"

using namespace sicgram;

TEST_CASE("conjugate gradient minimizes the Rosenbrock function") {
  const optimize::Objective rosen = [](std::span<const double> x, std::span<double> g) {
    double f = 0;
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      const double a = x[i + 1] - x[i] * x[i], b = 1 - x[i];
      f += 100 * a * a + b * b;
      g[i] += -400 * a * x[i] - 2 * b;
      g[i + 1] += 200 * a;
    }
    return f;
  };
  const auto r = optimize::minimize_cg(rosen, {-1.2, 1.0, -0.5, 0.7});
  CHECK(r.f < 1e-18);
  for (double v : r.x) CHECK(v == doctest::Approx(1.0).epsilon(1e-8));
  for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i] <= r.trace[i - 1]);
}

TEST_CASE("conjugate gradient stops on target, iteration limit and non-finite values") {
  const optimize::Objective quad = [](std::span<const double> x, std::span<double> g) {
    double f = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      f += (i + 1.0) * x[i] * x[i];
      g[i] = 2 * (i + 1.0) * x[i];
    }
    return f;
  };
  optimize::CgOptions o;
  o.f_target = 1e-3;
  CHECK(optimize::minimize_cg(quad, {1, 1, 1}, o).status == optimize::CgStatus::target_reached);
  optimize::CgOptions lim;
  lim.max_iterations = 1;
  lim.gradient_tolerance = 0;
  CHECK(optimize::minimize_cg(quad, std::vector<double>(10, 1.0), lim).status == optimize::CgStatus::iteration_limit);
  const optimize::Objective bad = [](std::span<const double>, std::span<double> g) {
    g[0] = 1.0;
    return std::nan("");
  };
  CHECK(optimize::minimize_cg(bad, {0.0}).status == optimize::CgStatus::non_finite);
}

TEST_CASE("trial streams are deterministic and distinct") {
  Rng a = trial_rng(7, 3), b = trial_rng(7, 3), c = trial_rng(7, 4);
  const PhaseVector pa = random_phase_vector(3, a), pb = random_phase_vector(3, b), pc = random_phase_vector(3, c);
  CHECK(pa.vector() == pb.vector());
  CHECK(pa.vector() != pc.vector());
  for (double v : pa.values()) {
    CHECK(v >= 0.0);
    CHECK(v < kTwoPi);
  }
}

TEST_CASE("search config validation") {
  SearchConfig c;
  CHECK_NOTHROW(c.validate());
  c.s_success_threshold = 1e-9;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.threads = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.n = 1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  CHECK_THROWS_AS(minimize(PhaseVector::zeros(3), c), std::invalid_argument);
}

TEST_CASE("a known SIC point is returned unchanged") {
  for (int n = 2; n <= 5; ++n) {
    const PhaseVector start = wh_gram(reference_fiducial(n)).phases;
    SearchConfig c;
    c.n = n;
    const SearchOutcome o = minimize(start, c);
    CHECK(o.status == SearchStatus::converged);
    CHECK(o.iterations <= 2);
    for (std::size_t k = 0; k < start.size(); ++k) CHECK(oracle::circ(o.phases[k], start[k]) < 1e-10);
  }
}

TEST_CASE("random n = 4 starts converge to critical SIC points") {
  SearchConfig c;
  c.n = 4;
  for (std::uint64_t t = 0; t < 10; ++t) {
    Rng rng = trial_rng(11, t);
    const SearchOutcome o = minimize(random_phase_vector(4, rng), c);
    REQUIRE(o.status == SearchStatus::converged);
    CHECK(o.report.s < 1e-16);
    CHECK(is_sic_gram(gram_from_phases(o.phases), 1e-8));
    CHECK(critical_point_check(o.phases).critical);
  }
}

TEST_CASE("n = 6 searches include local minima above the threshold") {
  SearchConfig c;
  c.n = 6;
  int minima = 0;
  for (std::uint64_t t = 0; t < 12 && minima == 0; ++t) {
    Rng rng = trial_rng(3, t);
    const SearchOutcome o = minimize(random_phase_vector(6, rng), c);
    if (o.status == SearchStatus::local_minimum) {
      ++minima;
      CHECK(o.report.s > c.s_local_min_threshold);
    }
  }
  CHECK(minima > 0);
}

TEST_CASE("an exhausted iteration budget is reported") {
  SearchConfig c;
  c.n = 4;
  c.max_iterations = 3;
  Rng rng = trial_rng(1, 0);
  CHECK(minimize(random_phase_vector(4, rng), c).status == SearchStatus::budget_exhausted);
}

TEST_CASE("projector polish restores a perturbed solution") {
  const PhaseVector ref = wh_gram(reference_fiducial(4)).phases;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd(0.0, 1e-6);
  std::vector<double> x = ref.vector();
  for (double& v : x) v += nd(rng);
  const PolishResult r = projector_polish(PhaseVector(4, x));
  CHECK(r.initial_residual > 1e-8);
  CHECK(r.final_residual < 1e-13);
  CHECK(r.steps <= 10);
  const Eigen::MatrixXcd P = gram_from_phases(r.phases).matrix();
  CHECK((P * P - P).cwiseAbs().maxCoeff() < 1e-13);
  // Never worse than the input, even for a hopeless start.
  Rng r2 = trial_rng(2, 0);
  const PhaseVector junk = random_phase_vector(3, r2);
  const PolishResult j = projector_polish(junk);
  CHECK(j.final_residual <= j.initial_residual);
}

TEST_CASE("empty batches write nothing") {
  const auto path = std::filesystem::temp_directory_path() / "sicgram_empty_batch.jsonl";
  std::filesystem::remove(path);
  Atlas atlas = Atlas::open(path);
  SearchConfig c;
  const BatchSummary s = batch_search(4, 0, c, atlas);
  CHECK(s.trials == 0);
  CHECK(s.converged == 0);
  CHECK_FALSE(std::filesystem::exists(path));
}

TEST_CASE("batch results do not depend on the thread count") {
  SearchConfig c;
  c.n = 4;
  c.seed = 99;
  c.classify_automorphisms = false;
  std::vector<std::vector<double>> serial, threaded;
  Atlas a1, a2;
  const BatchSummary s1 = batch_search(4, 6, c, a1, [&](const TrialReport& r) { serial.push_back(r.outcome.phases.vector()); });
  c.threads = 3;
  const BatchSummary s2 = batch_search(4, 6, c, a2, [&](const TrialReport& r) { threaded.push_back(r.outcome.phases.vector()); });
  CHECK(serial == threaded);
  CHECK(s1.converged == 6);
  CHECK(s1.matched_to_reference == 6);
  CHECK(s2.stored + s2.collisions + s2.duplicates == 6);
  REQUIRE(a1.records().size() == a2.records().size());
  for (std::size_t i = 0; i < a1.records().size(); ++i) CHECK(a1.records()[i].phases == a2.records()[i].phases);
  CHECK(a1.batches().size() == 1);
}
