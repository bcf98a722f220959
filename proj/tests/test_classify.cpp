#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "sicgram/classify.hpp"
#include "sicgram/permutation.hpp"
#include "sicgram/reconstruct.hpp"
#include "sicgram/search.hpp"
#include "sicgram/weyl_heisenberg.hpp"

using namespace sicgram;

namespace {

const std::vector<double> kGenSet4 = {0,       0.33312, 0.571437, 0.666239, 0.904557, 0.999359,
                                      1.5708,  1.90392, 2.47535,  3.80783,  4.37927,  4.71239,
                                      5.28383, 5.37863, 5.61695,  5.71175,  5.95007};

const std::vector<std::uint64_t> kFreq4 = {49, 18, 9, 18, 9, 18, 18, 9, 9, 18, 18, 18, 18, 6, 6, 6, 6};

PhaseVector solution(int n, std::uint64_t seed, std::uint64_t trial) {
  SearchConfig c;
  c.n = n;
  Rng rng = trial_rng(seed, trial);
  const SearchOutcome o = minimize(random_phase_vector(n, rng), c);
  REQUIRE(o.status == SearchStatus::converged);
  return o.phases;
}

PhaseVector gamma_shift(const PhaseVector& p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  const int n = p.n();
  const std::size_t N = gram_size(n);
  std::vector<double> c(N);
  for (double& x : c) x = u(rng);
  std::vector<double> out = p.vector();
  std::size_t k = 0;
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = a + 1; b < N; ++b, ++k) out[k] = oracle::wrap(out[k] - c[a] + c[b]);
  return PhaseVector(n, out);
}

// Bargmann phase straight from the Gram entries.
double triple_phase(const Eigen::MatrixXcd& P, int i, int j, int k) {
  return oracle::wrap(std::arg(P(i, j) * P(j, k) * P(k, i)));
}

PermutationMap random_permutation(std::size_t N, std::mt19937_64& rng) {
  std::vector<std::uint32_t> v(N);
  for (std::size_t i = 0; i < N; ++i) v[i] = static_cast<std::uint32_t>(i);
  std::shuffle(v.begin(), v.end(), rng);
  return PermutationMap(v);
}

}  // namespace

TEST_CASE("permutation maps") {
  CHECK_THROWS_AS(PermutationMap({0, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(PermutationMap({0, 3, 1}), std::invalid_argument);
  const PermutationMap s({1, 2, 0, 3});
  CHECK(s.order() == 3);
  CHECK(s.power(3).is_identity());
  CHECK((s * s.inverse()).is_identity());
  CHECK(s.fixed_points() == 1);
  CHECK(s.one_based() == std::vector<std::uint32_t>{2, 3, 1, 4});
  CHECK(PermutationMap::from_one_based({2, 3, 1, 4}) == s);
  const PermutationMap t({3, 2, 1, 0});
  // (s * t)(i) = s(t(i))
  CHECK((s * t)(0) == s(t(0)));
}

TEST_CASE("permute_phases matches conjugation by the permutation matrix") {
  std::mt19937_64 rng(3);
  const PhaseVector p = wh_gram(reference_fiducial(3)).phases;
  const PermutationMap s = random_permutation(9, rng);
  const Eigen::MatrixXcd P = gram_from_phases(p).matrix();
  const Eigen::MatrixXcd Q = gram_from_phases(permute_phases(p, s)).matrix();
  for (int j = 0; j < 9; ++j)
    for (int k = 0; k < 9; ++k) CHECK(std::abs(Q(j, k) - P(s(j), s(k))) < 1e-14);
  CHECK((permute_gram(gram_from_phases(p), s).matrix() - Q).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("Bargmann tensor matches triple products and ignores diagonal unitaries") {
  std::mt19937_64 rng(7);
  const PhaseVector p = solution(3, 5, 0);
  const BargmannTensor t = BargmannTensor::of(gram_from_phases(p));
  const Eigen::MatrixXcd P = gram_from_phases(p).matrix();
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 9; ++j)
      for (int k = 0; k < 9; ++k) {
        if (i == j || j == k || i == k) {
          CHECK(t.at(i, j, k) == 0.0);
        } else {
          CHECK(oracle::circ(t.at(i, j, k), triple_phase(P, i, j, k)) < 1e-12);
        }
      }
  double worst = 0;
  for (int r = 0; r < 100; ++r) {
    const BargmannTensor u = BargmannTensor::of(gram_from_phases(gamma_shift(p, rng)));
    for (std::size_t k = 0; k < t.upper().size(); ++k) worst = std::max(worst, oracle::circ(t.upper()[k], u.upper()[k]));
  }
  CHECK(worst < 1e-8);
  CHECK_THROWS_AS(BargmannTensor::of(gram_from_phases(random_phase_vector(3, rng))), std::invalid_argument);
}

TEST_CASE("d = 4 generating set has 17 elements matching the published list") {
  const GramCandidate ref = wh_gram(reference_fiducial(4)).gram;
  const GeneratingSet g = generating_set(ref);
  REQUIRE(g.size() == 17);
  CHECK_FALSE(g.ambiguous);
  for (std::size_t i = 0; i < 17; ++i) CHECK(std::abs(g.phases[i] - kGenSet4[i]) < 1e-4);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g.phases[i] > g.phases[i - 1]);
  for (auto m : g.multiplicities) CHECK(m > 0);
  std::uint64_t total = 0;
  for (auto m : g.multiplicities) total += m;
  CHECK(total == 16u * 16u * 16u);

  // Negated phases (the complex-conjugate SIC) share the set.
  std::vector<double> neg = wh_gram(reference_fiducial(4)).phases.vector();
  for (double& v : neg) v = oracle::wrap(-v);
  CHECK(same_generating_set(g, generating_set(gram_from_phases(PhaseVector(4, neg)))));
}

TEST_CASE("d = 4 canonical frequencies match the expected profile off zero") {
  const PhaseVector ref = wh_gram(reference_fiducial(4)).phases;
  const GeneratingSet g = generating_set(gram_from_phases(ref));
  const auto freq = canonical_frequencies(ref, g);
  REQUIRE(freq.size() == 17);
  std::uint64_t total = 0;
  for (auto f : freq) total += f;
  CHECK(total == 240);
  // The zero element's count depends on a counting convention; the others
  // must form the same multiset as the published list.
  std::vector<std::uint64_t> ours(freq.begin() + 1, freq.end()), theirs(kFreq4.begin() + 1, kFreq4.end());
  std::sort(ours.begin(), ours.end());
  std::sort(theirs.begin(), theirs.end());
  CHECK(ours == theirs);
}

TEST_CASE("d = 5 generating set has 73 elements") {
  const GeneratingSet g = generating_set(wh_gram(reference_fiducial(5)).gram);
  CHECK(g.size() == 73);
  CHECK(g.phases.front() == 0.0);
  CHECK(std::abs(g.phases[1] - 0.00220427) < 1e-4);
  CHECK(std::abs(g.phases.back() - 6.28098) < 1e-4);
}

TEST_CASE("canonical forms") {
  std::mt19937_64 rng(9);
  const PhaseVector p = solution(3, 8, 0);
  const PhaseVector c = canonicalize(p, 1);
  for (std::size_t k = 2; k <= 9; ++k) CHECK(oracle::circ(c[chi(1, k, 3) - 1], 0.0) < 1e-12);
  const PhaseVector cc = canonicalize(c, 1);
  for (std::size_t k = 0; k < c.size(); ++k) CHECK(oracle::circ(c[k], cc[k]) < 1e-12);
  const PhaseVector c1 = canonicalize(gamma_shift(p, rng), 1);
  const PhaseVector c2 = canonicalize(gamma_shift(p, rng), 1);
  for (std::size_t k = 0; k < c.size(); ++k) {
    CHECK(oracle::circ(c1[k], c2[k]) < 1e-8);
    CHECK(oracle::circ(c1[k], c[k]) < 1e-8);
  }
  const PhaseVector c5 = canonicalize(p, 5);
  for (std::size_t k = 1; k <= 9; ++k)
    if (k != 5) CHECK(oracle::circ(c5.at(std::min<std::size_t>(5, k), std::max<std::size_t>(5, k)), 0.0) < 1e-12);
  CHECK_THROWS_AS(canonicalize(p, 0), std::invalid_argument);
  CHECK_THROWS_AS(canonicalize(p, 10), std::invalid_argument);
}

TEST_CASE("same_island distinguishes shifts from non-automorphism permutations") {
  std::mt19937_64 rng(10);
  const PhaseVector p = solution(4, 12, 0);
  const GramCandidate P = gram_from_phases(p);
  CHECK(same_island(P, P));
  CHECK(same_island(P, gram_from_phases(gamma_shift(p, rng))));
  const PermutationMap swap({1, 0, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15});
  CHECK_FALSE(same_island(P, permute_gram(P, swap)));
}

TEST_CASE("find_permutation recovers planted permutations") {
  std::mt19937_64 rng(11);
  for (int n : {3, 4, 5}) {
    const PhaseVector p = solution(n, 13, 0);
    const GramCandidate P = gram_from_phases(p);
    const PermutationMap sigma = random_permutation(gram_size(n), rng);
    const GramCandidate Q = gram_from_phases(gamma_shift(permute_phases(p, sigma), rng));
    const PermutationMatch m = find_permutation(P, Q);
    REQUIRE(m.status == MatchStatus::found);
    CHECK(same_island(permute_gram(P, *m.sigma), Q));
  }
}

TEST_CASE("find_permutation fails fast on different generating sets") {
  // Members of the continuous d = 3 family generally differ in their sets.
  const GramCandidate a = gram_from_phases(solution(3, 14, 0));
  const GramCandidate b = gram_from_phases(solution(3, 14, 1));
  REQUIRE_FALSE(same_generating_set(generating_set(a), generating_set(b)));
  const PermutationMatch m = find_permutation(a, b);
  CHECK(m.status == MatchStatus::none);
  CHECK(m.nodes == 0);
  CHECK(find_permutation(a, a).status == MatchStatus::found);
  CHECK(find_permutation(a, wh_gram(reference_fiducial(4)).gram).status == MatchStatus::none);
}

TEST_CASE("a tiny node cap is reported as indeterminate") {
  const PhaseVector p = solution(4, 15, 0);
  MatchOptions o;
  o.node_cap = 2;
  const PermutationMatch m = find_permutation(gram_from_phases(p), wh_gram(reference_fiducial(4)).gram, o);
  CHECK(m.status == MatchStatus::indeterminate);
}

TEST_CASE("d = 4 anchored automorphisms are order three and close to 48 elements") {
  const GramCandidate P = gram_from_phases(solution(4, 16, 0));
  const AutomorphismSearch y = automorphisms_fixing(P, 1);
  REQUIRE(y.status == MatchStatus::found);
  CHECK(y.automorphisms.size() == 3);
  for (const auto& s : y.automorphisms) {
    CHECK(s(0) == 0);
    CHECK(same_island(P, permute_gram(P, s)));
    if (!s.is_identity()) {
      CHECK(s.order() == 3);
      CHECK(s.fixed_points() == 1);
    }
  }
  const AutomorphismSummary sum = automorphism_summary(P);
  CHECK(sum.complete);
  CHECK(sum.group_order == 48);
  CHECK(sum.h_order == 16);
  CHECK(sum.element_orders.at(3) == 32);
}

TEST_CASE("group closure detects H") {
  const GramCandidate P = wh_gram(reference_fiducial(4)).gram;
  std::vector<PermutationMap> gens;
  for (std::size_t a = 1; a <= 16; ++a)
    for (const auto& s : automorphisms_fixing(P, a).automorphisms)
      if (!s.is_identity()) gens.push_back(s);
  const GroupReport g = group_closure(gens, 4);
  CHECK(g.order == 48);
  CHECK(g.h_order == 16);
  CHECK(g.h_closed);
  CHECK(g.h_abelian);
  CHECK(g.h_exponent == 4);
  std::size_t h_elems = 0;
  for (const auto& e : g.elements)
    if (e.power(4).is_identity()) ++h_elems;
  CHECK(h_elems == 16);
  CHECK_THROWS_AS(group_closure(gens, 4, 10), std::runtime_error);
  // Every automorphism is realized by vectors.
  const VectorSystem v = vectors_from_gram(P);
  for (std::size_t i = 0; i < 5; ++i) {
    const PermutationMap& s = g.elements[i];
    Eigen::MatrixXcd permuted(4, 16);
    for (int k = 0; k < 16; ++k) permuted.col(k) = v.v().col(s(k));
    CHECK(same_island(P, gram_from_phases(phases_of(GramCandidate::from_matrix(4, permuted.adjoint() * permuted)))));
  }
}

TEST_CASE("d = 5 automorphism group has 75 elements with H of order 25") {
  const AutomorphismSummary s = automorphism_summary(wh_gram(reference_fiducial(5)).gram);
  CHECK(s.group_order == 75);
  CHECK(s.h_order == 25);
}

TEST_CASE("classify matches numerical solutions to a reference") {
  for (int n : {4, 5}) {
    const ClassificationReport r = classify(solution(n, 20, 0));
    CHECK(r.matched_reference);
    CHECK(r.match_status == MatchStatus::found);
    CHECK((r.reference_label == "wh" || r.reference_label == "wh-conjugate"));
    CHECK(r.island_hash.size() == 16);
    CHECK(r.gen_set.size() == (n == 4 ? 17u : 73u));
  }
  ClassifyOptions o;
  o.match_reference = false;
  o.automorphisms = false;
  const ClassificationReport r = classify(solution(4, 20, 1), o);
  CHECK_FALSE(r.matched_reference);
  CHECK_FALSE(r.automorphisms.has_value());
}

TEST_CASE("island hashes are stable across an island and shared by conjugates") {
  std::mt19937_64 rng(21);
  const PhaseVector p = solution(4, 22, 0);
  const std::string h = island_hash(generating_set(gram_from_phases(p)));
  CHECK(h == island_hash(generating_set(gram_from_phases(gamma_shift(p, rng)))));
  CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
}
