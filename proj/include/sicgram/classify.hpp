#pragma once
// Island invariants of SIC Gram matrices and permutation equivalence.
//
// Conjugating P by a diagonal unitary moves it along its island without
// changing the Bargmann phases t_ijk = arg(P_ij P_jk P_ki). The canonical
// form anchored at a has entries t_ajk, so two Grams are related by a label
// permutation sigma exactly when some anchored canonical forms agree after
// relabeling; that is the search carried out by find_permutation.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sicgram/gramspace.hpp"
#include "sicgram/permutation.hpp"

namespace sicgram {

inline constexpr double kPhaseTolerance = 1e-6;

class BargmannTensor {
 public:
  /// Throws std::invalid_argument unless the Gram passes is_sic_gram(sic_tol).
  static BargmannTensor of(const GramCandidate& gram, double sic_tol = 1e-6);

  int n() const { return n_; }
  std::size_t size() const { return N_; }

  /// Phase in [0, 2pi) for any 0-based triple. Repeated labels give 0 and odd
  /// reorderings negate the phase.
  double at(std::size_t i, std::size_t j, std::size_t k) const;

  /// Phases for i < j < k in lexicographic order.
  const std::vector<double>& upper() const { return upper_; }

 private:
  BargmannTensor(int n, std::vector<double> upper);
  std::size_t upper_index(std::size_t i, std::size_t j, std::size_t k) const;

  int n_;
  std::size_t N_;
  std::vector<double> upper_;
};

BargmannTensor bargmann(const GramCandidate& gram);

struct GeneratingSet {
  std::vector<double> phases;              // strictly increasing in [0, 2pi)
  std::vector<std::uint64_t> multiplicities;  // over the full N^3 tensor
  double cluster_radius = kPhaseTolerance;
  /// Two neighbouring clusters lie within 2 * cluster_radius of each other.
  bool ambiguous = false;

  std::size_t size() const { return phases.size(); }
  /// Index of the cluster containing phase, or -1 if none is within tol.
  int label_of(double phase, double tol) const;
};

/// Distinct phases of the full Bargmann tensor (both orientations of every
/// triple and the degenerate zeros), clustered by single linkage on the circle.
GeneratingSet generating_set(const GramCandidate& gram, double cluster_tol = kPhaseTolerance);
GeneratingSet generating_set(const BargmannTensor& tensor, double cluster_tol = kPhaseTolerance);

/// Element-wise equality of two generating sets within tol.
bool same_generating_set(const GeneratingSet& a, const GeneratingSet& b, double tol = 1e-5);

/// FNV-1a 64-bit hash of the phases rounded to 1e-5, as 16 hex digits.
std::string island_hash(const GeneratingSet& set);

/// Island representative with row and column `anchor` (1-based) set to zero:
/// phi'_jk = phi_jk + theta_j - theta_k, theta_j = arg P_{anchor, j}.
PhaseVector canonicalize(const PhaseVector& phases, std::size_t anchor = 1);

/// Counts of each generating-set element among the off-diagonal entries
/// (both triangles) of the canonical form anchored at 1.
std::vector<std::uint64_t> canonical_frequencies(const PhaseVector& phases, const GeneratingSet& set);

bool same_island(const GramCandidate& p, const GramCandidate& q, double tol = kPhaseTolerance);
bool same_island(const BargmannTensor& p, const BargmannTensor& q, double tol = kPhaseTolerance);

enum class MatchStatus { found, none, indeterminate };
const char* to_string(MatchStatus status);

struct MatchOptions {
  double tol = kPhaseTolerance;
  std::uint64_t node_cap = 50'000'000;
};

struct PermutationMatch {
  MatchStatus status = MatchStatus::none;
  std::optional<PermutationMap> sigma;
  std::uint64_t nodes = 0;
};

/// Searches sigma with X_sigma^dag P X_sigma in the island of Q.
PermutationMatch find_permutation(const GramCandidate& p, const GramCandidate& q, const MatchOptions& options = {});

struct AutomorphismSearch {
  MatchStatus status = MatchStatus::found;  // indeterminate if the cap was hit
  std::vector<PermutationMap> automorphisms;  // includes the identity
  std::uint64_t nodes = 0;
};

/// All sigma with sigma(anchor) = anchor (1-based) that preserve the island.
AutomorphismSearch automorphisms_fixing(const GramCandidate& gram, std::size_t anchor,
                                        const MatchOptions& options = {});

struct GroupReport {
  std::size_t order = 0;
  std::map<std::uint64_t, std::size_t> element_orders;  // order -> count
  /// H: elements with h^k = e for k = n (or 2n when that gives the n^2
  /// subgroup); zero if no such subgroup was found.
  std::size_t h_order = 0;
  int h_exponent = 0;
  bool h_closed = false;
  bool h_abelian = false;
  std::size_t h_n_count = 0;   // |{g : g^n = e}|
  std::size_t h_2n_count = 0;  // |{g : g^2n = e}|
  std::vector<PermutationMap> elements;
};

/// Closure of the generators under composition. Throws std::runtime_error if
/// the group exceeds max_order elements.
GroupReport group_closure(const std::vector<PermutationMap>& generators, int n, std::size_t max_order = 1'000'000);

struct ReferenceGram {
  std::string label;
  PhaseVector phases;
};

/// Weyl-Heisenberg covariant anchors for dimension n: the orbit Gram of the
/// reference fiducial and of its complex conjugate.
const std::vector<ReferenceGram>& reference_grams(int n);

struct AutomorphismSummary {
  std::size_t group_order = 0;
  std::size_t h_order = 0;
  std::map<std::uint64_t, std::size_t> element_orders;
  /// Fixed-point counts of the non-identity anchored automorphisms.
  std::map<std::size_t, std::size_t> fixed_point_census;
  std::size_t anchored_generators = 0;
  bool complete = true;  // false if some search hit its node cap
};

AutomorphismSummary automorphism_summary(const GramCandidate& gram, const MatchOptions& options = {});

struct ClassificationReport {
  std::string island_hash;
  GeneratingSet gen_set;
  std::vector<std::uint64_t> frequencies;
  bool matched_reference = false;
  std::string reference_label;
  std::optional<PermutationMap> permutation;
  MatchStatus match_status = MatchStatus::none;
  std::optional<AutomorphismSummary> automorphisms;
};

struct ClassifyOptions {
  bool match_reference = true;
  bool automorphisms = true;
  MatchOptions match;
};

ClassificationReport classify(const PhaseVector& phases, const ClassifyOptions& options = {});

}  // namespace sicgram
