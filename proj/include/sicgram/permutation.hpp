#pragma once
// Bijections of the frame-vector labels and their action on Gram matrices.
// Labels are 0-based internally; one_based()/from_one_based() convert at the
// interface boundary.

#include <cstdint>
#include <vector>

#include "sicgram/gramspace.hpp"

namespace sicgram {

class PermutationMap {
 public:
  /// Throws std::invalid_argument unless images is a bijection of 0..size-1.
  explicit PermutationMap(std::vector<std::uint32_t> images);

  static PermutationMap identity(std::size_t size);
  static PermutationMap from_one_based(const std::vector<std::uint32_t>& images);

  std::size_t size() const { return images_.size(); }
  std::uint32_t operator()(std::size_t i) const { return images_[i]; }
  const std::vector<std::uint32_t>& images() const { return images_; }
  std::vector<std::uint32_t> one_based() const;

  /// (this * other)(i) = this(other(i)).
  PermutationMap operator*(const PermutationMap& other) const;
  PermutationMap inverse() const;
  PermutationMap power(int k) const;

  bool is_identity() const;
  std::size_t fixed_points() const;
  /// Order as a group element (lcm of cycle lengths).
  std::uint64_t order() const;

  bool operator==(const PermutationMap&) const = default;
  auto operator<=>(const PermutationMap&) const = default;

 private:
  std::vector<std::uint32_t> images_;
};

/// Phases of X_sigma^dag P X_sigma, whose (j,k) entry is P_{sigma(j) sigma(k)}.
PhaseVector permute_phases(const PhaseVector& phases, const PermutationMap& sigma);

GramCandidate permute_gram(const GramCandidate& gram, const PermutationMap& sigma);

}  // namespace sicgram
