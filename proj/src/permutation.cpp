#include "sicgram/permutation.hpp"

#include <numeric>
#include <stdexcept>

namespace sicgram {

PermutationMap::PermutationMap(std::vector<std::uint32_t> images) : images_(std::move(images)) {
  std::vector<bool> seen(images_.size(), false);
  for (std::uint32_t v : images_) {
    if (v >= images_.size() || seen[v]) throw std::invalid_argument("permutation images must form a bijection");
    seen[v] = true;
  }
}

PermutationMap PermutationMap::identity(std::size_t size) {
  std::vector<std::uint32_t> images(size);
  std::iota(images.begin(), images.end(), 0u);
  return PermutationMap(std::move(images));
}

PermutationMap PermutationMap::from_one_based(const std::vector<std::uint32_t>& images) {
  std::vector<std::uint32_t> zero(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (images[i] == 0) throw std::invalid_argument("one-based permutation contains 0");
    zero[i] = images[i] - 1;
  }
  return PermutationMap(std::move(zero));
}

std::vector<std::uint32_t> PermutationMap::one_based() const {
  std::vector<std::uint32_t> out(images_);
  for (auto& v : out) ++v;
  return out;
}

PermutationMap PermutationMap::operator*(const PermutationMap& other) const {
  if (other.size() != size()) throw std::invalid_argument("composing permutations of different sizes");
  std::vector<std::uint32_t> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[i] = images_[other.images_[i]];
  return PermutationMap(std::move(out));
}

PermutationMap PermutationMap::inverse() const {
  std::vector<std::uint32_t> out(size());
  for (std::size_t i = 0; i < size(); ++i) out[images_[i]] = static_cast<std::uint32_t>(i);
  return PermutationMap(std::move(out));
}

PermutationMap PermutationMap::power(int k) const {
  if (k < 0) return inverse().power(-k);
  PermutationMap result = identity(size());
  PermutationMap base = *this;
  while (k > 0) {
    if (k & 1) result = result * base;
    base = base * base;
    k >>= 1;
  }
  return result;
}

bool PermutationMap::is_identity() const { return fixed_points() == size(); }

std::size_t PermutationMap::fixed_points() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < size(); ++i) count += images_[i] == i ? 1 : 0;
  return count;
}

std::uint64_t PermutationMap::order() const {
  std::vector<bool> seen(size(), false);
  std::uint64_t result = 1;
  for (std::size_t i = 0; i < size(); ++i) {
    if (seen[i]) continue;
    std::uint64_t len = 0;
    for (std::size_t j = i; !seen[j]; j = images_[j]) {
      seen[j] = true;
      ++len;
    }
    result = std::lcm(result, len);
  }
  return result;
}

PhaseVector permute_phases(const PhaseVector& phases, const PermutationMap& sigma) {
  const std::size_t N = gram_size(phases.n());
  if (sigma.size() != N) throw std::invalid_argument("permutation size differs from the Gram size");
  std::vector<double> out(phases.size());
  std::size_t k = 0;
  for (std::size_t j = 0; j < N; ++j) {
    for (std::size_t l = j + 1; l < N; ++l, ++k) {
      const std::size_t a = sigma(j), b = sigma(l);
      out[k] = a < b ? phases[flat_index(a, b, N)] : -phases[flat_index(b, a, N)];
    }
  }
  return PhaseVector(phases.n(), std::move(out));
}

GramCandidate permute_gram(const GramCandidate& gram, const PermutationMap& sigma) {
  if (sigma.size() != gram.size()) throw std::invalid_argument("permutation size differs from the Gram size");
  const auto N = static_cast<Eigen::Index>(gram.size());
  ComplexMatrix out(N, N);
  for (Eigen::Index j = 0; j < N; ++j) {
    for (Eigen::Index k = 0; k < N; ++k) out(j, k) = gram(sigma(j), sigma(k));
  }
  return GramCandidate::from_matrix(gram.n(), std::move(out));
}

}  // namespace sicgram
