#pragma once
// First and second derivatives of f = Tr P^3 and g = Tr P^4 with respect to
// the phases, the diagonal-unitary (Gamma) directions, Hessian null spaces and
// the span of the triangle vectors K_abc.

#include <array>
#include <initializer_list>
#include <tuple>
#include <vector>

#include "sicgram/gramspace.hpp"

namespace sicgram {

/// Matrix-route gradients, O(N^3).
std::vector<double> gradient_f(const PhaseVector& phases);
std::vector<double> gradient_g(const PhaseVector& phases);

/// Gradients of the explicit cosine sums, O(N^3) and O(N^4).
std::vector<double> gradient_f_cosine(const PhaseVector& phases);
std::vector<double> gradient_g_cosine(const PhaseVector& phases);

struct CriticalPointReport {
  double grad_f_norm = 0.0;  // infinity norms
  double grad_g_norm = 0.0;
  bool critical = false;     // both below the tolerance
};

CriticalPointReport critical_point_check(const PhaseVector& phases, double tol = 1e-6);

struct HessianPair {
  RealMatrix hf;
  RealMatrix hg;
};

HessianPair hessian_pair(const PhaseVector& phases);

/// Phase-space direction of the diagonal unitary diag(e^{i c_j}):
/// phi_jk -> phi_jk - c_j + c_k, so the direction entry is c_k - c_j.
RealVector gamma_direction(std::span<const double> c, int n);

/// M x (N-1) matrix of Gamma directions for c = e_2, ..., e_N.
RealMatrix gamma_basis(int n);

struct NullSpaceReport {
  int n = 0;
  int dim_f = 0;
  int dim_g = 0;
  int dim_intersection = 0;
  double threshold = 0.0;
  /// Some singular value lies within a factor 10 of the cutoff.
  bool indeterminate = false;
  RealMatrix basis;  // M x dim_intersection, orthonormal columns
};

/// Values below threshold times the largest value count as zero. The common
/// null space is the null space of the stacked matrix [hf; hg].
NullSpaceReport null_intersection_dim(const HessianPair& h, int n, double threshold = 1e-6);

/// Sparse phase combination: +1 at chi(a,b) and chi(b,c), -1 at chi(a,c).
class KVector {
 public:
  /// 1-based indices, 1 <= a < b < c <= n^2.
  KVector(std::size_t a, std::size_t b, std::size_t c, int n);

  std::size_t a() const { return a_; }
  std::size_t b() const { return b_; }
  std::size_t c() const { return c_; }

  /// 0-based flat positions of the (a,b), (b,c) and (a,c) entries.
  std::array<std::size_t, 3> positions() const { return positions_; }
  static constexpr std::array<int, 3> signs() { return {1, 1, -1}; }

  Eigen::VectorXi dense() const;

 private:
  std::size_t a_, b_, c_;
  int n_;
  std::array<std::size_t, 3> positions_;
};

/// Exact rank of the matrix whose rows are all K_abc, computed modulo the
/// prime 2^31 - 1. Expected (n^2-1)(n^2-2)/2.
std::size_t k_span_rank(int n);

/// Integer vector of the given signed pair terms, each term (a, b, sign) with
/// 1-based a != b; a pair with a > b is stored at chi(b, a).
Eigen::VectorXi phase_combination(std::initializer_list<std::tuple<std::size_t, std::size_t, int>> terms, int n);

/// The three four-index phase patterns of the g sum for a < b < c < d:
///   cycle:   (a,b) + (b,c) + (c,d) - (a,d)  =  K_abc + K_acd
///   cross:   (a,b) + (b,d) - (c,d) - (a,c)  =  K_abc - K_bcd
///   twisted: (a,c) - (b,c) + (b,d) - (a,d)  =  K_abd - K_abc
struct FourIndexPatterns {
  Eigen::VectorXi cycle, cross, twisted;
};
FourIndexPatterns four_index_patterns(std::size_t a, std::size_t b, std::size_t c, std::size_t d, int n);

/// K_abc written through the consecutive vectors K_{i,i+1,j}:
///   K_abc = sum_{i=a}^{b-2} (K_{i,i+1,c} - K_{i,i+1,b}) + K_{b-1,b,c}.
/// Returns (coefficient, vector) pairs.
std::vector<std::pair<int, KVector>> telescoped_k(std::size_t a, std::size_t b, std::size_t c, int n);

}  // namespace sicgram
