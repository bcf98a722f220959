#pragma once
// Candidate SIC Gram matrices parameterized by their upper-triangle phases.
//
// For Hilbert-space dimension n there are N = n^2 frame vectors and
// M = N(N-1)/2 free phases. A candidate has 1/n on the diagonal and
// e^{i phi_ab} / (n sqrt(n+1)) above it, so Tr(P) = Tr(P^2) = n always hold and
// P is a SIC Gram matrix exactly when Tr(P^3) = Tr(P^4) = n.
//
// Public indices are 1-based (a, b) pairs with a < b; the flat phase index is
// chi(a, b) = (a-1) N - a(a+1)/2 + b, also 1-based.

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace sicgram {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kDefaultSicTolerance = 1e-8;

/// Reduces an angle to [0, 2pi).
double reduce_phase(double phase);

/// Signed distance between two angles on the circle, in (-pi, pi].
double circular_difference(double a, double b);

constexpr std::size_t gram_size(int n) { return static_cast<std::size_t>(n) * n; }
constexpr std::size_t phase_count(int n) {
  const std::size_t N = gram_size(n);
  return N * (N - 1) / 2;
}

/// 0-based flat index of the 0-based pair (a, b), a < b, in an N x N Gram.
constexpr std::size_t flat_index(std::size_t a, std::size_t b, std::size_t N) {
  return a * N - a * (a + 1) / 2 + (b - a - 1);
}

/// 1-based chi index of the 1-based pair (a, b). Throws std::invalid_argument
/// unless 1 <= a < b <= n^2.
std::size_t chi(std::size_t a, std::size_t b, int n);

/// Inverse of chi: the 1-based pair for a 1-based flat index.
std::pair<std::size_t, std::size_t> chi_pair(std::size_t k, int n);

void require_dimension(int n);

class PhaseVector {
 public:
  /// Throws std::invalid_argument if n < 2 or phases.size() != n^2(n^2-1)/2.
  PhaseVector(int n, std::vector<double> phases);

  static PhaseVector zeros(int n);

  int n() const { return n_; }
  std::size_t size() const { return phases_.size(); }
  std::span<const double> values() const { return phases_; }
  const std::vector<double>& vector() const { return phases_; }
  double operator[](std::size_t k) const { return phases_[k]; }

  /// Phase of the 1-based pair (a, b); a > b gives the Hermitian partner -phi_ba.
  double at(std::size_t a, std::size_t b) const;

  /// Copy with every phase reduced to [0, 2pi).
  PhaseVector canonical() const;

  Eigen::Map<const RealVector> as_eigen() const {
    return Eigen::Map<const RealVector>(phases_.data(), static_cast<Eigen::Index>(phases_.size()));
  }

 private:
  int n_;
  std::vector<double> phases_;
};

/// Raised when a matrix does not have the fixed Gram-candidate form.
class MalformedCandidate : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class GramCandidate {
 public:
  /// Validates Hermiticity, the 1/n diagonal and the 1/(n sqrt(n+1))
  /// off-diagonal modulus to within tol. Throws MalformedCandidate.
  static GramCandidate from_matrix(int n, ComplexMatrix entries, double tol = 1e-10);

  int n() const { return n_; }
  std::size_t size() const { return static_cast<std::size_t>(entries_.rows()); }
  const ComplexMatrix& matrix() const { return entries_; }
  Complex operator()(Eigen::Index j, Eigen::Index k) const { return entries_(j, k); }

 private:
  GramCandidate(int n, ComplexMatrix entries) : n_(n), entries_(std::move(entries)) {}
  friend GramCandidate gram_from_phases(const PhaseVector& phases);

  int n_;
  ComplexMatrix entries_;
};

/// Off-diagonal modulus 1/(n sqrt(n+1)).
double off_diagonal_modulus(int n);

GramCandidate gram_from_phases(const PhaseVector& phases);

/// Phases of the strict upper triangle in chi order, reduced to [0, 2pi).
PhaseVector phases_of(const GramCandidate& gram);

/// Evaluation route for Tr(P^3) and Tr(P^4). `automatic` uses the cosine sums
/// for n <= 3 and matrix products otherwise.
enum class TraceRoute { automatic, matrix, cosine_sum };

double f_value(const PhaseVector& phases, TraceRoute route = TraceRoute::automatic);
double g_value(const PhaseVector& phases, TraceRoute route = TraceRoute::automatic);

struct TraceReport {
  double f = 0.0;
  double g = 0.0;
  double s = 0.0;
  /// Infinity norm of the gradient of s.
  double gradient_norm = 0.0;
};

TraceReport objective_S(const PhaseVector& phases);

struct SicCheck {
  bool is_sic = false;
  double f_error = 0.0;  // |Tr P^3 - n|
  double g_error = 0.0;  // |Tr P^4 - n|
  std::vector<double> eigenvalues;  // ascending
  int unit_eigenvalues = 0;         // eigenvalues within sqrt(tol) of 1
  double projector_error = 0.0;     // max |P^2 - P|
};

SicCheck check_sic(const GramCandidate& gram, double tol = kDefaultSicTolerance);

/// True iff |Tr P^3 - n| <= tol and |Tr P^4 - n| <= tol.
bool is_sic_gram(const GramCandidate& gram, double tol = kDefaultSicTolerance);

}  // namespace sicgram
