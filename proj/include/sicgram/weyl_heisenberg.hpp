#pragma once
// Weyl-Heisenberg displacements, the Zauner unitary, the frame potential and
// group-covariant reference SICs.
//
// Conventions: X|k> = |k+1>, Z|k> = w^k |k> with w = e^{2 pi i / n},
// tau = -e^{i pi / n} and D_p = tau^{p1 p2} X^{p1} Z^{p2}.

#include <cstdint>
#include <optional>
#include <vector>

#include "sicgram/gramspace.hpp"

namespace sicgram {

using ComplexVector = Eigen::VectorXcd;

/// Label (p1, p2) of a displacement, both components reduced mod n.
class WHIndex {
 public:
  WHIndex(long p1, long p2, int n);

  int p1() const { return p1_; }
  int p2() const { return p2_; }
  int n() const { return n_; }

  /// Position in the lexicographic (p1, p2) orbit ordering, 0-based.
  std::size_t linear() const { return static_cast<std::size_t>(p1_) * n_ + p2_; }
  static WHIndex from_linear(std::size_t k, int n);

  WHIndex operator+(const WHIndex& q) const;
  bool operator==(const WHIndex&) const = default;

 private:
  int p1_;
  int p2_;
  int n_;
};

/// Symplectic form <p, q> = p2 q1 - p1 q2 on unreduced integers.
long symplectic_form(long p1, long p2, long q1, long q2);

Complex wh_tau(int n);
ComplexMatrix shift_matrix(int n);
ComplexMatrix clock_matrix(int n);

/// D_p for a reduced label.
ComplexMatrix displacement(const WHIndex& p, int n);

/// D_p for raw integer labels. For even n, tau has order 2n, so
/// D_p D_q = tau^{<p,q>} D_{p+q} holds exactly only with the unreduced sum.
ComplexMatrix displacement(long p1, long p2, int n);

/// <j|U|k> = e^{i pi (n-1)/12} / sqrt(n) * tau^{2jk + j^2}. U^3 = I.
ComplexMatrix zauner_matrix(int n);

struct ZaunerEigenspace {
  int k = 0;                 // eigenvalue e^{2 pi i k / 3}
  Complex eigenvalue;
  ComplexMatrix basis;       // n x dim, orthonormal columns
};

/// The three eigenspaces, ordered k = 0, 1, 2 (some may be empty).
std::vector<ZaunerEigenspace> zauner_eigenspaces(int n);

/// floor((n + 3 - 2k) / 3).
int zauner_dimension(int n, int k);

class Fiducial {
 public:
  /// Requires unit norm within 1e-12.
  Fiducial(ComplexVector amplitudes);

  /// Normalizes and rotates the global phase so the largest-modulus amplitude
  /// is real and positive.
  static Fiducial normalized(ComplexVector amplitudes);

  int n() const { return static_cast<int>(amplitudes_.size()); }
  const ComplexVector& amplitudes() const { return amplitudes_; }

 private:
  ComplexVector amplitudes_;
};

/// Applies D_p to a vector in O(n).
ComplexVector apply_displacement(const WHIndex& p, const ComplexVector& v);

/// n x n^2 matrix whose columns are D_p psi in lexicographic order.
ComplexMatrix wh_orbit(const ComplexVector& psi);

/// |<psi|D_p psi>|^2 for every p in lexicographic order (p = 0 first).
std::vector<double> wh_overlaps(const ComplexVector& psi);

/// Sum over p, q of |<psi|D_p^dag D_q|psi>|^4 for a unit vector. Throws
/// std::invalid_argument if |psi| differs from 1 by more than 1e-10.
double frame_potential(const ComplexVector& psi);
double frame_potential(const Fiducial& psi);

/// 2 n^3 / (n + 1).
double frame_potential_bound(int n);

struct FiducialSearchOptions {
  std::uint64_t seed = 1;
  bool restrict_zauner = false;
  int zauner_k = 0;
  int max_restarts = 200;
  /// Required gap above the frame-potential bound.
  double tolerance = 1e-10;
  int max_iterations = 5000;
};

struct FiducialSearchResult {
  bool success = false;
  std::optional<Fiducial> fiducial;
  double best_value = 0.0;
  double bound = 0.0;
  int restarts_used = 0;
  int parameters = 0;  // real parameters of the search space
};

FiducialSearchResult fiducial_search(int n, const FiducialSearchOptions& options = {});

/// Deterministic fiducial used as the classification anchor for dimension n.
/// Cached per process. Throws std::runtime_error if the search fails.
const Fiducial& reference_fiducial(int n);

struct WhGram {
  GramCandidate gram;
  PhaseVector phases;
};

/// Gram matrix P_jk = <psi_j|psi_k>/n of the orbit in lexicographic order.
/// Throws std::invalid_argument if some overlap differs from 1/(n+1) by more
/// than overlap_tol.
WhGram wh_gram(const Fiducial& psi, double overlap_tol = 1e-8);

struct WelchReport {
  double lhs = 0.0;
  double bound = 0.0;
  bool satisfied = false;  // lhs >= bound up to rounding
  double relative_gap = 0.0;
};

/// Sum over all ordered pairs j, k of |<v_j|v_k>|^{2m} for the unit columns of
/// vectors, against K^2 / C(n+m-1, m) where K is the number of columns.
WelchReport welch_check(const ComplexMatrix& vectors, int m);

/// Order n^5 prod_{p | n} (1 - p^-2) of the Clifford group quotient.
std::uint64_t clifford_order(int n);

}  // namespace sicgram
