#pragma once
// Recovery of SIC vectors from a Gram matrix. P = V^dag V for an n x n^2
// matrix V with orthonormal rows; the columns of sqrt(n) V are the SIC vectors.

#include <vector>

#include "sicgram/gramspace.hpp"

namespace sicgram {

class VectorSystem {
 public:
  /// Throws std::invalid_argument unless V has n rows, n^2 columns and
  /// V V^dag = I within 1e-10.
  VectorSystem(int n, ComplexMatrix v);

  int n() const { return n_; }
  const ComplexMatrix& v() const { return v_; }
  /// Unit-norm SIC vector |nu_k> = sqrt(n) V e_k (0-based k).
  Eigen::VectorXcd vector(Eigen::Index k) const;
  /// V^dag V.
  ComplexMatrix gram() const { return v_.adjoint() * v_; }

 private:
  int n_;
  ComplexMatrix v_;
};

/// Raised when the numerical rank of P differs from n.
class RankError : public std::invalid_argument {
 public:
  RankError(const std::string& what, std::vector<double> spectrum)
      : std::invalid_argument(what), spectrum_(std::move(spectrum)) {}
  const std::vector<double>& spectrum() const { return spectrum_; }

 private:
  std::vector<double> spectrum_;
};

/// Orthonormal basis of the column space of P by pivoted Gram-Schmidt
/// (largest residual column first), stacked as the rows of V.
VectorSystem vectors_from_gram(const GramCandidate& gram, double rank_threshold = 1e-6);

/// E_k = |nu_k><nu_k| / n.
std::vector<ComplexMatrix> povm_elements(const VectorSystem& system);

struct ReconstructionCheck {
  double gram_error = 0.0;          // max |V^dag V - P|
  double overlap_error = 0.0;       // max | |<nu_i|nu_k>|^2 - 1/(n+1) |
  double identity_error = 0.0;      // max |sum_k E_k - I|
  double povm_trace_error = 0.0;    // max |Tr(E_j E_k) - (n delta + 1)/(n^2 (n+1))|
};

ReconstructionCheck check_reconstruction(const GramCandidate& gram, const VectorSystem& system);

}  // namespace sicgram
