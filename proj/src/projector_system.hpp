#pragma once
// Residual P^2 - P of a Gram candidate and its phase Jacobian, shared by the
// double-precision polish and the extended-precision refinement.
//
// The residual is Hermitian, so it is flattened as [Re R_jk, Im R_jk] for
// j < k in flat order followed by the real diagonal: 2M + N components.
// Row-1 phases are frozen to remove the diagonal-unitary gauge freedom.

#include <Eigen/Sparse>
#include <vector>

#include "sicgram/gramspace.hpp"

namespace sicgram::detail {

/// Flat phase indices that stay free (all pairs not touching index 0).
std::vector<std::size_t> free_phase_indices(int n);

/// Flattened residual of P^2 - P for a double-precision Gram matrix.
RealVector projector_residual(const ComplexMatrix& p);

/// Sparse Jacobian of the flattened residual with respect to the free phases.
Eigen::SparseMatrix<double> projector_jacobian(const ComplexMatrix& p, const std::vector<std::size_t>& free);

/// Cholesky-type factorization of J^T J + mu I with a tiny relative mu.
class NormalEquations {
 public:
  explicit NormalEquations(const Eigen::SparseMatrix<double>& jacobian);
  /// Least-squares step minimizing |J dx + r|.
  RealVector step(const RealVector& residual) const;

 private:
  Eigen::SparseMatrix<double> jt_;
  Eigen::LDLT<RealMatrix> ldlt_;
};

}  // namespace sicgram::detail
