#include "sicgram/reconstruct.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

namespace sicgram {

VectorSystem::VectorSystem(int n, ComplexMatrix v) : n_(n), v_(std::move(v)) {
  require_dimension(n);
  const auto N = static_cast<Eigen::Index>(gram_size(n));
  if (v_.rows() != n || v_.cols() != N) throw std::invalid_argument("vector system must be n x n^2");
  const double err = (v_ * v_.adjoint() - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (err > 1e-10) throw std::invalid_argument("rows of V are not orthonormal");
}

Eigen::VectorXcd VectorSystem::vector(Eigen::Index k) const {
  return std::sqrt(static_cast<double>(n_)) * v_.col(k);
}

VectorSystem vectors_from_gram(const GramCandidate& gram, double rank_threshold) {
  const int n = gram.n();
  const ComplexMatrix& p = gram.matrix();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(p, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  int rank = 0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) rank += ev(i) >= rank_threshold ? 1 : 0;
  if (rank != n) {
    throw RankError("Gram matrix has numerical rank " + std::to_string(rank) + ", expected " + std::to_string(n),
                    std::vector<double>(ev.data(), ev.data() + ev.size()));
  }

  // Pivoted modified Gram-Schmidt on the columns of P.
  const Eigen::Index N = p.rows();
  ComplexMatrix residual = p;
  ComplexMatrix q(N, n);
  for (int j = 0; j < n; ++j) {
    Eigen::Index pivot = 0;
    residual.colwise().norm().maxCoeff(&pivot);
    Eigen::VectorXcd u = residual.col(pivot);
    for (int pass = 0; pass < 2; ++pass) {
      for (int i = 0; i < j; ++i) u -= q.col(i) * q.col(i).dot(u);
    }
    u.normalize();
    q.col(j) = u;
    for (Eigen::Index c = 0; c < N; ++c) residual.col(c) -= u * u.dot(residual.col(c));
  }
  return VectorSystem(n, q.adjoint());
}

std::vector<ComplexMatrix> povm_elements(const VectorSystem& system) {
  std::vector<ComplexMatrix> out;
  const ComplexMatrix& v = system.v();
  out.reserve(static_cast<std::size_t>(v.cols()));
  for (Eigen::Index k = 0; k < v.cols(); ++k) out.push_back(v.col(k) * v.col(k).adjoint());
  return out;
}

ReconstructionCheck check_reconstruction(const GramCandidate& gram, const VectorSystem& system) {
  ReconstructionCheck r;
  const int n = system.n();
  const ComplexMatrix g = system.gram();
  r.gram_error = (g - gram.matrix()).cwiseAbs().maxCoeff();

  const Eigen::Index N = g.rows();
  const double nn = n;
  // <nu_i|nu_k> = n (V^dag V)_ik.
  for (Eigen::Index i = 0; i < N; ++i) {
    for (Eigen::Index k = i + 1; k < N; ++k) {
      r.overlap_error = std::max(r.overlap_error, std::abs(nn * nn * std::norm(g(i, k)) - 1.0 / (nn + 1.0)));
    }
  }

  const std::vector<ComplexMatrix> e = povm_elements(system);
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (const auto& ek : e) sum += ek;
  r.identity_error = (sum - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
  for (std::size_t j = 0; j < e.size(); ++j) {
    for (std::size_t k = j; k < e.size(); ++k) {
      const double expected = (j == k ? nn + 1.0 : 1.0) / (nn * nn * (nn + 1.0));
      const double actual = (e[j] * e[k]).trace().real();
      r.povm_trace_error = std::max(r.povm_trace_error, std::abs(actual - expected));
    }
  }
  return r;
}

}  // namespace sicgram
