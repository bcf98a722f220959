#include "projector_system.hpp"

#include <algorithm>

namespace sicgram::detail {

std::vector<std::size_t> free_phase_indices(int n) {
  const std::size_t N = gram_size(n);
  std::vector<std::size_t> free;
  for (std::size_t k = N - 1; k < phase_count(n); ++k) free.push_back(k);
  return free;
}

RealVector projector_residual(const ComplexMatrix& p) {
  const Eigen::Index N = p.rows();
  const ComplexMatrix r = p * p - p;
  const Eigen::Index M = N * (N - 1) / 2;
  RealVector out(2 * M + N);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < N; ++j) {
    for (Eigen::Index l = j + 1; l < N; ++l, ++k) {
      out(2 * k) = r(j, l).real();
      out(2 * k + 1) = r(j, l).imag();
    }
  }
  for (Eigen::Index j = 0; j < N; ++j) out(2 * M + j) = r(j, j).real();
  return out;
}

Eigen::SparseMatrix<double> projector_jacobian(const ComplexMatrix& p, const std::vector<std::size_t>& free) {
  const auto N = static_cast<std::size_t>(p.rows());
  const std::size_t M = N * (N - 1) / 2;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(M);
  for (std::size_t a = 0; a < N; ++a) {
    for (std::size_t b = a + 1; b < N; ++b) pairs.emplace_back(a, b);
  }

  const Complex i(0.0, 1.0);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(free.size() * 4 * N);
  std::vector<std::pair<std::size_t, std::size_t>> touched;
  for (std::size_t col = 0; col < free.size(); ++col) {
    const auto [a, b] = pairs[free[col]];
    const Complex alpha = p(a, b);
    // dP = F with F_ab = i alpha, F_ba = -i conj(alpha); dR = F P + P F - F.
    auto dr = [&](std::size_t j, std::size_t k) {
      Complex v = 0.0;
      if (j == a) v += i * alpha * p(b, k);
      if (j == b) v -= i * std::conj(alpha) * p(a, k);
      if (k == b) v += i * alpha * p(j, a);
      if (k == a) v -= i * std::conj(alpha) * p(j, b);
      if (j == a && k == b) v -= i * alpha;
      if (j == b && k == a) v += i * std::conj(alpha);
      return v;
    };
    touched.clear();
    for (std::size_t t = 0; t < N; ++t) {
      for (std::size_t x : {a, b}) touched.emplace_back(std::min(x, t), std::max(x, t));
    }
    std::sort(touched.begin(), touched.end());
    touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
    const auto c = static_cast<Eigen::Index>(col);
    for (const auto& [j, k] : touched) {
      const Complex v = dr(j, k);
      if (j == k) {
        triplets.emplace_back(static_cast<Eigen::Index>(2 * M + j), c, v.real());
      } else {
        const auto row = static_cast<Eigen::Index>(2 * flat_index(j, k, N));
        triplets.emplace_back(row, c, v.real());
        triplets.emplace_back(row + 1, c, v.imag());
      }
    }
  }
  Eigen::SparseMatrix<double> jac(static_cast<Eigen::Index>(2 * M + N), static_cast<Eigen::Index>(free.size()));
  jac.setFromTriplets(triplets.begin(), triplets.end());
  return jac;
}

NormalEquations::NormalEquations(const Eigen::SparseMatrix<double>& jacobian) : jt_(jacobian.transpose()) {
  RealMatrix jtj = RealMatrix(jt_ * jacobian);
  const double mu = 1e-14 * std::max(jtj.diagonal().maxCoeff(), 1e-300);
  jtj.diagonal().array() += mu;
  ldlt_.compute(jtj);
}

RealVector NormalEquations::step(const RealVector& residual) const {
  const RealVector rhs = -(jt_ * residual);
  return ldlt_.solve(rhs);
}

}  // namespace sicgram::detail
