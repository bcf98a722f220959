#include "sicgram/calculus.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "sicgram/trace_eval.hpp"

namespace sicgram {

std::vector<double> gradient_f(const PhaseVector& phases) {
  TraceEvaluator eval(phases.n());
  std::vector<double> g(phases.size());
  eval.evaluate(phases.values(), g);
  return g;
}

std::vector<double> gradient_g(const PhaseVector& phases) {
  TraceEvaluator eval(phases.n());
  std::vector<double> g(phases.size());
  eval.evaluate(phases.values(), {}, g);
  return g;
}

namespace {

double cube(double x) { return x * x * x; }

struct CosineCoefficients {
  double f3, g3, g4;
  explicit CosineCoefficients(int n) {
    const double nn = n;
    const double root3 = cube(std::sqrt(nn + 1.0));
    f3 = 6.0 / (cube(nn) * root3);
    g3 = 24.0 / (nn * cube(nn) * root3);
    g4 = 8.0 / (nn * cube(nn) * (nn + 1.0) * (nn + 1.0));
  }
};

// Adds -coef sin(K_abc . phi) K_abc to grad for every a < b < c.
void add_triangle_gradient(const PhaseVector& phases, double coef, std::vector<double>& grad) {
  const std::size_t N = gram_size(phases.n());
  for (std::size_t a = 0; a < N; ++a) {
    for (std::size_t b = a + 1; b < N; ++b) {
      const std::size_t ab = flat_index(a, b, N);
      for (std::size_t c = b + 1; c < N; ++c) {
        const std::size_t bc = flat_index(b, c, N);
        const std::size_t ac = flat_index(a, c, N);
        const double s = -coef * std::sin(phases[ab] + phases[bc] - phases[ac]);
        grad[ab] += s;
        grad[bc] += s;
        grad[ac] -= s;
      }
    }
  }
}

}  // namespace

std::vector<double> gradient_f_cosine(const PhaseVector& phases) {
  std::vector<double> grad(phases.size(), 0.0);
  add_triangle_gradient(phases, CosineCoefficients(phases.n()).f3, grad);
  return grad;
}

std::vector<double> gradient_g_cosine(const PhaseVector& phases) {
  const CosineCoefficients coef(phases.n());
  std::vector<double> grad(phases.size(), 0.0);
  add_triangle_gradient(phases, coef.g3, grad);
  const std::size_t N = gram_size(phases.n());
  auto term = [&](std::array<std::size_t, 4> idx, std::array<int, 4> sign) {
    double arg = 0.0;
    for (int i = 0; i < 4; ++i) arg += sign[i] * phases[idx[i]];
    const double s = -coef.g4 * std::sin(arg);
    for (int i = 0; i < 4; ++i) grad[idx[i]] += sign[i] * s;
  };
  for (std::size_t a = 0; a < N; ++a) {
    for (std::size_t b = a + 1; b < N; ++b) {
      for (std::size_t c = b + 1; c < N; ++c) {
        for (std::size_t d = c + 1; d < N; ++d) {
          const std::size_t ab = flat_index(a, b, N), ac = flat_index(a, c, N), ad = flat_index(a, d, N);
          const std::size_t bc = flat_index(b, c, N), bd = flat_index(b, d, N), cd = flat_index(c, d, N);
          term({ab, bc, cd, ad}, {1, 1, 1, -1});
          term({ab, bd, cd, ac}, {1, 1, -1, -1});
          term({ac, bc, bd, ad}, {1, -1, 1, -1});
        }
      }
    }
  }
  return grad;
}

CriticalPointReport critical_point_check(const PhaseVector& phases, double tol) {
  TraceEvaluator eval(phases.n());
  std::vector<double> gf(phases.size()), gg(phases.size());
  eval.evaluate(phases.values(), gf, gg);
  CriticalPointReport r;
  for (std::size_t k = 0; k < gf.size(); ++k) {
    r.grad_f_norm = std::max(r.grad_f_norm, std::abs(gf[k]));
    r.grad_g_norm = std::max(r.grad_g_norm, std::abs(gg[k]));
  }
  r.critical = r.grad_f_norm < tol && r.grad_g_norm < tol;
  return r;
}

namespace {

// Re Tr(Q F_v R F_u) where F_u = dP/dphi_u for u = (a,b), v = (c,d):
// F_u = i P_ab e_a e_b^T - i P_ba e_b e_a^T.
template <class QFn, class RFn>
double mixed_trace(const QFn& q, const RFn& r, Complex alpha, Complex beta, Eigen::Index a,
                   Eigen::Index b, Eigen::Index c, Eigen::Index d) {
  const Complex t = -alpha * beta * q(b, c) * r(d, a) + std::conj(alpha) * beta * q(a, c) * r(d, b) +
                    alpha * std::conj(beta) * q(b, d) * r(c, a) -
                    std::conj(alpha) * std::conj(beta) * q(a, d) * r(c, b);
  return t.real();
}

}  // namespace

HessianPair hessian_pair(const PhaseVector& phases) {
  const GramCandidate gram = gram_from_phases(phases);
  const ComplexMatrix& p = gram.matrix();
  const ComplexMatrix p2 = p * p;
  const ComplexMatrix p3 = p2 * p;
  const auto N = static_cast<Eigen::Index>(gram.size());
  const auto M = static_cast<Eigen::Index>(phases.size());

  auto P = [&](Eigen::Index i, Eigen::Index j) { return p(i, j); };
  auto P2 = [&](Eigen::Index i, Eigen::Index j) { return p2(i, j); };
  auto I = [](Eigen::Index i, Eigen::Index j) { return Complex(i == j ? 1.0 : 0.0, 0.0); };

  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
  pairs.reserve(M);
  for (Eigen::Index a = 0; a < N; ++a) {
    for (Eigen::Index b = a + 1; b < N; ++b) pairs.emplace_back(a, b);
  }

  HessianPair h{RealMatrix(M, M), RealMatrix(M, M)};
  for (Eigen::Index u = 0; u < M; ++u) {
    const auto [a, b] = pairs[u];
    const Complex alpha = p(a, b);
    for (Eigen::Index v = u; v < M; ++v) {
      const auto [c, d] = pairs[v];
      const Complex beta = p(c, d);
      // d2 Tr P^3 = 3 [Tr(P F_v F_u) + Tr(P F_u F_v)]
      double hf = 3.0 * (mixed_trace(P, I, alpha, beta, a, b, c, d) +
                         mixed_trace(P, I, beta, alpha, c, d, a, b));
      // d2 Tr P^4 = 4 [Tr(P^2 F_v F_u) + Tr(P^2 F_u F_v) + Tr(P F_v P F_u)]
      double hg = 4.0 * (mixed_trace(P2, I, alpha, beta, a, b, c, d) +
                         mixed_trace(P2, I, beta, alpha, c, d, a, b) +
                         mixed_trace(P, P, alpha, beta, a, b, c, d));
      if (u == v) {
        // Second derivative of P along u is -P_ab e_a e_b^T - P_ba e_b e_a^T.
        hf += -6.0 * (alpha * p2(b, a)).real();
        hg += -8.0 * (alpha * p3(b, a)).real();
      }
      h.hf(u, v) = h.hf(v, u) = hf;
      h.hg(u, v) = h.hg(v, u) = hg;
    }
  }
  return h;
}

RealVector gamma_direction(std::span<const double> c, int n) {
  const std::size_t N = gram_size(n);
  if (c.size() != N) throw std::invalid_argument("Gamma shift needs one angle per frame vector");
  RealVector dir(static_cast<Eigen::Index>(phase_count(n)));
  std::size_t k = 0;
  for (std::size_t a = 0; a < N; ++a) {
    for (std::size_t b = a + 1; b < N; ++b) dir(k++) = c[b] - c[a];
  }
  return dir;
}

RealMatrix gamma_basis(int n) {
  const std::size_t N = gram_size(n);
  RealMatrix basis(static_cast<Eigen::Index>(phase_count(n)), static_cast<Eigen::Index>(N - 1));
  std::vector<double> c(N, 0.0);
  for (std::size_t j = 1; j < N; ++j) {
    c[j] = 1.0;
    basis.col(static_cast<Eigen::Index>(j - 1)) = gamma_direction(c, n);
    c[j] = 0.0;
  }
  return basis;
}

NullSpaceReport null_intersection_dim(const HessianPair& h, int n, double threshold) {
  const Eigen::Index M = h.hf.rows();
  if (h.hf.cols() != M || h.hg.rows() != M || h.hg.cols() != M) {
    throw std::invalid_argument("Hessians must be square and of equal size");
  }
  NullSpaceReport r;
  r.n = n;
  r.threshold = threshold;

  auto count_zero = [&](const RealVector& values, double scale) {
    int zeros = 0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      const double v = std::abs(values(i));
      if (v < threshold * scale) ++zeros;
      if (v >= threshold * scale / 10.0 && v <= threshold * scale * 10.0) r.indeterminate = true;
    }
    return zeros;
  };

  Eigen::SelfAdjointEigenSolver<RealMatrix> ef(h.hf, Eigen::EigenvaluesOnly);
  r.dim_f = count_zero(ef.eigenvalues(), ef.eigenvalues().cwiseAbs().maxCoeff());
  Eigen::SelfAdjointEigenSolver<RealMatrix> eg(h.hg, Eigen::EigenvaluesOnly);
  r.dim_g = count_zero(eg.eigenvalues(), eg.eigenvalues().cwiseAbs().maxCoeff());

  RealMatrix stacked(2 * M, M);
  stacked << h.hf, h.hg;
  // BDCSVD in Eigen 3.4 can return unsorted values on these matrices.
  Eigen::JacobiSVD<RealMatrix, Eigen::ColPivHouseholderQRPreconditioner> svd(stacked, Eigen::ComputeThinV);
  const RealVector& sv = svd.singularValues();
  r.dim_intersection = count_zero(sv, sv.size() > 0 ? sv(0) : 0.0);
  r.basis = svd.matrixV().rightCols(r.dim_intersection);
  return r;
}

KVector::KVector(std::size_t a, std::size_t b, std::size_t c, int n) : a_(a), b_(b), c_(c), n_(n) {
  if (!(a >= 1 && a < b && b < c && c <= gram_size(n))) {
    throw std::invalid_argument("K vector needs 1 <= a < b < c <= n^2");
  }
  positions_ = {chi(a, b, n) - 1, chi(b, c, n) - 1, chi(a, c, n) - 1};
}

Eigen::VectorXi KVector::dense() const {
  Eigen::VectorXi v = Eigen::VectorXi::Zero(static_cast<Eigen::Index>(phase_count(n_)));
  for (int i = 0; i < 3; ++i) v(static_cast<Eigen::Index>(positions_[i])) += signs()[i];
  return v;
}

namespace {

constexpr std::uint64_t kPrime = 2147483647ULL;  // 2^31 - 1

std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t result = 1;
  base %= kPrime;
  while (exp > 0) {
    if (exp & 1) result = result * base % kPrime;
    base = base * base % kPrime;
    exp >>= 1;
  }
  return result;
}

}  // namespace

std::size_t k_span_rank(int n) {
  require_dimension(n);
  const std::size_t N = gram_size(n);
  const std::size_t M = phase_count(n);
  // rank(K) = rank(K^T K) over the rationals; K^T K is a small integer matrix
  // and Gaussian elimination modulo a large prime recovers its rank.
  std::vector<std::int64_t> gram(M * M, 0);
  for (std::size_t a = 0; a < N; ++a) {
    for (std::size_t b = a + 1; b < N; ++b) {
      for (std::size_t c = b + 1; c < N; ++c) {
        const std::size_t idx[3] = {flat_index(a, b, N), flat_index(b, c, N), flat_index(a, c, N)};
        const int sign[3] = {1, 1, -1};
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j) gram[idx[i] * M + idx[j]] += sign[i] * sign[j];
        }
      }
    }
  }
  std::vector<std::uint64_t> m(M * M);
  for (std::size_t i = 0; i < M * M; ++i) {
    const std::int64_t v = gram[i] % static_cast<std::int64_t>(kPrime);
    m[i] = static_cast<std::uint64_t>(v < 0 ? v + static_cast<std::int64_t>(kPrime) : v);
  }
  std::size_t rank = 0;
  for (std::size_t col = 0; col < M && rank < M; ++col) {
    std::size_t pivot = rank;
    while (pivot < M && m[pivot * M + col] == 0) ++pivot;
    if (pivot == M) continue;
    if (pivot != rank) {
      for (std::size_t k = 0; k < M; ++k) std::swap(m[pivot * M + k], m[rank * M + k]);
    }
    const std::uint64_t inv = mod_pow(m[rank * M + col], kPrime - 2);
    for (std::size_t k = col; k < M; ++k) m[rank * M + k] = m[rank * M + k] * inv % kPrime;
    for (std::size_t row = rank + 1; row < M; ++row) {
      const std::uint64_t factor = m[row * M + col];
      if (factor == 0) continue;
      for (std::size_t k = col; k < M; ++k) {
        m[row * M + k] = (m[row * M + k] + (kPrime - factor) * m[rank * M + k]) % kPrime;
      }
    }
    ++rank;
  }
  return rank;
}

Eigen::VectorXi phase_combination(std::initializer_list<std::tuple<std::size_t, std::size_t, int>> terms,
                                  int n) {
  Eigen::VectorXi v = Eigen::VectorXi::Zero(static_cast<Eigen::Index>(phase_count(n)));
  for (const auto& [a, b, sign] : terms) {
    if (a == b) throw std::invalid_argument("phase combination term needs distinct indices");
    const std::size_t k = a < b ? chi(a, b, n) : chi(b, a, n);
    v(static_cast<Eigen::Index>(k - 1)) += sign;
  }
  return v;
}

FourIndexPatterns four_index_patterns(std::size_t a, std::size_t b, std::size_t c, std::size_t d, int n) {
  if (!(a < b && b < c && c < d)) throw std::invalid_argument("four-index pattern needs a < b < c < d");
  FourIndexPatterns p;
  p.cycle = phase_combination({{a, b, 1}, {b, c, 1}, {c, d, 1}, {a, d, -1}}, n);
  p.cross = phase_combination({{a, b, 1}, {b, d, 1}, {c, d, -1}, {a, c, -1}}, n);
  p.twisted = phase_combination({{a, c, 1}, {b, c, -1}, {b, d, 1}, {a, d, -1}}, n);
  return p;
}

std::vector<std::pair<int, KVector>> telescoped_k(std::size_t a, std::size_t b, std::size_t c, int n) {
  std::vector<std::pair<int, KVector>> out;
  for (std::size_t i = a; i + 2 <= b; ++i) {
    out.emplace_back(1, KVector(i, i + 1, c, n));
    out.emplace_back(-1, KVector(i, i + 1, b, n));
  }
  out.emplace_back(1, KVector(b - 1, b, c, n));
  return out;
}

}  // namespace sicgram
