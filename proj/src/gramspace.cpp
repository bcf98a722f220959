#include "sicgram/gramspace.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

#include "sicgram/trace_eval.hpp"

namespace sicgram {

double reduce_phase(double phase) {
  double r = std::fmod(phase, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

double circular_difference(double a, double b) {
  double d = std::remainder(a - b, kTwoPi);
  if (d <= -std::numbers::pi) d += kTwoPi;
  return d;
}

void require_dimension(int n) {
  if (n < 2) throw std::invalid_argument("dimension must be at least 2, got " + std::to_string(n));
}

std::size_t chi(std::size_t a, std::size_t b, int n) {
  require_dimension(n);
  const std::size_t N = gram_size(n);
  if (a < 1 || a >= b || b > N) {
    throw std::invalid_argument("chi requires 1 <= a < b <= n^2, got (" + std::to_string(a) + ", " +
                                std::to_string(b) + ")");
  }
  return (a - 1) * N - a * (a + 1) / 2 + b;
}

std::pair<std::size_t, std::size_t> chi_pair(std::size_t k, int n) {
  require_dimension(n);
  const std::size_t N = gram_size(n);
  if (k < 1 || k > phase_count(n)) throw std::invalid_argument("chi index out of range");
  std::size_t a = 1;
  std::size_t row_start = 1;  // chi(a, a+1)
  while (row_start + (N - a) <= k) {
    row_start += N - a;
    ++a;
  }
  return {a, a + 1 + (k - row_start)};
}

PhaseVector::PhaseVector(int n, std::vector<double> phases) : n_(n), phases_(std::move(phases)) {
  require_dimension(n);
  if (phases_.size() != phase_count(n)) {
    throw std::invalid_argument("phase vector for n=" + std::to_string(n) + " needs " +
                                std::to_string(phase_count(n)) + " entries, got " +
                                std::to_string(phases_.size()));
  }
  for (double v : phases_)
    if (!std::isfinite(v)) throw std::invalid_argument("phase vector contains a non-finite entry");
}

PhaseVector PhaseVector::zeros(int n) {
  require_dimension(n);
  return PhaseVector(n, std::vector<double>(phase_count(n), 0.0));
}

double PhaseVector::at(std::size_t a, std::size_t b) const {
  if (a > b) return -phases_[chi(b, a, n_) - 1];
  return phases_[chi(a, b, n_) - 1];
}

PhaseVector PhaseVector::canonical() const {
  std::vector<double> reduced(phases_.size());
  for (std::size_t k = 0; k < phases_.size(); ++k) reduced[k] = reduce_phase(phases_[k]);
  return PhaseVector(n_, std::move(reduced));
}

double off_diagonal_modulus(int n) { return 1.0 / (n * std::sqrt(n + 1.0)); }

GramCandidate GramCandidate::from_matrix(int n, ComplexMatrix entries, double tol) {
  require_dimension(n);
  const auto N = static_cast<Eigen::Index>(gram_size(n));
  if (entries.rows() != N || entries.cols() != N) {
    throw MalformedCandidate("Gram candidate for n=" + std::to_string(n) + " must be " +
                             std::to_string(N) + "x" + std::to_string(N));
  }
  const double diag = 1.0 / n;
  const double modulus = off_diagonal_modulus(n);
  for (Eigen::Index j = 0; j < N; ++j) {
    if (std::abs(entries(j, j) - Complex(diag, 0.0)) > tol) {
      throw MalformedCandidate("diagonal entry " + std::to_string(j + 1) + " is not 1/n");
    }
    for (Eigen::Index k = j + 1; k < N; ++k) {
      if (std::abs(entries(j, k) - std::conj(entries(k, j))) > tol) {
        throw MalformedCandidate("matrix is not Hermitian");
      }
      if (std::abs(std::abs(entries(j, k)) - modulus) > tol) {
        throw MalformedCandidate("off-diagonal modulus differs from 1/(n sqrt(n+1)) at (" +
                                 std::to_string(j + 1) + ", " + std::to_string(k + 1) + ")");
      }
    }
  }
  return GramCandidate(n, std::move(entries));
}

GramCandidate gram_from_phases(const PhaseVector& phases) {
  const int n = phases.n();
  const auto N = static_cast<Eigen::Index>(gram_size(n));
  const double modulus = off_diagonal_modulus(n);
  ComplexMatrix p(N, N);
  std::size_t k = 0;
  for (Eigen::Index a = 0; a < N; ++a) {
    p(a, a) = Complex(1.0 / n, 0.0);
    for (Eigen::Index b = a + 1; b < N; ++b, ++k) {
      const Complex z = std::polar(modulus, phases[k]);
      p(a, b) = z;
      p(b, a) = std::conj(z);
    }
  }
  return GramCandidate(n, std::move(p));
}

PhaseVector phases_of(const GramCandidate& gram) {
  const auto N = static_cast<Eigen::Index>(gram.size());
  std::vector<double> phases;
  phases.reserve(phase_count(gram.n()));
  for (Eigen::Index a = 0; a < N; ++a) {
    for (Eigen::Index b = a + 1; b < N; ++b) phases.push_back(reduce_phase(std::arg(gram(a, b))));
  }
  return PhaseVector(gram.n(), std::move(phases));
}

namespace {

bool use_cosine_route(int n, TraceRoute route) {
  return route == TraceRoute::cosine_sum || (route == TraceRoute::automatic && n <= 3);
}

TraceValues trace_values(const PhaseVector& phases, TraceRoute route) {
  TraceEvaluator eval(phases.n());
  return use_cosine_route(phases.n(), route) ? eval.evaluate_cosine_sums(phases.values())
                                             : eval.evaluate(phases.values());
}

}  // namespace

double f_value(const PhaseVector& phases, TraceRoute route) { return trace_values(phases, route).f; }

double g_value(const PhaseVector& phases, TraceRoute route) { return trace_values(phases, route).g; }

TraceReport objective_S(const PhaseVector& phases) {
  const int n = phases.n();
  TraceEvaluator eval(n);
  std::vector<double> gf(phases.size()), gg(phases.size());
  const TraceValues tv = eval.evaluate(phases.values(), gf, gg);
  TraceReport report;
  if (use_cosine_route(n, TraceRoute::automatic)) {
    const TraceValues cos = eval.evaluate_cosine_sums(phases.values());
    report.f = cos.f;
    report.g = cos.g;
  } else {
    report.f = tv.f;
    report.g = tv.g;
  }
  const double df = report.f - n;
  const double dg = report.g - n;
  report.s = df * df + dg * dg;
  double norm = 0.0;
  for (std::size_t k = 0; k < gf.size(); ++k) {
    norm = std::max(norm, std::abs(2.0 * df * gf[k] + 2.0 * dg * gg[k]));
  }
  report.gradient_norm = norm;
  return report;
}

SicCheck check_sic(const GramCandidate& gram, double tol) {
  const ComplexMatrix& p = gram.matrix();
  const ComplexMatrix p2 = p * p;
  const double n = gram.n();
  SicCheck out;
  const double f = (p2.cwiseProduct(p.transpose())).sum().real();
  const double g = p2.squaredNorm();
  out.f_error = std::abs(f - n);
  out.g_error = std::abs(g - n);
  out.is_sic = out.f_error <= tol && out.g_error <= tol;
  out.projector_error = (p2 - p).cwiseAbs().maxCoeff();

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(p, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  out.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  // Eigenvalue deviations scale like the square root of the trace errors.
  const double band = 10.0 * std::sqrt(std::max(tol, 1e-30));
  for (double lambda : out.eigenvalues) {
    if (std::abs(lambda - 1.0) <= band) ++out.unit_eigenvalues;
  }
  return out;
}

bool is_sic_gram(const GramCandidate& gram, double tol) { return check_sic(gram, tol).is_sic; }

}  // namespace sicgram
