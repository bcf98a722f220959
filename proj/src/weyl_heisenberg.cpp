#include "sicgram/weyl_heisenberg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>

#include "sicgram/optimize.hpp"

namespace sicgram {

namespace {

long positive_mod(long a, long m) {
  long r = a % m;
  return r < 0 ? r + m : r;
}

// tau^m = e^{i pi m (n+1) / n}, reduced exactly on the integers first.
Complex tau_power(long m, int n) {
  const long twice_n = 2L * n;
  const long e = positive_mod(positive_mod(m, twice_n) * (n + 1), twice_n);
  return std::polar(1.0, std::numbers::pi * static_cast<double>(e) / n);
}

// w^m with w = e^{2 pi i / n}.
Complex omega_power(long m, int n) {
  return std::polar(1.0, kTwoPi * static_cast<double>(positive_mod(m, n)) / n);
}

}  // namespace

WHIndex::WHIndex(long p1, long p2, int n)
    : p1_(static_cast<int>(positive_mod(p1, n))), p2_(static_cast<int>(positive_mod(p2, n))), n_(n) {
  require_dimension(n);
}

WHIndex WHIndex::from_linear(std::size_t k, int n) {
  return WHIndex(static_cast<long>(k / n), static_cast<long>(k % n), n);
}

WHIndex WHIndex::operator+(const WHIndex& q) const {
  return WHIndex(static_cast<long>(p1_) + q.p1_, static_cast<long>(p2_) + q.p2_, n_);
}

long symplectic_form(long p1, long p2, long q1, long q2) { return p2 * q1 - p1 * q2; }

Complex wh_tau(int n) { return -std::polar(1.0, std::numbers::pi / n); }

ComplexMatrix shift_matrix(int n) {
  ComplexMatrix x = ComplexMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) x((k + 1) % n, k) = 1.0;
  return x;
}

ComplexMatrix clock_matrix(int n) {
  ComplexMatrix z = ComplexMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) z(k, k) = omega_power(k, n);
  return z;
}

ComplexMatrix displacement(long p1, long p2, int n) {
  require_dimension(n);
  // (D_p)_{j, j - p1} = tau^{p1 p2} w^{p2 (j - p1)}
  ComplexMatrix d = ComplexMatrix::Zero(n, n);
  const Complex t = tau_power(p1 * p2, n);
  for (long j = 0; j < n; ++j) {
    const long col = positive_mod(j - p1, n);
    d(j, col) = t * omega_power(p2 * col, n);
  }
  return d;
}

ComplexMatrix displacement(const WHIndex& p, int n) {
  if (p.n() != n) throw std::invalid_argument("displacement label belongs to another dimension");
  return displacement(p.p1(), p.p2(), n);
}

ComplexMatrix zauner_matrix(int n) {
  require_dimension(n);
  const Complex prefactor = std::polar(1.0 / std::sqrt(static_cast<double>(n)),
                                       std::numbers::pi * (n - 1) / 12.0);
  ComplexMatrix u(n, n);
  for (long j = 0; j < n; ++j) {
    for (long k = 0; k < n; ++k) u(j, k) = prefactor * tau_power(2 * j * k + j * j, n);
  }
  return u;
}

int zauner_dimension(int n, int k) { return (n + 3 - 2 * k) / 3; }

std::vector<ZaunerEigenspace> zauner_eigenspaces(int n) {
  const ComplexMatrix u = zauner_matrix(n);
  const ComplexMatrix u2 = u * u;
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  std::vector<ZaunerEigenspace> out;
  for (int k = 0; k < 3; ++k) {
    // U^3 = I, so (I + conj(l) U + conj(l)^2 U^2) / 3 projects onto eigenvalue l.
    const Complex lambda = std::polar(1.0, kTwoPi * k / 3.0);
    ComplexMatrix proj = (id + std::conj(lambda) * u + std::conj(lambda * lambda) * u2) / 3.0;
    proj = 0.5 * (proj + proj.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(proj);
    ZaunerEigenspace space;
    space.k = k;
    space.eigenvalue = lambda;
    int dim = 0;
    for (int i = 0; i < n; ++i) dim += es.eigenvalues()(i) > 0.5 ? 1 : 0;
    space.basis = es.eigenvectors().rightCols(dim);
    out.push_back(std::move(space));
  }
  return out;
}

Fiducial::Fiducial(ComplexVector amplitudes) : amplitudes_(std::move(amplitudes)) {
  require_dimension(static_cast<int>(amplitudes_.size()));
  if (std::abs(amplitudes_.norm() - 1.0) > 1e-12) {
    throw std::invalid_argument("fiducial amplitudes must have unit norm");
  }
}

Fiducial Fiducial::normalized(ComplexVector amplitudes) {
  const double norm = amplitudes.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("cannot normalize a zero vector");
  amplitudes /= norm;
  Eigen::Index big = 0;
  amplitudes.cwiseAbs().maxCoeff(&big);
  const Complex rot = std::conj(amplitudes(big)) / std::abs(amplitudes(big));
  amplitudes *= rot;
  amplitudes(big) = std::abs(amplitudes(big));
  return Fiducial(std::move(amplitudes));
}

ComplexVector apply_displacement(const WHIndex& p, const ComplexVector& v) {
  const int n = p.n();
  if (v.size() != n) throw std::invalid_argument("vector length differs from the label dimension");
  const Complex t = tau_power(static_cast<long>(p.p1()) * p.p2(), n);
  ComplexVector out(n);
  for (long j = 0; j < n; ++j) {
    const long src = positive_mod(j - p.p1(), n);
    out(j) = t * omega_power(static_cast<long>(p.p2()) * src, n) * v(src);
  }
  return out;
}

ComplexMatrix wh_orbit(const ComplexVector& psi) {
  const int n = static_cast<int>(psi.size());
  require_dimension(n);
  ComplexMatrix orbit(n, n * n);
  for (int k = 0; k < n * n; ++k) orbit.col(k) = apply_displacement(WHIndex::from_linear(k, n), psi);
  return orbit;
}

std::vector<double> wh_overlaps(const ComplexVector& psi) {
  const int n = static_cast<int>(psi.size());
  const ComplexMatrix orbit = wh_orbit(psi);
  std::vector<double> out(static_cast<std::size_t>(n) * n);
  for (int k = 0; k < n * n; ++k) out[k] = std::norm(psi.dot(orbit.col(k)));
  return out;
}

double frame_potential(const ComplexVector& psi) {
  if (std::abs(psi.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("frame potential requires a unit vector");
  }
  const int n = static_cast<int>(psi.size());
  // D_p^dag D_q is D_{q-p} up to a phase, so the double sum is n^2 copies of
  // the single orbit sum.
  double sum = 0.0;
  for (double o : wh_overlaps(psi)) sum += o * o;
  return static_cast<double>(n) * n * sum;
}

double frame_potential(const Fiducial& psi) { return frame_potential(psi.amplitudes()); }

double frame_potential_bound(int n) { return 2.0 * n * n * n / (n + 1.0); }

namespace {

class FramePotentialProblem {
 public:
  FramePotentialProblem(int n, ComplexMatrix basis) : n_(n), basis_(std::move(basis)) {
    for (int k = 0; k < n * n; ++k) {
      d_.push_back(displacement(WHIndex::from_linear(k, n), n));
      d_adj_.push_back(d_.back().adjoint());
    }
  }

  int parameters() const { return 2 * static_cast<int>(basis_.cols()); }

  ComplexVector vector(std::span<const double> x) const {
    const Eigen::Index m = basis_.cols();
    ComplexVector c(m);
    for (Eigen::Index i = 0; i < m; ++i) c(i) = Complex(x[i], x[m + i]);
    return basis_ * c;
  }

  // F = n^2 sum_p |c_p|^4 / |psi|^8 with c_p = <psi|D_p psi>.
  double value(std::span<const double> x, std::span<double> grad) const {
    const ComplexVector psi = vector(x);
    const double norm2 = psi.squaredNorm();
    const double nn = static_cast<double>(n_) * n_;
    double a = 0.0;
    ComplexVector da = ComplexVector::Zero(n_);  // d A / d conj(psi)
    for (std::size_t p = 0; p < d_.size(); ++p) {
      const ComplexVector dpsi = d_[p] * psi;
      const Complex c = psi.dot(dpsi);
      const double c2 = std::norm(c);
      a += c2 * c2;
      da += 2.0 * c2 * (std::conj(c) * dpsi + c * (d_adj_[p] * psi));
    }
    const double norm8 = norm2 * norm2 * norm2 * norm2;
    const ComplexVector dpsi_total = nn * (da - 4.0 * a / norm2 * psi) / norm8;
    const ComplexVector dc = basis_.adjoint() * dpsi_total;
    const Eigen::Index m = basis_.cols();
    for (Eigen::Index i = 0; i < m; ++i) {
      grad[i] = 2.0 * dc(i).real();
      grad[m + i] = 2.0 * dc(i).imag();
    }
    return nn * a / norm8;
  }

  // Gauss-Newton on |<psi|D_p psi>|^2 = 1/(n+1), p != 0, and |psi|^2 = 1.
  std::vector<double> polish(std::vector<double> x, int steps) const {
    const Eigen::Index m = basis_.cols();
    const Eigen::Index rows = static_cast<Eigen::Index>(d_.size());
    const double target = 1.0 / (n_ + 1.0);
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> best_x = x;
    int stalled = 0;
    for (int s = 0; s < steps; ++s) {
      const ComplexVector psi = vector(x);
      RealMatrix jac(rows, 2 * m);
      RealVector res(rows);
      auto fill = [&](Eigen::Index row, const ComplexVector& dpsi) {
        const ComplexVector dc = basis_.adjoint() * dpsi;
        for (Eigen::Index i = 0; i < m; ++i) {
          jac(row, i) = 2.0 * dc(i).real();
          jac(row, m + i) = 2.0 * dc(i).imag();
        }
      };
      res(0) = psi.squaredNorm() - 1.0;
      fill(0, psi);
      for (Eigen::Index p = 1; p < rows; ++p) {
        const ComplexVector dpsi = d_[p] * psi;
        const Complex c = psi.dot(dpsi);
        res(p) = std::norm(c) - target;
        fill(p, std::conj(c) * dpsi + c * (d_adj_[p] * psi));
      }
      const double r = res.cwiseAbs().maxCoeff();
      // Singular solution sets (n = 3) converge only linearly, so tolerate a
      // few non-improving steps.
      if (r < best) {
        best = r;
        best_x = x;
        stalled = 0;
      } else if (++stalled > 3) {
        break;
      }
      if (r < 1e-15) break;
      const RealVector step = jac.completeOrthogonalDecomposition().solve(-res);
      for (Eigen::Index i = 0; i < 2 * m; ++i) x[i] += step(i);
    }
    return best_x;
  }

 private:
  int n_;
  ComplexMatrix basis_;
  std::vector<ComplexMatrix> d_;
  std::vector<ComplexMatrix> d_adj_;
};

}  // namespace

FiducialSearchResult fiducial_search(int n, const FiducialSearchOptions& options) {
  require_dimension(n);
  ComplexMatrix basis = ComplexMatrix::Identity(n, n);
  if (options.restrict_zauner) {
    if (options.zauner_k < 0 || options.zauner_k > 2) throw std::invalid_argument("zauner_k must be 0, 1 or 2");
    basis = zauner_eigenspaces(n)[options.zauner_k].basis;
  }
  FiducialSearchResult result;
  result.bound = frame_potential_bound(n);
  result.best_value = std::numeric_limits<double>::infinity();
  result.parameters = 2 * static_cast<int>(basis.cols());
  if (basis.cols() == 0) return result;

  const FramePotentialProblem problem(n, basis);
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  optimize::CgOptions cg;
  cg.max_iterations = options.max_iterations;
  cg.gradient_tolerance = 1e-13;
  cg.f_target = result.bound + 1e-13;
  const optimize::Objective objective = [&](std::span<const double> x, std::span<double> g) {
    return problem.value(x, g);
  };

  for (int restart = 0; restart < options.max_restarts; ++restart) {
    result.restarts_used = restart + 1;
    std::vector<double> x0(problem.parameters());
    for (double& v : x0) v = normal(rng);
    const optimize::CgResult run = optimize::minimize_cg(objective, std::move(x0), cg);
    std::vector<double> x = run.x;
    if (run.f - result.bound < 1e-4) x = problem.polish(std::move(x), 100);
    const ComplexVector psi = problem.vector(x);
    const double value = frame_potential(ComplexVector(psi / psi.norm()));
    if (value < result.best_value) result.best_value = value;
    if (value - result.bound <= options.tolerance) {
      result.success = true;
      result.best_value = value;
      result.fiducial = Fiducial::normalized(psi);
      return result;
    }
  }
  return result;
}

const Fiducial& reference_fiducial(int n) {
  static std::mutex mutex;
  static std::map<int, Fiducial> cache;
  std::lock_guard<std::mutex> lock(mutex);
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  FiducialSearchOptions options;
  options.seed = 20240601;
  options.restrict_zauner = true;
  FiducialSearchResult r = fiducial_search(n, options);
  if (!r.success) {
    options.restrict_zauner = false;
    r = fiducial_search(n, options);
  }
  if (!r.success) {
    throw std::runtime_error("no reference fiducial found for n=" + std::to_string(n));
  }
  return cache.emplace(n, *r.fiducial).first->second;
}

WhGram wh_gram(const Fiducial& psi, double overlap_tol) {
  const int n = psi.n();
  const ComplexMatrix orbit = wh_orbit(psi.amplitudes());
  const ComplexMatrix p = orbit.adjoint() * orbit / static_cast<double>(n);
  const auto N = static_cast<Eigen::Index>(gram_size(n));
  const double target = 1.0 / (n + 1.0);
  std::vector<double> phases;
  phases.reserve(phase_count(n));
  for (Eigen::Index a = 0; a < N; ++a) {
    for (Eigen::Index b = a + 1; b < N; ++b) {
      const double overlap = static_cast<double>(n) * n * std::norm(p(a, b));
      if (std::abs(overlap - target) > overlap_tol) {
        throw std::invalid_argument("vector is not a SIC fiducial: overlap " + std::to_string(overlap) +
                                    " at (" + std::to_string(a + 1) + ", " + std::to_string(b + 1) + ")");
      }
      phases.push_back(reduce_phase(std::arg(p(a, b))));
    }
  }
  PhaseVector pv(n, std::move(phases));
  GramCandidate gram = gram_from_phases(pv);
  return WhGram{std::move(gram), std::move(pv)};
}

WelchReport welch_check(const ComplexMatrix& vectors, int m) {
  if (m < 1) throw std::invalid_argument("Welch bound order must be positive");
  const Eigen::Index n = vectors.rows();
  const Eigen::Index count = vectors.cols();
  const ComplexMatrix overlaps = vectors.adjoint() * vectors;
  WelchReport r;
  for (Eigen::Index j = 0; j < count; ++j) {
    for (Eigen::Index k = 0; k < count; ++k) r.lhs += std::pow(std::norm(overlaps(j, k)), m);
  }
  // C(n + m - 1, m) built incrementally.
  double binom = 1.0;
  for (int i = 1; i <= m; ++i) binom = binom * static_cast<double>(n - 1 + i) / i;
  r.bound = static_cast<double>(count) * count / binom;
  r.relative_gap = (r.lhs - r.bound) / r.bound;
  r.satisfied = r.relative_gap >= -1e-12;
  return r;
}

std::uint64_t clifford_order(int n) {
  require_dimension(n);
  std::uint64_t order = 1;
  for (int i = 0; i < 5; ++i) order *= static_cast<std::uint64_t>(n);
  int rest = n;
  for (int p = 2; p <= rest; ++p) {
    if (rest % p != 0) continue;
    while (rest % p == 0) rest /= p;
    const std::uint64_t p2 = static_cast<std::uint64_t>(p) * p;
    order = order / p2 * (p2 - 1);
  }
  return order;
}

}  // namespace sicgram
