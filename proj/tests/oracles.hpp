#pragma once
// Slow, independent reference computations for the tests. Nothing here calls
// into the library except for the PhaseVector container.

#include <boost/multiprecision/mpfr.hpp>

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using cd = std::complex<double>;

inline int gram_dim(int n) { return n * n; }

/// Pair -> flat position by walking the upper triangle row by row.
inline std::map<std::pair<int, int>, int> enumerate_pairs(int n) {
  std::map<std::pair<int, int>, int> out;
  int k = 0;
  for (int a = 1; a <= gram_dim(n); ++a)
    for (int b = a + 1; b <= gram_dim(n); ++b) out[{a, b}] = k++;
  return out;
}

inline Eigen::MatrixXcd gram(int n, const std::vector<double>& phases) {
  const int N = gram_dim(n);
  const double m = 1.0 / (n * std::sqrt(n + 1.0));
  Eigen::MatrixXcd P(N, N);
  int k = 0;
  for (int a = 0; a < N; ++a) {
    P(a, a) = 1.0 / n;
    for (int b = a + 1; b < N; ++b, ++k) {
      P(a, b) = std::polar(m, phases[k]);
      P(b, a) = std::conj(P(a, b));
    }
  }
  return P;
}

/// Tr P^k by explicit index sums.
inline double trace_power(const Eigen::MatrixXcd& P, int k) {
  const int N = static_cast<int>(P.rows());
  cd sum = 0;
  if (k == 3) {
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j)
        for (int l = 0; l < N; ++l) sum += P(i, j) * P(j, l) * P(l, i);
  } else if (k == 4) {
    Eigen::MatrixXcd Q(N, N);
    for (int i = 0; i < N; ++i)
      for (int l = 0; l < N; ++l) {
        cd s = 0;
        for (int j = 0; j < N; ++j) s += P(i, j) * P(j, l);
        Q(i, l) = s;
      }
    for (int i = 0; i < N; ++i)
      for (int l = 0; l < N; ++l) sum += Q(i, l) * Q(l, i);
  }
  return sum.real();
}

inline double f(int n, const std::vector<double>& phases) { return trace_power(gram(n, phases), 3); }
inline double g(int n, const std::vector<double>& phases) { return trace_power(gram(n, phases), 4); }

/// Central differences of a scalar function.
inline std::vector<double> fd_gradient(const std::function<double(const std::vector<double>&)>& fn,
                                       std::vector<double> x, double h = 1e-6) {
  std::vector<double> out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double x0 = x[k];
    x[k] = x0 + h;
    const double up = fn(x);
    x[k] = x0 - h;
    const double down = fn(x);
    x[k] = x0;
    out[k] = (up - down) / (2 * h);
  }
  return out;
}

/// Column k of the Hessian from central differences of an analytic gradient.
inline Eigen::MatrixXd fd_jacobian(const std::function<std::vector<double>(const std::vector<double>&)>& grad,
                                   std::vector<double> x, double h = 1e-5) {
  const auto m = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd J(m, m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const double x0 = x[k];
    x[k] = x0 + h;
    const auto up = grad(x);
    x[k] = x0 - h;
    const auto down = grad(x);
    x[k] = x0;
    for (Eigen::Index j = 0; j < m; ++j) J(j, k) = (up[j] - down[j]) / (2 * h);
  }
  return J;
}

using mp = boost::multiprecision::mpfr_float;

/// Tr P^3 - n and Tr P^4 - n from decimal phases, by index sums in MPFR.
/// The caller sets mpfr_float::default_precision beforehand.
inline std::pair<mp, mp> mp_residuals(int n, const std::vector<std::string>& phases) {
  const int N = gram_dim(n);
  const mp m = mp(1) / (mp(n) * sqrt(mp(n + 1)));
  std::vector<mp> re(N * N), im(N * N);
  int k = 0;
  for (int a = 0; a < N; ++a) {
    re[a * N + a] = mp(1) / n;
    im[a * N + a] = 0;
    for (int b = a + 1; b < N; ++b, ++k) {
      const mp phi(phases[k]);
      re[a * N + b] = m * cos(phi);
      im[a * N + b] = m * sin(phi);
      re[b * N + a] = re[a * N + b];
      im[b * N + a] = -im[a * N + b];
    }
  }
  std::vector<mp> r2(N * N), i2(N * N);
  for (int i = 0; i < N; ++i)
    for (int l = 0; l < N; ++l) {
      mp sr = 0, si = 0;
      for (int j = 0; j < N; ++j) {
        sr += re[i * N + j] * re[j * N + l] - im[i * N + j] * im[j * N + l];
        si += re[i * N + j] * im[j * N + l] + im[i * N + j] * re[j * N + l];
      }
      r2[i * N + l] = sr;
      i2[i * N + l] = si;
    }
  mp f = 0, g = 0;
  for (int i = 0; i < N; ++i)
    for (int l = 0; l < N; ++l) {
      f += r2[i * N + l] * re[l * N + i] - i2[i * N + l] * im[l * N + i];
      g += r2[i * N + l] * r2[l * N + i] - i2[i * N + l] * i2[l * N + i];
    }
  return {f - n, g - n};
}

inline std::vector<double> random_phases(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2 * std::numbers::pi);
  const int N = gram_dim(n);
  std::vector<double> out(static_cast<std::size_t>(N) * (N - 1) / 2);
  for (double& p : out) p = u(rng);
  return out;
}

inline double wrap(double x) {
  const double t = 2 * std::numbers::pi;
  double r = std::fmod(x, t);
  if (r < 0) r += t;
  return r;
}

/// Distance on the circle.
inline double circ(double a, double b) {
  const double d = std::abs(wrap(a) - wrap(b));
  return std::min(d, 2 * std::numbers::pi - d);
}

}  // namespace oracle
