#include "sicgram/refine.hpp"

#include <algorithm>
#include <boost/multiprecision/mpfr.hpp>
#include <cmath>
#include <limits>
#include <mutex>

#include "projector_system.hpp"

namespace sicgram {

namespace mp = boost::multiprecision;
using Real = mp::mpfr_float;

const char* to_string(RefineStatus status) {
  switch (status) {
    case RefineStatus::converged: return "converged";
    case RefineStatus::diverged: return "diverged";
    case RefineStatus::step_limit: return "step_limit";
  }
  return "unknown";
}

double ExtendedResiduals::max() const { return std::max({f_error, g_error, grad_f, grad_g}); }

namespace {

std::mutex& precision_mutex() {
  static std::mutex m;
  return m;
}

class PrecisionScope {
 public:
  explicit PrecisionScope(unsigned digits) : lock_(precision_mutex()), saved_(Real::default_precision()) {
    Real::default_precision(digits);
  }
  ~PrecisionScope() { Real::default_precision(saved_); }

 private:
  std::lock_guard<std::mutex> lock_;
  unsigned saved_;
};

double log10_abs(const Real& x) {
  if (x == 0) return -std::numeric_limits<double>::infinity();
  return static_cast<double>(mp::log10(mp::abs(x)));
}

// Planar N x N complex matrix of extended-precision reals.
struct MpMatrix {
  std::size_t dim;
  std::vector<Real> re, im;
  explicit MpMatrix(std::size_t d) : dim(d), re(d * d), im(d * d) {}
  std::size_t at(std::size_t j, std::size_t k) const { return j * dim + k; }
};

MpMatrix multiply(const MpMatrix& a, const MpMatrix& b) {
  const std::size_t d = a.dim;
  MpMatrix c(d);
  Real sr, si;
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      sr = 0;
      si = 0;
      for (std::size_t l = 0; l < d; ++l) {
        const std::size_t x = a.at(j, l), y = b.at(l, k);
        sr += a.re[x] * b.re[y] - a.im[x] * b.im[y];
        si += a.re[x] * b.im[y] + a.im[x] * b.re[y];
      }
      c.re[c.at(j, k)] = sr;
      c.im[c.at(j, k)] = si;
    }
  }
  return c;
}

class MpSystem {
 public:
  MpSystem(int n, std::vector<Real> phases) : n_(n), dim_(gram_size(n)), phases_(std::move(phases)) {
    const Real nn = n;
    modulus_ = 1 / (nn * mp::sqrt(nn + 1));
  }

  std::vector<Real>& phases() { return phases_; }

  MpMatrix gram() const {
    MpMatrix p(dim_);
    const Real diag = Real(1) / n_;
    std::size_t k = 0;
    for (std::size_t a = 0; a < dim_; ++a) {
      p.re[p.at(a, a)] = diag;
      p.im[p.at(a, a)] = 0;
      for (std::size_t b = a + 1; b < dim_; ++b, ++k) {
        const Real c = modulus_ * mp::cos(phases_[k]);
        const Real s = modulus_ * mp::sin(phases_[k]);
        p.re[p.at(a, b)] = c;
        p.im[p.at(a, b)] = s;
        p.re[p.at(b, a)] = c;
        p.im[p.at(b, a)] = -s;
      }
    }
    return p;
  }

  // Flattened P^2 - P rounded to double, and the trace residuals.
  RealVector evaluate(ExtendedResiduals& res) const {
    const MpMatrix p = gram();
    const MpMatrix p2 = multiply(p, p);
    const MpMatrix p3 = multiply(p2, p);
    const std::size_t M = phase_count(n_);
    RealVector flat(static_cast<Eigen::Index>(2 * M + dim_));
    Real f = 0, g = 0, gf_max = 0, gg_max = 0;
    std::size_t k = 0;
    for (std::size_t j = 0; j < dim_; ++j) {
      for (std::size_t l = 0; l < dim_; ++l) {
        const std::size_t x = p.at(j, l);
        f += p2.re[x] * p.re[x] + p2.im[x] * p.im[x];
        g += p2.re[x] * p2.re[x] + p2.im[x] * p2.im[x];
      }
    }
    for (std::size_t j = 0; j < dim_; ++j) {
      for (std::size_t l = j + 1; l < dim_; ++l, ++k) {
        const std::size_t x = p.at(j, l);
        flat(static_cast<Eigen::Index>(2 * k)) = static_cast<double>(p2.re[x] - p.re[x]);
        flat(static_cast<Eigen::Index>(2 * k + 1)) = static_cast<double>(p2.im[x] - p.im[x]);
        // Im(P conj(Q)) = P_im Q_re - P_re Q_im
        const Real gf = mp::abs(6 * (p.im[x] * p2.re[x] - p.re[x] * p2.im[x]));
        const Real gg = mp::abs(8 * (p.im[x] * p3.re[x] - p.re[x] * p3.im[x]));
        if (gf > gf_max) gf_max = gf;
        if (gg > gg_max) gg_max = gg;
      }
      const std::size_t x = p.at(j, j);
      flat(static_cast<Eigen::Index>(2 * M + j)) = static_cast<double>(p2.re[x] - p.re[x]);
    }
    res.f_error = log10_abs(f - n_);
    res.g_error = log10_abs(g - n_);
    res.grad_f = log10_abs(gf_max);
    res.grad_g = log10_abs(gg_max);
    return flat;
  }

 private:
  int n_;
  std::size_t dim_;
  std::vector<Real> phases_;
  Real modulus_;
};

RefineResult run_refine(int n, std::vector<Real> start, const RefineOptions& options) {
  const std::size_t M = phase_count(n);
  std::vector<double> start_double(M);
  for (std::size_t k = 0; k < M; ++k) start_double[k] = static_cast<double>(start[k]);
  const PhaseVector start_pv(n, start_double);
  if (!is_sic_gram(gram_from_phases(start_pv), 1e-6)) {
    throw RefinePreconditionError("refinement requires a SIC phase vector at tolerance 1e-6");
  }

  const std::vector<std::size_t> free = detail::free_phase_indices(n);
  const detail::NormalEquations normal(
      detail::projector_jacobian(gram_from_phases(start_pv).matrix(), free));

  MpSystem system(n, std::move(start));
  RefineResult out;
  out.n = n;
  out.target_digits = options.target_digits;
  out.status = RefineStatus::step_limit;
  const double goal = -static_cast<double>(options.target_digits);

  ExtendedResiduals res;
  RealVector r = system.evaluate(res);
  std::vector<Real> best = system.phases();
  ExtendedResiduals best_res = res;
  double last = res.max();
  int growth = 0;
  for (int step = 0; step <= options.max_steps; ++step) {
    if (res.max() < goal) {
      out.status = RefineStatus::converged;
      break;
    }
    if (step == options.max_steps) break;
    const RealVector dx = normal.step(r);
    for (std::size_t k = 0; k < free.size(); ++k) {
      system.phases()[free[k]] += Real(dx(static_cast<Eigen::Index>(k)));
    }
    out.steps = step + 1;
    r = system.evaluate(res);
    if (res.max() < best_res.max()) {
      best = system.phases();
      best_res = res;
    }
    growth = res.max() > last ? growth + 1 : 0;
    last = res.max();
    if (growth >= 3) {
      out.status = RefineStatus::diverged;
      break;
    }
  }

  const Real two_pi = 2 * boost::math::constants::pi<Real>();
  const int print_digits = options.target_digits + options.guard_digits / 2;
  out.residuals = best_res;
  out.phases.reserve(M);
  out.rounded.reserve(M);
  for (Real& x : best) {
    x = mp::fmod(x, two_pi);
    if (x < 0) x += two_pi;
    out.phases.push_back(x.str(print_digits));
    out.rounded.push_back(reduce_phase(static_cast<double>(x)));
  }
  return out;
}

std::vector<Real> parse_phases(int n, const std::vector<std::string>& phases) {
  require_dimension(n);
  if (phases.size() != phase_count(n)) throw std::invalid_argument("decimal phase vector has the wrong length");
  std::vector<Real> out;
  out.reserve(phases.size());
  for (const std::string& s : phases) out.emplace_back(s);
  return out;
}

}  // namespace

RefineResult refine(const PhaseVector& phases, const RefineOptions& options) {
  const PrecisionScope scope(static_cast<unsigned>(options.target_digits + options.guard_digits));
  std::vector<Real> start(phases.values().begin(), phases.values().end());
  return run_refine(phases.n(), std::move(start), options);
}

RefineResult refine(int n, const std::vector<std::string>& phases, const RefineOptions& options) {
  const PrecisionScope scope(static_cast<unsigned>(options.target_digits + options.guard_digits));
  return run_refine(n, parse_phases(n, phases), options);
}

ExtendedResiduals extended_residuals(int n, const std::vector<std::string>& phases, int digits) {
  const PrecisionScope scope(static_cast<unsigned>(digits));
  ExtendedResiduals res;
  MpSystem(n, parse_phases(n, phases)).evaluate(res);
  return res;
}

}  // namespace sicgram
