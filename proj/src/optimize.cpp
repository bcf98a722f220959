#include "sicgram/optimize.hpp"

#include <algorithm>
#include <cmath>

namespace sicgram::optimize {

const char* to_string(CgStatus status) {
  switch (status) {
    case CgStatus::target_reached: return "target_reached";
    case CgStatus::gradient_converged: return "gradient_converged";
    case CgStatus::iteration_limit: return "iteration_limit";
    case CgStatus::line_search_failed: return "line_search_failed";
    case CgStatus::non_finite: return "non_finite";
  }
  return "unknown";
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

// Minimizer of the cubic through (a, fa, da) and (b, fb, db), or the midpoint
// when the cubic has no real minimizer.
double cubic_minimizer(double a, double fa, double da, double b, double fb, double db) {
  const double d1 = da + db - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - da * db;
  if (!(disc >= 0.0)) return 0.5 * (a + b);
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  const double denom = db - da + 2.0 * d2;
  if (denom == 0.0) return 0.5 * (a + b);
  return b - (b - a) * (db + d2 - d1) / denom;
}

struct Probe {
  double alpha = 0.0;
  double f = 0.0;
  double slope = 0.0;
};

class LineSearch {
 public:
  LineSearch(const Objective& objective, const CgOptions& options, std::span<const double> x,
             std::span<const double> direction, std::vector<double>& trial,
             std::vector<double>& trial_grad, int& evaluations)
      : objective_(objective),
        options_(options),
        x_(x),
        d_(direction),
        trial_(trial),
        trial_grad_(trial_grad),
        evaluations_(evaluations) {}

  // On success trial_/trial_grad_ hold the accepted point. Returns the step
  // or a negative value when no decrease was found.
  double run(double f0, double slope0, double alpha0, double& f_out) {
    f0_ = f0;
    slope0_ = slope0;
    best_ = Probe{0.0, f0, slope0};
    Probe prev{0.0, f0, slope0};
    double alpha = alpha0;
    for (int i = 0; i < options_.max_line_search_evaluations; ++i) {
      Probe cur = probe(alpha);
      if (!std::isfinite(cur.f)) {
        alpha = 0.5 * (prev.alpha + alpha);
        continue;
      }
      if (cur.f > f0_ + options_.armijo * cur.alpha * slope0_ || (i > 0 && cur.f >= prev.f)) {
        return finish(zoom(prev, cur), f_out);
      }
      if (std::abs(cur.slope) <= -options_.curvature * slope0_) return finish(cur, f_out);
      if (cur.slope >= 0.0) return finish(zoom(cur, prev), f_out);
      prev = cur;
      alpha *= 4.0;
    }
    return finish(best_, f_out);
  }

 private:
  Probe probe(double alpha) {
    for (std::size_t k = 0; k < x_.size(); ++k) trial_[k] = x_[k] + alpha * d_[k];
    Probe p;
    p.alpha = alpha;
    p.f = objective_(trial_, trial_grad_);
    ++evaluations_;
    p.slope = dot(trial_grad_, d_);
    if (std::isfinite(p.f) && p.f < best_.f) {
      best_ = p;
      best_x_.assign(trial_.begin(), trial_.end());
      best_g_.assign(trial_grad_.begin(), trial_grad_.end());
    }
    return p;
  }

  Probe zoom(Probe lo, Probe hi) {
    for (int i = 0; i < options_.max_line_search_evaluations; ++i) {
      const double width = hi.alpha - lo.alpha;
      if (std::abs(width) <= 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
      double alpha = cubic_minimizer(lo.alpha, lo.f, lo.slope, hi.alpha, hi.f, hi.slope);
      const double left = std::min(lo.alpha, hi.alpha);
      const double right = std::max(lo.alpha, hi.alpha);
      const double margin = 0.1 * (right - left);
      if (!std::isfinite(alpha) || alpha < left + margin || alpha > right - margin) {
        alpha = 0.5 * (lo.alpha + hi.alpha);
      }
      Probe cur = probe(alpha);
      if (!std::isfinite(cur.f) || cur.f > f0_ + options_.armijo * cur.alpha * slope0_ ||
          cur.f >= lo.f) {
        hi = cur;
      } else {
        if (std::abs(cur.slope) <= -options_.curvature * slope0_) return cur;
        if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = cur;
      }
    }
    return best_;
  }

  double finish(const Probe& accepted, double& f_out) {
    // The accepted probe is the lowest point seen unless zoom ran out of
    // budget; either way fall back to the best point.
    (void)accepted;
    if (!(best_.f < f0_)) return -1.0;
    std::copy(best_x_.begin(), best_x_.end(), trial_.begin());
    std::copy(best_g_.begin(), best_g_.end(), trial_grad_.begin());
    f_out = best_.f;
    return best_.alpha;
  }

  const Objective& objective_;
  const CgOptions& options_;
  std::span<const double> x_;
  std::span<const double> d_;
  std::vector<double>& trial_;
  std::vector<double>& trial_grad_;
  int& evaluations_;
  double f0_ = 0.0;
  double slope0_ = 0.0;
  Probe best_;
  std::vector<double> best_x_;
  std::vector<double> best_g_;
};

}  // namespace

CgResult minimize_cg(const Objective& objective, std::vector<double> x0, const CgOptions& options) {
  const std::size_t n = x0.size();
  CgResult result;
  result.x = std::move(x0);
  std::vector<double> grad(n), dir(n), trial(n), trial_grad(n);

  double f = objective(result.x, grad);
  result.evaluations = 1;
  result.trace.push_back(f);
  if (!std::isfinite(f) || !std::all_of(grad.begin(), grad.end(), [](double v) { return std::isfinite(v); })) {
    result.status = CgStatus::non_finite;
    result.f = f;
    return result;
  }

  const int restart_every = options.restart_interval > 0 ? options.restart_interval : static_cast<int>(n);
  for (std::size_t k = 0; k < n; ++k) dir[k] = -grad[k];
  double grad_sq = dot(grad, grad);
  double prev_slope = -grad_sq;
  double prev_alpha = 0.0;
  int since_restart = 0;

  result.status = CgStatus::iteration_limit;
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const double gnorm = inf_norm(grad);
    result.gradient_norm = gnorm;
    if (f <= options.f_target) {
      result.status = CgStatus::target_reached;
      break;
    }
    if (gnorm <= options.gradient_tolerance) {
      result.status = CgStatus::gradient_converged;
      break;
    }

    double slope = dot(grad, dir);
    if (slope >= 0.0) {
      for (std::size_t k = 0; k < n; ++k) dir[k] = -grad[k];
      slope = -grad_sq;
      since_restart = 0;
    }

    double alpha0;
    if (prev_alpha > 0.0) {
      alpha0 = std::min(1.0, 1.01 * prev_alpha * prev_slope / slope);
      if (!(alpha0 > 0.0)) alpha0 = prev_alpha;
    } else {
      alpha0 = std::min(1.0, 1.0 / std::max(inf_norm(dir), 1e-300));
    }

    double f_new = f;
    LineSearch ls(objective, options, result.x, dir, trial, trial_grad, result.evaluations);
    double alpha = ls.run(f, slope, alpha0, f_new);
    if (alpha < 0.0 && since_restart > 0) {
      // Retry once along steepest descent before giving up.
      for (std::size_t k = 0; k < n; ++k) dir[k] = -grad[k];
      slope = -grad_sq;
      since_restart = 0;
      alpha = ls.run(f, slope, std::min(1.0, 1.0 / std::max(inf_norm(dir), 1e-300)), f_new);
    }
    if (alpha < 0.0) {
      result.status = CgStatus::line_search_failed;
      break;
    }

    result.x.swap(trial);
    f = f_new;
    result.trace.push_back(f);
    result.iterations = iter + 1;
    if (!std::isfinite(f)) {
      result.status = CgStatus::non_finite;
      break;
    }

    // Polak-Ribiere+ update.
    double num = 0.0;
    for (std::size_t k = 0; k < n; ++k) num += trial_grad[k] * (trial_grad[k] - grad[k]);
    grad.swap(trial_grad);
    const double new_grad_sq = dot(grad, grad);
    double beta = std::max(0.0, num / grad_sq);
    ++since_restart;
    if (since_restart >= restart_every) {
      beta = 0.0;
      since_restart = 0;
    }
    for (std::size_t k = 0; k < n; ++k) dir[k] = -grad[k] + beta * dir[k];
    grad_sq = new_grad_sq;
    prev_slope = slope;
    prev_alpha = alpha;
  }
  result.f = f;
  result.gradient_norm = inf_norm(grad);
  return result;
}

}  // namespace sicgram::optimize
