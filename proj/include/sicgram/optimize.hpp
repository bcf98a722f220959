#pragma once
// Nonlinear conjugate gradient (Polak-Ribiere+, restart on loss of descent)
// with a bracketing strong-Wolfe line search that zooms by safeguarded cubic
// interpolation. Accepted steps never increase the objective.

#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace sicgram::optimize {

/// Returns f(x) and writes the gradient into grad (same length as x).
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct CgOptions {
  int max_iterations = 20000;
  /// Stop when the infinity norm of the gradient falls below this.
  double gradient_tolerance = 1e-12;
  /// Stop as soon as f <= f_target.
  double f_target = -std::numeric_limits<double>::infinity();
  /// Forced steepest-descent restart period; 0 means the problem size.
  int restart_interval = 0;
  int max_line_search_evaluations = 40;
  double armijo = 1e-4;      // sufficient decrease constant
  double curvature = 0.1;    // strong Wolfe curvature constant
};

enum class CgStatus {
  target_reached,
  gradient_converged,
  iteration_limit,
  line_search_failed,
  non_finite,
};

const char* to_string(CgStatus status);

struct CgResult {
  CgStatus status = CgStatus::iteration_limit;
  std::vector<double> x;
  double f = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  /// f after every accepted step, starting with f(x0).
  std::vector<double> trace;
};

CgResult minimize_cg(const Objective& objective, std::vector<double> x0,
                     const CgOptions& options = {});

}  // namespace sicgram::optimize
