#pragma once
// Extended-precision Newton refinement of a SIC phase vector.
//
// Residuals are evaluated with MPFR at target + guard digits; the correction
// is solved with the double-precision Jacobian of P^2 - P, factored once
// (a mixed-precision iterative refinement). Calls are serialized because the
// MPFR default precision is process-wide.

#include <stdexcept>
#include <string>
#include <vector>

#include "sicgram/gramspace.hpp"

namespace sicgram {

struct RefineOptions {
  int target_digits = 30;
  int guard_digits = 20;
  int max_steps = 60;
};

enum class RefineStatus { converged, diverged, step_limit };

const char* to_string(RefineStatus status);

/// log10 of the residual components at the refined point; -inf for exact 0.
struct ExtendedResiduals {
  double f_error = 0.0;  // log10 |f - n|
  double g_error = 0.0;  // log10 |g - n|
  double grad_f = 0.0;   // log10 max |df/dphi|
  double grad_g = 0.0;   // log10 max |dg/dphi|
  double max() const;
};

struct RefineResult {
  RefineStatus status = RefineStatus::converged;
  int n = 0;
  int target_digits = 0;
  /// Decimal phases in chi order, reduced to [0, 2pi).
  std::vector<std::string> phases;
  /// The same phases rounded to double.
  std::vector<double> rounded;
  ExtendedResiduals residuals;
  int steps = 0;
};

/// Thrown when the input does not pass is_sic_gram at 1e-6.
class RefinePreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

RefineResult refine(const PhaseVector& phases, const RefineOptions& options = {});

/// Refinement from decimal phases, so a refined point can be refined again
/// without losing digits.
RefineResult refine(int n, const std::vector<std::string>& phases, const RefineOptions& options = {});

/// Residuals of decimal phases evaluated at the given number of digits.
ExtendedResiduals extended_residuals(int n, const std::vector<std::string>& phases, int digits);

}  // namespace sicgram
