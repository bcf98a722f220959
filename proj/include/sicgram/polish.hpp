#pragma once
// Gauss-Newton polish of a near-SIC phase vector on the projector residual
// P^2 - P. Near a SIC point the objective S is quartic in the distance, so
// gradient methods stall around S ~ 1e-15; the residual system converges
// quadratically for isolated solutions.

#include "sicgram/gramspace.hpp"

namespace sicgram {

struct PolishOptions {
  int max_steps = 40;
  /// Stop once max |P^2 - P| falls below this.
  double residual_tolerance = 1e-15;
};

struct PolishResult {
  PhaseVector phases;
  int steps = 0;
  double initial_residual = 0.0;  // max |P^2 - P|
  double final_residual = 0.0;
};

/// Returns the best iterate found; never worse than the input.
PolishResult projector_polish(const PhaseVector& phases, const PolishOptions& options = {});

}  // namespace sicgram
