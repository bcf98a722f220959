#include "sicgram/polish.hpp"

#include "projector_system.hpp"

namespace sicgram {

PolishResult projector_polish(const PhaseVector& phases, const PolishOptions& options) {
  const int n = phases.n();
  const std::vector<std::size_t> free = detail::free_phase_indices(n);
  std::vector<double> x = phases.vector();

  auto residual_of = [&](const std::vector<double>& v) {
    return detail::projector_residual(gram_from_phases(PhaseVector(n, v)).matrix());
  };

  RealVector r = residual_of(x);
  PolishResult out{phases, 0, r.cwiseAbs().maxCoeff(), 0.0};
  out.final_residual = out.initial_residual;

  for (int step = 0; step < options.max_steps && out.final_residual >= options.residual_tolerance; ++step) {
    const ComplexMatrix p = gram_from_phases(PhaseVector(n, x)).matrix();
    const detail::NormalEquations normal(detail::projector_jacobian(p, free));
    const RealVector dx = normal.step(r);
    const double current = r.norm();
    bool accepted = false;
    for (double alpha = 1.0; alpha > 1.0 / 64.0; alpha *= 0.5) {
      std::vector<double> trial = x;
      for (std::size_t k = 0; k < free.size(); ++k) trial[free[k]] += alpha * dx(static_cast<Eigen::Index>(k));
      RealVector tr = residual_of(trial);
      if (tr.norm() < current) {
        x = std::move(trial);
        r = std::move(tr);
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    out.steps = step + 1;
    out.final_residual = r.cwiseAbs().maxCoeff();
  }
  out.phases = PhaseVector(n, std::move(x));
  return out;
}

}  // namespace sicgram
