#include "sicgram/trace_eval.hpp"

#include <cmath>
#include <stdexcept>

namespace sicgram {

TraceEvaluator::TraceEvaluator(int n)
    : n_(n), dim_(gram_size(n)), m_(sicgram::phase_count(n)), modulus_(off_diagonal_modulus(n)) {
  require_dimension(n);
  const std::size_t cells = dim_ * dim_;
  for (auto* v : {&p_re_, &p_im_, &p2_re_, &p2_im_, &p3_re_, &p3_im_}) v->assign(cells, 0.0);
}

void TraceEvaluator::load_gram(std::span<const double> phases) {
  if (phases.size() != m_) throw std::invalid_argument("phase vector has the wrong length");
  const double diag = 1.0 / n_;
  std::size_t k = 0;
  for (std::size_t a = 0; a < dim_; ++a) {
    p_re_[a * dim_ + a] = diag;
    p_im_[a * dim_ + a] = 0.0;
    for (std::size_t b = a + 1; b < dim_; ++b, ++k) {
      const double c = modulus_ * std::cos(phases[k]);
      const double s = modulus_ * std::sin(phases[k]);
      p_re_[a * dim_ + b] = c;
      p_im_[a * dim_ + b] = s;
      p_re_[b * dim_ + a] = c;
      p_im_[b * dim_ + a] = -s;
    }
  }
}

TraceValues TraceEvaluator::evaluate(std::span<const double> phases, std::span<double> grad_f,
                                     std::span<double> grad_g) {
  load_gram(phases);
  const auto& kt = kernels::active_kernels();
  const kernels::ConstPlanar p{p_re_.data(), p_im_.data()};
  kt.cgemm(dim_, p, p, {p2_re_.data(), p2_im_.data()});

  const std::size_t cells = dim_ * dim_;
  // Tr P^3 = sum_jk (P^2)_jk P_kj = sum_jk Re((P^2)_jk conj(P_jk)) for Hermitian P.
  // Tr P^4 = ||P^2||_F^2.
  TraceValues out;
  out.f = kt.dot(cells, p2_re_.data(), p_re_.data()) + kt.dot(cells, p2_im_.data(), p_im_.data());
  out.g = kt.dot(cells, p2_re_.data(), p2_re_.data()) + kt.dot(cells, p2_im_.data(), p2_im_.data());

  const kernels::ConstPlanar p2{p2_re_.data(), p2_im_.data()};
  if (!grad_f.empty()) {
    if (grad_f.size() != m_) throw std::invalid_argument("gradient buffer has the wrong length");
    // d Tr P^k / d phi_ab = -2k Im(P_ab conj((P^{k-1})_ab))
    kt.upper_imag_product(dim_, p, p2, -6.0, grad_f.data());
  }
  if (!grad_g.empty()) {
    if (grad_g.size() != m_) throw std::invalid_argument("gradient buffer has the wrong length");
    kt.cgemm(dim_, p2, p, {p3_re_.data(), p3_im_.data()});
    kt.upper_imag_product(dim_, p, {p3_re_.data(), p3_im_.data()}, -8.0, grad_g.data());
  }
  return out;
}

TraceValues TraceEvaluator::evaluate_cosine_sums(std::span<const double> phases) {
  if (phases.size() != m_) throw std::invalid_argument("phase vector has the wrong length");
  // Unit-modulus phase factors in the p3 planes; the Gram planes stay intact.
  std::size_t k = 0;
  for (std::size_t a = 0; a < dim_; ++a) {
    for (std::size_t b = a + 1; b < dim_; ++b, ++k) {
      p3_re_[a * dim_ + b] = std::cos(phases[k]);
      p3_im_[a * dim_ + b] = std::sin(phases[k]);
    }
  }
  const auto& kt = kernels::active_kernels();
  const kernels::ConstPlanar u{p3_re_.data(), p3_im_.data()};
  const double triple = kt.triple_phase_sum(dim_, u);
  const double quad = kt.quad_phase_sum(dim_, u);

  const double n = n_;
  const double root = std::sqrt(n + 1.0);
  const double root3 = root * root * root;
  TraceValues out;
  out.f = (3.0 * n - 2.0) / n + 6.0 / (n * n * n * root3) * triple;
  out.g = 2.0 * (n * n * n + 2.0 * n * n - n - 1.0) / (n * n * (n + 1.0)) +
          24.0 / (n * n * n * n * root3) * triple +
          8.0 / (n * n * n * n * (n + 1.0) * (n + 1.0)) * quad;
  return out;
}

}  // namespace sicgram
