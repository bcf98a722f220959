#pragma once
// Allocation-free evaluation of Tr P^3, Tr P^4 and their phase gradients.
// One evaluator per thread; the buffers are reused across calls.

#include <span>
#include <vector>

#include "sicgram/gramspace.hpp"
#include "sicgram/kernels.hpp"

namespace sicgram {

struct TraceValues {
  double f = 0.0;
  double g = 0.0;
};

class TraceEvaluator {
 public:
  explicit TraceEvaluator(int n);

  int n() const { return n_; }
  std::size_t gram_dim() const { return dim_; }
  std::size_t phase_count() const { return m_; }

  /// Matrix route. grad_f / grad_g are filled when non-empty (length M).
  TraceValues evaluate(std::span<const double> phases, std::span<double> grad_f = {},
                       std::span<double> grad_g = {});

  /// Cosine-sum route, O(N^3) for f and O(N^4) for g.
  TraceValues evaluate_cosine_sums(std::span<const double> phases);

  /// Gram planes of the most recent evaluate() call.
  kernels::ConstPlanar gram() const { return {p_re_.data(), p_im_.data()}; }
  kernels::ConstPlanar gram_squared() const { return {p2_re_.data(), p2_im_.data()}; }

 private:
  void load_gram(std::span<const double> phases);

  int n_;
  std::size_t dim_;
  std::size_t m_;
  double modulus_;
  std::vector<double> p_re_, p_im_, p2_re_, p2_im_, p3_re_, p3_im_;
};

}  // namespace sicgram
