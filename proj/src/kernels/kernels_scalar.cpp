#include "sicgram/kernels.hpp"

#include <algorithm>

namespace sicgram::kernels {
namespace {

void cgemm_scalar(std::size_t dim, ConstPlanar a, ConstPlanar b, Planar c) {
  std::fill_n(c.re, dim * dim, 0.0);
  std::fill_n(c.im, dim * dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    double* cr = c.re + i * dim;
    double* ci = c.im + i * dim;
    for (std::size_t k = 0; k < dim; ++k) {
      const double ar = a.re[i * dim + k];
      const double ai = a.im[i * dim + k];
      const double* br = b.re + k * dim;
      const double* bi = b.im + k * dim;
      for (std::size_t j = 0; j < dim; ++j) {
        cr[j] += ar * br[j] - ai * bi[j];
        ci[j] += ar * bi[j] + ai * br[j];
      }
    }
  }
}

double dot_scalar(std::size_t len, const double* x, const double* y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < len; ++i) acc += x[i] * y[i];
  return acc;
}

void upper_imag_product_scalar(std::size_t dim, ConstPlanar p, ConstPlanar q, double scale,
                               double* out) {
  for (std::size_t a = 0; a + 1 < dim; ++a) {
    const std::size_t row = a * dim;
    for (std::size_t b = a + 1; b < dim; ++b) {
      // Im(p * conj(q)) = p_im q_re - p_re q_im
      *out++ = scale * (p.im[row + b] * q.re[row + b] - p.re[row + b] * q.im[row + b]);
    }
  }
}

// Sum over k in [from, dim) of x_k * conj(y_k), rows given by pointers.
inline void cdotc_range(std::size_t from, std::size_t dim, const double* xr, const double* xi,
                        const double* yr, const double* yi, double& sr, double& si) {
  double ar = 0.0, ai = 0.0;
  for (std::size_t k = from; k < dim; ++k) {
    ar += xr[k] * yr[k] + xi[k] * yi[k];
    ai += xi[k] * yr[k] - xr[k] * yi[k];
  }
  sr = ar;
  si = ai;
}

double triple_phase_sum_scalar(std::size_t dim, ConstPlanar u) {
  double total = 0.0;
  for (std::size_t a = 0; a < dim; ++a) {
    const double* ar = u.re + a * dim;
    const double* ai = u.im + a * dim;
    for (std::size_t b = a + 1; b < dim; ++b) {
      double sr, si;
      cdotc_range(b + 1, dim, u.re + b * dim, u.im + b * dim, ar, ai, sr, si);
      total += ar[b] * sr - ai[b] * si;
    }
  }
  return total;
}

double quad_phase_sum_scalar(std::size_t dim, ConstPlanar u) {
  double total = 0.0;
  for (std::size_t a = 0; a < dim; ++a) {
    const double* a_re = u.re + a * dim;
    const double* a_im = u.im + a * dim;
    for (std::size_t b = a + 1; b < dim; ++b) {
      const double* b_re = u.re + b * dim;
      const double* b_im = u.im + b * dim;
      for (std::size_t c = b + 1; c < dim; ++c) {
        const double* c_re = u.re + c * dim;
        const double* c_im = u.im + c * dim;
        double s1r, s1i, s2r, s2i, s3r, s3i;
        cdotc_range(c + 1, dim, c_re, c_im, a_re, a_im, s1r, s1i);  // u_cd conj(u_ad)
        cdotc_range(c + 1, dim, b_re, b_im, c_re, c_im, s2r, s2i);  // u_bd conj(u_cd)
        cdotc_range(c + 1, dim, b_re, b_im, a_re, a_im, s3r, s3i);  // u_bd conj(u_ad)
        const double ab_r = a_re[b], ab_i = a_im[b];
        const double ac_r = a_re[c], ac_i = a_im[c];
        const double bc_r = b_re[c], bc_i = b_im[c];
        // w1 = u_ab u_bc, w2 = u_ab conj(u_ac), w3 = u_ac conj(u_bc)
        const double w1r = ab_r * bc_r - ab_i * bc_i, w1i = ab_r * bc_i + ab_i * bc_r;
        const double w2r = ab_r * ac_r + ab_i * ac_i, w2i = ab_i * ac_r - ab_r * ac_i;
        const double w3r = ac_r * bc_r + ac_i * bc_i, w3i = ac_i * bc_r - ac_r * bc_i;
        total += (w1r * s1r - w1i * s1i) + (w2r * s2r - w2i * s2i) + (w3r * s3r - w3i * s3i);
      }
    }
  }
  return total;
}

const KernelTable kScalar{
    "scalar",
    cgemm_scalar,
    dot_scalar,
    upper_imag_product_scalar,
    triple_phase_sum_scalar,
    quad_phase_sum_scalar,
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalar; }

}  // namespace sicgram::kernels
