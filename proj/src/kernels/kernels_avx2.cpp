// AVX2 + FMA variants. This file alone is compiled with -mavx2 -mfma; nothing
// here may run before dispatch has confirmed CPU support.

#include <immintrin.h>

#include <algorithm>

#include "sicgram/kernels.hpp"

namespace sicgram::kernels {

const KernelTable& avx2_table();

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void cgemm_avx2(std::size_t dim, ConstPlanar a, ConstPlanar b, Planar c) {
  std::fill_n(c.re, dim * dim, 0.0);
  std::fill_n(c.im, dim * dim, 0.0);
  const std::size_t vec_end = dim & ~std::size_t{3};
  for (std::size_t i = 0; i < dim; ++i) {
    double* cr = c.re + i * dim;
    double* ci = c.im + i * dim;
    for (std::size_t k = 0; k < dim; ++k) {
      const double ar_s = a.re[i * dim + k];
      const double ai_s = a.im[i * dim + k];
      const __m256d ar = _mm256_set1_pd(ar_s);
      const __m256d ai = _mm256_set1_pd(ai_s);
      const double* br = b.re + k * dim;
      const double* bi = b.im + k * dim;
      std::size_t j = 0;
      for (; j < vec_end; j += 4) {
        const __m256d vbr = _mm256_loadu_pd(br + j);
        const __m256d vbi = _mm256_loadu_pd(bi + j);
        __m256d vcr = _mm256_loadu_pd(cr + j);
        __m256d vci = _mm256_loadu_pd(ci + j);
        vcr = _mm256_fmadd_pd(ar, vbr, vcr);
        vcr = _mm256_fnmadd_pd(ai, vbi, vcr);
        vci = _mm256_fmadd_pd(ar, vbi, vci);
        vci = _mm256_fmadd_pd(ai, vbr, vci);
        _mm256_storeu_pd(cr + j, vcr);
        _mm256_storeu_pd(ci + j, vci);
      }
      for (; j < dim; ++j) {
        cr[j] += ar_s * br[j] - ai_s * bi[j];
        ci[j] += ar_s * bi[j] + ai_s * br[j];
      }
    }
  }
}

double dot_avx2(std::size_t len, const double* x, const double* y) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= len; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= len; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < len; ++i) acc += x[i] * y[i];
  return acc;
}

void upper_imag_product_avx2(std::size_t dim, ConstPlanar p, ConstPlanar q, double scale,
                             double* out) {
  const __m256d vs = _mm256_set1_pd(scale);
  for (std::size_t a = 0; a + 1 < dim; ++a) {
    const std::size_t row = a * dim;
    std::size_t b = a + 1;
    for (; b + 4 <= dim; b += 4) {
      const __m256d pr = _mm256_loadu_pd(p.re + row + b);
      const __m256d pi = _mm256_loadu_pd(p.im + row + b);
      const __m256d qr = _mm256_loadu_pd(q.re + row + b);
      const __m256d qi = _mm256_loadu_pd(q.im + row + b);
      const __m256d v = _mm256_fmsub_pd(pi, qr, _mm256_mul_pd(pr, qi));
      _mm256_storeu_pd(out, _mm256_mul_pd(vs, v));
      out += 4;
    }
    for (; b < dim; ++b) {
      *out++ = scale * (p.im[row + b] * q.re[row + b] - p.re[row + b] * q.im[row + b]);
    }
  }
}

// Sum over k in [from, dim) of x_k * conj(y_k).
inline void cdotc_range(std::size_t from, std::size_t dim, const double* xr, const double* xi,
                        const double* yr, const double* yi, double& sr, double& si) {
  __m256d accr = _mm256_setzero_pd();
  __m256d acci = _mm256_setzero_pd();
  std::size_t k = from;
  for (; k + 4 <= dim; k += 4) {
    const __m256d vxr = _mm256_loadu_pd(xr + k);
    const __m256d vxi = _mm256_loadu_pd(xi + k);
    const __m256d vyr = _mm256_loadu_pd(yr + k);
    const __m256d vyi = _mm256_loadu_pd(yi + k);
    accr = _mm256_fmadd_pd(vxr, vyr, accr);
    accr = _mm256_fmadd_pd(vxi, vyi, accr);
    acci = _mm256_fmadd_pd(vxi, vyr, acci);
    acci = _mm256_fnmadd_pd(vxr, vyi, acci);
  }
  double ar = hsum(accr);
  double ai = hsum(acci);
  for (; k < dim; ++k) {
    ar += xr[k] * yr[k] + xi[k] * yi[k];
    ai += xi[k] * yr[k] - xr[k] * yi[k];
  }
  sr = ar;
  si = ai;
}

double triple_phase_sum_avx2(std::size_t dim, ConstPlanar u) {
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

double quad_phase_sum_avx2(std::size_t dim, ConstPlanar u) {
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
        cdotc_range(c + 1, dim, c_re, c_im, a_re, a_im, s1r, s1i);
        cdotc_range(c + 1, dim, b_re, b_im, c_re, c_im, s2r, s2i);
        cdotc_range(c + 1, dim, b_re, b_im, a_re, a_im, s3r, s3i);
        const double ab_r = a_re[b], ab_i = a_im[b];
        const double ac_r = a_re[c], ac_i = a_im[c];
        const double bc_r = b_re[c], bc_i = b_im[c];
        const double w1r = ab_r * bc_r - ab_i * bc_i, w1i = ab_r * bc_i + ab_i * bc_r;
        const double w2r = ab_r * ac_r + ab_i * ac_i, w2i = ab_i * ac_r - ab_r * ac_i;
        const double w3r = ac_r * bc_r + ac_i * bc_i, w3i = ac_i * bc_r - ac_r * bc_i;
        total += (w1r * s1r - w1i * s1i) + (w2r * s2r - w2i * s2i) + (w3r * s3r - w3i * s3i);
      }
    }
  }
  return total;
}

const KernelTable kAvx2{
    "avx2",
    cgemm_avx2,
    dot_avx2,
    upper_imag_product_avx2,
    triple_phase_sum_avx2,
    quad_phase_sum_avx2,
};

}  // namespace

const KernelTable& avx2_table() { return kAvx2; }

}  // namespace sicgram::kernels
