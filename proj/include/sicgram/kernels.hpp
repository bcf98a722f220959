#pragma once
// Data-parallel inner loops of the Gram-space evaluators.
//
// Every kernel exists as a portable scalar reference and, on x86-64, as an
// AVX2+FMA variant compiled in its own translation unit. The variant is picked
// once at runtime from CPUID; SICGRAM_KERNELS=scalar|avx2 overrides the choice.
//
// Matrices are square, row-major and planar: real and imaginary parts live in
// two separate arrays of dim*dim doubles.

#include <cstddef>
#include <string_view>

namespace sicgram::kernels {

struct ConstPlanar {
  const double* re;
  const double* im;
};

struct Planar {
  double* re;
  double* im;
};

struct KernelTable {
  std::string_view name;

  /// c = a * b for dim x dim complex matrices. c must not alias a or b.
  void (*cgemm)(std::size_t dim, ConstPlanar a, ConstPlanar b, Planar c);

  /// Sum of x[i] * y[i] over len doubles.
  double (*dot)(std::size_t len, const double* x, const double* y);

  /// out[k] = scale * Im(p_ab * conj(q_ab)) for the strict upper triangle,
  /// k running over (a, b) row-major (the flat phase index order).
  void (*upper_imag_product)(std::size_t dim, ConstPlanar p, ConstPlanar q, double scale,
                             double* out);

  /// Sum over a<b<c of Re(u_ab u_bc conj(u_ac)). Only the strict upper
  /// triangle of u is read.
  double (*triple_phase_sum)(std::size_t dim, ConstPlanar u);

  /// Sum over a<b<c<d of the three four-cycle terms
  ///   Re(u_ab u_bc u_cd conj(u_ad)) + Re(u_ab u_bd conj(u_cd) conj(u_ac))
  ///   + Re(u_ac conj(u_bc) u_bd conj(u_ad)).
  double (*quad_phase_sum)(std::size_t dim, ConstPlanar u);
};

enum class KernelKind { scalar, avx2 };

const KernelTable& scalar_kernels();

/// nullptr when the AVX2 variant was not compiled in or the CPU lacks AVX2/FMA.
const KernelTable* avx2_kernels();

/// The table used by the library. Resolved on first call.
const KernelTable& active_kernels();

/// Force a variant. Throws std::runtime_error if it is unavailable.
void select_kernels(KernelKind kind);

}  // namespace sicgram::kernels
