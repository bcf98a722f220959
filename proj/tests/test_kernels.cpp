#include <doctest.h>

#include <random>
#include <vector>

#include "oracles.hpp"
#include "sicgram/gramspace.hpp"
#include "sicgram/kernels.hpp"
#include "sicgram/trace_eval.hpp"

using namespace sicgram;
using namespace sicgram::kernels;

namespace {

struct Planes {
  std::vector<double> re, im;
  explicit Planes(std::size_t dim) : re(dim * dim), im(dim * dim) {}
  ConstPlanar c() const { return {re.data(), im.data()}; }
  Planar m() { return {re.data(), im.data()}; }
};

Planes random_planes(std::size_t dim, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Planes p(dim);
  for (auto& x : p.re) x = nd(rng);
  for (auto& x : p.im) x = nd(rng);
  return p;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("scalar cgemm agrees with a naive product") {
  std::mt19937_64 rng(1);
  for (std::size_t dim : {1u, 3u, 4u, 9u, 16u}) {
    const Planes a = random_planes(dim, rng), b = random_planes(dim, rng);
    Planes c(dim);
    scalar_kernels().cgemm(dim, a.c(), b.c(), c.m());
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) {
        std::complex<double> s = 0;
        for (std::size_t k = 0; k < dim; ++k)
          s += std::complex<double>(a.re[i * dim + k], a.im[i * dim + k]) *
               std::complex<double>(b.re[k * dim + j], b.im[k * dim + j]);
        CHECK(std::abs(s - std::complex<double>(c.re[i * dim + j], c.im[i * dim + j])) < 1e-12);
      }
  }
}

TEST_CASE("AVX2 kernels are equivalent to the scalar reference") {
  const KernelTable* avx = avx2_kernels();
  if (avx == nullptr) {
    MESSAGE("AVX2 variant unavailable on this machine");
    return;
  }
  const KernelTable& ref = scalar_kernels();
  std::mt19937_64 rng(2);
  // Odd sizes exercise the remainder loops.
  for (std::size_t dim : {1u, 2u, 3u, 4u, 5u, 7u, 9u, 16u, 25u, 36u, 49u}) {
    const Planes a = random_planes(dim, rng), b = random_planes(dim, rng);
    Planes c0(dim), c1(dim);
    ref.cgemm(dim, a.c(), b.c(), c0.m());
    avx->cgemm(dim, a.c(), b.c(), c1.m());
    CHECK(max_diff(c0.re, c1.re) < 1e-12 * dim);
    CHECK(max_diff(c0.im, c1.im) < 1e-12 * dim);

    CHECK(ref.dot(dim * dim, a.re.data(), b.im.data()) ==
          doctest::Approx(avx->dot(dim * dim, a.re.data(), b.im.data())).epsilon(1e-12));

    const std::size_t m = dim * (dim - 1) / 2;
    std::vector<double> u0(m), u1(m);
    ref.upper_imag_product(dim, a.c(), b.c(), 0.5, u0.data());
    avx->upper_imag_product(dim, a.c(), b.c(), 0.5, u1.data());
    CHECK(max_diff(u0, u1) < 1e-14);

    CHECK(ref.triple_phase_sum(dim, a.c()) == doctest::Approx(avx->triple_phase_sum(dim, a.c())).epsilon(1e-11));
    if (dim <= 25) {
      CHECK(ref.quad_phase_sum(dim, a.c()) == doctest::Approx(avx->quad_phase_sum(dim, a.c())).epsilon(1e-11));
    }
  }
}

TEST_CASE("trace evaluation gives the same values under either kernel table") {
  if (avx2_kernels() == nullptr) return;
  std::mt19937_64 rng(3);
  for (int n = 2; n <= 5; ++n) {
    const auto phi = oracle::random_phases(n, rng);
    std::vector<TraceValues> values;
    std::vector<std::vector<double>> grads;
    for (KernelKind kind : {KernelKind::scalar, KernelKind::avx2}) {
      select_kernels(kind);
      TraceEvaluator eval(n);
      std::vector<double> gf(phi.size()), gg(phi.size());
      values.push_back(eval.evaluate(phi, gf, gg));
      grads.push_back(gf);
      if (n <= 3) {
        const TraceValues cs = eval.evaluate_cosine_sums(phi);
        CHECK(cs.f == doctest::Approx(values.back().f).epsilon(1e-12));
        CHECK(cs.g == doctest::Approx(values.back().g).epsilon(1e-12));
      }
    }
    CHECK(values[0].f == doctest::Approx(values[1].f).epsilon(1e-13));
    CHECK(values[0].g == doctest::Approx(values[1].g).epsilon(1e-13));
    CHECK(max_diff(grads[0], grads[1]) < 1e-13);
  }
  select_kernels(avx2_kernels() ? KernelKind::avx2 : KernelKind::scalar);
}

TEST_CASE("the active table is one of the compiled variants") {
  const auto name = active_kernels().name;
  CHECK((name == "scalar" || name == "avx2"));
  CHECK_NOTHROW(select_kernels(KernelKind::scalar));
  CHECK(active_kernels().name == "scalar");
  if (avx2_kernels() != nullptr) select_kernels(KernelKind::avx2);
}
