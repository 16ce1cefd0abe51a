// AVX2 kernels. Compiled with -mavx2 only (no FMA), matching the scalar
// reference operation for operation.

#include <immintrin.h>

#include "relstoch/kernels.hpp"

namespace relstoch::kernels {

namespace {

double combine(const double (&l)[4]) { return (l[0] + l[1]) + (l[2] + l[3]); }

void euler_update(double* x, const double* drift, double dt, const double* diffusion,
                  const double* dw, std::size_t n) {
  const __m256d vdt = _mm256_set1_pd(dt);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = _mm256_mul_pd(_mm256_loadu_pd(drift + i), vdt);
    const __m256d b = _mm256_mul_pd(_mm256_loadu_pd(diffusion + i), _mm256_loadu_pd(dw + i));
    _mm256_storeu_pd(x + i, _mm256_add_pd(_mm256_loadu_pd(x + i), _mm256_add_pd(a, b)));
  }
  for (; i < n; ++i) {
    const double a = drift[i] * dt;
    const double b = diffusion[i] * dw[i];
    x[i] = x[i] + (a + b);
  }
}

void mul_accumulate(double* acc, const double* a, const double* b, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), p));
  }
  for (; i < n; ++i) acc[i] = acc[i] + a[i] * b[i];
}

void scale_accumulate(double* acc, const double* a, double s, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d p = _mm256_mul_pd(_mm256_loadu_pd(a + i), vs);
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), p));
  }
  for (; i < n; ++i) acc[i] = acc[i] + a[i] * s;
}

double sum(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double l[4];
  _mm256_storeu_pd(l, acc);
  for (; i < n; ++i) l[i & 3] += a[i];
  return combine(l);
}

double sum_sq_increments(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 < n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i + 1), _mm256_loadu_pd(a + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double l[4];
  _mm256_storeu_pd(l, acc);
  for (; i + 1 < n; ++i) {
    const double d = a[i + 1] - a[i];
    l[i & 3] += d * d;
  }
  return combine(l);
}

PowerSums power_sums(const double* z, std::size_t n) {
  __m256d s1 = _mm256_setzero_pd(), s2 = s1, s3 = s1, s4 = s1;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(z + i);
    const __m256d v2 = _mm256_mul_pd(v, v);
    s1 = _mm256_add_pd(s1, v);
    s2 = _mm256_add_pd(s2, v2);
    s3 = _mm256_add_pd(s3, _mm256_mul_pd(v2, v));
    s4 = _mm256_add_pd(s4, _mm256_mul_pd(v2, v2));
  }
  double l1[4], l2[4], l3[4], l4[4];
  _mm256_storeu_pd(l1, s1);
  _mm256_storeu_pd(l2, s2);
  _mm256_storeu_pd(l3, s3);
  _mm256_storeu_pd(l4, s4);
  for (; i < n; ++i) {
    const double v = z[i];
    const double v2 = v * v;
    l1[i & 3] += v;
    l2[i & 3] += v2;
    l3[i & 3] += v2 * v;
    l4[i & 3] += v2 * v2;
  }
  return {combine(l1), combine(l2), combine(l3), combine(l4)};
}

CrossSums cross_sums(const double* a, const double* b, std::size_t n) {
  __m256d sa = _mm256_setzero_pd(), sb = sa, saa = sa, sbb = sa, sab = sa, sa4 = sa, sb4 = sa,
          sa2b2 = sa;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(a + i);
    const __m256d y = _mm256_loadu_pd(b + i);
    const __m256d x2 = _mm256_mul_pd(x, x);
    const __m256d y2 = _mm256_mul_pd(y, y);
    sa = _mm256_add_pd(sa, x);
    sb = _mm256_add_pd(sb, y);
    saa = _mm256_add_pd(saa, x2);
    sbb = _mm256_add_pd(sbb, y2);
    sab = _mm256_add_pd(sab, _mm256_mul_pd(x, y));
    sa4 = _mm256_add_pd(sa4, _mm256_mul_pd(x2, x2));
    sb4 = _mm256_add_pd(sb4, _mm256_mul_pd(y2, y2));
    sa2b2 = _mm256_add_pd(sa2b2, _mm256_mul_pd(x2, y2));
  }
  double la[4], lb[4], laa[4], lbb[4], lab[4], la4[4], lb4[4], la2b2[4];
  _mm256_storeu_pd(la, sa);
  _mm256_storeu_pd(lb, sb);
  _mm256_storeu_pd(laa, saa);
  _mm256_storeu_pd(lbb, sbb);
  _mm256_storeu_pd(lab, sab);
  _mm256_storeu_pd(la4, sa4);
  _mm256_storeu_pd(lb4, sb4);
  _mm256_storeu_pd(la2b2, sa2b2);
  for (; i < n; ++i) {
    const std::size_t k = i & 3;
    const double x = a[i], y = b[i];
    const double x2 = x * x, y2 = y * y;
    la[k] += x;
    lb[k] += y;
    laa[k] += x2;
    lbb[k] += y2;
    lab[k] += x * y;
    la4[k] += x2 * x2;
    lb4[k] += y2 * y2;
    la2b2[k] += x2 * y2;
  }
  return {combine(la),  combine(lb),  combine(laa), combine(lbb),
          combine(lab), combine(la4), combine(lb4), combine(la2b2)};
}

void two_point_flux(double* face, const double* cl, const double* cr, const double* rho_ext,
                    std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d l = _mm256_mul_pd(_mm256_loadu_pd(cl + i), _mm256_loadu_pd(rho_ext + i));
    const __m256d r = _mm256_mul_pd(_mm256_loadu_pd(cr + i), _mm256_loadu_pd(rho_ext + i + 1));
    _mm256_storeu_pd(face + i, _mm256_add_pd(l, r));
  }
  for (; i < n; ++i) face[i] = cl[i] * rho_ext[i] + cr[i] * rho_ext[i + 1];
}

void conservative_update(double* out, const double* rho, const double* face, double ratio,
                         std::size_t n) {
  const __m256d vr = _mm256_set1_pd(ratio);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(face + i + 1), _mm256_loadu_pd(face + i));
    _mm256_storeu_pd(out + i, _mm256_sub_pd(_mm256_loadu_pd(rho + i), _mm256_mul_pd(vr, d)));
  }
  for (; i < n; ++i) out[i] = rho[i] - ratio * (face[i + 1] - face[i]);
}

}  // namespace

namespace detail {
const KernelTable avx2_table{
    Isa::avx2,     euler_update, mul_accumulate, scale_accumulate,   sum,
    sum_sq_increments, power_sums, cross_sums,   two_point_flux, conservative_update,
};
}  // namespace detail

}  // namespace relstoch::kernels
