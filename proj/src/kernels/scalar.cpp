// Reference kernels. The lane-striped reductions fix the summation order the
// vector variants reproduce.

#include "relstoch/kernels.hpp"

namespace relstoch::kernels {

namespace {

void euler_update(double* x, const double* drift, double dt, const double* diffusion,
                  const double* dw, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double a = drift[i] * dt;
    const double b = diffusion[i] * dw[i];
    x[i] = x[i] + (a + b);
  }
}

void mul_accumulate(double* acc, const double* a, const double* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] = acc[i] + a[i] * b[i];
}

void scale_accumulate(double* acc, const double* a, double s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] = acc[i] + a[i] * s;
}

double combine(const double (&l)[4]) { return (l[0] + l[1]) + (l[2] + l[3]); }

double sum(const double* a, std::size_t n) {
  double l[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < n; ++i) l[i & 3] += a[i];
  return combine(l);
}

double sum_sq_increments(const double* a, std::size_t n) {
  double l[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = a[i + 1] - a[i];
    l[i & 3] += d * d;
  }
  return combine(l);
}

PowerSums power_sums(const double* z, std::size_t n) {
  double l1[4] = {}, l2[4] = {}, l3[4] = {}, l4[4] = {};
  for (std::size_t i = 0; i < n; ++i) {
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
  double la[4] = {}, lb[4] = {}, laa[4] = {}, lbb[4] = {}, lab[4] = {}, la4[4] = {},
         lb4[4] = {}, la2b2[4] = {};
  for (std::size_t i = 0; i < n; ++i) {
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
  for (std::size_t i = 0; i < n; ++i) face[i] = cl[i] * rho_ext[i] + cr[i] * rho_ext[i + 1];
}

void conservative_update(double* out, const double* rho, const double* face, double ratio,
                         std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = rho[i] - ratio * (face[i + 1] - face[i]);
}

}  // namespace

namespace detail {
const KernelTable scalar_table{
    Isa::scalar,   euler_update, mul_accumulate, scale_accumulate,   sum,
    sum_sq_increments, power_sums, cross_sums,   two_point_flux, conservative_update,
};
}  // namespace detail

}  // namespace relstoch::kernels
