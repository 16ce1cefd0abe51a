#pragma once

// Data-parallel inner loops with a scalar reference and an AVX2 variant.
//
// Every kernel has the same floating-point operation order in all variants
// (no FMA contraction; reductions accumulate into four lanes, lane i % 4
// receiving element i, combined as (l0 + l1) + (l2 + l3)). Dispatch therefore
// never changes a result bit, which the equivalence tests assert.

#include <cstddef>
#include <optional>
#include <span>

namespace relstoch::kernels {

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa);

/// Sums of z, z^2, z^3, z^4.
struct PowerSums {
  double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
};

/// Single-pass sums for the correlation of (a, b) and of (a^2, b^2).
struct CrossSums {
  double a = 0.0, b = 0.0;
  double aa = 0.0, bb = 0.0, ab = 0.0;
  double a4 = 0.0, b4 = 0.0, a2b2 = 0.0;
};

struct KernelTable {
  Isa isa;
  /// x[i] <- x[i] + (drift[i] * dt + diffusion[i] * dw[i])
  void (*euler_update)(double* x, const double* drift, double dt, const double* diffusion,
                       const double* dw, std::size_t n);
  /// acc[i] <- acc[i] + a[i] * b[i]
  void (*mul_accumulate)(double* acc, const double* a, const double* b, std::size_t n);
  /// acc[i] <- acc[i] + a[i] * s
  void (*scale_accumulate)(double* acc, const double* a, double s, std::size_t n);
  double (*sum)(const double* a, std::size_t n);
  /// sum_i (a[i+1] - a[i])^2 over a series of length n
  double (*sum_sq_increments)(const double* a, std::size_t n);
  PowerSums (*power_sums)(const double* z, std::size_t n);
  CrossSums (*cross_sums)(const double* a, const double* b, std::size_t n);
  /// face[i] <- cl[i] * rho_ext[i] + cr[i] * rho_ext[i + 1], i < n
  void (*two_point_flux)(double* face, const double* cl, const double* cr, const double* rho_ext,
                         std::size_t n);
  /// out[i] <- rho[i] - ratio * (face[i + 1] - face[i]), i < n
  void (*conservative_update)(double* out, const double* rho, const double* face, double ratio,
                              std::size_t n);
};

bool isa_available(Isa isa);

/// Best available ISA unless overridden by force_isa or RELSTOCH_ISA=scalar|avx2.
Isa active_isa();

/// Pins dispatch to one ISA (nullopt restores automatic selection). Throws
/// std::invalid_argument if the CPU lacks the requested ISA.
void force_isa(std::optional<Isa> isa);

const KernelTable& table(Isa isa);
inline const KernelTable& active() { return table(active_isa()); }

// Span conveniences over the active table.

inline void euler_update(std::span<double> x, std::span<const double> drift, double dt,
                         std::span<const double> diffusion, std::span<const double> dw) {
  active().euler_update(x.data(), drift.data(), dt, diffusion.data(), dw.data(), x.size());
}
inline void mul_accumulate(std::span<double> acc, std::span<const double> a,
                           std::span<const double> b) {
  active().mul_accumulate(acc.data(), a.data(), b.data(), acc.size());
}
inline void scale_accumulate(std::span<double> acc, std::span<const double> a, double s) {
  active().scale_accumulate(acc.data(), a.data(), s, acc.size());
}
inline double sum(std::span<const double> a) { return active().sum(a.data(), a.size()); }
inline double sum_sq_increments(std::span<const double> a) {
  return active().sum_sq_increments(a.data(), a.size());
}
inline PowerSums power_sums(std::span<const double> z) {
  return active().power_sums(z.data(), z.size());
}
inline CrossSums cross_sums(std::span<const double> a, std::span<const double> b) {
  return active().cross_sums(a.data(), b.data(), a.size());
}

namespace detail {
extern const KernelTable scalar_table;
#if defined(RELSTOCH_HAVE_AVX2)
extern const KernelTable avx2_table;
#endif
}  // namespace detail

}  // namespace relstoch::kernels
