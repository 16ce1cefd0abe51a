#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>

#include "relstoch/kernels.hpp"

namespace relstoch::kernels {

namespace {

// -1: automatic, otherwise static_cast<int>(Isa).
std::atomic<int> g_forced{-1};

bool cpu_has_avx2() {
#if defined(RELSTOCH_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("RELSTOCH_ISA")) {
    const std::string_view s{env};
    if (s == "scalar") return Isa::scalar;
    if (s == "avx2" && cpu_has_avx2()) return Isa::avx2;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

}  // namespace

const char* isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) { return isa == Isa::scalar || (isa == Isa::avx2 && cpu_has_avx2()); }

Isa active_isa() {
  static const Isa detected = detect();
  const int forced = g_forced.load(std::memory_order_relaxed);
  return forced < 0 ? detected : static_cast<Isa>(forced);
}

void force_isa(std::optional<Isa> isa) {
  if (isa && !isa_available(*isa))
    throw std::invalid_argument(std::string("ISA not available on this CPU: ") + isa_name(*isa));
  g_forced.store(isa ? static_cast<int>(*isa) : -1, std::memory_order_relaxed);
}

const KernelTable& table(Isa isa) {
#if defined(RELSTOCH_HAVE_AVX2)
  if (isa == Isa::avx2) return detail::avx2_table;
#endif
  (void)isa;
  return detail::scalar_table;
}

}  // namespace relstoch::kernels
