#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_impl.hpp"
#include "pgn/kernels.hpp"

namespace pgn::kernels {
namespace {

constexpr KernelTable kScalarTable{
    Isa::kScalar,          scalar::dot,           scalar::squared_distance,
    scalar::gemv,          scalar::gemv_transposed, scalar::projected_step,
};

#if defined(PGN_HAVE_AVX2_KERNELS)
constexpr KernelTable kAvx2Table{
    Isa::kAvx2,          avx2::dot,             avx2::squared_distance,
    avx2::gemv,          avx2::gemv_transposed, avx2::projected_step,
};
#endif

bool cpu_has_avx2() {
#if defined(PGN_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* initial_table() {
  const char* env = std::getenv("PGN_SIMD");
  if (env != nullptr) {
    const std::string want(env);
    if (want == "scalar") return &kScalarTable;
    if (want == "avx2" && available(Isa::kAvx2)) return &table(Isa::kAvx2);
  }
  return available(Isa::kAvx2) ? &table(Isa::kAvx2) : &kScalarTable;
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
  }
  return "unknown";
}

const KernelTable& scalar_table() { return kScalarTable; }

bool available(Isa isa) {
  if (isa == Isa::kScalar) return true;
  static const bool has_avx2 = cpu_has_avx2();
  return has_avx2;
}

const KernelTable& table(Isa isa) {
  if (!available(isa)) {
    throw std::invalid_argument("kernel variant not available: " + std::string(to_string(isa)));
  }
#if defined(PGN_HAVE_AVX2_KERNELS)
  if (isa == Isa::kAvx2) return kAvx2Table;
#endif
  return kScalarTable;
}

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

void set_active(Isa isa) { active_slot().store(&table(isa), std::memory_order_release); }

ScopedIsa::ScopedIsa(Isa isa) : previous_(active().isa) { set_active(isa); }

ScopedIsa::~ScopedIsa() { set_active(previous_); }

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
  return active().dot(a.data(), b.data(), a.size());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("squared_distance: length mismatch");
  return active().squared_distance(a.data(), b.data(), a.size());
}

}  // namespace pgn::kernels
