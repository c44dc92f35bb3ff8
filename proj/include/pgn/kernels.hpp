#pragma once

// Dense double-precision inner loops used by the linear-algebra, prox and
// solver layers. Each kernel has a portable scalar reference and, on x86-64,
// an AVX2/FMA variant; the variant is picked once at startup from CPUID and
// can be pinned with the PGN_SIMD environment variable ("scalar" or "avx2").

#include <cstddef>
#include <span>
#include <string_view>

namespace pgn::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view to_string(Isa isa);

// Raw-pointer kernel signatures. Matrices are dense row-major.
struct KernelTable {
  Isa isa;

  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);

  // sum_i (a[i] - b[i])^2
  double (*squared_distance)(const double* a, const double* b, std::size_t n);

  // y = A x, A is rows x cols.
  void (*gemv)(const double* a, std::size_t rows, std::size_t cols, const double* x, double* y);

  // y = A^T x, A is rows x cols.
  void (*gemv_transposed)(const double* a, std::size_t rows, std::size_t cols, const double* x,
                          double* y);

  // One forward-backward step for the box-constrained metric projection:
  //   out = clamp(v - sigma * (H v - hz), lower, upper)
  // H must be symmetric (n x n). Returns ||out - v||^2.
  double (*projected_step)(const double* h, std::size_t n, const double* v, const double* hz,
                           double sigma, const double* lower, const double* upper, double* out);
};

const KernelTable& scalar_table();

// True if this build carries the variant and the running CPU supports it.
bool available(Isa isa);

// Throws std::invalid_argument if the variant is not available.
const KernelTable& table(Isa isa);

// The table currently used by the library.
const KernelTable& active();

// Pins the active table (process wide). Used by tests and the CLI --simd flag.
void set_active(Isa isa);

// RAII helper that restores the previous selection.
class ScopedIsa {
 public:
  explicit ScopedIsa(Isa isa);
  ~ScopedIsa();
  ScopedIsa(const ScopedIsa&) = delete;
  ScopedIsa& operator=(const ScopedIsa&) = delete;

 private:
  Isa previous_;
};

// Span conveniences over the active table.
double dot(std::span<const double> a, std::span<const double> b);
double squared_distance(std::span<const double> a, std::span<const double> b);

}  // namespace pgn::kernels
