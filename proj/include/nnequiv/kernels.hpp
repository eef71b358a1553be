// Low-level numeric kernels for the hot loops (affine maps of generator
// matrices, interval radius sums, concrete forward evaluation).
// Scalar reference implementations plus AVX2 variants selected at runtime;
// the two backends are equivalence-tested against each other.

#pragma once

#include <cstddef>

namespace nnequiv::kern {

enum class Backend { Scalar, Avx2 };

// Backend active for subsequent kernel calls. Resolution order:
// NNEQUIV_SIMD env var ("scalar"/"avx2") if set, else CPU detection.
Backend active_backend();

// Force a backend (tests). Throws if the backend is unsupported on this CPU.
void set_backend(Backend b);

// y . x over n entries.
double dot(const double* x, const double* y, std::size_t n);

// y += a * x over n entries.
void axpy(double* y, double a, const double* x, std::size_t n);

// sum of |x_i| over n entries.
double abs_sum(const double* x, std::size_t n);

// x_i = max(0, x_i).
void relu(double* x, std::size_t n);

// x_i *= a.
void scale(double* x, double a, std::size_t n);

// out = W x + bias, W row-major (m x n). bias may be null (treated as 0).
void matvec(const double* w, const double* x, const double* bias, double* out,
            std::size_t m, std::size_t n);

}  // namespace nnequiv::kern
