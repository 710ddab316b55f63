#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace qsim {

using cx = std::complex<double>;
using cvector = std::vector<cx>;

// Row-major dense complex matrix. Small fixed sizes only (gate dimensions and
// desk-scale oracle Hamiltonians); no attempt at blocking or SIMD beyond what
// the compiler does.
struct CMatrix {
    int n = 0;                // rows == cols; all matrices here are square
    cvector a;                // n*n entries, row-major

    CMatrix() = default;
    explicit CMatrix(int dim) : n(dim), a(static_cast<std::size_t>(dim) * dim) {}

    cx& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * n + c]; }
    const cx& operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * n + c]; }

    static CMatrix identity(int dim);
};

CMatrix matmul(const CMatrix& x, const CMatrix& y);
CMatrix adjoint(const CMatrix& x);
cvector matvec(const CMatrix& x, std::span<const cx> v);
cvector adjoint_matvec(const CMatrix& x, std::span<const cx> v);  // x† v without forming x†

// max_{ij} |x_ij - y_ij|
double max_abs_diff(const CMatrix& x, const CMatrix& y);
// ‖x†x − I‖_max
double unitarity_defect(const CMatrix& x);
// ‖x − x†‖_max
double hermiticity_defect(const CMatrix& x);

cx inner(std::span<const cx> a, std::span<const cx> b);  // ⟨a|b⟩ = Σ conj(a_i) b_i
double norm2(std::span<const cx> v);                     // Σ |v_i|²

}  // namespace qsim
