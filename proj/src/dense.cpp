#include "qsim/dense.hpp"

#include <cmath>
#include <stdexcept>

namespace qsim {

CMatrix CMatrix::identity(int dim) {
    CMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix matmul(const CMatrix& x, const CMatrix& y) {
    if (x.n != y.n) throw std::invalid_argument("matmul: dimension mismatch");
    const int n = x.n;
    CMatrix out(n);
    for (int i = 0; i < n; ++i) {
        const cx* xi = &x.a[static_cast<std::size_t>(i) * n];
        cx* oi = &out.a[static_cast<std::size_t>(i) * n];
        for (int k = 0; k < n; ++k) {
            const cx s = xi[k];
            if (s == cx{}) continue;
            const cx* yk = &y.a[static_cast<std::size_t>(k) * n];
            for (int j = 0; j < n; ++j) oi[j] += s * yk[j];
        }
    }
    return out;
}

CMatrix adjoint(const CMatrix& x) {
    CMatrix out(x.n);
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) out(j, i) = std::conj(x(i, j));
    return out;
}

cvector matvec(const CMatrix& x, std::span<const cx> v) {
    if (static_cast<int>(v.size()) != x.n) throw std::invalid_argument("matvec: dimension mismatch");
    const int n = x.n;
    cvector out(n);
    for (int i = 0; i < n; ++i) {
        const cx* xi = &x.a[static_cast<std::size_t>(i) * n];
        cx s{};
        for (int j = 0; j < n; ++j) s += xi[j] * v[j];
        out[i] = s;
    }
    return out;
}

cvector adjoint_matvec(const CMatrix& x, std::span<const cx> v) {
    if (static_cast<int>(v.size()) != x.n) throw std::invalid_argument("adjoint_matvec: dimension mismatch");
    const int n = x.n;
    cvector out(n);
    for (int j = 0; j < n; ++j) {
        const cx* xj = &x.a[static_cast<std::size_t>(j) * n];
        const cx vj = v[j];
        for (int i = 0; i < n; ++i) out[i] += std::conj(xj[i]) * vj;
    }
    return out;
}

double max_abs_diff(const CMatrix& x, const CMatrix& y) {
    if (x.n != y.n) throw std::invalid_argument("max_abs_diff: dimension mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < x.a.size(); ++i) m = std::max(m, std::abs(x.a[i] - y.a[i]));
    return m;
}

double unitarity_defect(const CMatrix& x) {
    return max_abs_diff(matmul(adjoint(x), x), CMatrix::identity(x.n));
}

double hermiticity_defect(const CMatrix& x) {
    double m = 0.0;
    for (int i = 0; i < x.n; ++i)
        for (int j = 0; j < x.n; ++j) m = std::max(m, std::abs(x(i, j) - std::conj(x(j, i))));
    return m;
}

cx inner(std::span<const cx> a, std::span<const cx> b) {
    if (a.size() != b.size()) throw std::invalid_argument("inner: size mismatch");
    cx s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

double norm2(std::span<const cx> v) {
    double s = 0.0;
    for (const cx& z : v) s += std::norm(z);
    return s;
}

}  // namespace qsim
