#include "qsim/gates.hpp"

#include <cmath>
#include <stdexcept>

namespace qsim {

void check_diagonal(const DiagonalGate& g) {
    for (const cx& p : g.phases) {
        if (std::abs(std::abs(p) - 1.0) > 1e-12)
            throw std::runtime_error("DiagonalGate: entry modulus deviates from 1 beyond 1e-12");
    }
}

void check_unitary(const DenseGate& g) {
    if (unitarity_defect(g.matrix) > 1e-10)
        throw std::runtime_error("DenseGate: unitarity defect exceeds 1e-10");
}

DiagonalGate embed_logical(const DiagonalGate& g, int n_bumper) {
    if (n_bumper < 0) throw std::invalid_argument("embed_logical: n_bumper must be >= 0");
    DiagonalGate out;
    out.phases = g.phases;
    out.phases.resize(g.phases.size() + static_cast<std::size_t>(n_bumper), cx{1.0, 0.0});
    return out;
}

DenseGate embed_logical(const DenseGate& g, int n_bumper) {
    if (n_bumper < 0) throw std::invalid_argument("embed_logical: n_bumper must be >= 0");
    const int n = g.dim();
    DenseGate out{CMatrix(n + n_bumper)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out.matrix(i, j) = g.matrix(i, j);
    for (int b = n; b < n + n_bumper; ++b) out.matrix(b, b) = 1.0;
    return out;
}

}  // namespace qsim
