#pragma once

#include "qsim/dense.hpp"

namespace qsim {

// Diagonal unitary: one unit-modulus phase per level.
struct DiagonalGate {
    cvector phases;

    int dim() const { return static_cast<int>(phases.size()); }
};

// Dense unitary over the full single-site space.
struct DenseGate {
    CMatrix matrix;

    int dim() const { return matrix.n; }
};

// Throws if the gate is not unitary/unit-modulus within the factory
// tolerances (1e-10 dense, 1e-12 diagonal entries). Exactly-constructed
// factory outputs go through these; synthesized approximations do not —
// they carry a fidelity report instead.
void check_diagonal(const DiagonalGate& g);
void check_unitary(const DenseGate& g);

// Direct sum with the m_b x m_b identity: logical gate on levels 0..N-1,
// identity on the bumpers above.
DiagonalGate embed_logical(const DiagonalGate& g, int n_bumper);
DenseGate embed_logical(const DenseGate& g, int n_bumper);

}  // namespace qsim
