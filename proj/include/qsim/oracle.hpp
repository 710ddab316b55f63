#pragma once

#include <functional>
#include <vector>

#include "qsim/dense.hpp"
#include "qsim/gates.hpp"
#include "qsim/model_params.hpp"
#include "qsim/qudit_spec.hpp"
#include "qsim/state_vector.hpp"

// Exact dense reference implementation: Hamiltonians in the field-amplitude
// basis, ground states and propagators by eigendecomposition. Used by tests
// and the acceptance suite to validate the gate/evolution path. Operators
// live on the logical block; bumper rows and columns are zero.
namespace qsim::oracle {

struct HermitianMatrix {
    CMatrix mat;

    HermitianMatrix() = default;
    explicit HermitianMatrix(CMatrix m);  // checks ||H - H†||_max <= 1e-12

    int dim() const { return mat.n; }
};

struct EigenSystem {
    std::vector<double> values;  // ascending
    CMatrix vectors;             // columns
};

EigenSystem eigh(const HermitianMatrix& h);

// Discretized HO ground state: logical amplitudes ∝ phi_0(x_nu * sqrt(mass)),
// bumpers zero, normalized.
StateVector target_gaussian_state(const QuditSpec& spec);

HermitianMatrix build_phi_op(const QuditSpec& spec);
HermitianMatrix build_pi_op(const QuditSpec& spec);

// Pi^2/2 + (1/2)(mu2+2d) phi^2 + (g/4!) phi^4 on one site.
HermitianMatrix build_local_h(const QuditSpec& spec, const ModelParams& params, double g_value);

// sum_j local(j) - f * sum_j phi_j phi_{j+1}, open chain. Refuses when
// total_dim^L exceeds the dense cap.
inline constexpr std::size_t kDenseCap = 4096;
HermitianMatrix build_lattice_h(const QuditSpec& spec, const ModelParams& params);

DenseGate exact_propagator_step(const HermitianMatrix& h, double dt);

// Trotter-free references: fixed H evolved for total_time (one eigensolve),
// and a piecewise-constant schedule H_s per step.
cvector exact_evolve(const HermitianMatrix& h, cvector psi, double total_time);
cvector exact_evolve(const std::function<HermitianMatrix(int)>& h_of_step, cvector psi, int steps,
                     double dt);

// Lowest eigenpair restricted to the logical subspace (every site level < N),
// re-embedded into the full space with zero bumper amplitudes.
struct GroundState {
    double energy = 0.0;
    cvector amplitudes;
};
GroundState ground_state(const HermitianMatrix& h, const QuditSpec& spec, int sites);

double expectation(const HermitianMatrix& h, std::span<const cx> psi);

}  // namespace qsim::oracle
