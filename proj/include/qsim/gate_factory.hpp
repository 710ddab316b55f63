#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qsim/dense.hpp"
#include "qsim/gates.hpp"
#include "qsim/qudit_spec.hpp"

namespace qsim {

// Product of SNAP factors; multiplying the factors out as diagonal phases
// reproduces a target diagonal (asserted by the v_phi2/v_phi4 tests).
struct SnapDecomposition {
    struct Factor {
        int exponent = 0;           // r in exp(i*theta_n*n^r)
        std::vector<double> angles; // length N
    };
    std::vector<Factor> factors;

    DiagonalGate to_diagonal() const;
};

// S_N^{(r)}(theta): entry n = exp(i*theta_n*n^r), convention 0^0 = 1.
DiagonalGate snap(int n_levels, int r, std::span<const double> theta);

// Truncated annihilation operator: a[n-1, n] = sqrt(n). Satisfies
// [a, a†] = 1 - dim*|dim-1><dim-1| exactly.
CMatrix truncated_ladder(int total_dim);

// exp(alpha*a - conj(alpha)*a†) over the truncated space, computed exactly
// through the cached eigenbasis of i*(a - a†).
DenseGate displacement(int total_dim, cx alpha);

// D(alpha)|v> in O(dim^2) through the cached eigenbasis, without forming the
// dense matrix. D(alpha)† == D(-alpha).
cvector displacement_apply(int total_dim, cx alpha, std::span<const cx> v);

// The conventional centered DFT: (F_N)_{l,m} = exp(i*(l-N/2)*(m-N/2)*2*pi/N)/sqrt(N).
// F^2 is the centered parity permutation |l> -> |(N-l) mod N| for even N.
DenseGate fourier(int n);

// DFT centered on the symmetric grid x_nu = (nu-(N-1)/2)*delta:
// G_{l,m} = exp(i*(l-(N-1)/2)*(m-(N-1)/2)*2*pi/N)/sqrt(N).
// Commutes with the grid-center parity nu <-> N-1-nu; G^2 equals that parity
// exactly. This is the transform the kinetic step and the momentum operator
// are built from.
DenseGate fourier_symmetric(int n);

// Quadratic Trotter diagonal: entry n = exp(-i*omega*(n-c)^2) with
// omega = (1/2)*(mu2+2d)*delta_phi^2*dt and c = (N-1)/2. The SNAP form is the
// exact three-factor expansion of the same diagonal.
DiagonalGate v_phi2_diag(int n_levels, double mu2, int d, double delta_phi, double dt);
SnapDecomposition v_phi2_snap(int n_levels, double mu2, int d, double delta_phi, double dt);

// Quartic Trotter diagonal: entry n = exp(-i*lambda*(n-c)^4) with
// lambda = g_s*delta_phi^4*dt/4!. Five-factor SNAP expansion with the
// alternating binomial signs.
DiagonalGate v_phi4_diag(int n_levels, double g_s, double delta_phi, double dt);
SnapDecomposition v_phi4_snap(int n_levels, double g_s, double delta_phi, double dt);

// Momentum Trotter step F*diag(exp(-i*dt*Pi_n^2/2))*F† on the logical block,
// with Pi_n = (n-(N-1)/2)*delta_pi and delta_pi = 2*pi/(N*delta_phi)
// = mass*delta_phi. Equals exp(-i*dt*Pi_hat^2/2) exactly for
// Pi_hat = mass * G phi_hat G†.
DenseGate kinetic_step(int n_levels, double delta_phi, double mass, double dt);

// Two-site coupling phase exp(-i*f_s*delta_phi^2*(n_j-c)*(n_k-c)*dt) on
// logical levels; returns 1 whenever either index is a bumper level.
std::function<cx(int, int)> coupling_phase_fn(const QuditSpec& spec, double f_s, double dt);

}  // namespace qsim
