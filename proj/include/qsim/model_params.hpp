#pragma once

#include <cmath>
#include <stdexcept>

namespace qsim {

// Couplings of the simulated Hamiltonian
//   H = sum_j [ Pi_j^2/2 + (1/2)(mu2+2d) phi_j^2 + (g/4!) phi_j^4 ]
//       - f * sum_j phi_j phi_{j+1}.
struct ModelParams {
    double mu2 = 1.0;  // may be negative (broken phase)
    double g = 0.0;    // quartic coupling, >= 0
    double f = 0.0;    // nearest-neighbor coupling
    int d = 1;         // spatial dimension; enters only as a scalar coefficient
    int sites = 1;     // lattice length L

    void validate() const {
        if (sites < 1) throw std::invalid_argument("ModelParams: sites must be >= 1");
        if (d < 1) throw std::invalid_argument("ModelParams: d must be >= 1");
        if (g < 0.0) throw std::invalid_argument("ModelParams: g must be >= 0");
        if (!(harmonic_coefficient() > 0.0))
            throw std::invalid_argument("ModelParams: mu2 + 2d must be > 0 (no stable harmonic basis)");
    }

    double harmonic_coefficient() const { return mu2 + 2.0 * d; }

    // free-theory harmonic frequency; the default mass for the field grid
    double default_mass() const { return std::sqrt(harmonic_coefficient()); }
};

}  // namespace qsim
