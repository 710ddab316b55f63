#pragma once

namespace qsim {

// Normalized harmonic-oscillator eigenfunction
//   phi_nu(x) = pi^{-1/4} / sqrt(2^nu nu!) * exp(-x^2/2) * H_nu(x),
// evaluated by upward recurrence on the normalized functions themselves, so
// no factorials or raw Hermite polynomials ever overflow. Stable to nu ~ 256.
double ho_eigenfunction(int nu, double x);

}  // namespace qsim
