#include "qsim/qudit_spec.hpp"

#include <cmath>
#include <stdexcept>

namespace qsim {

QuditSpec::QuditSpec(int n_logical_, int n_bumper_, double delta_phi_, double mass_)
    : n_logical(n_logical_), n_bumper(n_bumper_), delta_phi(delta_phi_), mass(mass_) {
    if (n_logical < 1) throw std::invalid_argument("QuditSpec: n_logical must be >= 1");
    if (n_bumper < 0) throw std::invalid_argument("QuditSpec: n_bumper must be >= 0");
    if (!(delta_phi > 0.0)) throw std::invalid_argument("QuditSpec: delta_phi must be > 0");
    if (!(mass > 0.0)) throw std::invalid_argument("QuditSpec: mass must be > 0");
}

QuditSpec QuditSpec::from_mass(int n_logical, int n_bumper, double mass) {
    if (n_logical < 1) throw std::invalid_argument("QuditSpec: n_logical must be >= 1");
    if (!(mass > 0.0)) throw std::invalid_argument("QuditSpec: mass must be > 0");
    const double dphi = std::sqrt(2.0 * M_PI / (n_logical * mass));
    return QuditSpec(n_logical, n_bumper, dphi, mass);
}

}  // namespace qsim
