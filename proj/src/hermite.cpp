#include "qsim/hermite.hpp"

#include <cmath>
#include <stdexcept>

namespace qsim {

double ho_eigenfunction(int nu, double x) {
    if (nu < 0) throw std::invalid_argument("ho_eigenfunction: nu must be >= 0");
    const double p0 = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
    if (nu == 0) return p0;
    // phi_{k+1} = x*sqrt(2/(k+1))*phi_k - sqrt(k/(k+1))*phi_{k-1}
    double prev = p0;
    double cur = std::sqrt(2.0) * x * p0;
    for (int k = 1; k < nu; ++k) {
        const double next =
            x * std::sqrt(2.0 / (k + 1)) * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

}  // namespace qsim
