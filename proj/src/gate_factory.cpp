#include "qsim/gate_factory.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace qsim {

DiagonalGate SnapDecomposition::to_diagonal() const {
    if (factors.empty()) throw std::invalid_argument("SnapDecomposition: no factors");
    const int n = static_cast<int>(factors.front().angles.size());
    DiagonalGate out;
    out.phases.assign(static_cast<std::size_t>(n), cx{1.0, 0.0});
    for (const Factor& f : factors) {
        const DiagonalGate g = snap(n, f.exponent, f.angles);
        for (int i = 0; i < n; ++i) out.phases[i] *= g.phases[i];
    }
    return out;
}

namespace {

// theta*n^r can reach 1e4 rad for the quartic decompositions at N = 64;
// extended precision for the product and the 2*pi reduction keeps the
// snap-product identities below the 1e-12 gate.
cx unit_phase(long double angle) {
    constexpr long double two_pi = 6.283185307179586476925286766559L;
    const double reduced = static_cast<double>(std::remainderl(angle, two_pi));
    return std::polar(1.0, reduced);
}

}  // namespace

DiagonalGate snap(int n_levels, int r, std::span<const double> theta) {
    if (n_levels < 1) throw std::invalid_argument("snap: n_levels must be >= 1");
    if (r < 0) throw std::invalid_argument("snap: exponent must be >= 0");
    if (static_cast<int>(theta.size()) != n_levels)
        throw std::invalid_argument("snap: theta length must equal n_levels");
    DiagonalGate g;
    g.phases.resize(static_cast<std::size_t>(n_levels));
    for (int n = 0; n < n_levels; ++n) {
        long double npow = 1.0L;  // 0^0 = 1
        for (int k = 0; k < r; ++k) npow *= n;
        g.phases[n] = unit_phase(static_cast<long double>(theta[n]) * npow);
    }
    check_diagonal(g);
    return g;
}

CMatrix truncated_ladder(int total_dim) {
    if (total_dim < 2) throw std::invalid_argument("truncated_ladder: dimension must be >= 2");
    CMatrix a(total_dim);
    for (int n = 1; n < total_dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

namespace {

struct LadderEigenbasis {
    CMatrix vectors;              // columns = eigenvectors of i*(a - a†)
    std::vector<double> values;
};

// Eigendecomposition of the fixed Hermitian generator i*(a - a†), cached per
// dimension: D(alpha) = R_phi * V * exp(-i*|alpha|*Lambda) * V† * R_phi† with
// R_phi = diag(exp(-i*n*arg(alpha))).
const LadderEigenbasis& ladder_eigenbasis(int dim) {
    static std::mutex mu;
    static std::map<int, LadderEigenbasis> cache;
    std::scoped_lock lock(mu);
    auto it = cache.find(dim);
    if (it != cache.end()) return it->second;

    const CMatrix a = truncated_ladder(dim);
    Eigen::MatrixXcd h(dim, dim);
    h.setZero();
    for (int n = 1; n < dim; ++n) {
        h(n - 1, n) = cx{0.0, 1.0} * a(n - 1, n);
        h(n, n - 1) = std::conj(h(n - 1, n));
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("displacement: eigendecomposition failed");

    LadderEigenbasis basis;
    basis.vectors = CMatrix(dim);
    basis.values.resize(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) {
        basis.values[i] = solver.eigenvalues()(i);
        for (int r = 0; r < dim; ++r) basis.vectors(r, i) = solver.eigenvectors()(r, i);
    }
    return cache.emplace(dim, std::move(basis)).first->second;
}

double grid_center(int n_levels) { return 0.5 * (n_levels - 1); }

DenseGate centered_dft(int n, double center) {
    if (n < 2) throw std::invalid_argument("fourier: dimension must be >= 2");
    DenseGate g{CMatrix(n)};
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m)
            g.matrix(l, m) = scale * std::polar(1.0, (l - center) * (m - center) * 2.0 * M_PI / n);
    check_unitary(g);
    return g;
}

// coefficient of n^r in the expansion of -coeff*(n - center)^order; the
// alternating signs fall out of (-center)^{order-r}
long double binomial_angle(double coeff, double center, int order, int r) {
    long double binom = 1.0L;
    for (int k = 0; k < r; ++k) binom = binom * (order - k) / (k + 1);
    long double cpow = 1.0L;
    for (int k = 0; k < order - r; ++k) cpow *= -static_cast<long double>(center);
    return -static_cast<long double>(coeff) * binom * cpow;
}

SnapDecomposition centered_power_snap(int n_levels, double coeff, int order) {
    // exp(-i*coeff*(n-c)^order) = prod_r S^{(r)} with the binomial angles.
    // The stored per-level angle is the uniform coefficient reduced mod
    // 2*pi/n^r (a no-op on the gate, since n^r is an integer), which keeps
    // theta_n * n^r small enough that the product identity holds to 1e-15
    // even at N = 64 where the raw coefficients reach 1e4 rad.
    constexpr long double two_pi = 6.283185307179586476925286766559L;
    const double c = grid_center(n_levels);
    SnapDecomposition dec;
    for (int r = order; r >= 0; --r) {
        const long double q = binomial_angle(coeff, c, order, r);
        SnapDecomposition::Factor f;
        f.exponent = r;
        f.angles.resize(static_cast<std::size_t>(n_levels));
        for (int n = 0; n < n_levels; ++n) {
            long double npow = 1.0L;
            for (int k = 0; k < r; ++k) npow *= n;
            f.angles[n] = npow == 0.0L
                              ? static_cast<double>(q)
                              : static_cast<double>(std::remainderl(q * npow, two_pi) / npow);
        }
        dec.factors.push_back(std::move(f));
    }
    return dec;
}

DiagonalGate centered_power_diag(int n_levels, double coeff, int order) {
    const double c = grid_center(n_levels);
    DiagonalGate g;
    g.phases.resize(static_cast<std::size_t>(n_levels));
    for (int n = 0; n < n_levels; ++n) {
        long double xpow = 1.0L;
        for (int k = 0; k < order; ++k) xpow *= static_cast<long double>(n - c);
        g.phases[n] = unit_phase(-static_cast<long double>(coeff) * xpow);
    }
    check_diagonal(g);
    return g;
}

}  // namespace

DenseGate displacement(int total_dim, cx alpha) {
    const LadderEigenbasis& basis = ladder_eigenbasis(total_dim);
    const double r = std::abs(alpha);
    const double phi = (r == 0.0) ? 0.0 : std::arg(alpha);
    // W = V * exp(-i*r*Lambda) * V†
    const int n = total_dim;
    CMatrix scaled(n);
    for (int col = 0; col < n; ++col) {
        const cx phase = std::polar(1.0, -r * basis.values[col]);
        for (int row = 0; row < n; ++row) scaled(row, col) = basis.vectors(row, col) * phase;
    }
    CMatrix w = matmul(scaled, adjoint(basis.vectors));
    // sandwich by R_phi = diag(exp(-i*n*phi))
    DenseGate g{CMatrix(n)};
    for (int row = 0; row < n; ++row)
        for (int col = 0; col < n; ++col)
            g.matrix(row, col) = std::polar(1.0, -phi * row) * w(row, col) * std::polar(1.0, phi * col);
    check_unitary(g);
    return g;
}

cvector displacement_apply(int total_dim, cx alpha, std::span<const cx> v) {
    if (static_cast<int>(v.size()) != total_dim)
        throw std::invalid_argument("displacement_apply: vector length mismatch");
    const LadderEigenbasis& basis = ladder_eigenbasis(total_dim);
    const double r = std::abs(alpha);
    const double phi = (r == 0.0) ? 0.0 : std::arg(alpha);
    // D = R W R† with R = diag(exp(-i*phi*n)) and W = V exp(-i*r*Lambda) V†
    cvector w(v.begin(), v.end());
    if (phi != 0.0)
        for (int n = 0; n < total_dim; ++n) w[n] *= std::polar(1.0, phi * n);   // R†
    w = adjoint_matvec(basis.vectors, w);                                       // V†
    for (int n = 0; n < total_dim; ++n) w[n] *= std::polar(1.0, -r * basis.values[n]);
    w = matvec(basis.vectors, w);                                               // V
    if (phi != 0.0)
        for (int n = 0; n < total_dim; ++n) w[n] *= std::polar(1.0, -phi * n);  // R
    return w;
}

DenseGate fourier(int n) { return centered_dft(n, 0.5 * n); }

DenseGate fourier_symmetric(int n) { return centered_dft(n, grid_center(n)); }

DiagonalGate v_phi2_diag(int n_levels, double mu2, int d, double delta_phi, double dt) {
    const double omega = 0.5 * (mu2 + 2.0 * d) * delta_phi * delta_phi * dt;
    return centered_power_diag(n_levels, omega, 2);
}

SnapDecomposition v_phi2_snap(int n_levels, double mu2, int d, double delta_phi, double dt) {
    const double omega = 0.5 * (mu2 + 2.0 * d) * delta_phi * delta_phi * dt;
    return centered_power_snap(n_levels, omega, 2);
}

DiagonalGate v_phi4_diag(int n_levels, double g_s, double delta_phi, double dt) {
    const double lambda = g_s * std::pow(delta_phi, 4) * dt / 24.0;
    return centered_power_diag(n_levels, lambda, 4);
}

SnapDecomposition v_phi4_snap(int n_levels, double g_s, double delta_phi, double dt) {
    const double lambda = g_s * std::pow(delta_phi, 4) * dt / 24.0;
    return centered_power_snap(n_levels, lambda, 4);
}

DenseGate kinetic_step(int n_levels, double delta_phi, double mass, double dt) {
    (void)mass;  // delta_pi = 2*pi/(N*delta_phi) == mass*delta_phi by construction
    const double delta_pi = 2.0 * M_PI / (n_levels * delta_phi);
    const double c = grid_center(n_levels);
    const DenseGate f = fourier_symmetric(n_levels);
    CMatrix scaled(n_levels);
    for (int col = 0; col < n_levels; ++col) {
        const double pi_n = (col - c) * delta_pi;
        const cx phase = std::polar(1.0, -0.5 * dt * pi_n * pi_n);
        for (int row = 0; row < n_levels; ++row) scaled(row, col) = f.matrix(row, col) * phase;
    }
    DenseGate g{matmul(scaled, adjoint(f.matrix))};
    check_unitary(g);
    return g;
}

std::function<cx(int, int)> coupling_phase_fn(const QuditSpec& spec, double f_s, double dt) {
    const double c = spec.grid_center();
    const double pref = f_s * spec.delta_phi * spec.delta_phi * dt;
    const int n_logical = spec.n_logical;
    return [c, pref, n_logical](int nj, int nk) -> cx {
        if (nj >= n_logical || nk >= n_logical) return cx{1.0, 0.0};
        return std::polar(1.0, -pref * (nj - c) * (nk - c));
    };
}

}  // namespace qsim
