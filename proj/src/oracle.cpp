#include "qsim/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "qsim/hermite.hpp"

namespace qsim::oracle {

namespace {

Eigen::MatrixXcd to_eigen(const CMatrix& m) {
    Eigen::MatrixXcd out(m.n, m.n);
    for (int r = 0; r < m.n; ++r)
        for (int c = 0; c < m.n; ++c) out(r, c) = m(r, c);
    return out;
}

std::size_t pow_dim(int base, int exp) {
    std::size_t d = 1;
    for (int i = 0; i < exp; ++i) d *= static_cast<std::size_t>(base);
    return d;
}

// The oracle carries its own copy of the symmetric-grid DFT so the reference
// route shares only the operator definition with the gate factory, not code.
CMatrix momentum_transform(int n) {
    CMatrix g(n);
    const double c = 0.5 * (n - 1);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m)
            g(l, m) = scale * std::polar(1.0, (l - c) * (m - c) * 2.0 * M_PI / n);
    return g;
}

}  // namespace

HermitianMatrix::HermitianMatrix(CMatrix m) : mat(std::move(m)) {
    if (hermiticity_defect(mat) > 1e-12)
        throw std::runtime_error("HermitianMatrix: hermiticity defect exceeds 1e-12");
}

EigenSystem eigh(const HermitianMatrix& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(to_eigen(h.mat));
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("oracle: eigendecomposition failed");
    EigenSystem sys;
    const int n = h.dim();
    sys.values.resize(static_cast<std::size_t>(n));
    sys.vectors = CMatrix(n);
    for (int i = 0; i < n; ++i) {
        sys.values[i] = solver.eigenvalues()(i);
        for (int r = 0; r < n; ++r) sys.vectors(r, i) = solver.eigenvectors()(r, i);
    }
    return sys;
}

StateVector target_gaussian_state(const QuditSpec& spec) {
    cvector amps(static_cast<std::size_t>(spec.total_dim()));
    const double scale = std::sqrt(spec.mass);
    for (int nu = 0; nu < spec.n_logical; ++nu)
        amps[nu] = ho_eigenfunction(0, spec.grid_point(nu) * scale);
    StateVector st(spec, 1, std::move(amps));
    st.normalize();
    return st;
}

HermitianMatrix build_phi_op(const QuditSpec& spec) {
    CMatrix phi(spec.total_dim());
    for (int nu = 0; nu < spec.n_logical; ++nu) phi(nu, nu) = spec.grid_point(nu);
    return HermitianMatrix(std::move(phi));
}

HermitianMatrix build_pi_op(const QuditSpec& spec) {
    const int n = spec.n_logical;
    const CMatrix g = momentum_transform(n);
    CMatrix phi_logical(n);
    for (int nu = 0; nu < n; ++nu) phi_logical(nu, nu) = spec.grid_point(nu);
    const CMatrix pi_logical = matmul(matmul(g, phi_logical), adjoint(g));
    CMatrix pi(spec.total_dim());
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) pi(r, c) = spec.mass * pi_logical(r, c);
    // round-off from the two matmuls can leave an O(1e-15) asymmetry
    for (int r = 0; r < spec.total_dim(); ++r)
        for (int c = 0; c < r; ++c) {
            const cx avg = 0.5 * (pi(r, c) + std::conj(pi(c, r)));
            pi(r, c) = avg;
            pi(c, r) = std::conj(avg);
        }
    for (int r = 0; r < spec.total_dim(); ++r) pi(r, r) = cx{pi(r, r).real(), 0.0};
    return HermitianMatrix(std::move(pi));
}

HermitianMatrix build_local_h(const QuditSpec& spec, const ModelParams& params, double g_value) {
    const int dim = spec.total_dim();
    const HermitianMatrix pi = build_pi_op(spec);
    CMatrix h = matmul(pi.mat, pi.mat);
    for (auto& z : h.a) z *= 0.5;
    const double harm = 0.5 * params.harmonic_coefficient();
    const double quart = g_value / 24.0;
    for (int nu = 0; nu < spec.n_logical; ++nu) {
        const double x = spec.grid_point(nu);
        h(nu, nu) += harm * x * x + quart * x * x * x * x;
    }
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < r; ++c) {
            const cx avg = 0.5 * (h(r, c) + std::conj(h(c, r)));
            h(r, c) = avg;
            h(c, r) = std::conj(avg);
        }
    for (int r = 0; r < dim; ++r) h(r, r) = cx{h(r, r).real(), 0.0};
    return HermitianMatrix(std::move(h));
}

HermitianMatrix build_lattice_h(const QuditSpec& spec, const ModelParams& params) {
    const int n = spec.total_dim();
    const int sites = params.sites;
    std::size_t dim = 1;
    for (int j = 0; j < sites; ++j) {
        dim *= static_cast<std::size_t>(n);
        if (dim > kDenseCap)
            throw std::invalid_argument("build_lattice_h: total_dim^L exceeds the dense cap");
    }
    const HermitianMatrix local = build_local_h(spec, params, params.g);
    CMatrix h(static_cast<int>(dim));

    // site-local terms: strided embedding of the single-site matrix
    for (int j = 0; j < sites; ++j) {
        std::size_t stride = 1;
        for (int s = 0; s < j; ++s) stride *= static_cast<std::size_t>(n);
        const std::size_t block = stride * static_cast<std::size_t>(n);
        for (std::size_t base = 0; base < dim; base += block)
            for (std::size_t off = 0; off < stride; ++off)
                for (int r = 0; r < n; ++r)
                    for (int c = 0; c < n; ++c) {
                        const cx v = local.mat(r, c);
                        if (v == cx{}) continue;
                        h(static_cast<int>(base + off + static_cast<std::size_t>(r) * stride),
                          static_cast<int>(base + off + static_cast<std::size_t>(c) * stride)) += v;
                    }
    }

    // coupling: phi is diagonal in this basis, so the term is diagonal
    auto x_of = [&](std::size_t idx, std::size_t stride) {
        const int lev = static_cast<int>((idx / stride) % static_cast<std::size_t>(n));
        return lev < spec.n_logical ? spec.grid_point(lev) : 0.0;
    };
    for (int j = 0; j + 1 < sites; ++j) {
        std::size_t stride_j = 1;
        for (int s = 0; s < j; ++s) stride_j *= static_cast<std::size_t>(n);
        const std::size_t stride_k = stride_j * static_cast<std::size_t>(n);
        for (std::size_t i = 0; i < dim; ++i)
            h(static_cast<int>(i), static_cast<int>(i)) -=
                params.f * x_of(i, stride_j) * x_of(i, stride_k);
    }
    return HermitianMatrix(std::move(h));
}

DenseGate exact_propagator_step(const HermitianMatrix& h, double dt) {
    const EigenSystem sys = eigh(h);
    const int n = h.dim();
    CMatrix scaled(n);
    for (int col = 0; col < n; ++col) {
        const cx phase = std::polar(1.0, -sys.values[col] * dt);
        for (int row = 0; row < n; ++row) scaled(row, col) = sys.vectors(row, col) * phase;
    }
    DenseGate g{matmul(scaled, adjoint(sys.vectors))};
    check_unitary(g);
    return g;
}

cvector exact_evolve(const HermitianMatrix& h, cvector psi, double total_time) {
    const EigenSystem sys = eigh(h);
    cvector modes = adjoint_matvec(sys.vectors, psi);
    for (std::size_t i = 0; i < modes.size(); ++i)
        modes[i] *= std::polar(1.0, -sys.values[i] * total_time);
    return matvec(sys.vectors, modes);
}

cvector exact_evolve(const std::function<HermitianMatrix(int)>& h_of_step, cvector psi, int steps,
                     double dt) {
    for (int s = 1; s <= steps; ++s) psi = exact_evolve(h_of_step(s), std::move(psi), dt);
    return psi;
}

GroundState ground_state(const HermitianMatrix& h, const QuditSpec& spec, int sites) {
    const int n = spec.total_dim();
    const std::size_t dim = pow_dim(n, sites);
    if (dim != static_cast<std::size_t>(h.dim()))
        throw std::invalid_argument("ground_state: matrix dimension does not match spec^sites");

    // logical subspace: every site level < N
    std::vector<std::size_t> keep;
    keep.reserve(pow_dim(spec.n_logical, sites));
    for (std::size_t i = 0; i < dim; ++i) {
        bool logical = true;
        std::size_t rest = i;
        for (int j = 0; j < sites; ++j) {
            if (static_cast<int>(rest % static_cast<std::size_t>(n)) >= spec.n_logical) {
                logical = false;
                break;
            }
            rest /= static_cast<std::size_t>(n);
        }
        if (logical) keep.push_back(i);
    }
    CMatrix sub(static_cast<int>(keep.size()));
    for (std::size_t r = 0; r < keep.size(); ++r)
        for (std::size_t c = 0; c < keep.size(); ++c)
            sub(static_cast<int>(r), static_cast<int>(c)) =
                h.mat(static_cast<int>(keep[r]), static_cast<int>(keep[c]));
    const EigenSystem sys = eigh(HermitianMatrix(std::move(sub)));

    GroundState gs;
    gs.energy = sys.values.front();
    gs.amplitudes.assign(dim, cx{});
    for (std::size_t r = 0; r < keep.size(); ++r)
        gs.amplitudes[keep[r]] = sys.vectors(static_cast<int>(r), 0);
    return gs;
}

double expectation(const HermitianMatrix& h, std::span<const cx> psi) {
    return inner(psi, matvec(h.mat, psi)).real();
}

}  // namespace qsim::oracle
