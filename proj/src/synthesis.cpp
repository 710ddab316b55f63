#include "qsim/synthesis.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "qsim/gate_factory.hpp"

namespace qsim {

namespace {

cvector unit_basis(int dim, int index) {
    cvector v(static_cast<std::size_t>(dim));
    v[index] = 1.0;
    return v;
}

// portable uniform double in [0, 1)
double next_uniform(std::mt19937_64& gen) { return (gen() >> 11) * 0x1.0p-53; }

cvector apply_block_vec(cx alpha, std::span<const double> theta, cvector v, bool adjoint) {
    const int n = static_cast<int>(theta.size());
    // B = D† S D,  B† = D† S† D: same sandwich with conjugate phases
    v = displacement_apply(n, alpha, std::move(v));
    for (int i = 0; i < n; ++i) v[i] *= std::polar(1.0, adjoint ? -theta[i] : theta[i]);
    return displacement_apply(n, -alpha, std::move(v));
}

double state_term1(cx ov, bool phase_insensitive) {
    return phase_insensitive ? 1.0 - std::norm(ov) : std::norm(ov - 1.0);
}

double gate_cost_from_trace(cx tr, int dim, bool phase_insensitive) {
    return phase_insensitive ? 1.0 - std::abs(tr) / dim : std::norm(tr / static_cast<double>(dim) - 1.0);
}

}  // namespace

AnsatzParams AnsatzParams::seeded_init(int k, int total_dim, std::uint64_t seed,
                                       double alpha_radius) {
    if (k < 1) throw std::invalid_argument("AnsatzParams: block count must be >= 1");
    if (total_dim < 1) throw std::invalid_argument("AnsatzParams: total_dim must be >= 1");
    std::mt19937_64 gen(seed);
    AnsatzParams p;
    p.blocks.resize(static_cast<std::size_t>(k));
    for (Block& b : p.blocks) {
        const double r = alpha_radius * std::sqrt(next_uniform(gen));
        const double ang = 2.0 * M_PI * next_uniform(gen);
        b.alpha = std::polar(r, ang);
        b.theta.assign(static_cast<std::size_t>(total_dim), 0.0);
    }
    return p;
}

std::vector<double> AnsatzParams::flatten() const {
    const int n = total_dim();
    std::vector<double> flat;
    flat.reserve(blocks.size() * static_cast<std::size_t>(n + 2));
    for (const Block& b : blocks) {
        flat.push_back(b.alpha.real());
        flat.push_back(b.alpha.imag());
        flat.insert(flat.end(), b.theta.begin(), b.theta.end());
    }
    return flat;
}

AnsatzParams AnsatzParams::unflatten(std::span<const double> flat, int k, int total_dim) {
    if (static_cast<int>(flat.size()) != k * (total_dim + 2))
        throw std::invalid_argument("AnsatzParams::unflatten: length mismatch");
    AnsatzParams p;
    p.blocks.resize(static_cast<std::size_t>(k));
    std::size_t pos = 0;
    for (Block& b : p.blocks) {
        b.alpha = cx{flat[pos], flat[pos + 1]};
        pos += 2;
        b.theta.assign(flat.begin() + static_cast<std::ptrdiff_t>(pos),
                       flat.begin() + static_cast<std::ptrdiff_t>(pos + total_dim));
        pos += static_cast<std::size_t>(total_dim);
    }
    return p;
}

int default_block_count(int n_logical) {
    return n_logical <= 16 ? 12 : (2 * n_logical) / 3;
}

DenseGate block_gate(cx alpha, std::span<const double> theta) {
    const int n = static_cast<int>(theta.size());
    const DenseGate d = displacement(n, alpha);
    CMatrix sd(n);  // S D: scale row i of D by exp(i*theta_i)
    for (int r = 0; r < n; ++r) {
        const cx p = std::polar(1.0, theta[r]);
        for (int c = 0; c < n; ++c) sd(r, c) = p * d.matrix(r, c);
    }
    return DenseGate{matmul(adjoint(d.matrix), sd)};
}

DenseGate ansatz_unitary(const AnsatzParams& params) {
    if (params.blocks.empty()) throw std::invalid_argument("ansatz_unitary: no blocks");
    DenseGate u = block_gate(params.blocks.front().alpha, params.blocks.front().theta);
    for (std::size_t i = 1; i < params.blocks.size(); ++i)
        u.matrix = matmul(block_gate(params.blocks[i].alpha, params.blocks[i].theta).matrix,
                          u.matrix);
    return u;
}

cvector ansatz_apply(const AnsatzParams& params, cvector v, bool adjoint) {
    if (!adjoint) {
        for (const AnsatzParams::Block& b : params.blocks)
            v = apply_block_vec(b.alpha, b.theta, std::move(v), false);
    } else {
        for (auto it = params.blocks.rbegin(); it != params.blocks.rend(); ++it)
            v = apply_block_vec(it->alpha, it->theta, std::move(v), true);
    }
    return v;
}

double cost_state(const AnsatzParams& params, const StateVector& target, bool phase_insensitive) {
    return StateCost(target, phase_insensitive).value(params);
}

double cost_gate(const AnsatzParams& params, const DenseGate& target, bool phase_insensitive) {
    return GateCost(target, phase_insensitive).value(params);
}

std::vector<double> finite_difference_gradient(
    const std::function<double(const AnsatzParams&)>& cost, const AnsatzParams& params,
    double step) {
    if (!(step > 0.0)) throw std::invalid_argument("finite_difference_gradient: step must be > 0");
    const int k = params.block_count();
    const int n = params.total_dim();
    std::vector<double> flat = params.flatten();
    std::vector<double> grad(flat.size());
    for (std::size_t j = 0; j < flat.size(); ++j) {
        const double saved = flat[j];
        flat[j] = saved + step;
        const double cp = cost(AnsatzParams::unflatten(flat, k, n));
        flat[j] = saved - step;
        const double cm = cost(AnsatzParams::unflatten(flat, k, n));
        flat[j] = saved;
        grad[j] = (cp - cm) / (2.0 * step);
    }
    return grad;
}

std::vector<double> CostFunction::gradient(const AnsatzParams& params, double step) const {
    return finite_difference_gradient([this](const AnsatzParams& p) { return value(p); }, params,
                                      step);
}

ResidualInfo CostFunction::residual_info(const AnsatzParams&, double) const { return {}; }

GradientInfo CostFunction::gradient_info(const AnsatzParams& params, double step) const {
    if (!(step > 0.0)) throw std::invalid_argument("gradient_info: step must be > 0");
    const int k = params.block_count();
    const int n = params.total_dim();
    GradientInfo info;
    info.base_cost = value(params);
    std::vector<double> flat = params.flatten();
    info.gradient.resize(flat.size());
    info.curvature.resize(flat.size());
    for (std::size_t j = 0; j < flat.size(); ++j) {
        const double saved = flat[j];
        flat[j] = saved + step;
        const double cp = value(AnsatzParams::unflatten(flat, k, n));
        flat[j] = saved - step;
        const double cm = value(AnsatzParams::unflatten(flat, k, n));
        flat[j] = saved;
        info.gradient[j] = (cp - cm) / (2.0 * step);
        info.curvature[j] = (cp - 2.0 * info.base_cost + cm) / (step * step);
    }
    return info;
}

// ---------------------------------------------------------------------------
// StateCost

StateCost::StateCost(StateVector target, bool phase_insensitive)
    : target_(std::move(target)), phase_insensitive_(phase_insensitive) {
    if (target_.sites() != 1) throw std::invalid_argument("StateCost: target must be single-site");
}

double StateCost::value(const AnsatzParams& params) const {
    const int n = target_.spec().total_dim();
    if (params.total_dim() != n) throw std::invalid_argument("StateCost: parameter dimension mismatch");
    const cvector prepared = ansatz_apply(params, unit_basis(n, 0));
    const cx ov = inner(target_.amplitudes(), prepared);
    double leak = 0.0;
    for (int i = target_.spec().n_logical; i < n; ++i) leak += std::norm(prepared[i]);
    return state_term1(ov, phase_insensitive_) + leak;
}

double StateCost::fidelity(const AnsatzParams& params) const {
    const int n = target_.spec().total_dim();
    const cvector prepared = ansatz_apply(params, unit_basis(n, 0));
    return std::norm(inner(target_.amplitudes(), prepared));
}

double StateCost::leakage(const AnsatzParams& params) const {
    const int n = target_.spec().total_dim();
    const cvector prepared = ansatz_apply(params, unit_basis(n, 0));
    double leak = 0.0;
    for (int i = target_.spec().n_logical; i < n; ++i) leak += std::norm(prepared[i]);
    return leak;
}

// Same central differences as the generic path, but each perturbed cost is
// evaluated from cached prefix states |p_{i-1}> = B_{i-1}..B_1|0>, suffix
// bras <s_i| = <target|B_k..B_{i+1}, and the bumper rows R_i = P_b B_k..B_{i+1}
// of the suffix product, so one perturbation costs O(n^2) instead of a full
// O(k n^2) forward pass. When `res` is non-null the per-parameter residual
// columns [ov - 1, bumper amplitudes] are collected as well.
GradientInfo StateCost::differences(const AnsatzParams& params, double step,
                                    ResidualInfo* res) const {
    const int n = target_.spec().total_dim();
    const int n_logical = target_.spec().n_logical;
    const int n_bumper = n - n_logical;
    const int k = params.block_count();
    if (params.total_dim() != n) throw std::invalid_argument("StateCost: parameter dimension mismatch");

    std::vector<cvector> prefix(static_cast<std::size_t>(k) + 1);
    prefix[0] = unit_basis(n, 0);
    for (int i = 1; i <= k; ++i)
        prefix[i] = apply_block_vec(params.blocks[i - 1].alpha, params.blocks[i - 1].theta,
                                    prefix[i - 1], false);

    std::vector<cvector> suffix(static_cast<std::size_t>(k) + 1);
    suffix[k] = target_.amplitudes();
    for (int i = k - 1; i >= 0; --i)
        suffix[i] = apply_block_vec(params.blocks[i].alpha, params.blocks[i].theta, suffix[i + 1],
                                    true);

    // bumper rows of the suffix products: R_k = P_b, R_{i-1} = R_i B_i
    std::vector<std::vector<cvector>> bumper_rows(static_cast<std::size_t>(k) + 1);
    bumper_rows[k].resize(static_cast<std::size_t>(n_bumper));
    for (int b = 0; b < n_bumper; ++b) {
        bumper_rows[k][b].assign(static_cast<std::size_t>(n), cx{});
        bumper_rows[k][b][n_logical + b] = 1.0;
    }
    for (int i = k; i >= 2; --i) {
        // row * B = (B† * row†)†: reuse the adjoint block application
        bumper_rows[i - 1].resize(static_cast<std::size_t>(n_bumper));
        for (int b = 0; b < n_bumper; ++b) {
            cvector bra = bumper_rows[i][b];
            for (cx& z : bra) z = std::conj(z);
            bra = apply_block_vec(params.blocks[i - 1].alpha, params.blocks[i - 1].theta,
                                  std::move(bra), true);
            for (cx& z : bra) z = std::conj(z);
            bumper_rows[i - 1][b] = std::move(bra);
        }
    }

    const std::size_t n_params = static_cast<std::size_t>(k) * (n + 2);
    GradientInfo info;
    {
        const cx ov = inner(target_.amplitudes(), prefix[k]);
        double leak = 0.0;
        for (int i = n_logical; i < n; ++i) leak += std::norm(prefix[k][i]);
        info.base_cost = state_term1(ov, phase_insensitive_) + leak;
        if (res) {
            res->available = true;
            res->residuals.push_back(phase_insensitive_ ? cx{std::abs(ov) - 1.0, 0.0} : ov - 1.0);
            for (int i = n_logical; i < n; ++i) res->residuals.push_back(prefix[k][i]);
            res->jacobian.assign(res->residuals.size(), std::vector<cx>(n_params));
        }
    }
    info.gradient.reserve(n_params);
    info.curvature.reserve(n_params);
    std::size_t param_index = 0;
    std::vector<cx> r_plus(static_cast<std::size_t>(1 + n_bumper));
    std::vector<cx> r_minus(static_cast<std::size_t>(1 + n_bumper));

    for (int i = 1; i <= k; ++i) {
        const AnsatzParams::Block& blk = params.blocks[i - 1];
        const cvector& p_in = prefix[i - 1];
        const cvector& s_out = suffix[i];
        const auto& rows = bumper_rows[i];

        // cost and residual components of the perturbed state v = B' p_in
        auto measure = [&](const cvector& v, std::vector<cx>& r) {
            const cx ov = inner(s_out, v);
            r[0] = phase_insensitive_ ? cx{std::abs(ov) - 1.0, 0.0} : ov - 1.0;
            double leak = 0.0;
            for (int b = 0; b < n_bumper; ++b) {
                cx amp{};
                for (int c = 0; c < n; ++c) amp += rows[b][c] * v[c];
                r[1 + b] = amp;
                leak += std::norm(amp);
            }
            return state_term1(ov, phase_insensitive_) + leak;
        };
        auto record = [&](double cp, double cm) {
            info.gradient.push_back((cp - cm) / (2.0 * step));
            info.curvature.push_back((cp - 2.0 * info.base_cost + cm) / (step * step));
            if (res)
                for (std::size_t ri = 0; ri < r_plus.size(); ++ri)
                    res->jacobian[ri][param_index] = (r_plus[ri] - r_minus[ri]) / (2.0 * step);
            ++param_index;
        };
        auto eval_alpha = [&](cx alpha, std::vector<cx>& r) {
            return measure(apply_block_vec(alpha, blk.theta, p_in, false), r);
        };

        {
            const double cp = eval_alpha(blk.alpha + step, r_plus);
            const double cm = eval_alpha(blk.alpha - step, r_minus);
            record(cp, cm);
        }
        {
            const double cp = eval_alpha(blk.alpha + cx{0.0, step}, r_plus);
            const double cm = eval_alpha(blk.alpha - cx{0.0, step}, r_minus);
            record(cp, cm);
        }

        // theta entries: D and D p_in are fixed, only the diagonal changes
        const DenseGate d = displacement(n, blk.alpha);
        const cvector d_in = matvec(d.matrix, p_in);
        cvector phases(static_cast<std::size_t>(n));
        for (int m = 0; m < n; ++m) phases[m] = std::polar(1.0, blk.theta[m]);
        auto eval_theta = [&](int m, double delta, std::vector<cx>& r) {
            cvector w = d_in;
            for (int rr = 0; rr < n; ++rr) w[rr] *= phases[rr];
            w[m] *= std::polar(1.0, delta);
            return measure(adjoint_matvec(d.matrix, w), r);
        };
        for (int m = 0; m < n; ++m) {
            const double cp = eval_theta(m, step, r_plus);
            const double cm = eval_theta(m, -step, r_minus);
            record(cp, cm);
        }
    }
    return info;
}

std::vector<double> StateCost::gradient(const AnsatzParams& params, double step) const {
    return differences(params, step, nullptr).gradient;
}

GradientInfo StateCost::gradient_info(const AnsatzParams& params, double step) const {
    return differences(params, step, nullptr);
}

ResidualInfo StateCost::residual_info(const AnsatzParams& params, double step) const {
    ResidualInfo res;
    differences(params, step, &res);
    return res;
}

// ---------------------------------------------------------------------------
// GateCost

GateCost::GateCost(DenseGate target, bool phase_insensitive)
    : target_(std::move(target)), phase_insensitive_(phase_insensitive) {
    if (target_.dim() < 1) throw std::invalid_argument("GateCost: empty target");
}

double GateCost::value(const AnsatzParams& params) const {
    const int n = target_.dim();
    if (params.total_dim() != n) throw std::invalid_argument("GateCost: parameter dimension mismatch");
    const DenseGate u = ansatz_unitary(params);
    cx tr{};
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) tr += std::conj(target_.matrix(r, c)) * u.matrix(r, c);
    return gate_cost_from_trace(tr, n, phase_insensitive_);
}

double GateCost::fidelity(const AnsatzParams& params) const {
    const int n = target_.dim();
    const DenseGate u = ansatz_unitary(params);
    cx tr{};
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) tr += std::conj(target_.matrix(r, c)) * u.matrix(r, c);
    return std::abs(tr) / n;
}

// Perturbing block i changes Tr(T† B_k..B_1) = Tr(W_i B_i) with
// W_i = (B_{i-1}..B_1) T† (B_k..B_{i+1}); for theta perturbations only the
// diagonal of D W_i D† is needed.
GradientInfo GateCost::differences(const AnsatzParams& params, double step,
                                   ResidualInfo* res) const {
    const int n = target_.dim();
    const int k = params.block_count();
    if (params.total_dim() != n) throw std::invalid_argument("GateCost: parameter dimension mismatch");

    std::vector<CMatrix> block(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        block[i] = block_gate(params.blocks[i].alpha, params.blocks[i].theta).matrix;

    std::vector<CMatrix> prefix(static_cast<std::size_t>(k) + 1);  // P_i = B_i..B_1
    prefix[0] = CMatrix::identity(n);
    for (int i = 1; i <= k; ++i) prefix[i] = matmul(block[i - 1], prefix[i - 1]);

    std::vector<CMatrix> tsuffix(static_cast<std::size_t>(k) + 1);  // A_i = T† B_k..B_{i+1}
    tsuffix[k] = adjoint(target_.matrix);
    for (int i = k - 1; i >= 0; --i) tsuffix[i] = matmul(tsuffix[i + 1], block[i]);

    auto trace_of = [&](const CMatrix& w, const CMatrix& b) {
        cx tr{};
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) tr += w(r, c) * b(c, r);
        return tr;
    };
    auto residual_of = [&](cx tr) {
        return phase_insensitive_ ? cx{std::abs(tr) / n - 1.0, 0.0}
                                  : tr / static_cast<double>(n) - 1.0;
    };

    const std::size_t n_params = static_cast<std::size_t>(k) * (n + 2);
    GradientInfo info;
    {
        const cx tr = trace_of(tsuffix[k], prefix[k]);
        info.base_cost = gate_cost_from_trace(tr, n, phase_insensitive_);
        if (res) {
            res->available = true;
            res->residuals.push_back(residual_of(tr));
            res->jacobian.assign(1, std::vector<cx>(n_params));
        }
    }
    info.gradient.reserve(n_params);
    info.curvature.reserve(n_params);
    std::size_t param_index = 0;
    auto record = [&](cx trp, cx trm) {
        const double cp = gate_cost_from_trace(trp, n, phase_insensitive_);
        const double cm = gate_cost_from_trace(trm, n, phase_insensitive_);
        info.gradient.push_back((cp - cm) / (2.0 * step));
        info.curvature.push_back((cp - 2.0 * info.base_cost + cm) / (step * step));
        if (res)
            res->jacobian[0][param_index] = (residual_of(trp) - residual_of(trm)) / (2.0 * step);
        ++param_index;
    };

    for (int i = 1; i <= k; ++i) {
        const AnsatzParams::Block& blk = params.blocks[i - 1];
        const CMatrix w = matmul(prefix[i - 1], tsuffix[i]);

        auto trace_alpha = [&](cx alpha) {
            return trace_of(w, block_gate(alpha, blk.theta).matrix);
        };
        record(trace_alpha(blk.alpha + step), trace_alpha(blk.alpha - step));
        record(trace_alpha(blk.alpha + cx{0.0, step}), trace_alpha(blk.alpha - cx{0.0, step}));

        // diag(D W D†): Tr(W D† S D) = sum_m diag_m exp(i*theta_m)
        const DenseGate d = displacement(n, blk.alpha);
        const CMatrix dw = matmul(d.matrix, w);
        cvector diag(static_cast<std::size_t>(n));
        for (int r = 0; r < n; ++r) {
            cx s{};
            for (int c = 0; c < n; ++c) s += dw(r, c) * std::conj(d.matrix(r, c));
            diag[r] = s;
        }
        cx tr0{};
        for (int m = 0; m < n; ++m) tr0 += diag[m] * std::polar(1.0, blk.theta[m]);
        for (int m = 0; m < n; ++m) {
            const cx base = diag[m] * std::polar(1.0, blk.theta[m]);
            record(tr0 + base * (std::polar(1.0, step) - 1.0),
                   tr0 + base * (std::polar(1.0, -step) - 1.0));
        }
    }
    return info;
}

std::vector<double> GateCost::gradient(const AnsatzParams& params, double step) const {
    return differences(params, step, nullptr).gradient;
}

GradientInfo GateCost::gradient_info(const AnsatzParams& params, double step) const {
    return differences(params, step, nullptr);
}

ResidualInfo GateCost::residual_info(const AnsatzParams& params, double step) const {
    ResidualInfo res;
    differences(params, step, &res);
    return res;
}

// ---------------------------------------------------------------------------
// optimizer

namespace {

[[noreturn]] void throw_diverged(const char* what, int iter, const std::vector<double>& recent) {
    std::ostringstream msg;
    msg << "optimize: diverged (" << what << ") at iteration " << iter << "; recent costs:";
    for (double r : recent) msg << " " << r;
    throw std::runtime_error(msg.str());
}

// Solves (G + lambda*I) y = b for a small symmetric positive-definite G by
// Gaussian elimination with partial pivoting.
std::vector<double> solve_regularized(std::vector<std::vector<double>> g, std::vector<double> b,
                                      double lambda) {
    const std::size_t m = b.size();
    for (std::size_t i = 0; i < m; ++i) g[i][i] += lambda;
    for (std::size_t col = 0; col < m; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < m; ++r)
            if (std::abs(g[r][col]) > std::abs(g[pivot][col])) pivot = r;
        std::swap(g[col], g[pivot]);
        std::swap(b[col], b[pivot]);
        const double diag = g[col][col];
        if (diag == 0.0) continue;  // lambda keeps this from happening in practice
        for (std::size_t r = col + 1; r < m; ++r) {
            const double factor = g[r][col] / diag;
            if (factor == 0.0) continue;
            for (std::size_t c = col; c < m; ++c) g[r][c] -= factor * g[col][c];
            b[r] -= factor * b[col];
        }
    }
    std::vector<double> y(m, 0.0);
    for (std::size_t row = m; row-- > 0;) {
        double s = b[row];
        for (std::size_t c = row + 1; c < m; ++c) s -= g[row][c] * y[c];
        y[row] = g[row][row] != 0.0 ? s / g[row][row] : 0.0;
    }
    return y;
}

// Minimum-norm Gauss-Newton step for the realified residual system: the
// normal equations are solved in residual space ((2m)x(2m) with m small),
// so the cost is linear in the parameter count.
std::vector<double> gauss_newton_step(const ResidualInfo& res, double lambda) {
    const std::size_t m = res.residuals.size();
    const std::size_t p = res.jacobian.front().size();
    const std::size_t rows = 2 * m;
    std::vector<std::vector<double>> a(rows, std::vector<double>(p));
    std::vector<double> b(rows);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < p; ++j) {
            a[2 * i][j] = res.jacobian[i][j].real();
            a[2 * i + 1][j] = res.jacobian[i][j].imag();
        }
        b[2 * i] = res.residuals[i].real();
        b[2 * i + 1] = res.residuals[i].imag();
    }
    std::vector<std::vector<double>> gram(rows, std::vector<double>(rows, 0.0));
    double mean_diag = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = r; c < rows; ++c) {
            double s = 0.0;
            for (std::size_t j = 0; j < p; ++j) s += a[r][j] * a[c][j];
            gram[r][c] = s;
            gram[c][r] = s;
        }
        mean_diag += gram[r][r];
    }
    mean_diag = std::max(mean_diag / rows, 1e-300);
    const std::vector<double> y = solve_regularized(std::move(gram), std::move(b),
                                                    lambda * mean_diag);
    std::vector<double> step(p, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double yr = y[r];
        if (yr == 0.0) continue;
        for (std::size_t j = 0; j < p; ++j) step[j] += a[r][j] * yr;
    }
    return step;
}

}  // namespace

// Levenberg-Marquardt over the cost's complex residuals when the cost exposes
// them (both synthesis costs do), falling back to damped per-parameter
// curvature-scaled gradient steps otherwise or when the LM step stalls. The
// best-so-far return keeps the result monotone in the initialization cost.
OptimizeResult optimize(const CostFunction& cost, AnsatzParams init, const OptimizerConfig& config) {
    config.validate();
    const int k = init.block_count();
    const int n = init.total_dim();

    double best_cost = cost.value(init);
    if (!std::isfinite(best_cost)) throw std::runtime_error("optimize: non-finite cost at initialization");
    if (best_cost <= config.cost_tolerance) return {std::move(init), best_cost, 0};

    AnsatzParams best = init;
    std::vector<double> flat = init.flatten();
    double current_cost = best_cost;
    double damping = config.learning_rate;  // gradient-fallback damping
    double lambda = 1e-3;                   // LM regularization (relative)
    std::vector<double> recent;

    auto evaluate = [&](const std::vector<double>& point, int iter) {
        const double c = cost.value(AnsatzParams::unflatten(point, k, n));
        if (!std::isfinite(c)) throw_diverged("non-finite cost", iter, recent);
        return c;
    };

    int iter = 0;
    for (; iter < config.max_iterations;) {
        const AnsatzParams current = AnsatzParams::unflatten(flat, k, n);
        ++iter;
        bool stepped = false;

        const ResidualInfo res = cost.residual_info(current, config.gradient_step);
        if (res.available && !res.residuals.empty()) {
            for (const auto& row : res.jacobian)
                for (const cx& z : row)
                    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                        throw_diverged("non-finite jacobian", iter, recent);
            for (int attempt = 0; attempt < 12 && !stepped; ++attempt) {
                const std::vector<double> delta = gauss_newton_step(res, lambda);
                std::vector<double> trial(flat.size());
                for (std::size_t j = 0; j < flat.size(); ++j) trial[j] = flat[j] - delta[j];
                const double c = evaluate(trial, iter);
                if (c < current_cost) {
                    flat = std::move(trial);
                    current_cost = c;
                    lambda = std::max(lambda * 0.35, 1e-12);
                    stepped = true;
                } else {
                    lambda = std::min(lambda * 6.0, 1e8);
                }
            }
        }

        if (!stepped) {
            const GradientInfo info = cost.gradient_info(current, config.gradient_step);
            double curv_scale = 0.0;
            for (std::size_t j = 0; j < flat.size(); ++j) {
                if (!std::isfinite(info.gradient[j]) || !std::isfinite(info.curvature[j]))
                    throw_diverged("non-finite gradient", iter, recent);
                curv_scale = std::max(curv_scale, std::abs(info.curvature[j]));
            }
            const double curv_floor = std::max(1e-3 * curv_scale, 1e-9);
            std::vector<double> direction(flat.size());
            for (std::size_t j = 0; j < flat.size(); ++j) {
                const double denom = std::max(std::abs(info.curvature[j]), curv_floor);
                direction[j] =
                    std::clamp(info.gradient[j] / denom, -config.step_max, config.step_max);
            }
            std::vector<double> trial(flat.size());
            double trial_damping = damping;
            double c = current_cost;
            bool improved = false;
            for (int attempt = 0; attempt < 10; ++attempt) {
                for (std::size_t j = 0; j < flat.size(); ++j)
                    trial[j] = flat[j] - trial_damping * direction[j];
                c = evaluate(trial, iter);
                if (c < current_cost) {
                    improved = true;
                    break;
                }
                trial_damping *= config.step_shrink;
            }
            if (improved) {
                // line-searched momentum: extrapolate along the accepted
                // displacement with doubling length while the cost drops
                std::vector<double> stretch(flat.size());
                for (std::size_t j = 0; j < flat.size(); ++j) stretch[j] = trial[j] - flat[j];
                for (int doubling = 0; doubling < 30; ++doubling) {
                    std::vector<double> ext(flat.size());
                    for (std::size_t j = 0; j < flat.size(); ++j) ext[j] = trial[j] + stretch[j];
                    const double ce = cost.value(AnsatzParams::unflatten(ext, k, n));
                    if (!std::isfinite(ce) || ce >= c) break;
                    trial = std::move(ext);
                    c = ce;
                    for (double& s : stretch) s *= 2.0;
                }
            }
            // accept the final trial either way; best-so-far stays monotone
            flat = trial;
            current_cost = c;
            damping = improved ? std::min(trial_damping * config.step_grow, 1.0)
                               : std::max(trial_damping, config.step_min);
        }

        recent.push_back(current_cost);
        if (recent.size() > 8) recent.erase(recent.begin());
        if (current_cost < best_cost) {
            best_cost = current_cost;
            best = AnsatzParams::unflatten(flat, k, n);
        }
        if (best_cost <= config.cost_tolerance) break;
    }
    return {std::move(best), best_cost, iter};
}

std::pair<AnsatzParams, SynthesisReport> synthesize_state(const StateVector& target, int k,
                                                          const OptimizerConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    StateCost cost(target, config.phase_insensitive);
    AnsatzParams init = AnsatzParams::seeded_init(k, target.spec().total_dim(), config.seed,
                                                  config.init_alpha_radius);
    // With theta = 0 every block is exactly the identity (D† 1 D = 1), which
    // strands mid-spectrum targets in an exponentially flat region. Set the
    // first block to the rotate-by-pi displacement sandwich that sends |0> to
    // the coherent state at the target's mean level: D(-a)† S(pi*n) D(-a)|0>
    // = |2a>.
    {
        double mean_level = 0.0;
        for (std::size_t lev = 0; lev < target.amplitudes().size(); ++lev)
            mean_level += static_cast<double>(lev) * std::norm(target.amplitudes()[lev]);
        const double beta = std::sqrt(mean_level);
        if (beta > 0.5) {
            init.blocks[0].alpha = cx{-0.5 * beta, 0.0};
            for (std::size_t m = 0; m < init.blocks[0].theta.size(); ++m)
                init.blocks[0].theta[m] = M_PI * static_cast<double>(m);
        }
    }
    OptimizeResult res = optimize(cost, std::move(init), config);
    SynthesisReport report;
    report.final_cost = res.cost;
    report.iterations = res.iterations;
    report.fidelity = cost.fidelity(res.params);
    report.bumper_leakage = cost.leakage(res.params);
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(res.params), report};
}

std::pair<AnsatzParams, SynthesisReport> synthesize_gate(const DenseGate& target, int k,
                                                         const OptimizerConfig& config) {
    const auto start = std::chrono::steady_clock::now();
    GateCost cost(target, config.phase_insensitive);
    AnsatzParams init =
        AnsatzParams::seeded_init(k, target.dim(), config.seed, config.init_alpha_radius);
    OptimizeResult res = optimize(cost, std::move(init), config);
    SynthesisReport report;
    report.final_cost = res.cost;
    report.iterations = res.iterations;
    report.fidelity = cost.fidelity(res.params);
    report.bumper_leakage = 0.0;
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(res.params), report};
}

double gate_bumper_leakage(const DenseGate& gate, int n_logical) {
    double worst = 0.0;
    for (int c = 0; c < n_logical; ++c) {
        double mass = 0.0;
        for (int r = n_logical; r < gate.dim(); ++r) mass += std::norm(gate.matrix(r, c));
        worst = std::max(worst, mass);
    }
    return worst;
}

}  // namespace qsim
