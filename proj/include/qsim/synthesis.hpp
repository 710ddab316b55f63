#pragma once

#include <functional>
#include <span>
#include <vector>

#include "qsim/dense.hpp"
#include "qsim/gates.hpp"
#include "qsim/optimizer.hpp"
#include "qsim/state_vector.hpp"

namespace qsim {

// Variational ansatz U = B_k ... B_1 with B = D(alpha)† S(theta) D(alpha),
// S the per-level phase diagonal diag(exp(i*theta_n)) over all total_dim
// levels (bumpers included).
struct AnsatzParams {
    struct Block {
        cx alpha;
        std::vector<double> theta;
    };
    std::vector<Block> blocks;

    int block_count() const { return static_cast<int>(blocks.size()); }
    int total_dim() const { return blocks.empty() ? 0 : static_cast<int>(blocks.front().theta.size()); }

    // theta = 0, alpha uniform on the |alpha| <= radius disk, seeded.
    static AnsatzParams seeded_init(int k, int total_dim, std::uint64_t seed, double alpha_radius);

    // Flat real layout per block: Re alpha, Im alpha, theta[0..n). Length k*(n+2).
    std::vector<double> flatten() const;
    static AnsatzParams unflatten(std::span<const double> flat, int k, int total_dim);
};

// Default block count: 12 for N <= 16, 2N/3 otherwise.
int default_block_count(int n_logical);

DenseGate block_gate(cx alpha, std::span<const double> theta);
DenseGate ansatz_unitary(const AnsatzParams& params);
// U|v> (or U†|v>) without forming the dense product.
cvector ansatz_apply(const AnsatzParams& params, cvector v, bool adjoint = false);

// L_state = |<target|U|0> - 1|^2 + ||P_b U|0>||^2  (phase-sensitive default);
// phase-insensitive variant: 1 - |<target|U|0>|^2 + ||P_b U|0>||^2.
double cost_state(const AnsatzParams& params, const StateVector& target,
                  bool phase_insensitive = false);
// L_g = |Tr(target† U)/(N+m) - 1|^2; phase-insensitive: 1 - |Tr|/(N+m).
double cost_gate(const AnsatzParams& params, const DenseGate& target,
                 bool phase_insensitive = false);

// Central finite differences over every flattened parameter.
std::vector<double> finite_difference_gradient(
    const std::function<double(const AnsatzParams&)>& cost, const AnsatzParams& params,
    double step);

// Central differences of the cost at +/- step around the current point:
// gradient (c+ - c-)/(2 step) and diagonal curvature (c+ - 2 c0 + c-)/step^2.
struct GradientInfo {
    double base_cost = 0.0;
    std::vector<double> gradient;
    std::vector<double> curvature;
};

// Residual decomposition cost = sum_i |r_i|^2 (exact for the phase-sensitive
// costs; for the phase-insensitive variants the overlap residual is
// |ov| - 1, which shares the minimizers). jacobian[i][j] = d r_i / d param_j
// by the same central differences.
struct ResidualInfo {
    bool available = false;
    std::vector<cx> residuals;
    std::vector<std::vector<cx>> jacobian;
};

// Cost with overridable derivative evaluation. The synthesis costs override
// the finite-difference loop with a cached-prefix evaluation of the same
// central differences.
class CostFunction {
public:
    virtual ~CostFunction() = default;
    virtual double value(const AnsatzParams& params) const = 0;
    virtual std::vector<double> gradient(const AnsatzParams& params, double step) const;
    virtual GradientInfo gradient_info(const AnsatzParams& params, double step) const;
    // Costs without residual structure return {available = false}.
    virtual ResidualInfo residual_info(const AnsatzParams& params, double step) const;
};

class StateCost final : public CostFunction {
public:
    StateCost(StateVector target, bool phase_insensitive = false);
    double value(const AnsatzParams& params) const override;
    std::vector<double> gradient(const AnsatzParams& params, double step) const override;
    GradientInfo gradient_info(const AnsatzParams& params, double step) const override;
    ResidualInfo residual_info(const AnsatzParams& params, double step) const override;
    double fidelity(const AnsatzParams& params) const;  // |<target|U|0>|^2
    double leakage(const AnsatzParams& params) const;
    const StateVector& target() const { return target_; }

private:
    GradientInfo differences(const AnsatzParams& params, double step, ResidualInfo* res) const;

    StateVector target_;
    bool phase_insensitive_;
};

class GateCost final : public CostFunction {
public:
    GateCost(DenseGate target, bool phase_insensitive = false);
    double value(const AnsatzParams& params) const override;
    std::vector<double> gradient(const AnsatzParams& params, double step) const override;
    GradientInfo gradient_info(const AnsatzParams& params, double step) const override;
    ResidualInfo residual_info(const AnsatzParams& params, double step) const override;
    double fidelity(const AnsatzParams& params) const;  // |Tr(target† U)|/(N+m)
    const DenseGate& target() const { return target_; }

private:
    GradientInfo differences(const AnsatzParams& params, double step, ResidualInfo* res) const;

    DenseGate target_;
    bool phase_insensitive_;
};

struct OptimizeResult {
    AnsatzParams params;
    double cost = 0.0;
    int iterations = 0;
};

// Levenberg-Marquardt over the cost's residual decomposition when available,
// with a damped curvature-scaled gradient fallback, and a best-so-far return
// (never above the initialization cost). Throws on non-finite cost or
// derivatives, with the recent cost trace in the message.
OptimizeResult optimize(const CostFunction& cost, AnsatzParams init, const OptimizerConfig& config);

std::pair<AnsatzParams, SynthesisReport> synthesize_state(const StateVector& target, int k,
                                                          const OptimizerConfig& config);
std::pair<AnsatzParams, SynthesisReport> synthesize_gate(const DenseGate& target, int k,
                                                         const OptimizerConfig& config);

// Worst-case bumper mass created by the gate on any logical basis column.
double gate_bumper_leakage(const DenseGate& gate, int n_logical);

}  // namespace qsim
