#pragma once

#include <optional>
#include <vector>

#include "qsim/gates.hpp"
#include "qsim/model_params.hpp"
#include "qsim/state_vector.hpp"

namespace qsim {

struct Schedule {
    double total_time = 0.0;
    double dt = 0.0;
    int steps = 0;  // steps*dt == total_time within 1e-12 (relative)

    // steps = round(T/dt), validated. T = 0 gives a zero-step schedule.
    static Schedule from_time_step(double total_time, double dt);
    static Schedule from_steps(int steps, double dt);
};

// g_s = final*s/K for s in [0, K]; throws on s out of range.
double ramp_linear(double final_value, int s, int steps);

struct TrajectorySample {
    int step = 0;
    double time = 0.0;
    std::vector<std::vector<double>> marginals;  // per site, length total_dim
    std::vector<double> phi_mean;
    std::vector<double> phi_second;
    std::vector<double> leakage;
    double norm = 0.0;
};

struct TrajectoryRecord {
    std::vector<TrajectorySample> samples;
};

struct EvolutionOptions {
    int record_stride = 0;           // 0: record only the final state
    bool simultaneous_ramp = false;  // ramp g and f together over one schedule
    bool periodic_boundary = false;
    double norm_drift_limit = 1e-6;  // integrity threshold
    // Synthesized replacement for the kinetic sandwich transform (embedded to
    // total_dim). Default: the exact transform.
    std::optional<DenseGate> fourier_override;
};

// One site-local Trotter step: embedded V_phi4(g_s), V_phi2, kinetic, in that
// order, applied at `site`.
void trotter_step_site(StateVector& state, int site, double g_s, const ModelParams& params,
                       double dt);

// Coupling factor exp(-i*dt*(-f_s)*phi_j*phi_k) on every adjacent pair (open
// chain; optionally the wrap-around pair). The Hamiltonian couples as
// -f*phi*phi, hence the sign passed to the phase function.
void trotter_step_coupling(StateVector& state, double f_s, const ModelParams& params, double dt,
                           bool periodic = false);

// Precomputes the fixed per-run gates (embedded V_phi2 and kinetic); only the
// quartic diagonal depends on the ramped coupling.
class SiteStepper {
public:
    SiteStepper(const QuditSpec& spec, const ModelParams& params, double dt,
                const std::optional<DenseGate>& fourier_override = std::nullopt);
    void apply(StateVector& state, int site, double g_s) const;

private:
    QuditSpec spec_;
    double dt_;
    double delta_phi_;
    DiagonalGate v2_;          // embedded
    DenseGate kinetic_;        // embedded, exact path
    bool use_override_ = false;
    DenseGate transform_;      // embedded synthesized transform
    DenseGate transform_adj_;
    DiagonalGate kin_diag_;    // embedded momentum diagonal for the override path
};

struct EvolutionResult {
    StateVector state;
    TrajectoryRecord trajectory;
};

// Ground-state preparation phase: K site-local steps with g_s ramped
// linearly to params.g, starting from `init` (the harmonic ground state).
EvolutionResult prepare_ground_state_single(const QuditSpec& spec, const ModelParams& params,
                                            const Schedule& schedule, const StateVector& init,
                                            const EvolutionOptions& options = {});

// Full lattice run: phase A (per-site g ramp, f = 0) over `phase_a`, then
// phase B (full g, f_s ramped) over `phase_b`. With simultaneous_ramp both
// couplings ramp together over `phase_a` and `phase_b` is unused.
EvolutionResult prepare_and_evolve_lattice(const QuditSpec& spec, const ModelParams& params,
                                           const Schedule& phase_a, const Schedule& phase_b,
                                           const StateVector& init,
                                           const EvolutionOptions& options = {});

}  // namespace qsim
