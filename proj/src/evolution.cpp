#include "qsim/evolution.hpp"

#include <cmath>
#include <stdexcept>

#include "qsim/errors.hpp"
#include "qsim/gate_factory.hpp"

namespace qsim {

Schedule Schedule::from_time_step(double total_time, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("Schedule: dt must be > 0");
    if (total_time < 0.0) throw std::invalid_argument("Schedule: total_time must be >= 0");
    Schedule s;
    s.total_time = total_time;
    s.dt = dt;
    s.steps = static_cast<int>(std::llround(total_time / dt));
    const double err = std::abs(s.steps * dt - total_time);
    if (err > 1e-12 * std::max(1.0, std::abs(total_time)))
        throw std::invalid_argument("Schedule: total_time is not an integer number of steps");
    if (s.steps < 1 && total_time > 0.0)
        throw std::invalid_argument("Schedule: steps must be >= 1 for total_time > 0");
    return s;
}

Schedule Schedule::from_steps(int steps, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("Schedule: dt must be > 0");
    if (steps < 0) throw std::invalid_argument("Schedule: steps must be >= 0");
    Schedule s;
    s.steps = steps;
    s.dt = dt;
    s.total_time = steps * dt;
    return s;
}

double ramp_linear(double final_value, int s, int steps) {
    if (s < 0 || s > steps) throw std::out_of_range("ramp_linear: s out of [0, K]");
    if (steps == 0) return final_value;
    return final_value * static_cast<double>(s) / static_cast<double>(steps);
}

SiteStepper::SiteStepper(const QuditSpec& spec, const ModelParams& params, double dt,
                         const std::optional<DenseGate>& fourier_override)
    : spec_(spec), dt_(dt), delta_phi_(spec.delta_phi) {
    params.validate();
    v2_ = embed_logical(v_phi2_diag(spec.n_logical, params.mu2, params.d, delta_phi_, dt),
                        spec.n_bumper);
    kinetic_ = embed_logical(kinetic_step(spec.n_logical, delta_phi_, spec.mass, dt), spec.n_bumper);
    if (fourier_override) {
        if (fourier_override->dim() != spec.total_dim())
            throw std::invalid_argument("SiteStepper: fourier override dimension mismatch");
        use_override_ = true;
        transform_ = *fourier_override;
        transform_adj_ = DenseGate{adjoint(transform_.matrix)};
        DiagonalGate kd;
        kd.phases.resize(static_cast<std::size_t>(spec.n_logical));
        const double c = spec.grid_center();
        const double dpi = spec.delta_pi();
        for (int n = 0; n < spec.n_logical; ++n) {
            const double pi_n = (n - c) * dpi;
            kd.phases[n] = std::polar(1.0, -0.5 * dt * pi_n * pi_n);
        }
        kin_diag_ = embed_logical(kd, spec.n_bumper);
    }
}

void SiteStepper::apply(StateVector& state, int site, double g_s) const {
    const DiagonalGate v4 =
        embed_logical(v_phi4_diag(spec_.n_logical, g_s, delta_phi_, dt_), spec_.n_bumper);
    state.apply_single_site(v4, site);
    state.apply_single_site(v2_, site);
    if (use_override_) {
        // F * diag * F† with the synthesized transform
        state.apply_single_site(transform_adj_, site);
        state.apply_single_site(kin_diag_, site);
        state.apply_single_site(transform_, site);
    } else {
        state.apply_single_site(kinetic_, site);
    }
}

void trotter_step_site(StateVector& state, int site, double g_s, const ModelParams& params,
                       double dt) {
    SiteStepper(state.spec(), params, dt).apply(state, site, g_s);
}

void trotter_step_coupling(StateVector& state, double f_s, const ModelParams& params, double dt,
                           bool periodic) {
    if (state.sites() < 2) throw std::invalid_argument("trotter_step_coupling: needs L >= 2");
    (void)params;
    if (f_s == 0.0) return;
    // H couples as -f*phi_j*phi_k, so the step factor carries the flipped sign
    const auto phase = coupling_phase_fn(state.spec(), -f_s, dt);
    for (int j = 0; j + 1 < state.sites(); ++j) state.apply_two_site_diagonal(phase, j, j + 1);
    if (periodic && state.sites() > 2)
        state.apply_two_site_diagonal(phase, state.sites() - 1, 0);
}

namespace {

TrajectorySample sample_state(const StateVector& state, int step, double time) {
    TrajectorySample s;
    s.step = step;
    s.time = time;
    s.norm = state.norm();
    for (int j = 0; j < state.sites(); ++j) {
        s.marginals.push_back(state.marginal_probabilities(j));
        const FieldMoments fm = state.field_expectations(j);
        s.phi_mean.push_back(fm.mean);
        s.phi_second.push_back(fm.second);
        s.leakage.push_back(state.bumper_leakage(j));
    }
    return s;
}

void check_norm(const StateVector& state, const EvolutionOptions& options, int step) {
    if (std::abs(state.norm() - 1.0) > options.norm_drift_limit)
        throw IntegrityError("evolution: norm drift beyond " +
                             std::to_string(options.norm_drift_limit) + " at step " +
                             std::to_string(step));
}

// Runs `steps` Trotter steps; g and f ramp from their start fractions to the
// end fractions of the final values (phase A: g 0->1, f 0; phase B: g 1->1,
// f 0->1; simultaneous: both 0->1).
void run_steps(StateVector& state, const SiteStepper& stepper, const ModelParams& params,
               const Schedule& schedule, bool ramp_g, bool ramp_f, bool couple,
               const EvolutionOptions& options, TrajectoryRecord& record, double time_offset,
               int step_offset) {
    for (int s = 1; s <= schedule.steps; ++s) {
        const double g_s = ramp_g ? ramp_linear(params.g, s, schedule.steps) : params.g;
        for (int j = 0; j < state.sites(); ++j) stepper.apply(state, j, g_s);
        if (couple && state.sites() >= 2) {
            const double f_s = ramp_f ? ramp_linear(params.f, s, schedule.steps) : params.f;
            trotter_step_coupling(state, f_s, params, schedule.dt, options.periodic_boundary);
        }
        const bool last = s == schedule.steps;
        if ((options.record_stride > 0 && s % options.record_stride == 0) || last) {
            record.samples.push_back(
                sample_state(state, step_offset + s, time_offset + s * schedule.dt));
            check_norm(state, options, step_offset + s);
        }
    }
}

}  // namespace

EvolutionResult prepare_ground_state_single(const QuditSpec& spec, const ModelParams& params,
                                            const Schedule& schedule, const StateVector& init,
                                            const EvolutionOptions& options) {
    params.validate();
    EvolutionResult res{init, {}};
    check_norm(res.state, options, 0);
    res.trajectory.samples.push_back(sample_state(res.state, 0, 0.0));
    const SiteStepper stepper(spec, params, schedule.dt, options.fourier_override);
    run_steps(res.state, stepper, params, schedule, /*ramp_g=*/true, /*ramp_f=*/false,
              /*couple=*/false, options, res.trajectory, 0.0, 0);
    return res;
}

EvolutionResult prepare_and_evolve_lattice(const QuditSpec& spec, const ModelParams& params,
                                           const Schedule& phase_a, const Schedule& phase_b,
                                           const StateVector& init,
                                           const EvolutionOptions& options) {
    params.validate();
    if (init.sites() < 2) throw std::invalid_argument("prepare_and_evolve_lattice: needs L >= 2");
    EvolutionResult res{init, {}};
    check_norm(res.state, options, 0);
    res.trajectory.samples.push_back(sample_state(res.state, 0, 0.0));
    const SiteStepper stepper(spec, params, phase_a.dt, options.fourier_override);

    if (options.simultaneous_ramp) {
        run_steps(res.state, stepper, params, phase_a, /*ramp_g=*/true, /*ramp_f=*/true,
                  /*couple=*/true, options, res.trajectory, 0.0, 0);
        return res;
    }

    run_steps(res.state, stepper, params, phase_a, /*ramp_g=*/true, /*ramp_f=*/false,
              /*couple=*/false, options, res.trajectory, 0.0, 0);
    if (phase_b.dt != phase_a.dt) {
        const SiteStepper stepper_b(spec, params, phase_b.dt, options.fourier_override);
        run_steps(res.state, stepper_b, params, phase_b, /*ramp_g=*/false, /*ramp_f=*/true,
                  /*couple=*/true, options, res.trajectory, phase_a.total_time, phase_a.steps);
    } else {
        run_steps(res.state, stepper, params, phase_b, /*ramp_g=*/false, /*ramp_f=*/true,
                  /*couple=*/true, options, res.trajectory, phase_a.total_time, phase_a.steps);
    }
    return res;
}

}  // namespace qsim
