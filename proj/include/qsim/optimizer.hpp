#pragma once

#include <cstdint>
#include <stdexcept>

namespace qsim {

// Settings for the gradient descent with per-parameter curvature-scaled
// steps. Each parameter moves by gradient/|curvature| (clamped to step_max),
// both taken from the same central differences; a global damping factor is
// backtracked on cost increase and regrown on success.
struct OptimizerConfig {
    int max_iterations = 2000;
    double cost_tolerance = 1e-8;
    double gradient_step = 1e-5;   // central finite-difference step
    double learning_rate = 1.0;    // initial damping on the scaled steps
    double step_grow = 1.5;        // damping regrowth after an accepted step
    double step_shrink = 0.5;      // backtracking factor
    double step_max = 0.5;         // per-parameter step cap
    double step_min = 1e-6;        // damping floor
    double init_alpha_radius = 0.5;  // |alpha| disk for the seeded initialization
    std::uint64_t seed = 1;
    bool phase_insensitive = false;  // 1-|ov|^2 / 1-|Tr|/n variants instead of the defaults

    void validate() const {
        if (max_iterations < 0) throw std::invalid_argument("OptimizerConfig: max_iterations < 0");
        if (!(cost_tolerance > 0.0)) throw std::invalid_argument("OptimizerConfig: cost_tolerance must be > 0");
        if (!(gradient_step > 0.0)) throw std::invalid_argument("OptimizerConfig: gradient_step must be > 0");
        if (!(learning_rate > 0.0)) throw std::invalid_argument("OptimizerConfig: learning_rate must be > 0");
        if (!(step_grow > 1.0)) throw std::invalid_argument("OptimizerConfig: step_grow must be > 1");
        if (!(step_shrink > 0.0 && step_shrink < 1.0))
            throw std::invalid_argument("OptimizerConfig: step_shrink must be in (0,1)");
    }
};

struct SynthesisReport {
    double final_cost = 0.0;
    int iterations = 0;
    double fidelity = 0.0;
    double bumper_leakage = 0.0;  // state synthesis only; 0 for gate synthesis
    double wall_seconds = 0.0;
};

}  // namespace qsim
