#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsim/errors.hpp"
#include "qsim/model_params.hpp"
#include "qsim/optimizer.hpp"

namespace qsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Section-qualified key/value pairs from an INI-style file, with the source
// line of each key for diagnostics.
struct RawConfig {
    std::map<std::string, std::string> values;  // "section.key" -> value
    std::map<std::string, int> lines;

    void set(const std::string& key, const std::string& value, int line = 0);
};

RawConfig parse_ini(const std::string& text);          // throws ConfigError with line numbers
RawConfig parse_ini_file(const std::string& path);

// Fully resolved experiment description. Every numeric field is validated
// against the downstream module preconditions before any run starts.
struct ExperimentConfig {
    std::string command;  // synthesize-gate | synthesize-state | ground-state |
                          // lattice-evolve | oracle-compare

    // [qudit]
    int n_logical = 16;
    int n_bumper = 4;
    double mass = 0.0;  // 0: derive sqrt(mu2 + 2d)

    // [model]
    ModelParams model;

    // [schedule]
    double total_time = 2.0;
    double dt = 1e-3;
    int record_stride = 0;
    int phase_a_steps = -1;  // -1: total_time/dt
    int phase_b_steps = -1;

    // [synthesis]
    std::string target = "gaussian";  // gaussian | fourier | fourier-sym
    int blocks = 0;                   // 0: default_block_count(N)
    OptimizerConfig optimizer;

    // [io]
    std::string out_dir = "out";
    std::string cache_dir;         // default: <out_dir>/cache
    std::string cache_search_dir;  // optional read-only extra cache location
    std::uint64_t seed = 1;

    // [flags]
    bool simultaneous_ramp = false;
    bool synthesized_fourier = false;
    bool phase_insensitive_cost = false;
    bool periodic_boundary = false;
    bool synthesized_init = false;

    double resolved_mass() const { return mass > 0.0 ? mass : model.default_mass(); }
    std::string resolved_cache_dir() const { return cache_dir.empty() ? out_dir + "/cache" : cache_dir; }
    int resolved_blocks() const;
};

// Binds and validates; throws ConfigError listing every violated field.
ExperimentConfig bind_config(const RawConfig& raw);

// --set section.key=value
void apply_override(RawConfig& raw, const std::string& assignment);

}  // namespace qsim
