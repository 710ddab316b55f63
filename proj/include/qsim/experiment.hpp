#pragma once

#include <string>

#include "qsim/config.hpp"

namespace qsim {

// Executes one experiment, writing its artifacts under cfg.out_dir:
// summary.json always; trajectory.tsv and distribution.tsv for evolution
// commands; cache entries for synthesis. Throws ConfigError / IntegrityError;
// the CLI maps those to exit codes 2 / 3.
void run_experiment(const ExperimentConfig& cfg);

}  // namespace qsim
