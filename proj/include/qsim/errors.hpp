#pragma once

#include <stdexcept>

namespace qsim {

// Mid-run invariant violation (norm drift, numerical failure): exit code 3.
struct IntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qsim
