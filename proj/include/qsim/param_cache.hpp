#pragma once

#include <optional>
#include <string>

#include "qsim/synthesis.hpp"

namespace qsim {

// One JSON document per synthesis result, content-addressed by the key tuple.
// A tolerance change produces a different key, so stale entries are never
// picked up.
struct CacheKey {
    std::string kind;  // e.g. "gaussian-state", "fourier-gate"
    int n_logical = 0;
    int n_bumper = 0;
    int blocks = 0;
    std::uint64_t seed = 0;
    double cost_tolerance = 0.0;

    std::string filename() const;
};

struct CacheEntry {
    CacheKey key;
    AnsatzParams params;
    double final_cost = 0.0;
    double fidelity = 0.0;
    double leakage = 0.0;
    int iterations = 0;
};

std::optional<CacheEntry> load_cache(const std::string& dir, const CacheKey& key);
void store_cache(const std::string& dir, const CacheEntry& entry);

}  // namespace qsim
