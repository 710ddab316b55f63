#include "qsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "qsim/synthesis.hpp"

namespace qsim {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "experiment.command",
        "qudit.n_logical",
        "qudit.n_bumper",
        "qudit.mass",
        "model.mu2",
        "model.g",
        "model.f",
        "model.d",
        "model.sites",
        "schedule.total_time",
        "schedule.dt",
        "schedule.record_stride",
        "schedule.phase_a_steps",
        "schedule.phase_b_steps",
        "synthesis.target",
        "synthesis.blocks",
        "synthesis.max_iterations",
        "synthesis.cost_tolerance",
        "synthesis.gradient_step",
        "synthesis.learning_rate",
        "io.out_dir",
        "io.cache_dir",
        "io.cache_search_dir",
        "io.seed",
        "flags.simultaneous_ramp",
        "flags.synthesized_fourier",
        "flags.phase_insensitive_cost",
        "flags.periodic_boundary",
        "flags.synthesized_init",
    };
    return keys;
}

class Binder {
public:
    explicit Binder(const RawConfig& raw) : raw_(raw) {}

    bool has(const std::string& key) const { return raw_.values.count(key) > 0; }

    template <typename Fn>
    void field(const std::string& key, Fn&& parse) {
        auto it = raw_.values.find(key);
        if (it == raw_.values.end()) return;
        try {
            parse(it->second);
        } catch (const std::exception& e) {
            fail(key, e.what());
        }
    }

    void fail(const std::string& key, const std::string& why) {
        std::ostringstream msg;
        msg << key;
        auto line = raw_.lines.find(key);
        if (line != raw_.lines.end() && line->second > 0) msg << " (line " << line->second << ")";
        msg << ": " << why;
        errors_.push_back(msg.str());
    }

    void finish(const std::string& context) const {
        if (errors_.empty()) return;
        std::ostringstream msg;
        msg << context << ":";
        for (const std::string& e : errors_) msg << "\n  " << e;
        throw ConfigError(msg.str());
    }

private:
    const RawConfig& raw_;
    std::vector<std::string> errors_;
};

int parse_int(const std::string& v) {
    std::size_t pos = 0;
    const int out = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("not an integer: '" + v + "'");
    return out;
}

std::uint64_t parse_u64(const std::string& v) {
    std::size_t pos = 0;
    const unsigned long long out = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("not an unsigned integer: '" + v + "'");
    return out;
}

double parse_double(const std::string& v) {
    std::size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("not a number: '" + v + "'");
    return out;
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("not a boolean: '" + v + "'");
}

}  // namespace

void RawConfig::set(const std::string& key, const std::string& value, int line) {
    values[key] = value;
    lines[key] = line;
}

RawConfig parse_ini(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
        if (section.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": key outside any section");
        raw.set(section + "." + key, value, lineno);
    }
    return raw;
}

RawConfig parse_ini_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_ini(text.str());
}

void apply_override(RawConfig& raw, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override must be section.key=value: '" + assignment + "'");
    const std::string key = trim(assignment.substr(0, eq));
    if (key.find('.') == std::string::npos)
        throw ConfigError("override key must be section-qualified: '" + key + "'");
    raw.set(key, trim(assignment.substr(eq + 1)), 0);
}

int ExperimentConfig::resolved_blocks() const {
    return blocks > 0 ? blocks : default_block_count(n_logical);
}

ExperimentConfig bind_config(const RawConfig& raw) {
    Binder bind(raw);
    for (const auto& [key, value] : raw.values) {
        (void)value;
        if (!known_keys().count(key)) bind.fail(key, "unknown key");
    }

    ExperimentConfig cfg;
    bind.field("experiment.command", [&](const std::string& v) { cfg.command = v; });
    bind.field("qudit.n_logical", [&](const std::string& v) { cfg.n_logical = parse_int(v); });
    bind.field("qudit.n_bumper", [&](const std::string& v) { cfg.n_bumper = parse_int(v); });
    bind.field("qudit.mass", [&](const std::string& v) { cfg.mass = parse_double(v); });
    bind.field("model.mu2", [&](const std::string& v) { cfg.model.mu2 = parse_double(v); });
    bind.field("model.g", [&](const std::string& v) { cfg.model.g = parse_double(v); });
    bind.field("model.f", [&](const std::string& v) { cfg.model.f = parse_double(v); });
    bind.field("model.d", [&](const std::string& v) { cfg.model.d = parse_int(v); });
    bind.field("model.sites", [&](const std::string& v) { cfg.model.sites = parse_int(v); });
    bind.field("schedule.total_time", [&](const std::string& v) { cfg.total_time = parse_double(v); });
    bind.field("schedule.dt", [&](const std::string& v) { cfg.dt = parse_double(v); });
    bind.field("schedule.record_stride",
               [&](const std::string& v) { cfg.record_stride = parse_int(v); });
    bind.field("schedule.phase_a_steps",
               [&](const std::string& v) { cfg.phase_a_steps = parse_int(v); });
    bind.field("schedule.phase_b_steps",
               [&](const std::string& v) { cfg.phase_b_steps = parse_int(v); });
    bind.field("synthesis.target", [&](const std::string& v) { cfg.target = v; });
    bind.field("synthesis.blocks", [&](const std::string& v) { cfg.blocks = parse_int(v); });
    bind.field("synthesis.max_iterations",
               [&](const std::string& v) { cfg.optimizer.max_iterations = parse_int(v); });
    bind.field("synthesis.cost_tolerance",
               [&](const std::string& v) { cfg.optimizer.cost_tolerance = parse_double(v); });
    bind.field("synthesis.gradient_step",
               [&](const std::string& v) { cfg.optimizer.gradient_step = parse_double(v); });
    bind.field("synthesis.learning_rate",
               [&](const std::string& v) { cfg.optimizer.learning_rate = parse_double(v); });
    bind.field("io.out_dir", [&](const std::string& v) { cfg.out_dir = v; });
    bind.field("io.cache_dir", [&](const std::string& v) { cfg.cache_dir = v; });
    bind.field("io.cache_search_dir", [&](const std::string& v) { cfg.cache_search_dir = v; });
    bind.field("io.seed", [&](const std::string& v) { cfg.seed = parse_u64(v); });
    bind.field("flags.simultaneous_ramp",
               [&](const std::string& v) { cfg.simultaneous_ramp = parse_bool(v); });
    bind.field("flags.synthesized_fourier",
               [&](const std::string& v) { cfg.synthesized_fourier = parse_bool(v); });
    bind.field("flags.phase_insensitive_cost",
               [&](const std::string& v) { cfg.phase_insensitive_cost = parse_bool(v); });
    bind.field("flags.periodic_boundary",
               [&](const std::string& v) { cfg.periodic_boundary = parse_bool(v); });
    bind.field("flags.synthesized_init",
               [&](const std::string& v) { cfg.synthesized_init = parse_bool(v); });

    // precondition checks for every downstream module
    static const std::set<std::string> commands = {"synthesize-gate", "synthesize-state",
                                                   "ground-state", "lattice-evolve",
                                                   "oracle-compare"};
    if (!commands.count(cfg.command))
        bind.fail("experiment.command", "must be one of synthesize-gate, synthesize-state, "
                                        "ground-state, lattice-evolve, oracle-compare");
    if (cfg.n_logical < 2) bind.fail("qudit.n_logical", "must be >= 2");
    if (cfg.n_bumper < 0) bind.fail("qudit.n_bumper", "must be >= 0");
    if (cfg.mass < 0.0) bind.fail("qudit.mass", "must be >= 0 (0 derives sqrt(mu2+2d))");
    if (cfg.model.sites < 1) bind.fail("model.sites", "must be >= 1");
    if (cfg.model.d < 1) bind.fail("model.d", "must be >= 1");
    if (cfg.model.g < 0.0) bind.fail("model.g", "must be >= 0");
    if (!(cfg.model.mu2 + 2.0 * cfg.model.d > 0.0))
        bind.fail("model.mu2", "mu2 + 2d must be > 0 (no stable harmonic basis)");
    if (!(cfg.dt > 0.0)) bind.fail("schedule.dt", "must be > 0");
    if (cfg.total_time < 0.0) bind.fail("schedule.total_time", "must be >= 0");
    if (cfg.total_time > 0.0) {
        const double steps = cfg.total_time / cfg.dt;
        if (std::abs(steps - std::llround(steps)) > 1e-9)
            bind.fail("schedule.total_time", "must be an integer multiple of dt");
    }
    if (cfg.record_stride < 0) bind.fail("schedule.record_stride", "must be >= 0");
    if (cfg.phase_a_steps < -1) bind.fail("schedule.phase_a_steps", "must be >= 0 (or -1 to derive)");
    if (cfg.phase_b_steps < -1) bind.fail("schedule.phase_b_steps", "must be >= 0 (or -1 to derive)");
    if (cfg.blocks < 0) bind.fail("synthesis.blocks", "must be >= 1 (or 0 for the default)");
    if (cfg.optimizer.max_iterations < 0) bind.fail("synthesis.max_iterations", "must be >= 0");
    if (!(cfg.optimizer.cost_tolerance > 0.0)) bind.fail("synthesis.cost_tolerance", "must be > 0");
    if (!(cfg.optimizer.gradient_step > 0.0)) bind.fail("synthesis.gradient_step", "must be > 0");
    if (!(cfg.optimizer.learning_rate > 0.0)) bind.fail("synthesis.learning_rate", "must be > 0");
    if (cfg.out_dir.empty()) bind.fail("io.out_dir", "must not be empty");
    static const std::set<std::string> targets = {"gaussian", "fourier", "fourier-sym"};
    if (!targets.count(cfg.target))
        bind.fail("synthesis.target", "must be one of gaussian, fourier, fourier-sym");
    if (cfg.command == "lattice-evolve" && cfg.model.sites < 2)
        bind.fail("model.sites", "lattice-evolve needs sites >= 2");
    if (cfg.command == "oracle-compare" && cfg.model.sites != 1)
        bind.fail("model.sites", "oracle-compare runs on a single qudit (sites = 1)");

    bind.finish("invalid configuration");

    cfg.optimizer.seed = cfg.seed;
    cfg.optimizer.phase_insensitive = cfg.phase_insensitive_cost;
    return cfg;
}

}  // namespace qsim
