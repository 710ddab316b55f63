#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "qsim/config.hpp"
#include "qsim/experiment.hpp"

namespace {

struct RunArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    std::string seed;
};

int execute(const RunArgs& args) {
    try {
        qsim::RawConfig raw = qsim::parse_ini_file(args.config_path);
        for (const std::string& ov : args.overrides) qsim::apply_override(raw, ov);
        if (!args.out_dir.empty()) raw.set("io.out_dir", args.out_dir);
        if (!args.seed.empty()) raw.set("io.seed", args.seed);
        const qsim::ExperimentConfig cfg = qsim::bind_config(raw);
        qsim::run_experiment(cfg);
        return 0;
    } catch (const qsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const qsim::IntegrityError& e) {
        std::cerr << "integrity error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

std::string sanitize(const std::string& s) {
    std::string out = s;
    for (char& c : out)
        if (c == '/' || c == '\\' || c == '=' || c == ' ') c = '_';
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Qudit state-vector simulator for the lattice phi^4 theory"};
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Execute one experiment from a config file");
    run->add_option("config", run_args.config_path, "Config file path")->required();
    run->add_option("--set", run_args.overrides, "Override: section.key=value");
    run->add_option("--out", run_args.out_dir, "Output directory override");
    run->add_option("--seed", run_args.seed, "Seed override");

    RunArgs sweep_args;
    std::string vary;
    CLI::App* sweep = app.add_subcommand(
        "sweep", "Fan out one run per value of a varied key, each in its own subdirectory");
    sweep->add_option("config", sweep_args.config_path, "Config file path")->required();
    sweep->add_option("--set", sweep_args.overrides, "Override: section.key=value");
    sweep->add_option("--out", sweep_args.out_dir, "Sweep root output directory");
    sweep->add_option("--vary", vary, "section.key=v1,v2,... one run per value")->required();

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return execute(run_args);

    // sweep: independent runs, one thread each
    const auto eq = vary.find('=');
    if (eq == std::string::npos || eq == 0) {
        std::cerr << "config error: --vary must be section.key=v1,v2,...\n";
        return 2;
    }
    const std::string key = vary.substr(0, eq);
    std::vector<std::string> values;
    std::string rest = vary.substr(eq + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
        const std::size_t comma = rest.find(',', pos);
        values.push_back(rest.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    const std::string root = sweep_args.out_dir.empty() ? "sweep" : sweep_args.out_dir;
    std::vector<std::thread> workers;
    std::vector<int> codes(values.size(), 0);
    for (std::size_t i = 0; i < values.size(); ++i) {
        RunArgs job = sweep_args;
        job.overrides.push_back(key + "=" + values[i]);
        job.out_dir = root + "/" + sanitize(key) + "_" + sanitize(values[i]);
        workers.emplace_back([job, &codes, i] { codes[i] = execute(job); });
    }
    for (auto& w : workers) w.join();
    int worst = 0;
    for (int c : codes) worst = std::max(worst, c);
    return worst;
}
