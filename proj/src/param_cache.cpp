#include "qsim/param_cache.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace qsim {

std::string CacheKey::filename() const {
    std::ostringstream name;
    name << kind << "-N" << n_logical << "-m" << n_bumper << "-k" << blocks << "-seed" << seed
         << "-tol" << std::setprecision(6) << std::scientific << cost_tolerance << ".json";
    return name.str();
}

std::optional<CacheEntry> load_cache(const std::string& dir, const CacheKey& key) {
    const std::filesystem::path path = std::filesystem::path(dir) / key.filename();
    std::ifstream in(path);
    if (!in) return std::nullopt;
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;  // unreadable entry is treated as a miss
    }
    if (doc.value("kind", "") != key.kind || doc.value("n_logical", -1) != key.n_logical ||
        doc.value("n_bumper", -1) != key.n_bumper || doc.value("blocks", -1) != key.blocks ||
        doc.value("seed", std::uint64_t{0}) != key.seed ||
        doc.value("cost_tolerance", -1.0) != key.cost_tolerance)
        return std::nullopt;

    CacheEntry entry;
    entry.key = key;
    const int total_dim = key.n_logical + key.n_bumper;
    const auto& alphas = doc.at("alphas");
    const auto& thetas = doc.at("thetas");
    if (static_cast<int>(alphas.size()) != key.blocks ||
        static_cast<int>(thetas.size()) != key.blocks)
        return std::nullopt;
    entry.params.blocks.resize(static_cast<std::size_t>(key.blocks));
    for (int i = 0; i < key.blocks; ++i) {
        entry.params.blocks[i].alpha = cx{alphas[i][0].get<double>(), alphas[i][1].get<double>()};
        const auto& row = thetas[i];
        if (static_cast<int>(row.size()) != total_dim) return std::nullopt;
        entry.params.blocks[i].theta.resize(static_cast<std::size_t>(total_dim));
        for (int m = 0; m < total_dim; ++m) entry.params.blocks[i].theta[m] = row[m].get<double>();
    }
    entry.final_cost = doc.value("final_cost", 0.0);
    entry.fidelity = doc.value("fidelity", 0.0);
    entry.leakage = doc.value("leakage", 0.0);
    entry.iterations = doc.value("iterations", 0);
    return entry;
}

void store_cache(const std::string& dir, const CacheEntry& entry) {
    std::filesystem::create_directories(dir);
    nlohmann::ordered_json doc;
    doc["kind"] = entry.key.kind;
    doc["n_logical"] = entry.key.n_logical;
    doc["n_bumper"] = entry.key.n_bumper;
    doc["blocks"] = entry.key.blocks;
    doc["seed"] = entry.key.seed;
    doc["cost_tolerance"] = entry.key.cost_tolerance;
    nlohmann::ordered_json alphas = nlohmann::ordered_json::array();
    nlohmann::ordered_json thetas = nlohmann::ordered_json::array();
    for (const auto& b : entry.params.blocks) {
        alphas.push_back({b.alpha.real(), b.alpha.imag()});
        thetas.push_back(b.theta);
    }
    doc["alphas"] = std::move(alphas);
    doc["thetas"] = std::move(thetas);
    doc["final_cost"] = entry.final_cost;
    doc["fidelity"] = entry.fidelity;
    doc["leakage"] = entry.leakage;
    doc["iterations"] = entry.iterations;

    const std::filesystem::path path = std::filesystem::path(dir) / entry.key.filename();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("store_cache: cannot write " + path.string());
    out << doc.dump(2) << "\n";
}

}  // namespace qsim
