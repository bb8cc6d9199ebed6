#include "nkma/nk_landscape.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "nkma/rng.hpp"

namespace nkma {

NkInstance generate_instance(std::size_t n, std::size_t k,
                             std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("generate_instance: n must be >= 1");
    if (k >= n) {
        throw std::invalid_argument(
            "generate_instance: k must be < n (cannot pick k distinct "
            "neighbors)");
    }
    NkInstance inst;
    inst.n = n;
    inst.k = k;
    inst.seed = seed;
    inst.neighbors.resize(n);
    inst.tables.resize(n);

    Rng rng(seed);
    const std::size_t table_size = std::size_t{1} << (k + 1);
    std::vector<std::uint32_t> candidates(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        // candidates = {0..n-1} \ {i}
        std::uint32_t v = 0;
        for (std::size_t t = 0; t < n - 1; ++t, ++v) {
            if (v == i) ++v;
            candidates[t] = v;
        }
        // partial Fisher-Yates: first k entries are a uniform sample
        auto& nb = inst.neighbors[i];
        nb.resize(k);
        for (std::size_t t = 0; t < k; ++t) {
            const std::size_t j = t + rng.index(candidates.size() - t);
            std::swap(candidates[t], candidates[j]);
            nb[t] = candidates[t];
        }
        auto& table = inst.tables[i];
        table.resize(table_size);
        for (double& entry : table) entry = rng.unit_real();
    }

    inst.inverse_index.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        inst.inverse_index[i].push_back(static_cast<std::uint32_t>(i));
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::uint32_t j : inst.neighbors[i]) {
            inst.inverse_index[j].push_back(static_cast<std::uint32_t>(i));
        }
    }
    return inst;
}

double raw_fitness(const NkInstance& inst, const Genome& g) {
    double sum = 0.0;
    for (std::size_t i = 0; i < inst.n; ++i) {
        sum += inst.tables[i][inst.table_index(g, i)];
    }
    return sum / static_cast<double>(inst.n);
}

double evaluate(const NkInstance& inst, const Genome& g,
                EvaluationBudget& budget) {
    if (g.size() != inst.n) {
        throw std::invalid_argument("evaluate: genome length != n");
    }
    budget.consume();
    const double f = raw_fitness(inst, g);
    budget.report(f);
    return f;
}

double evaluate_delta(const NkInstance& inst, const Genome& g,
                      double current_fitness, std::size_t flip_index,
                      EvaluationBudget& budget) {
    if (flip_index >= inst.n) {
        throw std::invalid_argument("evaluate_delta: flip_index out of range");
    }
    budget.consume();
    // Only subfunctions whose argument set contains flip_index change.
    double delta = 0.0;
    for (std::uint32_t i : inst.inverse_index[flip_index]) {
        std::size_t old_idx = g[i];
        std::size_t new_idx = (i == flip_index) ? (old_idx ^ 1u) : old_idx;
        for (std::uint32_t nb : inst.neighbors[i]) {
            const std::size_t bit = g[nb];
            old_idx = (old_idx << 1) | bit;
            new_idx = (new_idx << 1) | (nb == flip_index ? bit ^ 1u : bit);
        }
        delta += inst.tables[i][new_idx] - inst.tables[i][old_idx];
    }
    const double f = current_fitness + delta / static_cast<double>(inst.n);
    budget.report(f);
    return f;
}

std::pair<Genome, double> brute_force_optimum(const NkInstance& inst) {
    if (inst.n > 24) {
        throw std::invalid_argument("brute_force_optimum: n > 24");
    }
    Genome g(inst.n);
    Genome best = g;
    double best_fitness = raw_fitness(inst, g);
    const std::uint64_t count = std::uint64_t{1} << inst.n;
    for (std::uint64_t code = 1; code < count; ++code) {
        // bit 0 of the genome is the most significant digit of `code`
        for (std::size_t i = 0; i < inst.n; ++i) {
            g[i] = static_cast<std::uint8_t>(
                (code >> (inst.n - 1 - i)) & 1u);
        }
        const double f = raw_fitness(inst, g);
        if (f > best_fitness) {  // strict: ties keep the lower code
            best_fitness = f;
            best = g;
        }
    }
    return {best, best_fitness};
}

namespace {

constexpr int kFormatVersion = 1;

[[noreturn]] void parse_fail(const std::string& field,
                             const std::string& what) {
    throw std::runtime_error("load_instance: field '" + field + "': " + what);
}

}  // namespace

void save_instance(const NkInstance& inst, std::ostream& out) {
    nlohmann::json j;
    j["format_version"] = kFormatVersion;
    j["n"] = inst.n;
    j["k"] = inst.k;
    j["seed"] = inst.seed;
    j["prng"] = Rng::kAlgorithmName;
    j["neighbors"] = inst.neighbors;
    j["tables"] = inst.tables;
    out << j.dump() << '\n';
}

NkInstance load_instance(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("load_instance: malformed JSON: ") +
                                 e.what());
    }
    for (const char* field :
         {"format_version", "n", "k", "seed", "prng", "neighbors", "tables"}) {
        if (!j.contains(field)) parse_fail(field, "missing");
    }
    if (j["format_version"].get<int>() != kFormatVersion) {
        parse_fail("format_version", "unsupported version");
    }
    NkInstance inst;
    inst.n = j["n"].get<std::size_t>();
    inst.k = j["k"].get<std::size_t>();
    inst.seed = j["seed"].get<std::uint64_t>();
    if (inst.n < 1) parse_fail("n", "must be >= 1");
    if (inst.k >= inst.n) parse_fail("k", "must be < n");

    inst.neighbors = j["neighbors"].get<std::vector<std::vector<std::uint32_t>>>();
    inst.tables = j["tables"].get<std::vector<std::vector<double>>>();
    if (inst.neighbors.size() != inst.n) {
        parse_fail("neighbors", "expected n lists");
    }
    if (inst.tables.size() != inst.n) parse_fail("tables", "expected n tables");
    const std::size_t table_size = std::size_t{1} << (inst.k + 1);
    for (std::size_t i = 0; i < inst.n; ++i) {
        const auto& nb = inst.neighbors[i];
        if (nb.size() != inst.k) parse_fail("neighbors", "list size != k");
        for (std::uint32_t v : nb) {
            if (v >= inst.n || v == i) parse_fail("neighbors", "invalid index");
        }
        std::vector<std::uint32_t> sorted(nb);
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
            parse_fail("neighbors", "duplicate index");
        }
        if (inst.tables[i].size() != table_size) {
            parse_fail("tables", "table size != 2^(k+1)");
        }
    }

    inst.inverse_index.resize(inst.n);
    for (std::size_t i = 0; i < inst.n; ++i) {
        inst.inverse_index[i].push_back(static_cast<std::uint32_t>(i));
    }
    for (std::size_t i = 0; i < inst.n; ++i) {
        for (std::uint32_t nb : inst.neighbors[i]) {
            inst.inverse_index[nb].push_back(static_cast<std::uint32_t>(i));
        }
    }
    return inst;
}

void save_instance_file(const NkInstance& inst, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    save_instance(inst, out);
}

NkInstance load_instance_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return load_instance(in);
}

Genome Genome::from_string(const std::string& s) {
    Genome g(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '1') {
            g[i] = 1;
        } else if (s[i] != '0') {
            throw std::invalid_argument("Genome::from_string: bad character");
        }
    }
    return g;
}

}  // namespace nkma
