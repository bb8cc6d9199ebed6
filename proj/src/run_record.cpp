#include "nkma/run_record.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace nkma {

std::vector<Milestone> BestTracker::milestones(
    std::uint64_t final_evaluations) const {
    std::vector<Milestone> out;
    if (events_.empty()) return out;
    std::size_t next_event = 0;
    double best = events_.front().best;
    std::uint64_t checkpoint = 1;
    while (checkpoint < final_evaluations) {
        while (next_event < events_.size() &&
               events_[next_event].evaluations <= checkpoint) {
            best = events_[next_event].best;
            ++next_event;
        }
        if (checkpoint >= events_.front().evaluations) {
            out.push_back({checkpoint, best});
        }
        const auto next =
            static_cast<std::uint64_t>(std::ceil(1.26 * static_cast<double>(checkpoint)));
        checkpoint = std::max(next, checkpoint + 1);
    }
    out.push_back({final_evaluations, best_});
    return out;
}

void RunRecord::save(std::ostream& out) const {
    nlohmann::json j;
    j["format_version"] = 1;
    j["algorithm"] = algorithm;
    j["trial"] = trial;
    j["seed"] = seed;
    j["n"] = n;
    j["k"] = k;
    j["instance_seed"] = instance_seed;
    j["budget_max"] = budget_max;
    j["evaluations_used"] = evaluations_used;
    j["generations"] = generations;
    j["best_fitness"] = best_fitness;
    j["best_genome"] = best_genome.to_string();
    j["exhausted_during_init"] = exhausted_during_init;
    j["final_population"] = {{"size", final_population_size},
                             {"min", final_population_min},
                             {"mean", final_population_mean},
                             {"max", final_population_max}};
    nlohmann::json ms = nlohmann::json::array();
    for (const Milestone& m : milestones) {
        ms.push_back({{"evaluations", m.evaluations}, {"best", m.best}});
    }
    j["milestones"] = std::move(ms);
    out << j.dump() << '\n';
}

RunRecord RunRecord::load(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("RunRecord: malformed JSON: ") +
                                 e.what());
    }
    RunRecord r;
    r.algorithm = j.at("algorithm").get<std::string>();
    r.trial = j.at("trial").get<std::uint64_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.n = j.at("n").get<std::size_t>();
    r.k = j.at("k").get<std::size_t>();
    r.instance_seed = j.at("instance_seed").get<std::uint64_t>();
    r.budget_max = j.at("budget_max").get<std::uint64_t>();
    r.evaluations_used = j.at("evaluations_used").get<std::uint64_t>();
    r.generations = j.at("generations").get<std::uint64_t>();
    r.best_fitness = j.at("best_fitness").get<double>();
    r.best_genome = Genome::from_string(j.at("best_genome").get<std::string>());
    r.exhausted_during_init = j.at("exhausted_during_init").get<bool>();
    const auto& fp = j.at("final_population");
    r.final_population_size = fp.at("size").get<std::size_t>();
    r.final_population_min = fp.at("min").get<double>();
    r.final_population_mean = fp.at("mean").get<double>();
    r.final_population_max = fp.at("max").get<double>();
    for (const auto& m : j.at("milestones")) {
        r.milestones.push_back({m.at("evaluations").get<std::uint64_t>(),
                                m.at("best").get<double>()});
    }
    return r;
}

void RunRecord::save_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for write: " + path);
    save(out);
}

RunRecord RunRecord::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return load(in);
}

}  // namespace nkma
