#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "nkma/genome.hpp"

namespace nkma {

/// Best fitness known after a given number of paid evaluations.
struct Milestone {
    std::uint64_t evaluations = 0;
    double best = 0.0;
};

/// Per-trial trace: best fitness over evaluations, final population
/// summary, seeds. One record per trial, serialized as JSON.
struct RunRecord {
    std::string algorithm;
    std::uint64_t trial = 0;
    std::uint64_t seed = 0;  // the trial's derived seed
    std::size_t n = 0;
    std::size_t k = 0;
    std::uint64_t instance_seed = 0;
    std::uint64_t budget_max = 0;
    std::uint64_t evaluations_used = 0;
    std::uint64_t generations = 0;  // memetic generations / MSLS restarts
    double best_fitness = 0.0;
    Genome best_genome;
    std::vector<Milestone> milestones;
    bool exhausted_during_init = false;
    std::size_t final_population_size = 0;
    double final_population_min = 0.0;
    double final_population_mean = 0.0;
    double final_population_max = 0.0;

    void save(std::ostream& out) const;
    static RunRecord load(std::istream& in);
    void save_file(const std::string& path) const;
    static RunRecord load_file(const std::string& path);
};

/// Collects improvement events from the budget observer and condenses
/// them to geometric checkpoints (ratio ~1.26) plus the final count.
class BestTracker {
public:
    void observe(std::uint64_t evaluations, double fitness) {
        if (fitness > best_) {
            best_ = fitness;
            events_.push_back({evaluations, fitness});
        }
    }

    double best() const { return best_; }
    bool any() const { return !events_.empty(); }

    std::vector<Milestone> milestones(std::uint64_t final_evaluations) const;

private:
    double best_ = -std::numeric_limits<double>::infinity();
    std::vector<Milestone> events_;
};

}  // namespace nkma
