#pragma once

#include <cstdint>
#include <unordered_set>
#include <vector>

#include "nkma/budget.hpp"
#include "nkma/genome.hpp"
#include "nkma/local_search.hpp"
#include "nkma/nk_landscape.hpp"
#include "nkma/nn.hpp"
#include "nkma/rng.hpp"
#include "nkma/run_record.hpp"

namespace nkma {

struct Individual {
    Genome genome;
    double fitness = 0.0;
};

struct Population {
    std::vector<Individual> members;
    std::size_t size() const { return members.size(); }
};

/// All genomes ever produced by VAE sampling or local search in one run.
/// Membership is exact: equality on the full bit content.
using HistorySet = std::unordered_set<Genome, GenomeHash>;

struct MemeticConfig {
    std::size_t lambda = 0;   // population size; 0 means "use n"
    std::size_t n_vae = 10;   // offspring sampled per parent
    std::size_t vae_hidden = 4096;
    std::size_t vae_latent = 32;
    nn::TrainConfig train;
    FihcOptions fihc;
    bool filter_raw = true;   // history-filter raw VAE samples too
    bool warm_start = false;  // reuse the model across generations
};

struct InitializeResult {
    Population population;
    bool budget_exhausted = false;
};

/// Step 1: lambda uniform-random genomes, each refined by FIHC. Starts
/// and refined genomes enter the history.
InitializeResult initialize(const NkInstance& inst, const MemeticConfig& config,
                            Rng& rng, EvaluationBudget& budget,
                            HistorySet& history);

/// Step 3: per parent, encode to (mu, logvar) and draw n_vae independent
/// latent samples; decode and threshold each coordinate at 0.5 (0.5 or
/// higher becomes one). With filter_raw, samples already in the history
/// are dropped, so fewer than lambda*n_vae genomes may come back.
std::vector<Genome> generate_offspring(nn::VaeModel& model,
                                       const Population& population,
                                       const MemeticConfig& config, Rng& rng,
                                       const HistorySet& history);

struct RefineResult {
    std::vector<Individual> unique;  // C'': refined, deduplicated, novel
    bool budget_exhausted = false;
};

/// Steps 4-5: FIHC on each raw offspring, then keep one copy of each
/// refined genome not already in the history. Raw and refined genomes
/// are all recorded in the history.
RefineResult refine_and_dedup(const std::vector<Genome>& raw,
                              const NkInstance& inst, Rng& rng,
                              EvaluationBudget& budget, HistorySet& history,
                              const FihcOptions& fihc_options);

/// Step 6: the lambda fittest of parents plus offspring. Ties prefer
/// offspring over parents, then the lexicographically smaller genome.
Population survival_selection(const Population& parents,
                              const std::vector<Individual>& offspring,
                              std::size_t lambda);

/// Full run of the six-step loop under the given budget.
RunRecord run_memetic(const NkInstance& inst, const MemeticConfig& config,
                      std::uint64_t seed, std::uint64_t budget_max);

}  // namespace nkma
