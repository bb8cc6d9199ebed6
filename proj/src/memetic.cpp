#include "nkma/memetic.hpp"

#include <algorithm>
#include <stdexcept>

namespace nkma {

namespace {

Genome random_genome(std::size_t n, Rng& rng) {
    Genome g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = rng.coin_flip() ? 1 : 0;
    }
    return g;
}

std::size_t effective_lambda(const MemeticConfig& config,
                            const NkInstance& inst) {
    return config.lambda == 0 ? inst.n : config.lambda;
}

nn::Matrix population_matrix(const Population& population, std::size_t n) {
    nn::Matrix data(population.size(), n);
    for (std::size_t r = 0; r < population.size(); ++r) {
        const Genome& g = population.members[r].genome;
        for (std::size_t c = 0; c < n; ++c) {
            data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                static_cast<double>(g[c]);
        }
    }
    return data;
}

void population_stats(const Population& population, RunRecord& record) {
    record.final_population_size = population.size();
    if (population.members.empty()) return;
    double min = population.members.front().fitness;
    double max = min;
    double sum = 0.0;
    for (const Individual& m : population.members) {
        min = std::min(min, m.fitness);
        max = std::max(max, m.fitness);
        sum += m.fitness;
    }
    record.final_population_min = min;
    record.final_population_max = max;
    record.final_population_mean = sum / static_cast<double>(population.size());
}

}  // namespace

InitializeResult initialize(const NkInstance& inst,
                            const MemeticConfig& config, Rng& rng,
                            EvaluationBudget& budget, HistorySet& history) {
    InitializeResult result;
    const std::size_t lambda = effective_lambda(config, inst);
    result.population.members.reserve(lambda);
    for (std::size_t i = 0; i < lambda; ++i) {
        if (budget.exhausted()) {
            result.budget_exhausted = true;
            return result;
        }
        const Genome start = random_genome(inst.n, rng);
        FihcResult refined = fihc(inst, start, rng, budget, config.fihc);
        history.insert(start);
        history.insert(refined.genome);
        result.population.members.push_back(
            {std::move(refined.genome), refined.fitness});
        if (refined.budget_exhausted) {
            result.budget_exhausted = true;
            return result;
        }
    }
    return result;
}

std::vector<Genome> generate_offspring(nn::VaeModel& model,
                                       const Population& population,
                                       const MemeticConfig& config, Rng& rng,
                                       const HistorySet& history) {
    const std::size_t n = model.config.input;
    const std::size_t latent = model.config.latent;
    std::vector<Genome> offspring;
    offspring.reserve(population.size() * config.n_vae);

    const nn::Matrix parents = population_matrix(population, n);
    const auto [mu, logvar] = nn::encode(model, parents);

    // n_vae independent latent draws per parent, decoded in one batch.
    nn::Matrix latents(population.size() * config.n_vae, latent);
    for (std::size_t p = 0; p < population.size(); ++p) {
        const auto row = static_cast<Eigen::Index>(p);
        const Eigen::ArrayXd sigma =
            (logvar.row(row).transpose().array() / 2.0).exp();
        for (std::size_t s = 0; s < config.n_vae; ++s) {
            const auto out_row =
                static_cast<Eigen::Index>(p * config.n_vae + s);
            for (std::size_t d = 0; d < latent; ++d) {
                const auto col = static_cast<Eigen::Index>(d);
                latents(out_row, col) =
                    mu(row, col) + sigma(col) * rng.standard_normal();
            }
        }
    }
    const nn::Matrix probabilities = nn::decode(model, latents);
    for (Eigen::Index r = 0; r < probabilities.rows(); ++r) {
        Genome g(n);
        for (std::size_t c = 0; c < n; ++c) {
            g[c] = probabilities(r, static_cast<Eigen::Index>(c)) >= 0.5 ? 1 : 0;
        }
        if (config.filter_raw && history.contains(g)) continue;
        offspring.push_back(std::move(g));
    }
    return offspring;
}

RefineResult refine_and_dedup(const std::vector<Genome>& raw,
                              const NkInstance& inst, Rng& rng,
                              EvaluationBudget& budget, HistorySet& history,
                              const FihcOptions& fihc_options) {
    RefineResult result;
    HistorySet seen_this_batch;
    for (const Genome& genome : raw) {
        if (budget.exhausted()) {
            result.budget_exhausted = true;
            break;
        }
        FihcResult refined = fihc(inst, genome, rng, budget, fihc_options);
        // The member's own raw genome enters the history only after the
        // novelty check, so an already-locally-optimal offspring (refined
        // == raw) is not excluded by its own trace.
        const bool novel = !history.contains(refined.genome) &&
                           !seen_this_batch.contains(refined.genome);
        seen_this_batch.insert(refined.genome);
        history.insert(genome);
        history.insert(refined.genome);
        if (novel) {
            result.unique.push_back(
                {std::move(refined.genome), refined.fitness});
        }
        if (refined.budget_exhausted) {
            result.budget_exhausted = true;
            break;
        }
    }
    return result;
}

Population survival_selection(const Population& parents,
                              const std::vector<Individual>& offspring,
                              std::size_t lambda) {
    struct Entry {
        const Individual* individual;
        bool is_offspring;
    };
    std::vector<Entry> pool;
    pool.reserve(parents.size() + offspring.size());
    for (const Individual& m : parents.members) pool.push_back({&m, false});
    for (const Individual& m : offspring) pool.push_back({&m, true});

    std::sort(pool.begin(), pool.end(), [](const Entry& a, const Entry& b) {
        if (a.individual->fitness != b.individual->fitness) {
            return a.individual->fitness > b.individual->fitness;
        }
        if (a.is_offspring != b.is_offspring) return a.is_offspring;
        return a.individual->genome < b.individual->genome;
    });

    Population next;
    const std::size_t keep = std::min(lambda, pool.size());
    next.members.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        next.members.push_back(*pool[i].individual);
    }
    return next;
}

RunRecord run_memetic(const NkInstance& inst, const MemeticConfig& config,
                      std::uint64_t seed, std::uint64_t budget_max) {
    RunRecord record;
    record.algorithm = "memetic";
    record.seed = seed;
    record.n = inst.n;
    record.k = inst.k;
    record.instance_seed = inst.seed;
    record.budget_max = budget_max;

    Rng rng(seed);
    EvaluationBudget budget(budget_max);
    BestTracker tracker;
    budget.set_observer([&tracker](std::uint64_t evals, double fitness) {
        tracker.observe(evals, fitness);
    });

    HistorySet history;
    InitializeResult init = initialize(inst, config, rng, budget, history);
    Population population = std::move(init.population);

    auto best_of = [&population]() {
        const Individual* best = nullptr;
        for (const Individual& m : population.members) {
            if (best == nullptr || m.fitness > best->fitness) best = &m;
        }
        return best;
    };

    if (init.budget_exhausted) {
        record.exhausted_during_init = true;
    } else {
        const std::size_t lambda = effective_lambda(config, inst);
        nn::VaeModel model;
        bool have_model = false;
        // Stops if many generations pass with no evaluations spent, which
        // can only happen when every VAE sample is a history duplicate.
        std::size_t stagnant_generations = 0;
        while (!budget.exhausted() && stagnant_generations < 50) {
            const std::uint64_t evals_before = budget.used();
            const nn::Matrix data = population_matrix(population, inst.n);
            if (!config.warm_start || !have_model) {
                model = nn::make_vae({.input = inst.n,
                                      .hidden = config.vae_hidden,
                                      .latent = config.vae_latent},
                                     rng);
                have_model = true;
            }
            nn::TrainConfig train_config = config.train;
            nn::train(model, data, train_config, rng);

            const std::vector<Genome> raw =
                generate_offspring(model, population, config, rng, history);
            const RefineResult refined = refine_and_dedup(
                raw, inst, rng, budget, history, config.fihc);
            population = survival_selection(population, refined.unique, lambda);
            ++record.generations;
            stagnant_generations =
                budget.used() == evals_before ? stagnant_generations + 1 : 0;
        }
    }

    record.evaluations_used = budget.used();
    population_stats(population, record);
    if (const Individual* best = best_of()) {
        record.best_fitness = best->fitness;
        record.best_genome = best->genome;
    }
    record.milestones = tracker.milestones(budget.used());
    return record;
}

}  // namespace nkma
