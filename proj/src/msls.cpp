#include "nkma/msls.hpp"

#include "nkma/budget.hpp"
#include "nkma/rng.hpp"

namespace nkma {

RunRecord run_msls(const NkInstance& inst, std::uint64_t seed,
                   std::uint64_t budget_max,
                   const FihcOptions& fihc_options) {
    RunRecord record;
    record.algorithm = "msls";
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

    bool have_best = false;
    while (!budget.exhausted()) {
        Genome start(inst.n);
        for (std::size_t i = 0; i < inst.n; ++i) {
            start[i] = rng.coin_flip() ? 1 : 0;
        }
        const FihcResult result = fihc(inst, start, rng, budget, fihc_options);
        if (!have_best || result.fitness > record.best_fitness) {
            record.best_fitness = result.fitness;
            record.best_genome = result.genome;
            have_best = true;
        }
        ++record.generations;  // restarts
    }

    record.evaluations_used = budget.used();
    record.final_population_size = have_best ? 1 : 0;
    record.final_population_min = record.best_fitness;
    record.final_population_mean = record.best_fitness;
    record.final_population_max = record.best_fitness;
    record.milestones = tracker.milestones(budget.used());
    return record;
}

}  // namespace nkma
