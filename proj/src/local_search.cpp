#include "nkma/local_search.hpp"

#include <numeric>
#include <stdexcept>
#include <vector>

namespace nkma {

FihcResult fihc(const NkInstance& inst, const Genome& start, Rng& rng,
                EvaluationBudget& budget, const FihcOptions& options) {
    if (start.size() != inst.n) {
        throw std::invalid_argument("fihc: start genome length != n");
    }

    FihcResult result;
    result.genome = start;
    const std::uint64_t evals_before = budget.used();

    if (budget.exhausted()) {
        result.fitness = raw_fitness(inst, result.genome);
        result.budget_exhausted = true;
        return result;
    }
    result.fitness = evaluate(inst, result.genome, budget);

    std::vector<std::uint32_t> order(inst.n);
    std::iota(order.begin(), order.end(), 0u);
    rng.shuffle(order);

    // last_tried[p] is the accepted-flip count when p was last evaluated;
    // p is worth re-trying only if a flip was accepted since then.
    std::vector<std::uint64_t> last_tried(inst.n, 0);
    std::uint64_t accepted = 1;  // 1 so every position is tried initially

    bool any_accepted_this_sweep = true;
    while (any_accepted_this_sweep) {
        any_accepted_this_sweep = false;
        if (options.shuffle == FihcOptions::Shuffle::PerSweep) {
            rng.shuffle(order);
        }
        for (std::uint32_t pos : order) {
            if (last_tried[pos] == accepted) continue;
            if (budget.exhausted()) {
                result.budget_exhausted = true;
                result.evaluations_used = budget.used() - evals_before;
                return result;
            }
            const double flipped_fitness = evaluate_delta(
                inst, result.genome, result.fitness, pos, budget);
            if (flipped_fitness > result.fitness) {
                result.genome.flip(pos);
                result.fitness = flipped_fitness;
                result.improved = true;
                ++accepted;
                any_accepted_this_sweep = true;
            }
            last_tried[pos] = accepted;
        }
    }

    result.evaluations_used = budget.used() - evals_before;
    return result;
}

}  // namespace nkma
