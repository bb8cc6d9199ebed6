#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "nkma/budget.hpp"
#include "nkma/genome.hpp"

namespace nkma {

/// An NK-landscape problem instance: for each of the n variables, a set
/// of k distinct co-dependent variables and a payoff table over the
/// 2^(k+1) joint bit patterns. Fitness is the mean of the per-variable
/// payoffs. Immutable after construction; safe to share across threads.
///
/// Table indexing: the pattern (x_i, x_{i1}, ..., x_{ik}) maps to an
/// index with x_i as the most significant bit and the last neighbor
/// least significant.
struct NkInstance {
    std::size_t n = 0;
    std::size_t k = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<std::uint32_t>> neighbors;  // n lists of k indices
    std::vector<std::vector<double>> tables;            // n tables of 2^(k+1)
    std::vector<std::vector<std::uint32_t>> inverse_index;  // j -> {i : j in args(i)}

    /// Table index for subfunction i under the given genome.
    std::size_t table_index(const Genome& g, std::size_t i) const {
        std::size_t idx = g[i];
        for (std::uint32_t nb : neighbors[i]) {
            idx = (idx << 1) | g[nb];
        }
        return idx;
    }
};

/// Seeded instance generation: neighbor lists by partial Fisher-Yates
/// over {0..n-1}\{i}, table payoffs i.i.d. U(0,1). Pure function of
/// (n, k, seed). Rejects k >= n.
NkInstance generate_instance(std::size_t n, std::size_t k, std::uint64_t seed);

/// Objective value without budget accounting. For oracles, diagnostics
/// and brute force only; optimization code must go through evaluate().
double raw_fitness(const NkInstance& inst, const Genome& g);

/// Full evaluation: mean of subfunction payoffs. Charges one evaluation.
double evaluate(const NkInstance& inst, const Genome& g,
                EvaluationBudget& budget);

/// Fitness of `g` with bit `flip_index` flipped, computed from
/// `current_fitness` by re-evaluating only the subfunctions that depend
/// on the flipped bit. Charges one evaluation. `g` itself is not
/// modified.
double evaluate_delta(const NkInstance& inst, const Genome& g,
                      double current_fitness, std::size_t flip_index,
                      EvaluationBudget& budget);

/// Exhaustive search over all 2^n genomes; refuses n > 24. Ties broken
/// toward the genome with the lowest binary value (bit 0 most
/// significant). Does not touch any budget.
std::pair<Genome, double> brute_force_optimum(const NkInstance& inst);

/// Serialization: self-describing JSON container (format version, n, k,
/// seed, PRNG name, neighbor lists, tables). Round-trip is bit-exact.
void save_instance(const NkInstance& inst, std::ostream& out);
NkInstance load_instance(std::istream& in);
void save_instance_file(const NkInstance& inst, const std::string& path);
NkInstance load_instance_file(const std::string& path);

}  // namespace nkma
