#include <doctest.h>

#include <cmath>

#include "nkma/local_search.hpp"

using namespace nkma;

namespace {

Genome random_genome(std::size_t n, Rng& rng) {
    Genome g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = rng.coin_flip();
    return g;
}

// Oracle: exhaustive single-flip check by full (unbudgeted) evaluation.
bool is_one_flip_local_optimum(const NkInstance& inst, const Genome& g) {
    const double base = raw_fitness(inst, g);
    Genome probe = g;
    for (std::size_t i = 0; i < inst.n; ++i) {
        probe.flip(i);
        if (raw_fitness(inst, probe) > base) return false;
        probe.flip(i);
    }
    return true;
}

}  // namespace

TEST_CASE("fihc: a global optimum is returned unchanged") {
    const NkInstance inst = generate_instance(12, 3, 31);
    const auto [optimum, fitness] = brute_force_optimum(inst);
    Rng rng(1);
    EvaluationBudget budget(100000);
    const FihcResult result = fihc(inst, optimum, rng, budget);
    CHECK(result.genome == optimum);
    CHECK(result.fitness == doctest::Approx(fitness).epsilon(1e-14));
    CHECK(result.improved == false);
    CHECK(result.budget_exhausted == false);
}

TEST_CASE("fihc: k=0 tables favoring ones converge to all-ones") {
    NkInstance inst = generate_instance(10, 0, 3);
    for (auto& t : inst.tables) {
        t[0] = 0.2;
        t[1] = 0.8;
    }
    Rng rng(2);
    for (int trial = 0; trial < 10; ++trial) {
        EvaluationBudget budget(100000);
        const Genome start = random_genome(10, rng);
        const FihcResult result = fihc(inst, start, rng, budget);
        CHECK(result.genome == Genome::from_string("1111111111"));
        CHECK(result.fitness == doctest::Approx(0.8).epsilon(1e-14));
    }
}

TEST_CASE("fihc: 100 random starts all end 1-flip locally optimal") {
    Rng rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const NkInstance inst = generate_instance(16, 3, 1000 + trial);
        EvaluationBudget budget(1u << 20);
        const Genome start = random_genome(16, rng);
        const FihcResult result = fihc(inst, start, rng, budget);
        REQUIRE(!result.budget_exhausted);
        CHECK(is_one_flip_local_optimum(inst, result.genome));
        CHECK(std::fabs(result.fitness - raw_fitness(inst, result.genome)) <=
              1e-12);
    }
}

TEST_CASE("fihc: per-sweep reshuffle variant also reaches local optima") {
    Rng rng(8);
    FihcOptions options;
    options.shuffle = FihcOptions::Shuffle::PerSweep;
    for (int trial = 0; trial < 20; ++trial) {
        const NkInstance inst = generate_instance(14, 4, 2000 + trial);
        EvaluationBudget budget(1u << 20);
        const FihcResult result =
            fihc(inst, random_genome(14, rng), rng, budget, options);
        REQUIRE(!result.budget_exhausted);
        CHECK(is_one_flip_local_optimum(inst, result.genome));
    }
}

TEST_CASE("fihc: monotone improvement over the start") {
    Rng rng(9);
    const NkInstance inst = generate_instance(20, 2, 55);
    for (int trial = 0; trial < 30; ++trial) {
        EvaluationBudget budget(1u << 20);
        const Genome start = random_genome(20, rng);
        const double start_fitness = raw_fitness(inst, start);
        const FihcResult result = fihc(inst, start, rng, budget);
        CHECK(result.fitness >= start_fitness);
        CHECK((result.fitness > start_fitness) == result.improved);
    }
}

TEST_CASE("fihc: deterministic for fixed instance, start and seed") {
    const NkInstance inst = generate_instance(24, 3, 66);
    Rng start_rng(10);
    const Genome start = random_genome(24, start_rng);
    FihcResult a, b;
    {
        Rng rng(123);
        EvaluationBudget budget(1u << 20);
        a = fihc(inst, start, rng, budget);
    }
    {
        Rng rng(123);
        EvaluationBudget budget(1u << 20);
        b = fihc(inst, start, rng, budget);
    }
    CHECK(a.genome == b.genome);
    CHECK(a.fitness == b.fitness);
    CHECK(a.evaluations_used == b.evaluations_used);
}

TEST_CASE("fihc: budget exhaustion keeps progress and sets the flag") {
    const NkInstance inst = generate_instance(30, 4, 77);
    Rng rng(11);
    const Genome start = random_genome(30, rng);
    const double start_fitness = raw_fitness(inst, start);
    EvaluationBudget budget(8);  // far too small to converge at n=30
    const FihcResult result = fihc(inst, start, rng, budget);
    CHECK(result.budget_exhausted);
    CHECK(budget.used() == 8);
    CHECK(result.evaluations_used == 8);
    CHECK(result.fitness >= start_fitness);
    // carried fitness matches the returned genome exactly
    CHECK(std::fabs(result.fitness - raw_fitness(inst, result.genome)) <=
          1e-12);
}

TEST_CASE("fihc: evaluation accounting is exact") {
    const NkInstance inst = generate_instance(18, 2, 88);
    Rng rng(12);
    EvaluationBudget budget(1u << 20);
    const std::uint64_t before = budget.used();
    const FihcResult result = fihc(inst, random_genome(18, rng), rng, budget);
    CHECK(result.evaluations_used == budget.used() - before);
    // initial full evaluation plus at least one probe per position
    CHECK(result.evaluations_used >= 1 + 18);
}
