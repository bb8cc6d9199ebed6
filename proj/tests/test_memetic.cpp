#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nkma/memetic.hpp"

using namespace nkma;

namespace {

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

MemeticConfig tiny_config(std::size_t lambda = 0) {
    MemeticConfig config;
    config.lambda = lambda;
    config.n_vae = 5;
    config.vae_hidden = 16;
    config.vae_latent = 4;
    config.train = {.batch_size = 16, .epochs = 20};
    return config;
}

}  // namespace

TEST_CASE("initialize: lambda=1 yields one local optimum") {
    const NkInstance inst = generate_instance(12, 3, 1);
    Rng rng(1);
    EvaluationBudget budget(100000);
    HistorySet history;
    const auto result =
        initialize(inst, tiny_config(1), rng, budget, history);
    REQUIRE(result.population.size() == 1);
    CHECK(!result.budget_exhausted);
    CHECK(is_one_flip_local_optimum(inst, result.population.members[0].genome));
    CHECK(history.contains(result.population.members[0].genome));
}

TEST_CASE("initialize: lambda=N members are all locally optimal") {
    const NkInstance inst = generate_instance(30, 2, 2);
    Rng rng(2);
    EvaluationBudget budget(1u << 20);
    HistorySet history;
    const auto result = initialize(inst, tiny_config(), rng, budget, history);
    REQUIRE(result.population.size() == 30);
    for (const Individual& m : result.population.members) {
        CHECK(is_one_flip_local_optimum(inst, m.genome));
        CHECK(std::fabs(m.fitness - raw_fitness(inst, m.genome)) <= 1e-12);
    }
}

TEST_CASE("initialize: deterministic under a fixed seed") {
    const NkInstance inst = generate_instance(20, 3, 3);
    auto run = [&]() {
        Rng rng(77);
        EvaluationBudget budget(1u << 20);
        HistorySet history;
        return initialize(inst, tiny_config(), rng, budget, history);
    };
    const auto a = run();
    const auto b = run();
    REQUIRE(a.population.size() == b.population.size());
    for (std::size_t i = 0; i < a.population.size(); ++i) {
        CHECK(a.population.members[i].genome == b.population.members[i].genome);
    }
}

TEST_CASE("initialize: budget exhaustion mid-init returns partial population") {
    const NkInstance inst = generate_instance(20, 3, 4);
    Rng rng(3);
    EvaluationBudget budget(30);  // far below lambda full climbs
    HistorySet history;
    const auto result = initialize(inst, tiny_config(), rng, budget, history);
    CHECK(result.budget_exhausted);
    CHECK(result.population.size() < 20);
    CHECK(budget.used() <= 30);
}

TEST_CASE("generate_offspring: constant-0.5 decoder rounds up to all-ones") {
    const std::size_t n = 8;
    Rng rng(4);
    nn::VaeModel model = nn::make_vae({.input = n, .hidden = 4, .latent = 2}, rng);
    // decoder output forced to logits 0 -> probability exactly 0.5
    model.dec_out.weights.setZero();
    model.dec_out.biases.setZero();

    Population population;
    population.members.push_back({Genome(n), 0.0});
    MemeticConfig config = tiny_config(1);
    config.n_vae = 3;
    HistorySet history;
    const auto offspring =
        generate_offspring(model, population, config, rng, history);
    REQUIRE(offspring.size() == 3);
    for (const Genome& g : offspring) {
        CHECK(g == Genome::from_string("11111111"));
    }
}

TEST_CASE("generate_offspring: cardinality bounded by lambda * n_vae") {
    const std::size_t n = 10;
    Rng rng(5);
    nn::VaeModel model =
        nn::make_vae({.input = n, .hidden = 8, .latent = 3}, rng);
    Population population;
    for (int i = 0; i < 5; ++i) {
        Genome g(n);
        for (std::size_t b = 0; b < n; ++b) g[b] = rng.coin_flip();
        population.members.push_back({g, 0.5});
    }
    MemeticConfig config = tiny_config(5);
    config.n_vae = 10;
    HistorySet history;
    const auto offspring =
        generate_offspring(model, population, config, rng, history);
    CHECK(offspring.size() <= 50);
}

TEST_CASE("generate_offspring: history duplicates are filtered out") {
    const std::size_t n = 8;
    Rng rng(6);
    nn::VaeModel model = nn::make_vae({.input = n, .hidden = 4, .latent = 2}, rng);
    model.dec_out.weights.setZero();
    model.dec_out.biases.setZero();  // always decodes to all-ones
    Population population;
    population.members.push_back({Genome(n), 0.0});
    MemeticConfig config = tiny_config(1);
    HistorySet history;
    history.insert(Genome::from_string("11111111"));
    const auto offspring =
        generate_offspring(model, population, config, rng, history);
    CHECK(offspring.empty());

    config.filter_raw = false;
    const auto unfiltered =
        generate_offspring(model, population, config, rng, history);
    CHECK(unfiltered.size() == config.n_vae);
}

TEST_CASE("refine_and_dedup: identical raw genomes collapse to one copy") {
    const NkInstance inst = generate_instance(14, 2, 7);
    Rng start_rng(8);
    Genome raw(14);
    for (std::size_t i = 0; i < 14; ++i) raw[i] = start_rng.coin_flip();

    // same rng stream state for both members would diverge; to force the
    // identical-result case, refine a genome that is already optimal
    EvaluationBudget warmup(1u << 20);
    Rng rng(9);
    const FihcResult opt = fihc(inst, raw, rng, warmup);

    EvaluationBudget budget(1u << 20);
    HistorySet history;
    const auto result = refine_and_dedup({opt.genome, opt.genome}, inst, rng,
                                         budget, history, {});
    CHECK(result.unique.size() == 1);
    CHECK(result.unique[0].genome == opt.genome);
}

TEST_CASE("refine_and_dedup: genomes already in history are excluded") {
    const NkInstance inst = generate_instance(14, 2, 7);
    Rng rng(10);
    Genome raw(14);
    for (std::size_t i = 0; i < 14; ++i) raw[i] = rng.coin_flip();
    EvaluationBudget warmup(1u << 20);
    const FihcResult opt = fihc(inst, raw, rng, warmup);

    EvaluationBudget budget(1u << 20);
    HistorySet history;
    history.insert(opt.genome);  // produced in an "earlier generation"
    const auto result =
        refine_and_dedup({opt.genome}, inst, rng, budget, history, {});
    CHECK(result.unique.empty());
}

TEST_CASE("refine_and_dedup: results are locally optimal and novel") {
    const NkInstance inst = generate_instance(20, 3, 11);
    Rng rng(12);
    std::vector<Genome> raw;
    for (int i = 0; i < 10; ++i) {
        Genome g(20);
        for (std::size_t b = 0; b < 20; ++b) g[b] = rng.coin_flip();
        raw.push_back(g);
    }
    EvaluationBudget budget(1u << 20);
    HistorySet history;
    const HistorySet before = history;
    const auto result = refine_and_dedup(raw, inst, rng, budget, history, {});
    for (const Individual& m : result.unique) {
        CHECK(is_one_flip_local_optimum(inst, m.genome));
        CHECK(!before.contains(m.genome));
    }
    // no duplicates inside C''
    for (std::size_t a = 0; a < result.unique.size(); ++a) {
        for (std::size_t b = a + 1; b < result.unique.size(); ++b) {
            CHECK(!(result.unique[a].genome == result.unique[b].genome));
        }
    }
    // raw and refined genomes all recorded
    for (const Genome& g : raw) CHECK(history.contains(g));
}

TEST_CASE("survival_selection: empty offspring keeps the parents") {
    Population parents;
    parents.members = {{Genome::from_string("01"), 0.3},
                       {Genome::from_string("10"), 0.7}};
    const Population next = survival_selection(parents, {}, 2);
    REQUIRE(next.size() == 2);
    CHECK(next.members[0].fitness == 0.7);
    CHECK(next.members[1].fitness == 0.3);
}

TEST_CASE("survival_selection: uniformly fitter offspring displace parents") {
    Population parents;
    parents.members = {{Genome::from_string("00"), 0.1},
                       {Genome::from_string("01"), 0.2}};
    const std::vector<Individual> offspring = {
        {Genome::from_string("10"), 0.8},
        {Genome::from_string("11"), 0.9},
        {Genome::from_string("110"), 0.7}};
    const Population next = survival_selection(parents, offspring, 2);
    REQUIRE(next.size() == 2);
    CHECK(next.members[0].fitness == 0.9);
    CHECK(next.members[1].fitness == 0.8);
}

TEST_CASE("survival_selection: equals an independent sort oracle") {
    Rng rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        Population parents;
        std::vector<Individual> offspring;
        std::vector<double> all;
        for (int i = 0; i < 6; ++i) {
            Genome g(8);
            for (std::size_t b = 0; b < 8; ++b) g[b] = rng.coin_flip();
            const double f = rng.unit_real();
            parents.members.push_back({g, f});
            all.push_back(f);
        }
        for (int i = 0; i < 9; ++i) {
            Genome g(8);
            for (std::size_t b = 0; b < 8; ++b) g[b] = rng.coin_flip();
            const double f = rng.unit_real();
            offspring.push_back({g, f});
            all.push_back(f);
        }
        const Population next = survival_selection(parents, offspring, 6);
        std::sort(all.begin(), all.end(), std::greater<>());
        REQUIRE(next.size() == 6);
        for (std::size_t i = 0; i < 6; ++i) {
            CHECK(next.members[i].fitness == all[i]);
        }
    }
}

TEST_CASE("survival_selection: ties prefer offspring, then lower genome") {
    Population parents;
    parents.members = {{Genome::from_string("00"), 0.5}};
    const std::vector<Individual> offspring = {
        {Genome::from_string("11"), 0.5}, {Genome::from_string("10"), 0.5}};
    const Population next = survival_selection(parents, offspring, 2);
    REQUIRE(next.size() == 2);
    CHECK(next.members[0].genome == Genome::from_string("10"));
    CHECK(next.members[1].genome == Genome::from_string("11"));
}

TEST_CASE("run: budget below one FIHC ends during initialization") {
    const NkInstance inst = generate_instance(30, 3, 14);
    const RunRecord record = run_memetic(inst, tiny_config(), 99, 5);
    CHECK(record.exhausted_during_init);
    CHECK(record.evaluations_used <= 5);
    CHECK(record.generations == 0);
}

TEST_CASE("run: scaled run respects invariants") {
    const NkInstance inst = generate_instance(30, 2, 15);
    MemeticConfig config = tiny_config();
    const RunRecord record = run_memetic(inst, config, 4242, 20000);
    CHECK(!record.exhausted_during_init);
    CHECK(record.evaluations_used <= 20000);
    CHECK(record.generations >= 1);
    CHECK(record.final_population_size == 30);
    CHECK(record.best_fitness >= record.final_population_min);
    CHECK(std::fabs(record.best_fitness -
                    raw_fitness(inst, record.best_genome)) <= 1e-12);
    // milestones are monotone in both coordinates
    for (std::size_t i = 1; i < record.milestones.size(); ++i) {
        CHECK(record.milestones[i].evaluations >
              record.milestones[i - 1].evaluations);
        CHECK(record.milestones[i].best >= record.milestones[i - 1].best);
    }
    CHECK(record.milestones.back().best ==
          doctest::Approx(record.best_fitness).epsilon(1e-14));
}

TEST_CASE("run: identical seeds give identical records") {
    const NkInstance inst = generate_instance(24, 2, 16);
    MemeticConfig config = tiny_config();
    const RunRecord a = run_memetic(inst, config, 555, 8000);
    const RunRecord b = run_memetic(inst, config, 555, 8000);
    CHECK(a.best_fitness == b.best_fitness);
    CHECK(a.best_genome == b.best_genome);
    CHECK(a.evaluations_used == b.evaluations_used);
    CHECK(a.generations == b.generations);
    REQUIRE(a.milestones.size() == b.milestones.size());
    for (std::size_t i = 0; i < a.milestones.size(); ++i) {
        CHECK(a.milestones[i].evaluations == b.milestones[i].evaluations);
        CHECK(a.milestones[i].best == b.milestones[i].best);
    }
}
