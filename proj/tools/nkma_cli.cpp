#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nkma/experiment.hpp"
#include "nkma/nk_landscape.hpp"

namespace {

int cmd_gen_instance(std::size_t n, std::size_t k, std::uint64_t seed,
                     const std::string& out) {
    const nkma::NkInstance inst = nkma::generate_instance(n, k, seed);
    nkma::save_instance_file(inst, out);
    std::cout << "wrote n=" << n << " k=" << k << " seed=" << seed << " to "
              << out << '\n';
    return 0;
}

int cmd_run(const std::string& spec_path, const std::string& out_dir,
            std::size_t jobs) {
    const nkma::ExperimentSpec spec =
        nkma::ExperimentSpec::parse_file(spec_path);
    const nkma::ExperimentOutcome outcome =
        nkma::run_experiment(spec, out_dir, jobs);
    nkma::write_table_text(outcome.table, std::cout);
    if (outcome.failed_trials > 0) {
        std::cerr << outcome.failed_trials << " trial(s) failed\n";
        return 3;
    }
    return 0;
}

int cmd_table(const std::string& results_dir, const std::string& reference) {
    const std::vector<nkma::RunRecord> records =
        nkma::load_records_dir(results_dir);
    if (records.empty()) {
        std::cerr << "no run records in " << results_dir << '\n';
        return 2;
    }
    const std::string ref =
        reference.empty() ? records.front().algorithm : reference;
    const nkma::ResultTable table = nkma::make_result_table(records, ref);
    nkma::write_table_text(table, std::cout);
    return 0;
}

int cmd_oracle(const std::string& instance_file, std::size_t n, std::size_t k,
               std::uint64_t seed) {
    const nkma::NkInstance inst = instance_file.empty()
                                      ? nkma::generate_instance(n, k, seed)
                                      : nkma::load_instance_file(instance_file);
    const auto [genome, fitness] = nkma::brute_force_optimum(inst);
    std::cout << "optimum " << genome.to_string() << " fitness " << fitness
              << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"NK-landscape memetic optimizer and experiment harness"};
    app.require_subcommand(1);

    std::size_t n = 0, k = 0, jobs = 1;
    std::uint64_t seed = 0;
    std::string out, spec_path, results_dir, reference, instance_file;

    auto* gen = app.add_subcommand("gen-instance",
                                   "Generate a seeded NK instance file");
    gen->add_option("--n", n, "problem size")->required();
    gen->add_option("--k", k, "epistasis degree")->required();
    gen->add_option("--seed", seed, "instance seed")->required();
    gen->add_option("--out", out, "output path")->required();

    auto* run = app.add_subcommand("run", "Run an experiment spec");
    run->add_option("--spec", spec_path, "experiment spec JSON")->required();
    run->add_option("--out", out, "output directory")->required();
    run->add_option("--jobs", jobs, "parallel trial workers");

    auto* table =
        app.add_subcommand("table", "Rebuild the result table from records");
    table->add_option("--results", results_dir, "results directory")
        ->required();
    table->add_option("--reference", reference,
                      "reference algorithm (default: first)");

    auto* oracle = app.add_subcommand(
        "oracle", "Brute-force the optimum of a small instance");
    oracle->add_option("--instance", instance_file, "instance file");
    oracle->add_option("--n", n, "problem size");
    oracle->add_option("--k", k, "epistasis degree");
    oracle->add_option("--seed", seed, "instance seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen_instance(n, k, seed, out);
        if (run->parsed()) return cmd_run(spec_path, out, jobs);
        if (table->parsed()) return cmd_table(results_dir, reference);
        if (oracle->parsed()) return cmd_oracle(instance_file, n, k, seed);
    } catch (const nkma::SpecError& e) {
        std::cerr << "spec error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
