#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "nkma/memetic.hpp"
#include "nkma/run_record.hpp"

namespace nkma {

/// Invalid or inconsistent experiment spec (CLI exit code 2).
struct SpecError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AlgorithmSpec {
    std::string name;  // unique within a spec
    std::string type;  // "memetic" or "msls"
    MemeticConfig memetic;
    FihcOptions fihc;  // for msls
};

struct ExperimentSpec {
    std::string instance_file;  // empty means generate from (n, k, seed)
    std::size_t n = 0;
    std::size_t k = 0;
    std::uint64_t instance_seed = 0;
    std::size_t trials = 1;
    std::uint64_t budget = 0;
    std::uint64_t master_seed = 0;
    std::string reference;  // algorithm compared against; default: first
    std::vector<AlgorithmSpec> algorithms;

    static ExperimentSpec parse(std::istream& in);
    static ExperimentSpec parse_file(const std::string& path);
};

/// Pure function of (master seed, algorithm name, trial); no two trials
/// of a spec share a seed.
std::uint64_t derive_trial_seed(std::uint64_t master_seed,
                                const std::string& algorithm,
                                std::uint64_t trial);

struct ResultRow {
    std::string name;
    std::size_t trials = 0;
    double mean = 0.0;
    double stddev = 0.0;
    bool is_reference = false;
    double diff = 0.0;        // mean(reference) - mean(this)
    double p_adjusted = 1.0;
    std::string stars;
    bool p_valid = false;
};

struct ResultTable {
    std::string reference;
    std::vector<ResultRow> rows;
    std::size_t failed_trials = 0;
};

/// Mean/std plus Dunn-Holm comparisons of every algorithm against the
/// reference. Groups of fewer than two samples leave the p columns
/// flagged invalid.
ResultTable make_result_table(const std::vector<RunRecord>& records,
                              const std::string& reference,
                              std::size_t failed_trials = 0);

struct ExperimentOutcome {
    std::vector<RunRecord> records;
    ResultTable table;
    std::size_t failed_trials = 0;
};

/// Runs trials x algorithms (independent trials dispatched to `jobs`
/// workers), persists one RunRecord JSON per trial plus the tables under
/// `output_dir`. Failed trials are counted and skipped in the table.
ExperimentOutcome run_experiment(const ExperimentSpec& spec,
                                 const std::string& output_dir,
                                 std::size_t jobs = 1);

/// Re-reads persisted RunRecords from a results directory.
std::vector<RunRecord> load_records_dir(const std::string& dir);

/// Aligned human-readable table. Diff printed with explicit sign.
void write_table_text(const ResultTable& table, std::ostream& out);

/// Machine-readable CSV with a header row; field order is stable:
/// algorithm,trials,mean,std,diff,p_adjusted,stars
void write_table_csv(const ResultTable& table, std::ostream& out);

}  // namespace nkma
