#include "nkma/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "nkma/msls.hpp"
#include "nkma/stats.hpp"

namespace nkma {

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

FihcOptions::Shuffle parse_shuffle(const std::string& s) {
    if (s == "once") return FihcOptions::Shuffle::Once;
    if (s == "per-sweep") return FihcOptions::Shuffle::PerSweep;
    throw SpecError("fihc_shuffle must be 'once' or 'per-sweep', got '" + s +
                    "'");
}

AlgorithmSpec parse_algorithm(const nlohmann::json& j) {
    AlgorithmSpec algo;
    if (!j.contains("name") || !j.contains("type")) {
        throw SpecError("algorithm entries need 'name' and 'type'");
    }
    algo.name = j["name"].get<std::string>();
    algo.type = j["type"].get<std::string>();
    if (algo.type != "memetic" && algo.type != "msls") {
        throw SpecError("algorithm type must be 'memetic' or 'msls', got '" +
                        algo.type + "'");
    }
    if (j.contains("fihc_shuffle")) {
        algo.fihc.shuffle = parse_shuffle(j["fihc_shuffle"].get<std::string>());
        algo.memetic.fihc = algo.fihc;
    }
    if (algo.type == "memetic") {
        auto& m = algo.memetic;
        if (j.contains("lambda")) m.lambda = j["lambda"].get<std::size_t>();
        if (j.contains("n_vae")) m.n_vae = j["n_vae"].get<std::size_t>();
        if (m.n_vae < 1) throw SpecError("n_vae must be >= 1");
        if (j.contains("vae_hidden"))
            m.vae_hidden = j["vae_hidden"].get<std::size_t>();
        if (j.contains("vae_latent"))
            m.vae_latent = j["vae_latent"].get<std::size_t>();
        if (j.contains("epochs")) m.train.epochs = j["epochs"].get<std::size_t>();
        if (j.contains("batch_size"))
            m.train.batch_size = j["batch_size"].get<std::size_t>();
        if (j.contains("learning_rate"))
            m.train.learning_rate = j["learning_rate"].get<double>();
        if (j.contains("filter_raw")) m.filter_raw = j["filter_raw"].get<bool>();
        if (j.contains("warm_start")) m.warm_start = j["warm_start"].get<bool>();
    }
    return algo;
}

}  // namespace

ExperimentSpec ExperimentSpec::parse(std::istream& in) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw SpecError(std::string("malformed spec JSON: ") + e.what());
    }
    ExperimentSpec spec;
    if (!j.contains("instance")) throw SpecError("missing 'instance'");
    const auto& inst = j["instance"];
    if (inst.contains("file")) {
        spec.instance_file = inst["file"].get<std::string>();
    } else {
        for (const char* field : {"n", "k", "seed"}) {
            if (!inst.contains(field)) {
                throw SpecError(std::string("instance needs 'file' or 'n'/'k'/"
                                            "'seed'; missing '") +
                                field + "'");
            }
        }
        spec.n = inst["n"].get<std::size_t>();
        spec.k = inst["k"].get<std::size_t>();
        spec.instance_seed = inst["seed"].get<std::uint64_t>();
    }
    if (!j.contains("trials")) throw SpecError("missing 'trials'");
    if (!j.contains("budget")) throw SpecError("missing 'budget'");
    if (!j.contains("master_seed")) throw SpecError("missing 'master_seed'");
    spec.trials = j["trials"].get<std::size_t>();
    spec.budget = j["budget"].get<std::uint64_t>();
    spec.master_seed = j["master_seed"].get<std::uint64_t>();
    if (spec.trials < 1) throw SpecError("trials must be >= 1");

    if (!j.contains("algorithms") || !j["algorithms"].is_array() ||
        j["algorithms"].empty()) {
        throw SpecError("missing or empty 'algorithms' array");
    }
    std::unordered_set<std::string> names;
    for (const auto& a : j["algorithms"]) {
        AlgorithmSpec algo = parse_algorithm(a);
        if (!names.insert(algo.name).second) {
            throw SpecError("duplicate algorithm name '" + algo.name + "'");
        }
        spec.algorithms.push_back(std::move(algo));
    }
    spec.reference = j.value("reference", spec.algorithms.front().name);
    if (!names.contains(spec.reference)) {
        throw SpecError("reference '" + spec.reference +
                        "' is not a listed algorithm");
    }
    return spec;
}

ExperimentSpec ExperimentSpec::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot open spec file: " + path);
    return parse(in);
}

std::uint64_t derive_trial_seed(std::uint64_t master_seed,
                                const std::string& algorithm,
                                std::uint64_t trial) {
    return Rng::mix(Rng::mix(master_seed ^ fnv1a(algorithm)) + trial);
}

ResultTable make_result_table(const std::vector<RunRecord>& records,
                              const std::string& reference,
                              std::size_t failed_trials) {
    // group by algorithm, preserving first-seen order
    std::vector<std::string> order;
    std::vector<std::vector<double>> samples;
    for (const RunRecord& r : records) {
        auto it = std::find(order.begin(), order.end(), r.algorithm);
        if (it == order.end()) {
            order.push_back(r.algorithm);
            samples.emplace_back();
            it = order.end() - 1;
        }
        samples[static_cast<std::size_t>(it - order.begin())].push_back(
            r.best_fitness);
    }

    ResultTable table;
    table.reference = reference;
    table.failed_trials = failed_trials;

    const auto ref_it = std::find(order.begin(), order.end(), reference);
    const std::ptrdiff_t ref_index =
        ref_it == order.end() ? -1 : ref_it - order.begin();

    for (std::size_t g = 0; g < order.size(); ++g) {
        ResultRow row;
        row.name = order[g];
        row.trials = samples[g].size();
        double sum = 0.0;
        for (double v : samples[g]) sum += v;
        row.mean = sum / static_cast<double>(samples[g].size());
        if (samples[g].size() > 1) {
            double sq = 0.0;
            for (double v : samples[g]) sq += (v - row.mean) * (v - row.mean);
            row.stddev =
                std::sqrt(sq / static_cast<double>(samples[g].size() - 1));
        }
        row.is_reference =
            ref_index >= 0 && g == static_cast<std::size_t>(ref_index);
        table.rows.push_back(std::move(row));
    }

    const bool enough = std::all_of(samples.begin(), samples.end(),
                                    [](const auto& s) { return s.size() >= 2; });
    if (ref_index >= 0 && order.size() >= 2) {
        const double ref_mean =
            table.rows[static_cast<std::size_t>(ref_index)].mean;
        for (ResultRow& row : table.rows) {
            if (!row.is_reference) row.diff = ref_mean - row.mean;
        }
        if (enough) {
            const auto pairs = stats::dunn_holm(samples, ref_index);
            for (const stats::DunnPair& pair : pairs) {
                ResultRow& row = table.rows[pair.group_b];
                row.p_adjusted = pair.p_adjusted;
                row.stars = stats::significance_stars(pair.p_adjusted);
                row.p_valid = true;
            }
        }
    }
    return table;
}

ExperimentOutcome run_experiment(const ExperimentSpec& spec,
                                 const std::string& output_dir,
                                 std::size_t jobs) {
    const NkInstance instance =
        spec.instance_file.empty()
            ? generate_instance(spec.n, spec.k, spec.instance_seed)
            : load_instance_file(spec.instance_file);

    std::filesystem::create_directories(output_dir);

    struct Task {
        const AlgorithmSpec* algorithm;
        std::uint64_t trial;
    };
    std::vector<Task> tasks;
    for (const AlgorithmSpec& algo : spec.algorithms) {
        for (std::uint64_t t = 0; t < spec.trials; ++t) {
            tasks.push_back({&algo, t});
        }
    }

    std::vector<RunRecord> records(tasks.size());
    std::vector<char> completed(tasks.size(), 0);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> failures{0};

    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            const Task& task = tasks[i];
            const std::uint64_t seed = derive_trial_seed(
                spec.master_seed, task.algorithm->name, task.trial);
            try {
                RunRecord record =
                    task.algorithm->type == "memetic"
                        ? run_memetic(instance, task.algorithm->memetic, seed,
                                      spec.budget)
                        : run_msls(instance, seed, spec.budget,
                                   task.algorithm->fihc);
                record.algorithm = task.algorithm->name;
                record.trial = task.trial;
                records[i] = std::move(record);
                completed[i] = 1;
            } catch (const std::exception&) {
                failures.fetch_add(1);
            }
        }
    };

    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    ExperimentOutcome outcome;
    outcome.failed_trials = failures.load();
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (!completed[i]) continue;
        const RunRecord& record = records[i];
        std::ostringstream name;
        name << record.algorithm << "_trial" << record.trial << ".json";
        record.save_file(
            (std::filesystem::path(output_dir) / name.str()).string());
        outcome.records.push_back(record);
    }

    outcome.table = make_result_table(outcome.records, spec.reference,
                                      outcome.failed_trials);
    {
        std::ofstream txt(std::filesystem::path(output_dir) / "table.txt");
        write_table_text(outcome.table, txt);
        std::ofstream csv(std::filesystem::path(output_dir) / "table.csv");
        write_table_csv(outcome.table, csv);
    }
    return outcome;
}

std::vector<RunRecord> load_records_dir(const std::string& dir) {
    std::vector<std::string> paths;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".json") {
            paths.push_back(entry.path().string());
        }
    }
    std::sort(paths.begin(), paths.end());
    std::vector<RunRecord> records;
    for (const std::string& p : paths) {
        records.push_back(RunRecord::load_file(p));
    }
    // stable order: algorithm name, then trial
    std::stable_sort(records.begin(), records.end(),
                     [](const RunRecord& a, const RunRecord& b) {
                         if (a.algorithm != b.algorithm)
                             return a.algorithm < b.algorithm;
                         return a.trial < b.trial;
                     });
    return records;
}

namespace {

std::string format_fixed(double v, int precision) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(precision) << v;
    return out.str();
}

std::string format_diff(double v) {
    std::ostringstream out;
    out << (v >= 0.0 ? "+" : "") << std::fixed << std::setprecision(4) << v;
    return out.str();
}

}  // namespace

void write_table_text(const ResultTable& table, std::ostream& out) {
    std::size_t name_width = 9;  // "algorithm"
    for (const ResultRow& row : table.rows) {
        name_width = std::max(name_width, row.name.size());
    }
    out << std::left << std::setw(static_cast<int>(name_width + 2))
        << "algorithm" << std::setw(8) << "trials" << std::setw(10) << "mean"
        << std::setw(10) << "std" << std::setw(10) << "diff" << std::setw(10)
        << "p_adj" << "sig" << '\n';
    for (const ResultRow& row : table.rows) {
        out << std::left << std::setw(static_cast<int>(name_width + 2))
            << row.name << std::setw(8) << row.trials << std::setw(10)
            << format_fixed(row.mean, 4) << std::setw(10)
            << format_fixed(row.stddev, 4);
        if (row.is_reference) {
            out << std::setw(10) << "-" << std::setw(10) << "-";
        } else {
            out << std::setw(10) << format_diff(row.diff) << std::setw(10)
                << (row.p_valid ? format_fixed(row.p_adjusted, 4) : "n/a");
        }
        out << row.stars << '\n';
    }
    if (table.failed_trials > 0) {
        out << "warning: " << table.failed_trials << " trial(s) failed\n";
    }
    if (std::any_of(table.rows.begin(), table.rows.end(),
                    [](const ResultRow& r) {
                        return !r.is_reference && !r.p_valid;
                    }) &&
        table.rows.size() > 1) {
        out << "note: p-values omitted (fewer than 2 samples per group)\n";
    }
}

void write_table_csv(const ResultTable& table, std::ostream& out) {
    out << "algorithm,trials,mean,std,diff,p_adjusted,stars\n";
    for (const ResultRow& row : table.rows) {
        out << row.name << ',' << row.trials << ','
            << format_fixed(row.mean, 10) << ',' << format_fixed(row.stddev, 10)
            << ',';
        if (!row.is_reference) out << format_fixed(row.diff, 10);
        out << ',';
        if (row.p_valid) out << format_fixed(row.p_adjusted, 10);
        out << ',' << row.stars << '\n';
    }
}

}  // namespace nkma
