#include "mscap/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <thread>
#include <utility>

#include <json.hpp>

#include "mscap/algorithm.hpp"
#include "mscap/baseline.hpp"
#include "mscap/benchmarks.hpp"

namespace mscap {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

long parse_positive_long(const std::string& text, const std::string& what) {
    long value = 0;
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), last, value);
    if (ec != std::errc{} || ptr != last || value < 1)
        throw ConfigError{what + ": expected a positive integer, got '" + text +
                          "'"};
    return value;
}

// ---------------------------------------------------------------------
// JSON config parsing

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
    throw ConfigError{"config: field '" + field + "' " + why};
}

long get_long(const json& v, const std::string& field, long min_value) {
    if (!v.is_number_integer())
        bad_field(field, "must be an integer");
    const long value = v.get<long>();
    if (value < min_value)
        bad_field(field, "must be at least " + std::to_string(min_value));
    return value;
}

AlgorithmSpec parse_algorithm_entry(const json& entry) {
    AlgorithmSpec spec;
    if (entry.is_string()) {
        spec.name = entry.get<std::string>();
    } else if (entry.is_object()) {
        for (const auto& [key, value] : entry.items()) {
            if (key == "name") {
                if (!value.is_string())
                    bad_field("algorithms.name", "must be a string");
                spec.name = value.get<std::string>();
            } else if (key == "pop_size") {
                spec.pop_size =
                    static_cast<int>(get_long(value, "algorithms.pop_size", 1));
            } else if (key == "epsilon") {
                if (!value.is_number())
                    bad_field("algorithms.epsilon", "must be a number");
                spec.epsilon = value.get<double>();
            } else if (key == "gens_ms") {
                spec.gens_ms =
                    static_cast<int>(get_long(value, "algorithms.gens_ms", 1));
            } else {
                bad_field("algorithms." + key, "is not recognized");
            }
        }
        if (spec.name.empty())
            bad_field("algorithms", "entries need a 'name'");
    } else {
        bad_field("algorithms", "entries must be strings or objects");
    }

    if (spec.name != "mscap" && spec.name != "de-rand1-bin")
        throw ConfigError{"config: unknown algorithm '" + spec.name + "'"};

    RunConfig probe;
    probe.pop_size = spec.pop_size;
    probe.epsilon = spec.epsilon;
    probe.gens_ms = spec.gens_ms;
    probe.max_eval = 1;
    probe.validate(spec.name == "mscap" ? 6 : 4);
    return spec;
}

} // namespace

NoiseLevel parse_noise_level(const std::string& text) {
    if (text == "none") return NoiseLevel::None;
    if (text == "medium") return NoiseLevel::Medium;
    if (text == "high") return NoiseLevel::High;
    throw ConfigError{"noise level must be none, medium, or high; got '" +
                      text + "'"};
}

bool is_nn_descriptor(const std::string& problem) {
    return problem.starts_with("nn:");
}

NnDescriptor parse_nn_descriptor(const std::string& problem) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (;;) {
        const std::size_t colon = problem.find(':', start);
        if (colon == std::string::npos) {
            parts.push_back(problem.substr(start));
            break;
        }
        parts.push_back(problem.substr(start, colon - start));
        start = colon + 1;
    }
    const std::string context = "problem '" + problem + "'";
    if (parts.size() < 2 || parts[0] != "nn")
        throw ConfigError{context + ": not an nn descriptor"};

    NnDescriptor desc;
    if (parts[1] == "synthetic") {
        if (parts.size() != 5)
            throw ConfigError{context +
                              ": expected nn:synthetic:<noise>:<rows>:<hidden>"};
        desc.synthetic = true;
        desc.noise = parse_noise_level(parts[2]);
        desc.rows = parse_positive_long(parts[3], context + " rows");
        if (desc.rows < 3)
            throw ConfigError{context + ": needs at least 3 rows"};
        desc.hidden = parse_positive_long(parts[4], context + " hidden");
    } else if (parts[1] == "file") {
        if (parts.size() < 4)
            throw ConfigError{context + ": expected nn:file:<path>:<hidden>"};
        desc.synthetic = false;
        desc.hidden = parse_positive_long(parts.back(), context + " hidden");
        std::string path;
        for (std::size_t i = 2; i + 1 < parts.size(); ++i) {
            if (i > 2) path += ':';
            path += parts[i];
        }
        if (path.empty())
            throw ConfigError{context + ": empty dataset path"};
        desc.path = std::move(path);
    } else {
        throw ConfigError{context + ": expected nn:synthetic:... or nn:file:..."};
    }
    return desc;
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError{std::string{"config: "} + e.what()};
    }
    if (!root.is_object())
        throw ConfigError{"config: top level must be a JSON object"};

    static const std::set<std::string> known{
        "algorithms", "problems",   "dimensions", "seeds",
        "budget_multiplier", "output_dir", "problem_seed"};
    for (const auto& [key, value] : root.items())
        if (!known.contains(key))
            throw ConfigError{"config: unknown field '" + key + "'"};

    ExperimentConfig config;

    const auto algorithms = root.find("algorithms");
    if (algorithms == root.end() || !algorithms->is_array() ||
        algorithms->empty())
        bad_field("algorithms", "must be a non-empty list");
    for (const json& entry : *algorithms) {
        AlgorithmSpec spec = parse_algorithm_entry(entry);
        for (const AlgorithmSpec& seen : config.algorithms)
            if (seen.name == spec.name)
                throw ConfigError{"config: duplicate algorithm '" + spec.name +
                                  "'"};
        config.algorithms.push_back(std::move(spec));
    }

    const auto problems = root.find("problems");
    if (problems == root.end() || !problems->is_array() || problems->empty())
        bad_field("problems", "must be a non-empty list");
    bool any_benchmark = false;
    for (const json& entry : *problems) {
        if (!entry.is_string())
            bad_field("problems", "entries must be strings");
        const auto name = entry.get<std::string>();
        if (is_nn_descriptor(name)) {
            parse_nn_descriptor(name); // validates
        } else {
            resolve_benchmark(name, 2); // throws for unknown names
            any_benchmark = true;
        }
        if (std::find(config.problems.begin(), config.problems.end(), name) !=
            config.problems.end())
            throw ConfigError{"config: duplicate problem '" + name + "'"};
        config.problems.push_back(name);
    }

    if (const auto dimensions = root.find("dimensions");
        dimensions != root.end()) {
        if (!dimensions->is_array())
            bad_field("dimensions", "must be a list of integers");
        for (const json& entry : *dimensions) {
            const long d = get_long(entry, "dimensions", 2);
            if (std::find(config.dimensions.begin(), config.dimensions.end(),
                          d) != config.dimensions.end())
                throw ConfigError{"config: duplicate dimension " +
                                  std::to_string(d)};
            config.dimensions.push_back(d);
        }
    }
    if (any_benchmark && config.dimensions.empty())
        bad_field("dimensions", "must be non-empty when benchmark problems are present");

    const auto seeds = root.find("seeds");
    if (seeds == root.end())
        bad_field("seeds", "is required (count or list)");
    if (seeds->is_number_integer()) {
        const long count = get_long(*seeds, "seeds", 1);
        for (long s = 1; s <= count; ++s)
            config.seeds.push_back(static_cast<std::uint64_t>(s));
    } else if (seeds->is_array() && !seeds->empty()) {
        for (const json& entry : *seeds) {
            const long s = get_long(entry, "seeds", 0);
            const auto seed = static_cast<std::uint64_t>(s);
            if (std::find(config.seeds.begin(), config.seeds.end(), seed) !=
                config.seeds.end())
                throw ConfigError{"config: duplicate seed " +
                                  std::to_string(seed)};
            config.seeds.push_back(seed);
        }
    } else {
        bad_field("seeds", "must be a positive count or a non-empty list");
    }

    if (const auto it = root.find("budget_multiplier"); it != root.end())
        config.budget_multiplier = get_long(*it, "budget_multiplier", 1);
    if (const auto it = root.find("output_dir"); it != root.end()) {
        if (!it->is_string() || it->get<std::string>().empty())
            bad_field("output_dir", "must be a non-empty string");
        config.output_dir = it->get<std::string>();
    }
    if (const auto it = root.find("problem_seed"); it != root.end())
        config.problem_seed =
            static_cast<std::uint64_t>(get_long(*it, "problem_seed", 0));

    return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError{"config: cannot open '" + path + "'"};
    std::string text{std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>()};
    return parse_experiment_config(text);
}

int thread_cap() {
    if (const char* env = std::getenv("MSCAP_THREADS")) {
        const std::string text{env};
        long value = 0;
        const char* last = text.data() + text.size();
        auto [ptr, ec] = std::from_chars(text.data(), last, value);
        if (ec == std::errc{} && ptr == last && value >= 1)
            return static_cast<int>(value);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

namespace {

/// Runs body(0..count-1), spreading indices over up to thread_cap()
/// workers.  `body` must handle its own failures.
void for_each_cell(std::size_t count, const std::function<void(std::size_t)>& body) {
    const int threads = std::min<long>(thread_cap(), static_cast<long>(count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            body(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
}

RunRecord run_algorithm(const AlgorithmSpec& alg, const Problem& problem,
                        long max_eval, std::uint64_t seed) {
    RunConfig rc;
    rc.pop_size = alg.pop_size;
    rc.epsilon = alg.epsilon;
    rc.gens_ms = alg.gens_ms;
    rc.max_eval = max_eval;
    rc.seed = seed;
    if (alg.name == "mscap") return run(problem, rc);
    if (alg.name == "de-rand1-bin") return run_de(problem, rc);
    throw ConfigError{"unknown algorithm '" + alg.name + "'"};
}

std::string trend_file_name(const std::string& problem, long dimension,
                            const std::string& algorithm, std::uint64_t seed) {
    return "trend_" + sanitize_file_component(problem) + "_D" +
           std::to_string(dimension) + "_" + sanitize_file_component(algorithm) +
           "_s" + std::to_string(seed) + ".csv";
}

std::mutex log_mutex;

void log_line(const std::string& line) {
    const std::lock_guard<std::mutex> guard{log_mutex};
    std::cerr << line << '\n';
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    namespace fs = std::filesystem;

    // Materialize every problem once so all algorithms and seeds share the
    // exact same landscape instance.
    struct CellProblem {
        std::string id;
        long dimension = 0;
        Problem problem;
    };
    std::vector<CellProblem> cell_problems;

    std::vector<std::string> problems = config.problems;
    std::sort(problems.begin(), problems.end());
    std::vector<long> dimensions = config.dimensions;
    std::sort(dimensions.begin(), dimensions.end());

    for (const std::string& id : problems) {
        if (is_nn_descriptor(id)) {
            const NnDescriptor desc = parse_nn_descriptor(id);
            const KinDataset dataset =
                desc.synthetic
                    ? synth_kinematics(desc.rows, desc.noise, config.problem_seed)
                    : load_dataset(desc.path);
            const DataSplit split = split_three_ways(dataset, kSplitSeed);
            cell_problems.push_back(
                {id, desc.dimension(),
                 mse_objective(dataset, split.train, desc.hidden, id)});
        } else {
            for (const long d : dimensions)
                cell_problems.push_back(
                    {id, d, make_benchmark(id, d, config.problem_seed)});
        }
    }

    struct Cell {
        const CellProblem* problem = nullptr;
        const AlgorithmSpec* algorithm = nullptr;
        std::uint64_t seed = 0;
    };
    std::vector<const AlgorithmSpec*> algorithms;
    for (const AlgorithmSpec& alg : config.algorithms)
        algorithms.push_back(&alg);
    std::sort(algorithms.begin(), algorithms.end(),
              [](const AlgorithmSpec* a, const AlgorithmSpec* b) {
                  return a->name < b->name;
              });
    std::vector<std::uint64_t> seeds = config.seeds;
    std::sort(seeds.begin(), seeds.end());

    std::vector<Cell> cells;
    for (const CellProblem& cp : cell_problems)
        for (const AlgorithmSpec* alg : algorithms)
            for (const std::uint64_t seed : seeds)
                cells.push_back({&cp, alg, seed});

    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec)
        throw IoError{"cannot create output directory '" + config.output_dir +
                      "': " + ec.message()};

    std::vector<SummaryRow> rows(cells.size());
    for_each_cell(cells.size(), [&](std::size_t i) {
        const Cell& cell = cells[i];
        SummaryRow row;
        row.problem = cell.problem->id;
        row.dimension = cell.problem->dimension;
        row.algorithm = cell.algorithm->name;
        row.seed = cell.seed;
        row.final_error = kInf;
        row.final_fitness = kInf;
        row.n_eval = 0;
        row.status = "failed";
        try {
            const long budget = config.budget_multiplier * cell.problem->dimension;
            const RunRecord record = run_algorithm(
                *cell.algorithm, cell.problem->problem, budget, cell.seed);
            row.final_fitness = record.best_fitness;
            row.final_error =
                cell.problem->problem.optimum_fitness
                    ? record.best_fitness - *cell.problem->problem.optimum_fitness
                    : std::numeric_limits<double>::quiet_NaN();
            row.n_eval = record.n_eval;
            row.status = "ok";
            write_trend_csv(
                (fs::path(config.output_dir) /
                 trend_file_name(row.problem, row.dimension, row.algorithm,
                                 row.seed))
                    .string(),
                record.trend);
            log_line("cell " + row.problem + " D" + std::to_string(row.dimension) +
                     " " + row.algorithm + " seed " + std::to_string(row.seed) +
                     ": error " + format_double(row.final_error));
        } catch (const std::exception& e) {
            log_line("cell " + row.problem + " D" + std::to_string(row.dimension) +
                     " " + row.algorithm + " seed " + std::to_string(row.seed) +
                     ": failed: " + e.what());
        } catch (...) {
            log_line("cell " + row.problem + ": failed: unknown error");
        }
        rows[i] = std::move(row);
    });

    ExperimentResult result;
    result.summary = std::move(rows);
    result.summary_path = (fs::path(config.output_dir) / "summary.csv").string();
    write_summary_csv(result.summary_path, result.summary);
    return result;
}

// ---------------------------------------------------------------------
// compare / rank

namespace {

using CellKey = std::pair<std::string, long>; // (problem, dimension)

std::string cell_key_text(const CellKey& key) {
    return key.first + " D" + std::to_string(key.second);
}

struct SummaryFile {
    std::string algorithm;
    std::map<CellKey, std::vector<double>> errors; // status ok rows only
};

SummaryFile group_summary(const std::string& path) {
    SummaryFile file;
    std::set<std::string> algorithms;
    for (const SummaryRow& row : read_summary_csv(path)) {
        algorithms.insert(row.algorithm);
        if (row.status != "ok") continue;
        if (std::isnan(row.final_error))
            throw StatisticsError{"compare: '" + path +
                                  "' has a non-numeric final_error for " +
                                  row.problem};
        file.errors[{row.problem, row.dimension}].push_back(row.final_error);
    }
    if (algorithms.size() != 1)
        throw StatisticsError{"compare: '" + path + "' must contain exactly " +
                              "one algorithm, found " +
                              std::to_string(algorithms.size())};
    file.algorithm = *algorithms.begin();
    return file;
}

} // namespace

CompareReport compare_summaries(const std::string& a_path,
                                const std::string& b_path, double alpha) {
    const SummaryFile a = group_summary(a_path);
    const SummaryFile b = group_summary(b_path);

    std::string only_a, only_b;
    for (const auto& [key, errs] : a.errors)
        if (!b.errors.contains(key)) only_a += " " + cell_key_text(key);
    for (const auto& [key, errs] : b.errors)
        if (!a.errors.contains(key)) only_b += " " + cell_key_text(key);
    if (!only_a.empty() || !only_b.empty())
        throw StatisticsError{"compare: cell sets differ; only in '" + a_path +
                              "':" + (only_a.empty() ? " none" : only_a) +
                              "; only in '" + b_path +
                              "':" + (only_b.empty() ? " none" : only_b)};

    CompareReport report;
    report.algorithm_a = a.algorithm;
    report.algorithm_b = b.algorithm;
    for (const auto& [key, a_errors] : a.errors) {
        const std::vector<double>& b_errors = b.errors.at(key);
        const ComparisonVerdict verdict =
            wilcoxon_rank_sum(a_errors, b_errors, alpha);
        report.cells.push_back({key.first, key.second, verdict.symbol,
                                verdict.p_equal, verdict.p_better});
        switch (verdict.symbol) {
        case Symbol::Plus: ++report.plus; break;
        case Symbol::Equals: ++report.equal; break;
        case Symbol::Minus: ++report.minus; break;
        }
    }
    return report;
}

RankTable rank_summaries(std::span<const std::string> paths,
                         const std::string& reference, double delta) {
    if (paths.empty())
        throw StatisticsError{"ranking: need at least one summary file"};

    std::map<std::pair<std::string, std::string>, std::vector<double>> samples;
    for (const std::string& path : paths) {
        for (const SummaryRow& row : read_summary_csv(path)) {
            const std::string problem =
                row.problem + "/D" + std::to_string(row.dimension);
            double error = row.final_error;
            if (row.status != "ok" || std::isnan(error)) error = kInf;
            samples[{problem, row.algorithm}].push_back(error);
        }
    }

    std::vector<CellSummary> cells;
    std::set<std::string> problem_keys;
    for (const auto& [key, errors] : samples) {
        CellSummary cell;
        cell.problem = key.first;
        cell.algorithm = key.second;
        problem_keys.insert(key.first);
        double mean = 0.0;
        for (const double e : errors) mean += e;
        mean /= static_cast<double>(errors.size());
        if (std::isfinite(mean)) {
            double var = 0.0;
            for (const double e : errors) var += (e - mean) * (e - mean);
            cell.std_error = std::sqrt(var / static_cast<double>(errors.size()));
            cell.mean_error = mean;
        } else {
            cell.mean_error = kInf;
            cell.std_error = 0.0;
        }
        cells.push_back(std::move(cell));
    }

    const std::map<std::string, double> ranks = score_problems(cells);
    return holm_bonferroni(ranks, reference,
                           static_cast<int>(problem_keys.size()), delta);
}

// ---------------------------------------------------------------------
// train-nn

namespace {

void write_nn_summary_csv(const std::string& path,
                          std::span<const NnRunRow> rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError{"cannot write '" + path + "'"};
    out << kNnSummaryHeader << '\n';
    for (const NnRunRow& row : rows) {
        out << row.dataset << ',' << row.hidden << ',' << row.algorithm << ','
            << row.seed << ',' << format_double(row.train_mse) << ','
            << format_double(row.validation_mse) << ','
            << format_double(row.test_mse) << ',' << row.n_eval << ','
            << row.status << '\n';
    }
    if (!out) throw IoError{"write failed for '" + path + "'"};
}

} // namespace

TrainNnReport train_nn(const std::string& data, long hidden, int seed_count,
                       long budget_multiplier, const std::string& out_dir) {
    if (hidden < 1) throw ConfigError{"train-nn: hidden must be at least 1"};
    if (seed_count < 1) throw ConfigError{"train-nn: seeds must be at least 1"};
    if (budget_multiplier < 1)
        throw ConfigError{"train-nn: budget multiplier must be at least 1"};

    KinDataset dataset;
    if (data.starts_with("synthetic:")) {
        std::vector<std::string> parts;
        std::size_t start = 0;
        for (;;) {
            const std::size_t colon = data.find(':', start);
            if (colon == std::string::npos) {
                parts.push_back(data.substr(start));
                break;
            }
            parts.push_back(data.substr(start, colon - start));
            start = colon + 1;
        }
        if (parts.size() != 3)
            throw ConfigError{"train-nn: expected synthetic:<noise>:<rows>, got '" +
                              data + "'"};
        const NoiseLevel noise = parse_noise_level(parts[1]);
        const long rows = parse_positive_long(parts[2], "train-nn rows");
        if (rows < 3) throw ConfigError{"train-nn: needs at least 3 rows"};
        dataset = synth_kinematics(rows, noise, kDefaultProblemSeed);
    } else {
        dataset = load_dataset(data);
    }

    const DataSplit split = split_three_ways(dataset, kSplitSeed);
    const Problem problem =
        mse_objective(dataset, split.train, hidden, "nn-train");
    const long budget = budget_multiplier * problem.dimension();

    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw IoError{"cannot create output directory '" + out_dir +
                      "': " + ec.message()};

    std::vector<NnRunRow> rows(static_cast<std::size_t>(seed_count));
    for_each_cell(rows.size(), [&](std::size_t i) {
        const auto seed = static_cast<std::uint64_t>(i + 1);
        NnRunRow row;
        row.dataset = data;
        row.hidden = hidden;
        row.algorithm = "mscap";
        row.seed = seed;
        row.train_mse = kInf;
        row.validation_mse = kInf;
        row.test_mse = kInf;
        row.status = "failed";
        try {
            RunConfig rc;
            rc.max_eval = budget;
            rc.seed = seed;
            const RunRecord record = run(problem, rc);
            const FFNetwork net = decode_weights(record.best_position, hidden);
            row.train_mse = record.best_fitness;
            row.validation_mse = mse_of(dataset, split.validation, net);
            row.test_mse = mse_of(dataset, split.test, net);
            row.n_eval = record.n_eval;
            row.status = "ok";
            write_trend_csv(
                (fs::path(out_dir) /
                 trend_file_name(data, (kNetInputs + 1) * hidden, "mscap", seed))
                    .string(),
                record.trend);
            log_line("train-nn seed " + std::to_string(seed) + ": train " +
                     format_double(row.train_mse) + " test " +
                     format_double(row.test_mse));
        } catch (const std::exception& e) {
            log_line("train-nn seed " + std::to_string(seed) +
                     ": failed: " + e.what());
        }
        rows[i] = std::move(row);
    });

    TrainNnReport report;
    report.rows = std::move(rows);
    report.summary_path = (fs::path(out_dir) / "nn_summary.csv").string();
    write_nn_summary_csv(report.summary_path, report.rows);
    return report;
}

} // namespace mscap
