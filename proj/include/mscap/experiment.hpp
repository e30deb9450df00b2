#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mscap/core.hpp"
#include "mscap/csv.hpp"
#include "mscap/neuralnet.hpp"
#include "mscap/stats.hpp"

namespace mscap {

/// Seed used to materialize problem instances (benchmark shifts/rotations,
/// synthetic datasets) so every algorithm faces the same landscape.
inline constexpr std::uint64_t kDefaultProblemSeed = 12345;

/// Seed of the train/validation/test shuffle; fixed so MSE numbers from
/// different invocations are comparable.
inline constexpr std::uint64_t kSplitSeed = 2024;

/// One algorithm entry of an experiment, with its tunable parameters.
struct AlgorithmSpec {
    std::string name; // "mscap" or "de-rand1-bin"
    int pop_size = 50;
    double epsilon = 1e-6;
    int gens_ms = 3;
};

/// A full experiment grid: every algorithm runs on every problem cell
/// (benchmark problems cross with every dimension; nn problems carry
/// their own dimension) for every seed, with budget multiplier * D.
struct ExperimentConfig {
    std::vector<AlgorithmSpec> algorithms;
    std::vector<std::string> problems;
    std::vector<long> dimensions;
    std::vector<std::uint64_t> seeds;
    long budget_multiplier = 5000;
    std::string output_dir = "results";
    std::uint64_t problem_seed = kDefaultProblemSeed;
};

/// Parses the flat JSON config object; field names mirror
/// ExperimentConfig ("seeds" accepts a count or a list).  Unknown fields,
/// unknown algorithms/problems, and out-of-range values raise ConfigError.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

/// Parsed form of an nn objective descriptor:
/// "nn:synthetic:<noise>:<rows>:<hidden>" or "nn:file:<path>:<hidden>".
struct NnDescriptor {
    bool synthetic = true;
    NoiseLevel noise = NoiseLevel::Medium;
    Eigen::Index rows = 0; // synthetic only
    std::string path;      // file only
    Eigen::Index hidden = 0;

    Eigen::Index dimension() const { return (kNetInputs + 1) * hidden; }
};

bool is_nn_descriptor(const std::string& problem);
NnDescriptor parse_nn_descriptor(const std::string& problem);

/// "none" | "medium" | "high" (the CLI only exposes medium/high).
NoiseLevel parse_noise_level(const std::string& text);

/// Concurrency cap: MSCAP_THREADS when set to a positive integer,
/// otherwise the machine parallelism.
int thread_cap();

struct ExperimentResult {
    std::vector<SummaryRow> summary;
    std::string summary_path;
};

/// Runs the whole grid (cells concurrently up to thread_cap()), writes one
/// trend CSV per run plus summary.csv under output_dir, and returns the
/// summary rows sorted by (problem, dimension, algorithm, seed).  A cell
/// whose run throws is reported with status "failed"; the rest proceed.
ExperimentResult run_experiment(const ExperimentConfig& config);

struct CellVerdict {
    std::string problem;
    long dimension = 0;
    Symbol symbol = Symbol::Equals;
    double p_equal = 1.0;
    double p_better = 1.0;
};

struct CompareReport {
    std::string algorithm_a, algorithm_b;
    std::vector<CellVerdict> cells;
    int minus = 0, equal = 0, plus = 0;
};

/// Per-(problem, dimension) rank-sum verdicts of summary a against
/// summary b; each file must hold exactly one algorithm and both must
/// cover the same cells.
CompareReport compare_summaries(const std::string& a_path,
                                const std::string& b_path, double alpha);

/// Scores all (problem, algorithm) cells from the given summaries and
/// runs the sequential ranking procedure against the reference.
RankTable rank_summaries(std::span<const std::string> paths,
                         const std::string& reference, double delta);

struct NnRunRow {
    std::string dataset;
    long hidden = 0;
    std::string algorithm;
    std::uint64_t seed = 0;
    double train_mse = 0.0;
    double validation_mse = 0.0;
    double test_mse = 0.0;
    long n_eval = 0;
    std::string status = "ok";
};

inline constexpr const char* kNnSummaryHeader =
    "dataset,hidden,algorithm,seed,train_mse,validation_mse,test_mse,n_eval,status";

struct TrainNnReport {
    std::vector<NnRunRow> rows;
    std::string summary_path;
};

/// Trains the network on the training third per seed (seeds 1..count),
/// reports train/validation/test MSE, and writes nn_summary.csv plus one
/// trend CSV per seed under out_dir.  `data` is a dataset CSV path or
/// "synthetic:<noise>:<rows>".
TrainNnReport train_nn(const std::string& data, long hidden, int seed_count,
                       long budget_multiplier, const std::string& out_dir);

/// The command-line entry point (exposed so tests can drive it).
/// Exit codes: 0 success, 1 validation error, 2 runtime failure.
int cli_main(int argc, const char* const* argv);

} // namespace mscap
