#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mscap/experiment.hpp"

namespace mscap {

namespace {

char symbol_char(Symbol symbol) {
    switch (symbol) {
    case Symbol::Plus: return '+';
    case Symbol::Minus: return '-';
    case Symbol::Equals: break;
    }
    return '=';
}

void print_mean_std(const std::string& label, const std::vector<double>& xs) {
    if (xs.empty()) {
        std::cout << label << ",nan,nan\n";
        return;
    }
    double mean = 0.0;
    for (const double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (const double x : xs) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / static_cast<double>(xs.size()));
    std::cout << label << ',' << format_double(mean) << ',' << format_double(sd)
              << '\n';
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Budget-driven derivative-free optimization experiments"};
    app.require_subcommand(1);

    std::string config_path;
    CLI::App* cmd_run = app.add_subcommand(
        "run", "Execute an algorithm x problem x seed grid from a JSON config");
    cmd_run->add_option("--config", config_path, "JSON experiment config file")
        ->required();

    std::string a_path, b_path;
    double alpha = 0.05;
    CLI::App* cmd_compare = app.add_subcommand(
        "compare", "Per-problem rank-sum verdicts between two summary CSVs");
    cmd_compare->add_option("--a", a_path, "first summary CSV (reference)")
        ->required();
    cmd_compare->add_option("--b", b_path, "second summary CSV")->required();
    cmd_compare->add_option("--alpha", alpha, "significance level");

    std::vector<std::string> summary_paths;
    std::string reference;
    double delta = 0.05;
    CLI::App* cmd_rank = app.add_subcommand(
        "rank", "Sequentially rejective ranking against a reference algorithm");
    cmd_rank->add_option("--summaries", summary_paths, "summary CSV files")
        ->required();
    cmd_rank->add_option("--reference", reference, "reference algorithm id")
        ->required();
    cmd_rank->add_option("--delta", delta, "significance level");

    std::string nn_data;
    long nn_hidden = 0;
    int nn_seeds = 5;
    long nn_multiplier = 5000;
    std::string nn_out = "nn_results";
    CLI::App* cmd_train = app.add_subcommand(
        "train-nn", "Train the kinematics regression network");
    cmd_train
        ->add_option("--data", nn_data,
                     "dataset CSV path or synthetic:<noise>:<rows>")
        ->required();
    cmd_train->add_option("--hidden", nn_hidden, "hidden units")->required();
    cmd_train->add_option("--seeds", nn_seeds, "number of seeded runs (1..K)");
    cmd_train->add_option("--budget-multiplier", nn_multiplier,
                          "evaluations per weight dimension");
    cmd_train->add_option("--out", nn_out, "output directory");

    long kin_n = 0;
    std::string kin_noise = "medium";
    std::uint64_t kin_seed = 1;
    std::string kin_out;
    CLI::App* cmd_gen = app.add_subcommand(
        "gen-kin", "Generate a synthetic arm-kinematics dataset CSV");
    cmd_gen->add_option("--n", kin_n, "number of rows")->required();
    cmd_gen->add_option("--noise", kin_noise, "noise level: medium or high");
    cmd_gen->add_option("--seed", kin_seed, "generator seed");
    cmd_gen->add_option("--out", kin_out, "output CSV path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(cmd_run)) {
            const ExperimentConfig config = load_experiment_config(config_path);
            const ExperimentResult result = run_experiment(config);
            std::cout << "wrote " << result.summary_path << " ("
                      << result.summary.size() << " rows)\n";
            return 0;
        }
        if (app.got_subcommand(cmd_compare)) {
            const CompareReport report =
                compare_summaries(a_path, b_path, alpha);
            std::cout << "a," << report.algorithm_a << "\n"
                      << "b," << report.algorithm_b << "\n"
                      << "problem,dimension,symbol,p_equal,p_better\n";
            for (const CellVerdict& cell : report.cells)
                std::cout << cell.problem << ',' << cell.dimension << ','
                          << symbol_char(cell.symbol) << ','
                          << format_double(cell.p_equal) << ','
                          << format_double(cell.p_better) << '\n';
            std::cout << "(-/=/+): " << report.minus << '/' << report.equal
                      << '/' << report.plus << '\n';
            return 0;
        }
        if (app.got_subcommand(cmd_rank)) {
            const RankTable table =
                rank_summaries(summary_paths, reference, delta);
            std::cout << "reference," << table.reference << ','
                      << format_double(table.reference_rank) << '\n'
                      << "j,optimizer,rank,z_j,p_j,delta_j,hypothesis\n";
            for (const RankRow& row : table.rows)
                std::cout << row.j << ',' << row.algorithm << ','
                          << format_double(row.rank) << ','
                          << format_double(row.z) << ','
                          << format_double(row.p) << ','
                          << format_double(row.threshold) << ','
                          << (row.rejected ? "Rejected" : "Accepted") << '\n';
            return 0;
        }
        if (app.got_subcommand(cmd_train)) {
            const TrainNnReport report =
                train_nn(nn_data, nn_hidden, nn_seeds, nn_multiplier, nn_out);
            std::cout << "wrote " << report.summary_path << " ("
                      << report.rows.size() << " rows)\n";
            std::vector<double> train, validation, test;
            for (const NnRunRow& row : report.rows) {
                if (row.status != "ok") continue;
                train.push_back(row.train_mse);
                validation.push_back(row.validation_mse);
                test.push_back(row.test_mse);
            }
            std::cout << "metric,mean,std\n";
            print_mean_std("train_mse", train);
            print_mean_std("validation_mse", validation);
            print_mean_std("test_mse", test);
            return 0;
        }
        if (app.got_subcommand(cmd_gen)) {
            const NoiseLevel noise = parse_noise_level(kin_noise);
            if (noise == NoiseLevel::None)
                throw ConfigError{
                    "gen-kin: noise level must be medium or high"};
            const Eigen::MatrixXd raw =
                synth_kinematics_raw(kin_n, noise, kin_seed);
            write_dataset_csv(kin_out, raw);
            std::cout << "wrote " << kin_out << " (" << raw.rows()
                      << " rows)\n";
            return 0;
        }
        std::cerr << "error: no subcommand given\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const StatisticsError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

} // namespace mscap
