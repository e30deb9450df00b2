#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mscap {

/// Invalid or inconsistent input to a statistical procedure.
class StatisticsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Standard normal CDF.
double normal_cdf(double z);

enum class Symbol { Plus, Equals, Minus };

/// Outcome of one pairwise comparison.  `p_equal` is the two-sided p-value
/// of the equality hypothesis; `p_better` the one-sided p-value of "sample
/// a is stochastically smaller" (better, under minimization).
struct ComparisonVerdict {
    Symbol symbol = Symbol::Equals;
    double p_equal = 1.0;
    double p_better = 1.0;
};

/// Null-distribution evaluation path. Auto uses exact enumeration for
/// combined sizes up to 12 and the normal approximation beyond.
enum class WilcoxonMethod { Auto, Exact, Normal };

/// Wilcoxon rank-sum test with midrank tie handling.  Exact path:
/// enumeration of all subset rank assignments.  Normal path: tie-corrected
/// variance with continuity correction.  Requires at least 3 observations
/// per sample.
ComparisonVerdict wilcoxon_rank_sum(std::span<const double> a,
                                    std::span<const double> b, double alpha,
                                    WilcoxonMethod method = WilcoxonMethod::Auto);

/// One (problem, algorithm) cell of an experiment: mean and standard
/// deviation of the final error over seeds.
struct CellSummary {
    std::string problem;
    std::string algorithm;
    double mean_error = 0.0;
    double std_error = 0.0;
};

/// Scores every problem — best algorithm gets N_A points, worst 1, ties on
/// (mean, std) share the average of their positions — and averages the
/// scores per algorithm over all problems.  Every algorithm must cover
/// every problem.
std::map<std::string, double> score_problems(std::span<const CellSummary> cells);

/// One opponent line of the sequential ranking procedure.
struct RankRow {
    int j = 0;
    std::string algorithm;
    double rank = 0.0;
    double z = 0.0;
    double p = 0.0;
    double threshold = 0.0; // delta / j
    bool rejected = false;  // true: performance difference is significant
};

struct RankTable {
    std::string reference;
    double reference_rank = 0.0;
    int n_algorithms = 0; // N_A
    int n_problems = 0;   // N_TP
    double delta = 0.0;
    std::vector<RankRow> rows; // opponents by descending rank
};

/// Sequentially rejective ranking against a reference algorithm:
/// z_j = (R_j - R_0) / sqrt(N_A(N_A+1)/(6 N_TP)), p_j = Phi(z_j), reject
/// while p_j < delta/j; the first acceptance ends testing and all
/// remaining hypotheses are accepted.
RankTable holm_bonferroni(const std::map<std::string, double>& avg_ranks,
                          const std::string& reference, int n_problems,
                          double delta);

} // namespace mscap
