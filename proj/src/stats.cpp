#include "mscap/stats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <set>
#include <tuple>

namespace mscap {

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

namespace {

/// Midranks of the combined sample (a then b), average rank within ties.
std::vector<double> midranks(std::span<const double> a,
                             std::span<const double> b) {
    const std::size_t total = a.size() + b.size();
    std::vector<std::size_t> order(total);
    std::vector<double> value(total);
    for (std::size_t i = 0; i < a.size(); ++i) value[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) value[a.size() + i] = b[i];
    for (std::size_t i = 0; i < total; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return value[x] < value[y]; });

    std::vector<double> rank(total);
    std::size_t i = 0;
    while (i < total) {
        std::size_t k = i;
        while (k + 1 < total && value[order[k + 1]] == value[order[i]]) ++k;
        const double shared = 0.5 * (static_cast<double>(i + 1) +
                                     static_cast<double>(k + 1));
        for (std::size_t t = i; t <= k; ++t) rank[order[t]] = shared;
        i = k + 1;
    }
    return rank;
}

struct TailProbs {
    double le = 1.0; // P(W <= observed)
    double ge = 1.0; // P(W >= observed)
};

/// Exact null distribution: enumerate every assignment of m of the
/// combined midranks to sample a.  Midranks are multiples of 1/2, so all
/// sums compare exactly in floating point.
TailProbs exact_tails(const std::vector<double>& rank, std::size_t m,
                      double w_obs) {
    const std::size_t total = rank.size();
    if (total > 20)
        throw StatisticsError{"wilcoxon: exact enumeration limited to 20 observations"};
    long n_subsets = 0, n_le = 0, n_ge = 0;
    const std::uint32_t top = std::uint32_t{1} << total;
    for (std::uint32_t mask = 0; mask < top; ++mask) {
        if (std::popcount(mask) != static_cast<int>(m)) continue;
        double w = 0.0;
        for (std::size_t i = 0; i < total; ++i)
            if (mask & (std::uint32_t{1} << i)) w += rank[i];
        ++n_subsets;
        if (w <= w_obs) ++n_le;
        if (w >= w_obs) ++n_ge;
    }
    return {static_cast<double>(n_le) / static_cast<double>(n_subsets),
            static_cast<double>(n_ge) / static_cast<double>(n_subsets)};
}

/// Normal approximation with tie-corrected variance and continuity
/// correction of half a rank unit.
TailProbs normal_tails(const std::vector<double>& rank, std::size_t m,
                       double w_obs) {
    const auto total = static_cast<double>(rank.size());
    const auto mm = static_cast<double>(m);
    const double nn = total - mm;
    const double mean = mm * (total + 1.0) / 2.0;

    // Tie correction: group sizes from the shared midrank values.
    std::vector<double> sorted = rank;
    std::sort(sorted.begin(), sorted.end());
    double tie_sum = 0.0;
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t k = i;
        while (k + 1 < sorted.size() && sorted[k + 1] == sorted[i]) ++k;
        const auto t = static_cast<double>(k - i + 1);
        tie_sum += t * t * t - t;
        i = k + 1;
    }
    const double var = mm * nn / 12.0 *
                       ((total + 1.0) - tie_sum / (total * (total - 1.0)));
    if (var <= 0.0) return {1.0, 1.0}; // every ranking identical
    const double sd = std::sqrt(var);
    return {normal_cdf((w_obs - mean + 0.5) / sd),
            1.0 - normal_cdf((w_obs - mean - 0.5) / sd)};
}

} // namespace

ComparisonVerdict wilcoxon_rank_sum(std::span<const double> a,
                                    std::span<const double> b, double alpha,
                                    WilcoxonMethod method) {
    if (a.size() < 3 || b.size() < 3)
        throw StatisticsError{"wilcoxon: each sample needs at least 3 observations"};
    if (!(alpha > 0.0 && alpha < 1.0))
        throw StatisticsError{"wilcoxon: alpha must lie in (0,1)"};

    const std::vector<double> rank = midranks(a, b);
    double w_obs = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) w_obs += rank[i];

    const bool exact = method == WilcoxonMethod::Exact ||
                       (method == WilcoxonMethod::Auto && rank.size() <= 12);
    const TailProbs tails = exact ? exact_tails(rank, a.size(), w_obs)
                                  : normal_tails(rank, a.size(), w_obs);

    ComparisonVerdict verdict;
    verdict.p_equal = std::min(1.0, 2.0 * std::min(tails.le, tails.ge));
    verdict.p_better = tails.le;
    if (verdict.p_equal >= alpha)
        verdict.symbol = Symbol::Equals;
    else
        verdict.symbol = tails.le < tails.ge ? Symbol::Plus : Symbol::Minus;
    return verdict;
}

std::map<std::string, double> score_problems(std::span<const CellSummary> cells) {
    std::set<std::string> algorithms;
    std::map<std::string, std::vector<const CellSummary*>> by_problem;
    for (const CellSummary& cell : cells) {
        algorithms.insert(cell.algorithm);
        auto& rows = by_problem[cell.problem];
        for (const CellSummary* other : rows)
            if (other->algorithm == cell.algorithm)
                throw StatisticsError{"scoring: duplicate cell for problem '" +
                                      cell.problem + "', algorithm '" +
                                      cell.algorithm + "'"};
        rows.push_back(&cell);
    }
    if (by_problem.empty())
        throw StatisticsError{"scoring: no cells"};
    for (const auto& [problem, rows] : by_problem) {
        if (rows.size() == algorithms.size()) continue;
        for (const std::string& algorithm : algorithms) {
            const bool found =
                std::any_of(rows.begin(), rows.end(), [&](const CellSummary* c) {
                    return c->algorithm == algorithm;
                });
            if (!found)
                throw StatisticsError{"scoring: missing cell for problem '" +
                                      problem + "', algorithm '" + algorithm +
                                      "'"};
        }
    }

    const auto n_a = static_cast<double>(algorithms.size());
    std::map<std::string, double> total;
    for (const std::string& algorithm : algorithms) total[algorithm] = 0.0;

    for (auto& [problem, rows] : by_problem) {
        // Best performance first; the name key only fixes the walk order
        // inside a tie group, never the scores themselves.
        std::sort(rows.begin(), rows.end(),
                  [](const CellSummary* x, const CellSummary* y) {
                      return std::tie(x->mean_error, x->std_error, x->algorithm) <
                             std::tie(y->mean_error, y->std_error, y->algorithm);
                  });
        std::size_t i = 0;
        while (i < rows.size()) {
            std::size_t k = i;
            while (k + 1 < rows.size() &&
                   rows[k + 1]->mean_error == rows[i]->mean_error &&
                   rows[k + 1]->std_error == rows[i]->std_error)
                ++k;
            // Positions i..k (0-based) share the average of their scores
            // N_A - i ... N_A - k.
            const double shared =
                n_a - 0.5 * (static_cast<double>(i) + static_cast<double>(k));
            for (std::size_t t = i; t <= k; ++t)
                total[rows[t]->algorithm] += shared;
            i = k + 1;
        }
    }

    const auto n_tp = static_cast<double>(by_problem.size());
    for (auto& [algorithm, sum] : total) sum /= n_tp;
    return total;
}

RankTable holm_bonferroni(const std::map<std::string, double>& avg_ranks,
                          const std::string& reference, int n_problems,
                          double delta) {
    const auto ref = avg_ranks.find(reference);
    if (ref == avg_ranks.end())
        throw StatisticsError{"ranking: unknown reference algorithm '" +
                              reference + "'"};
    if (avg_ranks.size() < 2)
        throw StatisticsError{"ranking: need at least 2 algorithms"};
    if (n_problems < 1)
        throw StatisticsError{"ranking: number of problems must be positive"};
    if (!(delta > 0.0 && delta < 1.0))
        throw StatisticsError{"ranking: delta must lie in (0,1)"};

    RankTable table;
    table.reference = reference;
    table.reference_rank = ref->second;
    table.n_algorithms = static_cast<int>(avg_ranks.size());
    table.n_problems = n_problems;
    table.delta = delta;

    std::vector<std::pair<std::string, double>> opponents;
    for (const auto& [name, rank] : avg_ranks)
        if (name != reference) opponents.emplace_back(name, rank);
    std::sort(opponents.begin(), opponents.end(),
              [](const auto& x, const auto& y) {
                  if (x.second != y.second) return x.second > y.second;
                  return x.first < y.first;
              });

    const double n_a = table.n_algorithms;
    const double se =
        std::sqrt(n_a * (n_a + 1.0) / (6.0 * static_cast<double>(n_problems)));

    bool rejecting = true;
    int j = 0;
    for (const auto& [name, rank] : opponents) {
        ++j;
        RankRow row;
        row.j = j;
        row.algorithm = name;
        row.rank = rank;
        row.z = (rank - table.reference_rank) / se;
        row.p = normal_cdf(row.z);
        row.threshold = delta / static_cast<double>(j);
        row.rejected = rejecting && row.p < row.threshold;
        if (!row.rejected) rejecting = false;
        table.rows.push_back(std::move(row));
    }
    return table;
}

} // namespace mscap
