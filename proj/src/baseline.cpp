#include "mscap/baseline.hpp"

#include <array>
#include <utility>
#include <vector>

#include "mscap/algorithm.hpp"
#include "mscap/random.hpp"

namespace mscap {

RunRecord run_de(const Problem& problem, const RunConfig& config) {
    config.validate(/*min_pop=*/4);

    constexpr double kF = 0.5;
    constexpr double kCr = 0.9;

    BudgetLedger ledger{config.max_eval};
    TrendRecorder recorder{config.max_eval};
    ledger.on_evaluation = [&recorder](long n, double f, const Vec& x) {
        recorder.observe(n, f, x);
    };

    Mt64Stream rng{config.seed};
    const Bounds& bounds = problem.bounds;
    const Eigen::Index dim = bounds.dimension();
    const auto n = static_cast<std::size_t>(config.pop_size);

    RunRecord record;
    record.algorithm = "de-rand1-bin";
    record.problem = problem.name;
    record.dimension = dim;
    record.seed = config.seed;
    record.max_eval = config.max_eval;

    try {
        std::vector<Vec> pop(n);
        std::vector<double> fit(n);
        for (std::size_t i = 0; i < n; ++i) {
            Vec x(dim);
            for (Eigen::Index j = 0; j < dim; ++j)
                x[j] = rng.uniform(bounds.lower[j], bounds.upper[j]);
            fit[i] = evaluate(problem, x, ledger);
            pop[i] = std::move(x);
        }

        // Generational scheme: donors and parents come from the previous
        // generation; survivors are collected into `next` and swapped in.
        std::vector<Vec> next(n);
        std::vector<double> next_fit(n);
        std::array<std::size_t, 3> idx;
        for (;;) {
            for (std::size_t i = 0; i < n; ++i) {
                rng.distinct_indices(n, i, idx);
                Vec mutant = pop[idx[0]] + kF * (pop[idx[1]] - pop[idx[2]]);
                mutant = toroidal_wrap(std::move(mutant), bounds);
                Vec trial = de_crossover(CrossoverStrategy::Binomial, pop[i],
                                         mutant, kCr, rng);
                trial = toroidal_wrap(std::move(trial), bounds);
                const double f_trial = evaluate(problem, trial, ledger);
                if (f_trial < fit[i]) {
                    next[i] = std::move(trial);
                    next_fit[i] = f_trial;
                } else {
                    next[i] = pop[i];
                    next_fit[i] = fit[i];
                }
            }
            pop.swap(next);
            fit.swap(next_fit);
        }
    } catch (const BudgetExhausted&) {
        // budget spent: fall through and package the result
    }

    recorder.finalize(ledger.n_eval);
    record.best_position = recorder.best_position();
    record.best_fitness = recorder.best_fitness();
    record.n_eval = ledger.n_eval;
    record.nonfinite_evals = ledger.nonfinite_evals;
    record.trend = recorder.take_samples();
    return record;
}

} // namespace mscap
