#include "mscap/algorithm.hpp"

#include <cmath>
#include <utility>

namespace mscap {

Swarm init_swarm(const Problem& problem, int pop_size, BudgetLedger& ledger,
                 RandomStream& rng) {
    const Bounds& bounds = problem.bounds;
    const Eigen::Index dim = bounds.dimension();

    Vec x0(dim);
    for (Eigen::Index j = 0; j < dim; ++j)
        x0[j] = rng.uniform(bounds.lower[j], bounds.upper[j]);
    const double f0 = evaluate(problem, x0, ledger);

    Swarm swarm;
    swarm.particles.resize(static_cast<std::size_t>(pop_size));
    for (Particle& p : swarm.particles) {
        p.x = x0;
        p.v = init_velocity(bounds, rng);
        p.f = f0;
        p.life = 0;
    }
    swarm.best = 0;
    return swarm;
}

bool cap_update_particle(std::size_t i, Swarm& swarm, const Problem& problem,
                         BudgetLedger& ledger, RandomStream& rng,
                         SavedState& saved) {
    Particle& p = swarm.particles[i];
    saved.x = p.x;
    saved.f = p.f;

    // Attraction strength grows with the fraction of the budget already
    // spent, read before this particle's own evaluation.
    const double spent =
        static_cast<double>(ledger.n_eval) / static_cast<double>(ledger.max_eval);
    const Vec& best_x = swarm.best_position();
    const Eigen::Index dim = p.x.size();
    for (Eigen::Index j = 0; j < dim; ++j) {
        p.v[j] += rng.u01() * spent * (best_x[j] - p.x[j]);
        p.x[j] += p.v[j];
    }
    p.x = toroidal_wrap(std::move(p.x), problem.bounds);
    p.f = evaluate(problem, p.x, ledger);

    if (p.f < swarm.best_fitness()) {
        swarm.best = i;
        return true;
    }
    return false;
}

void cap_age(std::size_t i, bool improved, const SavedState& saved,
             Swarm& swarm, const Bounds& bounds, double epsilon,
             RandomStream& rng, SweepMetrics* metrics) {
    Particle& p = swarm.particles[i];
    if (improved) {
        p.life = 0; // the move paid off: keep the new position, stay young
        return;
    }

    ++p.life;
    if (metrics != nullptr && p.life > metrics->max_lifetime)
        metrics->max_lifetime = p.life;

    const double decay = std::exp(-p.life);
    if (decay < epsilon) {
        // The particle aged out: restart it from a random other particle
        // with a fresh random velocity.
        p.life = 0;
        const std::size_t donor = rng.index_excluding(swarm.size(), i);
        p.x = swarm.particles[donor].x;
        p.f = swarm.particles[donor].f;
        p.v = init_velocity(bounds, rng);
        // If the restart overwrote the current best particle, the best
        // index no longer witnesses the swarm minimum; rescan.
        if (swarm.best == i)
            swarm.refresh_best();
        return;
    }

    // The move did not pay off: undo it and perturb the velocity, braking
    // on even lifetimes and reversing on odd ones.
    p.x = saved.x;
    p.f = saved.f;
    if (p.life % 2 == 0)
        p.v *= -decay;
    else
        p.v *= -1.0;
}

bool cap_sweep(Swarm& swarm, const Problem& problem, BudgetLedger& ledger,
               RandomStream& rng, double epsilon, SweepMetrics* metrics) {
    bool update = false;
    SavedState saved;
    for (std::size_t i = 0; i < swarm.size(); ++i) {
        if (cap_update_particle(i, swarm, problem, ledger, rng, saved))
            update = true;
        const bool improved = swarm.particles[i].f < saved.f;
        cap_age(i, improved, saved, swarm, problem.bounds, epsilon, rng,
                metrics);
    }
    return update;
}

Vec de_mutate(MutationStrategy strategy, std::size_t i, const Swarm& swarm,
              const Bounds& bounds, double f_scale, double k_scale,
              RandomStream& rng, std::array<std::size_t, 5>* picked) {
    std::array<std::size_t, 5> idx;
    rng.distinct_indices(swarm.size(), i, idx);
    if (picked != nullptr)
        *picked = idx;

    const auto& ps = swarm.particles;
    const Vec& xr = ps[idx[0]].x;
    const Vec& xs = ps[idx[1]].x;
    const Vec& xt = ps[idx[2]].x;
    const Vec& xu = ps[idx[3]].x;
    const Vec& xv = ps[idx[4]].x;
    const Vec& xi = ps[i].x;
    const Vec& xb = swarm.best_position();

    Vec mutant;
    switch (strategy) {
    case MutationStrategy::Rand1:
        mutant = xr + f_scale * (xs - xt);
        break;
    case MutationStrategy::Rand2:
        mutant = xr + f_scale * (xs - xt) + f_scale * (xu - xv);
        break;
    case MutationStrategy::RandToBest2:
        mutant = xr + k_scale * (xb - xi) + f_scale * (xr - xs) +
                 f_scale * (xu - xv);
        break;
    case MutationStrategy::CurToBest1:
        mutant = xi + f_scale * (xb - xi) + f_scale * (xs - xt);
        break;
    default:
        throw ConfigError{"unknown mutation strategy"};
    }
    return toroidal_wrap(std::move(mutant), bounds);
}

Vec de_crossover(CrossoverStrategy strategy, const Vec& parent,
                 const Vec& mutant, double cr, RandomStream& rng) {
    const Eigen::Index dim = parent.size();
    Vec trial = parent;
    if (strategy == CrossoverStrategy::Binomial) {
        const auto j_rand =
            static_cast<Eigen::Index>(rng.uniform_index(static_cast<std::size_t>(dim)));
        for (Eigen::Index j = 0; j < dim; ++j) {
            const double u = rng.u01();
            if (u < cr || j == j_rand)
                trial[j] = mutant[j];
        }
        return trial;
    }
    if (strategy == CrossoverStrategy::Exponential) {
        auto j = static_cast<Eigen::Index>(
            rng.uniform_index(static_cast<std::size_t>(dim)));
        Eigen::Index copied = 0;
        do {
            trial[j] = mutant[j];
            j = (j + 1) % dim;
            ++copied;
        } while (copied < dim && rng.u01() < cr);
        return trial;
    }
    throw ConfigError{"unknown crossover strategy"};
}

namespace {

/// End-of-stage bookkeeping: changed particles restart their velocities
/// and lifetimes so the particle stage does not chase stale momentum.
void refresh_changed(Swarm& swarm, const std::vector<std::uint8_t>& changed,
                     const Bounds& bounds, RandomStream& rng) {
    for (std::size_t i = 0; i < swarm.size(); ++i) {
        if (!changed[i])
            continue;
        swarm.particles[i].v = init_velocity(bounds, rng);
        swarm.particles[i].life = 0;
    }
}

} // namespace

std::vector<std::uint8_t> ms_stage(Swarm& swarm, const Problem& problem,
                                   BudgetLedger& ledger, int gens,
                                   RandomStream& rng) {
    const std::size_t n = swarm.size();
    std::vector<std::uint8_t> changed(n, 0);
    std::vector<double> old_f(n);

    try {
        for (int g = 0; g < gens; ++g) {
            for (std::size_t i = 0; i < n; ++i)
                old_f[i] = swarm.particles[i].f;

            for (std::size_t i = 0; i < n; ++i) {
                const double f_scale = rng.uniform(0.1, 1.0);
                const double cr = rng.u01();
                const double k_scale = rng.u01();
                const auto strategy =
                    static_cast<MutationStrategy>(rng.uniform_index(4));
                const auto crossover =
                    static_cast<CrossoverStrategy>(rng.uniform_index(2));

                const Vec mutant = de_mutate(strategy, i, swarm,
                                             problem.bounds, f_scale, k_scale,
                                             rng);
                Vec trial = de_crossover(crossover, swarm.particles[i].x,
                                         mutant, cr, rng);
                trial = toroidal_wrap(std::move(trial), problem.bounds);
                const double f_trial = evaluate(problem, trial, ledger);
                if (f_trial < old_f[i]) {
                    swarm.particles[i].x = std::move(trial);
                    swarm.particles[i].f = f_trial;
                    changed[i] = 1;
                }
            }
            swarm.refresh_best();
        }
    } catch (const BudgetExhausted&) {
        swarm.refresh_best();
        refresh_changed(swarm, changed, problem.bounds, rng);
        throw;
    }

    refresh_changed(swarm, changed, problem.bounds, rng);
    return changed;
}

RunRecord run(const Problem& problem, const RunConfig& config) {
    config.validate(/*min_pop=*/6);

    BudgetLedger ledger{config.max_eval};
    TrendRecorder recorder{config.max_eval};
    ledger.on_evaluation = [&recorder](long n, double f, const Vec& x) {
        recorder.observe(n, f, x);
    };

    Mt64Stream rng{config.seed};
    SweepMetrics metrics;

    RunRecord record;
    record.algorithm = "mscap";
    record.problem = problem.name;
    record.dimension = problem.dimension();
    record.seed = config.seed;
    record.max_eval = config.max_eval;

    try {
        Swarm swarm = init_swarm(problem, config.pop_size, ledger, rng);
        for (;;) {
            const bool update =
                cap_sweep(swarm, problem, ledger, rng, config.epsilon, &metrics);
            if (config.record_stage_events)
                record.stage_events.push_back({StageKind::Cap, update});
            if (!update) {
                ms_stage(swarm, problem, ledger, config.gens_ms, rng);
                if (config.record_stage_events)
                    record.stage_events.push_back({StageKind::Ms, false});
            }
        }
    } catch (const BudgetExhausted&) {
        // budget spent: fall through and package the result
    }

    recorder.finalize(ledger.n_eval);
    record.best_position = recorder.best_position();
    record.best_fitness = recorder.best_fitness();
    record.n_eval = ledger.n_eval;
    record.nonfinite_evals = ledger.nonfinite_evals;
    record.max_lifetime_seen = metrics.max_lifetime;
    record.trend = recorder.take_samples();
    return record;
}

} // namespace mscap
