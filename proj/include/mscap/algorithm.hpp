#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mscap/core.hpp"
#include "mscap/random.hpp"
#include "mscap/record.hpp"

namespace mscap {

enum class MutationStrategy : int {
    Rand1 = 0,
    Rand2 = 1,
    RandToBest2 = 2,
    CurToBest1 = 3,
};

enum class CrossoverStrategy : int {
    Binomial = 0,
    Exponential = 1,
};

/// Position/fitness snapshot of one particle, taken before its move.
struct SavedState {
    Vec x;
    double f = 0.0;
};

/// Instrumentation collected by the aging step.
struct SweepMetrics {
    int max_lifetime = 0;
};

/// Builds the initial swarm: one uniformly random point is evaluated once
/// and copied to every particle; each particle gets an independent random
/// velocity with components uniform in [-width/2, width/2).
Swarm init_swarm(const Problem& problem, int pop_size, BudgetLedger& ledger,
                 RandomStream& rng);

/// Moves particle i (attraction toward the swarm best scaled by the spent
/// budget fraction), wraps it into the bounds, and evaluates it.  Updates
/// the swarm best index on strict improvement.  Returns true when the
/// swarm best improved.  `saved` receives the pre-move state.
bool cap_update_particle(std::size_t i, Swarm& swarm, const Problem& problem,
                         BudgetLedger& ledger, RandomStream& rng,
                         SavedState& saved);

/// Applies the aging rules to particle i after its move: reset life on
/// personal improvement; otherwise age it, and either perturb the restored
/// particle's velocity or — once the decay factor e^(-life) drops below
/// epsilon — restart it from a random donor particle.
void cap_age(std::size_t i, bool improved, const SavedState& saved,
             Swarm& swarm, const Bounds& bounds, double epsilon,
             RandomStream& rng, SweepMetrics* metrics = nullptr);

/// One full pass of the particle stage over the swarm, in index order.
/// Returns true if the swarm best improved at least once.  Throws
/// BudgetExhausted when the ledger runs out mid-sweep.
bool cap_sweep(Swarm& swarm, const Problem& problem, BudgetLedger& ledger,
               RandomStream& rng, double epsilon,
               SweepMetrics* metrics = nullptr);

/// Builds a mutant vector for particle i from the current swarm and wraps
/// it into the bounds.  Five mutually distinct donor indices (all != i)
/// are always drawn, regardless of how many the strategy uses.  `picked`
/// (optional) receives those indices.
Vec de_mutate(MutationStrategy strategy, std::size_t i, const Swarm& swarm,
              const Bounds& bounds, double f_scale, double k_scale,
              RandomStream& rng, std::array<std::size_t, 5>* picked = nullptr);

/// Recombines parent and mutant.  Binomial: each gene comes from the
/// mutant with probability cr, plus one forced gene.  Exponential: a
/// contiguous circular block of mutant genes starting at a random index.
Vec de_crossover(CrossoverStrategy strategy, const Vec& parent,
                 const Vec& mutant, double cr, RandomStream& rng);

/// The differential-evolution stage: `gens` generations over the swarm,
/// each particle tried with a random strategy pair and accepted greedily.
/// Every particle that changed gets a fresh random velocity and life 0.
/// Returns the changed mask (also applied on budget exhaustion, before
/// the BudgetExhausted exception propagates).
std::vector<std::uint8_t> ms_stage(Swarm& swarm, const Problem& problem,
                                   BudgetLedger& ledger, int gens,
                                   RandomStream& rng);

/// Runs the full optimizer on `problem` until the evaluation budget is
/// spent and returns the run record (algorithm id "mscap").
RunRecord run(const Problem& problem, const RunConfig& config);

} // namespace mscap
