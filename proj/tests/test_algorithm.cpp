#include <doctest.h>

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "mscap/algorithm.hpp"
#include "mscap/core.hpp"
#include "mscap/csv.hpp"
#include "test_support.hpp"

using namespace mscap;
using mscap::test::ScriptedStream;
using mscap::test::same;

namespace {

Problem square_1d(double center = 0.0, double lo = 0.0, double hi = 10.0) {
    return Problem{"square",
                   Bounds::uniform(1, lo, hi),
                   [center](const Vec& x) {
                       const double d = x[0] - center;
                       return d * d;
                   },
                   0.0,
                   std::nullopt};
}

Problem sphere_nd(Eigen::Index dim, double lo, double hi) {
    return Problem{"sphere", Bounds::uniform(dim, lo, hi),
                   [](const Vec& x) { return x.squaredNorm(); }, 0.0,
                   std::nullopt};
}

Vec vec1(double a) {
    Vec v(1);
    v << a;
    return v;
}

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

std::size_t argmin_fitness(const Swarm& swarm) {
    std::size_t b = 0;
    for (std::size_t i = 1; i < swarm.size(); ++i)
        if (swarm.particles[i].f < swarm.particles[b].f) b = i;
    return b;
}

/// Six particles on a line at x = 0..5 with fitness (x-5)^2, best at 5.
Swarm line_swarm() {
    Swarm swarm;
    swarm.particles.resize(6);
    for (std::size_t j = 0; j < 6; ++j) {
        auto& p = swarm.particles[j];
        p.x = vec1(static_cast<double>(j));
        p.v = vec1(0.0);
        const double d = static_cast<double>(j) - 5.0;
        p.f = d * d;
        p.life = 0;
    }
    swarm.best = 5;
    return swarm;
}

} // namespace

TEST_CASE("init_swarm evaluates one point and clones it into every particle") {
    const Problem problem = sphere_nd(2, 0.0, 10.0);
    BudgetLedger ledger{100};
    ScriptedStream rng{{0.25, 0.75,        // the single initial position
                        0.5, 0.5,          // velocity of particle 0
                        0.0, 0.9,          // velocity of particle 1
                        0.25, 0.75}};      // velocity of particle 2
    const Swarm swarm = init_swarm(problem, 3, ledger, rng);

    CHECK(ledger.n_eval == 1);
    CHECK(rng.remaining() == 0);
    REQUIRE(swarm.size() == 3);
    CHECK(swarm.best == 0);
    for (const Particle& p : swarm.particles) {
        CHECK(same(p.x, vec2(2.5, 7.5)));
        CHECK(p.f == 62.5);
        CHECK(p.life == 0);
    }
    CHECK(same(swarm.particles[0].v, vec2(0.0, 0.0)));
    CHECK(same(swarm.particles[1].v, vec2(-5.0, 4.0)));
    CHECK(same(swarm.particles[2].v, vec2(-2.5, 2.5)));
}

TEST_CASE("particle move: budget-scaled pull toward the best, live best handoff") {
    const Problem problem = square_1d(3.5);
    Swarm swarm;
    swarm.particles.resize(2);
    swarm.particles[0] = {vec1(5.0), vec1(0.0), 2.25, 0};
    swarm.particles[1] = {vec1(1.0), vec1(1.0), 6.25, 0};
    swarm.best = 0;

    BudgetLedger ledger{2};
    ledger.n_eval = 1; // half the budget already spent -> pull factor 0.5
    ScriptedStream rng{{0.5}};
    SavedState saved;

    const bool updated =
        cap_update_particle(1, swarm, problem, ledger, rng, saved);

    CHECK(same(saved.x, vec1(1.0)));
    CHECK(saved.f == 6.25);
    // v' = 1 + 0.5 * 0.5 * (5 - 1) = 2, x' = 1 + 2 = 3, f = (3-3.5)^2
    CHECK(same(swarm.particles[1].v, vec1(2.0)));
    CHECK(same(swarm.particles[1].x, vec1(3.0)));
    CHECK(swarm.particles[1].f == 0.25);
    CHECK(updated);
    CHECK(swarm.best == 1);
    CHECK(ledger.n_eval == 2);
    CHECK(rng.remaining() == 0);
}

TEST_CASE("particle move: the best particle feels no attraction to itself") {
    const Problem problem = square_1d(3.5);
    Swarm swarm;
    swarm.particles.resize(2);
    swarm.particles[0] = {vec1(5.0), vec1(0.5), 2.25, 0};
    swarm.particles[1] = {vec1(1.0), vec1(1.0), 6.25, 0};
    swarm.best = 0;

    BudgetLedger ledger{3};
    ledger.n_eval = 1;
    ScriptedStream rng{{0.9}};
    SavedState saved;

    const bool updated =
        cap_update_particle(0, swarm, problem, ledger, rng, saved);

    CHECK(same(swarm.particles[0].v, vec1(0.5))); // unchanged: zero pull
    CHECK(same(swarm.particles[0].x, vec1(5.5)));
    CHECK(swarm.particles[0].f == 4.0);
    CHECK_FALSE(updated);
    CHECK(swarm.best == 0);
}

TEST_CASE("particle move wraps the new position into the box") {
    const Problem problem = square_1d(3.5);
    Swarm swarm;
    swarm.particles.resize(2);
    swarm.particles[0] = {vec1(3.5), vec1(0.0), 0.0, 0};
    swarm.particles[1] = {vec1(9.0), vec1(2.0), 30.25, 0};
    swarm.best = 0;

    BudgetLedger ledger{10}; // fresh: pull factor 0
    ScriptedStream rng{{0.7}};
    SavedState saved;
    cap_update_particle(1, swarm, problem, ledger, rng, saved);

    // x' = 9 + 2 = 11 wraps to 1 in [0, 10)
    CHECK(same(swarm.particles[1].x, vec1(1.0)));
    CHECK(swarm.particles[1].f == 6.25);
    CHECK(problem.bounds.contains(swarm.particles[1].x));
}

TEST_CASE("equal fitness is not an improvement (strict comparisons)") {
    const Problem problem = square_1d(0.0, -10.0, 10.0);
    Swarm swarm;
    swarm.particles.resize(2);
    swarm.particles[0] = {vec1(2.0), vec1(-4.0), 4.0, 0};
    swarm.particles[1] = {vec1(3.0), vec1(0.0), 9.0, 0};
    swarm.best = 0;

    BudgetLedger ledger{10};
    ScriptedStream rng{{0.33}};
    SavedState saved;
    // x: 2 -> -2, f stays exactly 4: neither a swarm nor a personal gain.
    const bool updated =
        cap_update_particle(0, swarm, problem, ledger, rng, saved);
    CHECK_FALSE(updated);
    CHECK(swarm.particles[0].f == 4.0);

    const bool improved = swarm.particles[0].f < saved.f;
    CHECK_FALSE(improved);
    SweepMetrics metrics;
    cap_age(0, improved, saved, swarm, problem.bounds, 1e-6, rng, &metrics);
    CHECK(swarm.particles[0].life == 1);
    CHECK(same(swarm.particles[0].x, vec1(2.0))); // move undone
    CHECK(same(swarm.particles[0].v, vec1(4.0))); // odd life: reversed
    CHECK(metrics.max_lifetime == 1);
}

TEST_CASE("aging: improvement resets life and keeps the move") {
    Swarm swarm;
    swarm.particles.resize(2);
    swarm.particles[0] = {vec1(3.0), vec1(2.0), 0.25, 7};
    swarm.particles[1] = {vec1(9.0), vec1(0.0), 30.25, 0};
    swarm.best = 0;
    const Bounds bounds = Bounds::uniform(1, 0.0, 10.0);
    const SavedState saved{vec1(1.0), 6.25};

    ScriptedStream rng{{}};
    SweepMetrics metrics;
    cap_age(0, true, saved, swarm, bounds, 1e-6, rng, &metrics);

    CHECK(swarm.particles[0].life == 0);
    CHECK(same(swarm.particles[0].x, vec1(3.0)));
    CHECK(swarm.particles[0].f == 0.25);
    CHECK(same(swarm.particles[0].v, vec1(2.0)));
    CHECK(metrics.max_lifetime == 0);
}

TEST_CASE("aging: failed moves are undone; velocity flips on odd, brakes on even") {
    const Bounds bounds = Bounds::uniform(1, 0.0, 10.0);
    Swarm swarm;
    swarm.particles.resize(2);
    swarm.particles[1] = {vec1(0.0), vec1(0.0), 0.0, 0};
    swarm.best = 1;
    const SavedState saved{vec1(1.0), 1.0};
    SweepMetrics metrics;

    SUBCASE("life 0 -> 1 (odd): pure reversal") {
        swarm.particles[0] = {vec1(3.0), vec1(2.0), 9.0, 0};
        ScriptedStream rng{{}};
        cap_age(0, false, saved, swarm, bounds, 1e-6, rng, &metrics);
        CHECK(swarm.particles[0].life == 1);
        CHECK(same(swarm.particles[0].x, vec1(1.0)));
        CHECK(swarm.particles[0].f == 1.0);
        CHECK(same(swarm.particles[0].v, vec1(-2.0)));
        CHECK(metrics.max_lifetime == 1);
    }

    SUBCASE("life 1 -> 2 (even): reversal shrunk by the decay factor") {
        swarm.particles[0] = {vec1(3.0), vec1(3.0), 9.0, 1};
        ScriptedStream rng{{}};
        cap_age(0, false, saved, swarm, bounds, 1e-6, rng, &metrics);
        CHECK(swarm.particles[0].life == 2);
        CHECK(same(swarm.particles[0].x, vec1(1.0)));
        CHECK(swarm.particles[0].v[0] == -3.0 * std::exp(-2.0));
        CHECK(metrics.max_lifetime == 2);
    }

    SUBCASE("life 2 -> 3 (odd): pure reversal again") {
        swarm.particles[0] = {vec1(3.0), vec1(4.0), 9.0, 2};
        ScriptedStream rng{{}};
        cap_age(0, false, saved, swarm, bounds, 1e-6, rng, nullptr);
        CHECK(swarm.particles[0].life == 3);
        CHECK(same(swarm.particles[0].v, vec1(-4.0)));
    }

    SUBCASE("decay equal to the threshold does not retire the particle") {
        swarm.particles[0] = {vec1(3.0), vec1(2.0), 9.0, 0};
        ScriptedStream rng{{}};
        // After aging, decay = e^-1 exactly equals epsilon: strict "<" keeps it.
        cap_age(0, false, saved, swarm, bounds, std::exp(-1.0), rng, &metrics);
        CHECK(swarm.particles[0].life == 1);
        CHECK(same(swarm.particles[0].x, vec1(1.0)));
        CHECK(same(swarm.particles[0].v, vec1(-2.0)));
        CHECK(rng.remaining() == 0); // no donor or velocity draws happened
    }
}

TEST_CASE("aging: a particle that exceeds the lifetime ceiling restarts from a donor") {
    const Bounds bounds = Bounds::uniform(2, 0.0, 10.0);
    Swarm swarm;
    swarm.particles.resize(6);
    const double fitness[6] = {10.0, 5.0, 7.0, 1.0, 8.0, 9.0};
    for (std::size_t j = 0; j < 6; ++j) {
        const double a = static_cast<double>(j);
        swarm.particles[j] = {vec2(a, a + 0.5), vec2(1.0, 1.0), fitness[j], 0};
    }
    swarm.best = 3;
    swarm.particles[0].life = 13; // next failure reaches 14: e^-14 < 1e-6

    const SavedState saved{vec2(0.0, 0.5), 10.0};
    SweepMetrics metrics;
    ScriptedStream rng{{0.1,         // donor index: raw 0 -> shifted past i=0 -> 1
                        0.2, 0.75}}; // fresh velocity components
    cap_age(0, false, saved, swarm, bounds, 1e-6, rng, &metrics);

    CHECK(swarm.particles[0].life == 0);
    CHECK(same(swarm.particles[0].x, swarm.particles[1].x));
    CHECK(swarm.particles[0].f == 5.0); // donor fitness travels with the position
    CHECK(same(swarm.particles[0].v, vec2(-3.0, 2.5)));
    CHECK(metrics.max_lifetime == 14);
    CHECK(swarm.best == 3); // the dying particle was not the best: no rescan
    CHECK(rng.remaining() == 0);
}

TEST_CASE("aging: restarting the best particle re-establishes the witness") {
    const Bounds bounds = Bounds::uniform(2, 0.0, 10.0);
    Swarm swarm;
    swarm.particles.resize(6);
    const double fitness[6] = {1.0, 5.0, 3.0, 6.0, 8.0, 9.0};
    for (std::size_t j = 0; j < 6; ++j) {
        const double a = static_cast<double>(j);
        swarm.particles[j] = {vec2(a, a), vec2(0.0, 0.0), fitness[j], 0};
    }
    swarm.best = 0;
    swarm.particles[0].life = 13;

    const SavedState saved{vec2(0.0, 0.0), 1.0};
    ScriptedStream rng{{0.1, 0.5, 0.5}};
    cap_age(0, false, saved, swarm, bounds, 1e-6, rng, nullptr);

    CHECK(swarm.particles[0].f == 5.0); // copied from donor 1
    CHECK(swarm.best == 2);             // rescan found the new minimum
    CHECK(swarm.best == argmin_fitness(swarm));
}

TEST_CASE("cap_sweep: hand-traced pass over two particles") {
    const Problem problem = sphere_nd(1, 0.0, 10.0);

    SUBCASE("personal gain without a swarm gain leaves the flag down") {
        Swarm swarm;
        swarm.particles.resize(2);
        swarm.particles[0] = {vec1(1.0), vec1(0.5), 1.0, 0};
        swarm.particles[1] = {vec1(5.0), vec1(-1.8), 25.0, 0};
        swarm.best = 0;
        BudgetLedger ledger{10};
        ScriptedStream rng{{0.4, 0.5}};
        SweepMetrics metrics;

        const bool update =
            cap_sweep(swarm, problem, ledger, rng, 1e-6, &metrics);

        CHECK_FALSE(update);
        // Particle 0 (the best, no pull, spent=0): 1 -> 1.5 failed, undone.
        CHECK(same(swarm.particles[0].x, vec1(1.0)));
        CHECK(swarm.particles[0].f == 1.0);
        CHECK(same(swarm.particles[0].v, vec1(-0.5)));
        CHECK(swarm.particles[0].life == 1);
        // Particle 1: v = -1.8 + 0.5*0.1*(1-5) = -2, lands on 3, improves
        // itself (9 < 25) but not the swarm best.
        CHECK(same(swarm.particles[1].x, vec1(3.0)));
        CHECK(swarm.particles[1].f == 9.0);
        CHECK(same(swarm.particles[1].v, vec1(-2.0)));
        CHECK(swarm.particles[1].life == 0);
        CHECK(swarm.best == 0);
        CHECK(swarm.best == argmin_fitness(swarm));
        CHECK(ledger.n_eval == 2);
        CHECK(metrics.max_lifetime == 1);
        CHECK(rng.remaining() == 0);
    }

    SUBCASE("a swarm-best improvement raises the flag") {
        Swarm swarm;
        swarm.particles.resize(2);
        swarm.particles[0] = {vec1(1.0), vec1(0.5), 1.0, 0};
        swarm.particles[1] = {vec1(5.0), vec1(-4.2), 25.0, 0};
        swarm.best = 0;
        BudgetLedger ledger{10};
        ScriptedStream rng{{0.4, 0.5}};

        const bool update = cap_sweep(swarm, problem, ledger, rng, 1e-6);

        CHECK(update);
        CHECK(swarm.best == 1);
        CHECK(swarm.particles[1].x[0] == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(swarm.particles[1].f < 1.0);
        CHECK(swarm.particles[1].life == 0);
        CHECK(swarm.best == argmin_fitness(swarm));
    }

    SUBCASE("budget exhaustion aborts the sweep mid-pass") {
        Swarm swarm;
        swarm.particles.resize(2);
        swarm.particles[0] = {vec1(1.0), vec1(0.5), 1.0, 0};
        swarm.particles[1] = {vec1(5.0), vec1(-1.8), 25.0, 0};
        swarm.best = 0;
        BudgetLedger ledger{1};
        ScriptedStream rng{{0.4, 0.5}};

        CHECK_THROWS_AS(cap_sweep(swarm, problem, ledger, rng, 1e-6),
                        BudgetExhausted);
        CHECK(ledger.n_eval == 1);
        // The first particle completed its full move/age cycle.
        CHECK(swarm.particles[0].life == 1);
    }
}

TEST_CASE("mutation strategies combine the five donors as documented") {
    const Bounds bounds = Bounds::uniform(1, -100.0, 100.0);
    const Swarm swarm = line_swarm();
    const std::vector<double> donor_draws{0.1, 0.3, 0.5, 0.7, 0.9};

    SUBCASE("rand/1") {
        ScriptedStream rng{donor_draws};
        std::array<std::size_t, 5> picked{};
        const Vec m = de_mutate(MutationStrategy::Rand1, 0, swarm, bounds, 0.5,
                                0.25, rng, &picked);
        CHECK(m[0] == 0.5); // 1 + 0.5*(2-3)
        CHECK(picked == std::array<std::size_t, 5>{1, 2, 3, 4, 5});
        CHECK(rng.remaining() == 0); // all five donors drawn even if unused
    }

    SUBCASE("rand/2") {
        ScriptedStream rng{donor_draws};
        const Vec m = de_mutate(MutationStrategy::Rand2, 0, swarm, bounds, 0.5,
                                0.25, rng);
        CHECK(m[0] == 0.0); // 1 + 0.5*(2-3) + 0.5*(4-5)
    }

    SUBCASE("rand-to-best/2") {
        ScriptedStream rng{donor_draws};
        const Vec m = de_mutate(MutationStrategy::RandToBest2, 0, swarm,
                                bounds, 0.5, 0.25, rng);
        CHECK(m[0] == 1.25); // 1 + 0.25*(5-0) + 0.5*(1-2) + 0.5*(4-5)
    }

    SUBCASE("current-to-best/1") {
        ScriptedStream rng{donor_draws};
        const Vec m = de_mutate(MutationStrategy::CurToBest1, 0, swarm, bounds,
                                0.5, 0.25, rng);
        CHECK(m[0] == 2.0); // 0 + 0.5*(5-0) + 0.5*(2-3)
    }

    SUBCASE("current-to-best/1 for the best particle itself") {
        ScriptedStream rng{donor_draws}; // raw 0..4, no shift when i=5
        const Vec m = de_mutate(MutationStrategy::CurToBest1, 5, swarm, bounds,
                                0.5, 0.25, rng);
        CHECK(m[0] == 4.5); // 5 + 0.5*(5-5) + 0.5*(1-2)
    }
}

TEST_CASE("mutants are wrapped into the box") {
    const Bounds bounds = Bounds::uniform(1, 0.0, 4.0);
    Swarm swarm;
    swarm.particles.resize(6);
    for (std::size_t j = 0; j < 6; ++j) {
        swarm.particles[j] = {vec1(0.5 * static_cast<double>(j)), vec1(0.0),
                              static_cast<double>(j), 0};
    }
    swarm.best = 0;
    ScriptedStream rng{{0.1, 0.3, 0.5, 0.7, 0.9}};
    // 0.5 + 8*(1 - 1.5) = -3.5, wrapped into [0,4) -> 0.5
    const Vec m =
        de_mutate(MutationStrategy::Rand1, 0, swarm, bounds, 8.0, 0.0, rng);
    CHECK(m[0] == 0.5);
    CHECK(bounds.contains(m));
}

TEST_CASE("a fully collapsed swarm can only propose its own point") {
    const Bounds bounds = Bounds::uniform(2, 0.0, 4.0);
    Swarm swarm;
    swarm.particles.resize(6);
    for (auto& p : swarm.particles) p = {vec2(2.0, 1.0), vec2(0.0, 0.0), 3.0, 0};
    swarm.best = 0;

    for (const MutationStrategy strategy :
         {MutationStrategy::Rand1, MutationStrategy::Rand2,
          MutationStrategy::RandToBest2, MutationStrategy::CurToBest1}) {
        ScriptedStream rng{{0.1, 0.3, 0.5, 0.7, 0.9}};
        const Vec m = de_mutate(strategy, 1, swarm, bounds, 0.7, 0.3, rng);
        CHECK(same(m, vec2(2.0, 1.0)));
    }
}

TEST_CASE("binomial crossover: per-gene coin plus one forced gene") {
    Vec parent(4), mutant(4);
    parent << 0.0, 1.0, 2.0, 3.0;
    mutant << 10.0, 11.0, 12.0, 13.0;

    SUBCASE("cr=0 keeps only the forced gene") {
        ScriptedStream rng{{0.6, 0.5, 0.5, 0.5, 0.5}}; // j_rand = 2
        const Vec t =
            de_crossover(CrossoverStrategy::Binomial, parent, mutant, 0.0, rng);
        CHECK(same(t, [] {
            Vec v(4);
            v << 0.0, 1.0, 12.0, 3.0;
            return v;
        }()));
        CHECK(rng.remaining() == 0);
    }

    SUBCASE("cr=1 copies the whole mutant") {
        ScriptedStream rng{{0.0, 0.99, 0.99, 0.99, 0.99}};
        const Vec t =
            de_crossover(CrossoverStrategy::Binomial, parent, mutant, 1.0, rng);
        CHECK(same(t, mutant));
    }

    SUBCASE("mixed draws select gene-by-gene") {
        ScriptedStream rng{{0.3, 0.4, 0.6, 0.7, 0.2}}; // j_rand = 1
        const Vec t =
            de_crossover(CrossoverStrategy::Binomial, parent, mutant, 0.5, rng);
        CHECK(same(t, [] {
            Vec v(4);
            v << 10.0, 11.0, 2.0, 13.0; // 0.4<cr, forced, 0.7>=cr, 0.2<cr
            return v;
        }()));
    }
}

TEST_CASE("exponential crossover copies one circular block") {
    Vec parent(4), mutant(4);
    parent << 0.0, 1.0, 2.0, 3.0;
    mutant << 10.0, 11.0, 12.0, 13.0;

    SUBCASE("cr=0 stops after the single mandatory gene") {
        ScriptedStream rng{{0.25, 0.99}}; // start at 1; continuation fails
        const Vec t = de_crossover(CrossoverStrategy::Exponential, parent,
                                   mutant, 0.0, rng);
        CHECK(same(t, [] {
            Vec v(4);
            v << 0.0, 11.0, 2.0, 3.0;
            return v;
        }()));
        CHECK(rng.remaining() == 0);
    }

    SUBCASE("the block wraps around the end of the vector") {
        ScriptedStream rng{{0.8, 0.1, 0.1, 0.1}}; // start 3, three continuations
        const Vec t = de_crossover(CrossoverStrategy::Exponential, parent,
                                   mutant, 0.9, rng);
        CHECK(same(t, mutant)); // copied 3,0,1,2 -> all four genes
        CHECK(rng.remaining() == 0); // a full block needs no final coin
    }

    SUBCASE("a failed continuation ends the block") {
        ScriptedStream rng{{0.0, 0.95}};
        const Vec t = de_crossover(CrossoverStrategy::Exponential, parent,
                                   mutant, 0.9, rng);
        CHECK(same(t, [] {
            Vec v(4);
            v << 10.0, 1.0, 2.0, 3.0;
            return v;
        }()));
    }
}

TEST_CASE("ms_stage: greedy acceptance, bookkeeping, and witness repair") {
    const Problem problem = sphere_nd(2, -5.0, 5.0);
    Swarm swarm;
    swarm.particles.resize(6);
    const double xs[6][2] = {{1.0, 2.0},  {-3.0, 0.5}, {4.0, -4.0},
                             {0.5, 0.5},  {-2.0, 3.0}, {2.5, -1.0}};
    for (std::size_t j = 0; j < 6; ++j) {
        swarm.particles[j].x = vec2(xs[j][0], xs[j][1]);
        swarm.particles[j].v = vec2(0.25, -0.75);
        swarm.particles[j].f = swarm.particles[j].x.squaredNorm();
        swarm.particles[j].life = static_cast<int>(j); // recognizable lifetimes
    }
    swarm.refresh_best();

    std::vector<Vec> pre_x;
    std::vector<Vec> pre_v;
    std::vector<double> pre_f;
    std::vector<int> pre_life;
    for (const Particle& p : swarm.particles) {
        pre_x.push_back(p.x);
        pre_v.push_back(p.v);
        pre_f.push_back(p.f);
        pre_life.push_back(p.life);
    }

    BudgetLedger ledger{1000};
    Mt64Stream rng{42};
    const std::vector<std::uint8_t> changed =
        ms_stage(swarm, problem, ledger, 3, rng);

    CHECK(ledger.n_eval == 18); // 3 generations x 6 particles
    REQUIRE(changed.size() == 6);

    bool any_changed = false;
    for (std::size_t j = 0; j < 6; ++j) {
        const bool moved = !same(swarm.particles[j].x, pre_x[j]);
        CHECK(changed[j] == (moved ? 1 : 0));
        CHECK(swarm.particles[j].f <= pre_f[j]); // greedy: never worse
        if (changed[j]) {
            any_changed = true;
            CHECK(swarm.particles[j].life == 0);
            CHECK_FALSE(same(swarm.particles[j].v, pre_v[j]));
            for (int d = 0; d < 2; ++d) {
                CHECK(swarm.particles[j].v[d] >= -5.0);
                CHECK(swarm.particles[j].v[d] < 5.0);
            }
        } else {
            CHECK(same(swarm.particles[j].v, pre_v[j]));
            CHECK(swarm.particles[j].life == pre_life[j]);
        }
    }
    CHECK(any_changed); // 18 trials on a smooth bowl: something must land
    CHECK(swarm.best == argmin_fitness(swarm));
}

TEST_CASE("ms_stage on a collapsed swarm is a strict no-op") {
    const Problem problem = sphere_nd(2, -5.0, 5.0);
    Swarm swarm;
    swarm.particles.resize(6);
    for (auto& p : swarm.particles) p = {vec2(1.0, 1.0), vec2(0.5, 0.5), 2.0, 4};
    swarm.best = 0;

    BudgetLedger ledger{1000};
    Mt64Stream rng{9};
    const std::vector<std::uint8_t> changed =
        ms_stage(swarm, problem, ledger, 3, rng);

    CHECK(ledger.n_eval == 18);
    for (std::size_t j = 0; j < 6; ++j) {
        CHECK(changed[j] == 0);
        CHECK(same(swarm.particles[j].x, vec2(1.0, 1.0)));
        CHECK(swarm.particles[j].f == 2.0);
        CHECK(same(swarm.particles[j].v, vec2(0.5, 0.5))); // untouched
        CHECK(swarm.particles[j].life == 4);               // untouched
    }
}

TEST_CASE("ms_stage applies its bookkeeping even when the budget dies mid-stage") {
    const Problem problem = sphere_nd(2, -5.0, 5.0);
    Swarm swarm;
    swarm.particles.resize(6);
    Mt64Stream seeder{5};
    for (auto& p : swarm.particles) {
        p.x = vec2(seeder.uniform(-5.0, 5.0), seeder.uniform(-5.0, 5.0));
        p.v = vec2(0.125, 0.125);
        p.f = p.x.squaredNorm();
        p.life = 3;
    }
    swarm.refresh_best();
    std::vector<Vec> pre_x;
    for (const Particle& p : swarm.particles) pre_x.push_back(p.x);

    BudgetLedger ledger{9}; // dies in the middle of generation 2
    Mt64Stream rng{11};
    CHECK_THROWS_AS(ms_stage(swarm, problem, ledger, 3, rng), BudgetExhausted);

    CHECK(ledger.n_eval == 9);
    CHECK(swarm.best == argmin_fitness(swarm));
    for (std::size_t j = 0; j < 6; ++j) {
        if (!same(swarm.particles[j].x, pre_x[j])) {
            CHECK(swarm.particles[j].life == 0);
            CHECK_FALSE(same(swarm.particles[j].v, vec2(0.125, 0.125)));
        } else {
            CHECK(swarm.particles[j].life == 3);
        }
    }
}

TEST_CASE("full runs are deterministic and keep every probe inside bounds") {
    long violations = 0;
    const Bounds box = Bounds::uniform(2, -3.0, 7.0);
    const Problem problem{"bowl", box,
                          [&violations, box](const Vec& x) {
                              if (!box.contains(x)) ++violations;
                              return x.squaredNorm();
                          },
                          0.0, std::nullopt};

    RunConfig config;
    config.pop_size = 6;
    config.max_eval = 3000;
    config.seed = 7;

    const RunRecord first = run(problem, config);
    const RunRecord second = run(problem, config);

    CHECK(violations == 0);
    CHECK(format_run_record(first) == format_run_record(second));

    CHECK(first.algorithm == "mscap");
    CHECK(first.problem == "bowl");
    CHECK(first.dimension == 2);
    CHECK(first.seed == 7);
    CHECK(first.max_eval == 3000);
    CHECK(first.n_eval == 3000); // the budget is spent exactly
    CHECK(first.nonfinite_evals == 0);
    CHECK(first.max_lifetime_seen >= 1);
    CHECK(first.max_lifetime_seen <= 14);

    REQUIRE(!first.trend.empty());
    CHECK(first.trend.front().n_eval == 1);
    CHECK(first.trend.back().n_eval == 3000);
    CHECK(first.trend.back().best_fitness == first.best_fitness);
    for (std::size_t i = 1; i < first.trend.size(); ++i) {
        CHECK(first.trend[i].n_eval > first.trend[i - 1].n_eval);
        CHECK(first.trend[i].best_fitness <= first.trend[i - 1].best_fitness);
    }
    CHECK(first.best_fitness < 1e-6); // a 2-D bowl with 3000 probes
}

TEST_CASE("stage events log: the swap stage fires exactly on a stalled sweep") {
    const Problem problem = sphere_nd(2, -5.0, 5.0);
    RunConfig config;
    config.pop_size = 6;
    config.max_eval = 2000;
    config.seed = 3;
    config.record_stage_events = true;

    const RunRecord record = run(problem, config);
    REQUIRE(!record.stage_events.empty());
    CHECK(record.stage_events.front().kind == StageKind::Cap);

    int ms_count = 0;
    for (std::size_t i = 0; i < record.stage_events.size(); ++i) {
        const StageEvent& e = record.stage_events[i];
        if (e.kind == StageKind::Ms) {
            ++ms_count;
            CHECK(e.update == false);
            REQUIRE(i > 0);
            CHECK(record.stage_events[i - 1].kind == StageKind::Cap);
            CHECK(record.stage_events[i - 1].update == false);
        }
    }
    CHECK(ms_count > 0);

    RunConfig quiet = config;
    quiet.record_stage_events = false;
    CHECK(run(problem, quiet).stage_events.empty());
}

TEST_CASE("tighter lifetime thresholds tighten the observed ceiling") {
    const Problem problem{"wiggle", Bounds::uniform(2, -5.12, 5.12),
                          [](const Vec& x) {
                              double s = 0.0;
                              for (int j = 0; j < 2; ++j)
                                  s += x[j] * x[j] -
                                       10.0 * std::cos(2.0 * M_PI * x[j]) + 10.0;
                              return s;
                          },
                          0.0, std::nullopt};
    RunConfig config;
    config.pop_size = 6;
    config.max_eval = 2000;
    config.seed = 5;
    config.epsilon = 1e-3; // ceiling ceil(-ln 1e-3) = 7

    const RunRecord record = run(problem, config);
    CHECK(record.max_lifetime_seen >= 1);
    CHECK(record.max_lifetime_seen <= 7);
}

TEST_CASE("non-finite fitness regions are quarantined, never crowned") {
    const Problem problem{
        "half-poisoned", Bounds::uniform(2, -1.0, 1.0),
        [](const Vec& x) {
            if (x[0] > 0.0) return std::numeric_limits<double>::quiet_NaN();
            return x.squaredNorm();
        },
        0.0, std::nullopt};
    RunConfig config;
    config.pop_size = 6;
    config.max_eval = 600;
    config.seed = 3;

    const RunRecord record = run(problem, config);
    CHECK(record.nonfinite_evals >= 1);
    CHECK(record.nonfinite_evals < record.n_eval);
    CHECK(std::isfinite(record.best_fitness));
    CHECK(record.best_position[0] <= 0.0);
}

TEST_CASE("run rejects configurations the optimizer cannot honor") {
    const Problem problem = sphere_nd(2, -1.0, 1.0);
    RunConfig config;
    config.max_eval = 100;
    config.pop_size = 5; // the strategy pool needs six distinct particles
    CHECK_THROWS_AS(run(problem, config), ConfigError);

    config.pop_size = 6;
    config.max_eval = 0;
    CHECK_THROWS_AS(run(problem, config), ConfigError);
}
