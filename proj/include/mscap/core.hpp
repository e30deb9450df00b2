#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mscap/random.hpp"

namespace mscap {

using Vec = Eigen::VectorXd;

/// Invalid run or problem configuration, detected before any evaluation.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A candidate position could not be evaluated (e.g. non-finite component).
class EvaluationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File ingestion failure (missing file, schema, or malformed content).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Output could not be produced (unwritable path, failed write).
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Thrown by evaluate() when the evaluation budget is already spent.
/// Callers terminate the sweep/run and keep the best-so-far.
class BudgetExhausted : public std::exception {
public:
    const char* what() const noexcept override { return "evaluation budget exhausted"; }
};

/// Box constraints of the search space.
struct Bounds {
    Vec lower;
    Vec upper;

    Bounds(Vec lo, Vec up) : lower(std::move(lo)), upper(std::move(up)) {
        if (lower.size() != upper.size())
            throw ConfigError("bounds: lower and upper must have equal length");
        if (lower.size() == 0)
            throw ConfigError("bounds: dimension must be positive");
        for (Eigen::Index j = 0; j < lower.size(); ++j) {
            if (!(lower[j] < upper[j]))
                throw ConfigError("bounds: lower[" + std::to_string(j) +
                                  "] must be strictly below upper");
        }
    }

    /// Uniform box [lo, hi]^dim.
    static Bounds uniform(Eigen::Index dim, double lo, double hi) {
        return Bounds(Vec::Constant(dim, lo), Vec::Constant(dim, hi));
    }

    Eigen::Index dimension() const { return lower.size(); }
    Vec width() const { return upper - lower; }

    bool contains(const Vec& x) const {
        for (Eigen::Index j = 0; j < lower.size(); ++j)
            if (!(x[j] >= lower[j] && x[j] < upper[j])) return false;
        return true;
    }
};

/// A minimization problem over a box-bounded continuous domain.
struct Problem {
    std::string name;
    Bounds bounds;
    std::function<double(const Vec&)> objective;
    std::optional<double> optimum_fitness;
    std::optional<Vec> optimum_point;

    Eigen::Index dimension() const { return bounds.dimension(); }
};

/// Counts objective evaluations against a fixed budget. Every evaluation goes
/// through evaluate(), which increments n_eval exactly once and notifies the
/// observer, so the ledger is the single source of truth for budget use.
struct BudgetLedger {
    long n_eval = 0;
    long max_eval = 0;
    long nonfinite_evals = 0;
    std::function<void(long n_eval, double fitness, const Vec& x)> on_evaluation;

    explicit BudgetLedger(long max) : max_eval(max) {
        if (max <= 0) throw ConfigError("budget: max_eval must be positive");
    }

    long remaining() const { return max_eval - n_eval; }
    bool exhausted() const { return n_eval >= max_eval; }
};

/// One member of the swarm.
struct Particle {
    Vec x;
    Vec v;
    double f = std::numeric_limits<double>::infinity();
    int life = 0;
};

/// The whole mutable state of one run: N particles plus a witness index of
/// the current minimum fitness.
struct Swarm {
    std::vector<Particle> particles;
    std::size_t best = 0;

    std::size_t size() const { return particles.size(); }
    double best_fitness() const { return particles[best].f; }
    const Vec& best_position() const { return particles[best].x; }

    /// Rescans all particles and points `best` at the minimum.
    void refresh_best() {
        std::size_t b = 0;
        for (std::size_t i = 1; i < particles.size(); ++i)
            if (particles[i].f < particles[b].f) b = i;
        best = b;
    }
};

/// Run parameters shared by MS-CAP and the DE baseline.
struct RunConfig {
    int pop_size = 50;
    double epsilon = 1e-6;
    int gens_ms = 3;
    long max_eval = 0;
    std::uint64_t seed = 1;
    bool record_stage_events = false;

    /// Largest lifetime an unsuccessful particle can reach, ceil(-ln(epsilon)).
    int max_lifetime() const { return static_cast<int>(std::ceil(-std::log(epsilon))); }

    void validate(int min_pop) const {
        if (pop_size < min_pop)
            throw ConfigError("config: pop_size must be at least " + std::to_string(min_pop));
        if (!(epsilon > 0.0 && epsilon < 1.0))
            throw ConfigError("config: epsilon must lie in (0,1)");
        if (gens_ms < 1)
            throw ConfigError("config: gens_ms must be positive");
        if (max_eval < 1)
            throw ConfigError("config: max_eval must be positive");
    }
};

/// Fresh particle velocity: component j uniform in
/// [-(ub_j - lb_j)/2, (ub_j - lb_j)/2).
Vec init_velocity(const Bounds& bounds, RandomStream& rng);

/// Maps each component into [lower_j, upper_j) by modular arithmetic on the
/// range width. Components already inside are returned unchanged. Throws
/// EvaluationError on non-finite input.
Vec toroidal_wrap(Vec x, const Bounds& bounds);
double wrap_component(double x, double lo, double hi);

/// Evaluates the objective at x, charging the ledger. Throws BudgetExhausted
/// (before touching the objective) when the budget is spent. A non-finite
/// objective value is returned as +inf and counted in the ledger.
double evaluate(const Problem& problem, const Vec& x, BudgetLedger& ledger);

} // namespace mscap
