#include "mscap/core.hpp"

#include <cmath>
#include <limits>

namespace mscap {

Vec init_velocity(const Bounds& bounds, RandomStream& rng) {
    const Eigen::Index d = bounds.dimension();
    Vec v(d);
    for (Eigen::Index j = 0; j < d; ++j) {
        const double w = bounds.upper[j] - bounds.lower[j];
        v[j] = rng.uniform(-0.5, 0.5) * w;
    }
    return v;
}

double wrap_component(double x, double lo, double hi) {
    if (x >= lo && x < hi) return x;
    if (!std::isfinite(x))
        throw EvaluationError("toroidal wrap: non-finite coordinate");
    const double w = hi - lo;
    double r = std::fmod(x - lo, w);
    if (r < 0.0) r += w;
    double y = lo + r;
    if (y >= hi) y = lo; // fmod remainder rounded up to the full width
    return y;
}

Vec toroidal_wrap(Vec x, const Bounds& bounds) {
    for (Eigen::Index j = 0; j < x.size(); ++j)
        x[j] = wrap_component(x[j], bounds.lower[j], bounds.upper[j]);
    return x;
}

double evaluate(const Problem& problem, const Vec& x, BudgetLedger& ledger) {
    if (ledger.exhausted()) throw BudgetExhausted{};
    double f = problem.objective(x);
    if (!std::isfinite(f)) {
        f = std::numeric_limits<double>::infinity();
        ++ledger.nonfinite_evals;
    }
    ++ledger.n_eval;
    if (ledger.on_evaluation) ledger.on_evaluation(ledger.n_eval, f, x);
    return f;
}

} // namespace mscap
