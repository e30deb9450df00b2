#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mscap/core.hpp"

namespace mscap {

struct TrendSample {
    long n_eval = 0;
    double best_fitness = 0.0;
};

enum class StageKind { Cap, Ms };

struct StageEvent {
    StageKind kind;
    bool update; // the CAP sweep's update flag; false for MS entries
};

/// Everything one run produces: the best solution ever evaluated, its
/// fitness, the fitness trend, and accounting/instrumentation counters.
struct RunRecord {
    std::string algorithm;
    std::string problem;
    Eigen::Index dimension = 0;
    std::uint64_t seed = 0;

    Vec best_position;
    double best_fitness = std::numeric_limits<double>::infinity();
    long n_eval = 0;
    long max_eval = 0;
    long nonfinite_evals = 0;
    int max_lifetime_seen = 0;

    std::vector<TrendSample> trend;
    std::vector<StageEvent> stage_events; // filled only when requested

    /// Fitness error relative to a known optimum.
    double final_error(double optimum) const { return best_fitness - optimum; }
};

/// Tracks the best solution ever evaluated and samples the fitness trend:
/// one sample at every strict improvement and one at every multiple of
/// ceil(max_eval/500) evaluations.
class TrendRecorder {
public:
    explicit TrendRecorder(long max_eval)
        : stride_((max_eval + 499) / 500) {}

    void observe(long n_eval, double fitness, const Vec& x) {
        bool record = false;
        if (fitness < best_fitness_) {
            best_fitness_ = fitness;
            best_position_ = x;
            record = true;
        } else if (n_eval % stride_ == 0) {
            record = true;
        }
        if (record && (samples_.empty() || samples_.back().n_eval < n_eval))
            samples_.push_back({n_eval, best_fitness_});
    }

    /// Appends a closing sample at the final evaluation count.
    void finalize(long n_eval) {
        if (n_eval > 0 && (samples_.empty() || samples_.back().n_eval < n_eval))
            samples_.push_back({n_eval, best_fitness_});
    }

    double best_fitness() const { return best_fitness_; }
    const Vec& best_position() const { return best_position_; }
    const std::vector<TrendSample>& samples() const { return samples_; }
    std::vector<TrendSample> take_samples() { return std::move(samples_); }

private:
    long stride_;
    double best_fitness_ = std::numeric_limits<double>::infinity();
    Vec best_position_;
    std::vector<TrendSample> samples_;
};

} // namespace mscap
