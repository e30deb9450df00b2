#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mscap/core.hpp"
#include "mscap/random.hpp"

namespace mscap {

enum class BaseFunction {
    Sphere,
    Rosenbrock,
    Rastrigin,
    Ackley,
    Griewank,
    Schwefel12,
    Ellipsoid,
};

/// A registered test landscape: a base function plus optional seeded shift
/// and rotation, with the conventional bounds for that base.
struct BenchmarkSpec {
    std::string name;
    Eigen::Index dimension = 0;
    BaseFunction base = BaseFunction::Sphere;
    bool use_shift = false;
    bool use_rotation = false;
    std::optional<Vec> shift;                  // drawn from the seed when absent
    std::optional<Eigen::MatrixXd> rotation;   // drawn from the seed when absent
    Bounds bounds = Bounds::uniform(1, -1.0, 1.0); // placeholder; set by resolve
    double optimum_fitness = 0.0;
};

/// Value of a base function at z (the already shifted/rotated coordinate).
double base_function_value(BaseFunction base, const Vec& z);

/// Location of a base function's minimum (origin for all bases except the
/// banana valley, whose minimum sits at all-ones).
Vec base_optimum(BaseFunction base, Eigen::Index dimension);

/// Parses a registered name ("sphere", "shifted-sphere",
/// "shifted-rotated-sphere", ...) into a spec with the conventional bounds.
/// Throws ConfigError for unknown names or dimension < 2.
BenchmarkSpec resolve_benchmark(const std::string& name,
                                Eigen::Index dimension);

/// Materializes a descriptor into a Problem evaluating
/// base(R·(x − shift)) + optimum_fitness.  Shift/rotation fields the
/// variant needs but the descriptor leaves empty are drawn
/// deterministically from the seed: shift uniform in the middle 80% of
/// the bounds, rotation by QR-orthonormalizing a seeded Gaussian matrix.
/// The Problem records the known optimum.
Problem make_benchmark(const BenchmarkSpec& spec, std::uint64_t seed);

/// Convenience: resolve_benchmark + make_benchmark.
Problem make_benchmark(const std::string& name, Eigen::Index dimension,
                       std::uint64_t seed);

/// Sorted list of all registered benchmark names.
std::vector<std::string> list_benchmarks();

/// Random orthogonal matrix: QR factorization of a Gaussian matrix with the
/// R diagonal normalized positive, so the result is a deterministic
/// function of the stream.
Eigen::MatrixXd random_rotation(Eigen::Index dim, RandomStream& rng);

} // namespace mscap
