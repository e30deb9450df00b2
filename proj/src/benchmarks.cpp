#include "mscap/benchmarks.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

namespace mscap {

namespace {

struct BaseInfo {
    const char* name;
    BaseFunction base;
    double bound; // conventional symmetric bound [-bound, bound]
};

constexpr std::array<BaseInfo, 7> kBases{{
    {"sphere", BaseFunction::Sphere, 100.0},
    {"rosenbrock", BaseFunction::Rosenbrock, 30.0},
    {"rastrigin", BaseFunction::Rastrigin, 5.12},
    {"ackley", BaseFunction::Ackley, 32.0},
    {"griewank", BaseFunction::Griewank, 600.0},
    {"schwefel-1.2", BaseFunction::Schwefel12, 100.0},
    {"ellipsoid", BaseFunction::Ellipsoid, 100.0},
}};

double gaussian(RandomStream& rng) {
    const double u = 1.0 - rng.u01(); // (0,1]: keeps the log finite
    const double v = rng.u01();
    return std::sqrt(-2.0 * std::log(u)) *
           std::cos(2.0 * std::numbers::pi * v);
}

} // namespace

double base_function_value(BaseFunction base, const Vec& z) {
    const Eigen::Index d = z.size();
    constexpr double two_pi = 2.0 * std::numbers::pi;
    switch (base) {
    case BaseFunction::Sphere:
        return z.squaredNorm();
    case BaseFunction::Rosenbrock: {
        double sum = 0.0;
        for (Eigen::Index j = 0; j + 1 < d; ++j) {
            const double a = z[j + 1] - z[j] * z[j];
            const double b = 1.0 - z[j];
            sum += 100.0 * a * a + b * b;
        }
        return sum;
    }
    case BaseFunction::Rastrigin: {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < d; ++j)
            sum += z[j] * z[j] - 10.0 * std::cos(two_pi * z[j]) + 10.0;
        return sum;
    }
    case BaseFunction::Ackley: {
        const double n = static_cast<double>(d);
        double sq = 0.0, cs = 0.0;
        for (Eigen::Index j = 0; j < d; ++j) {
            sq += z[j] * z[j];
            cs += std::cos(two_pi * z[j]);
        }
        return -20.0 * std::exp(-0.2 * std::sqrt(sq / n)) -
               std::exp(cs / n) + 20.0 + std::numbers::e;
    }
    case BaseFunction::Griewank: {
        double prod = 1.0;
        for (Eigen::Index j = 0; j < d; ++j)
            prod *= std::cos(z[j] / std::sqrt(static_cast<double>(j + 1)));
        return z.squaredNorm() / 4000.0 - prod + 1.0;
    }
    case BaseFunction::Schwefel12: {
        double sum = 0.0, partial = 0.0;
        for (Eigen::Index j = 0; j < d; ++j) {
            partial += z[j];
            sum += partial * partial;
        }
        return sum;
    }
    case BaseFunction::Ellipsoid: {
        double sum = 0.0;
        for (Eigen::Index j = 0; j < d; ++j) {
            const double e = 6.0 * static_cast<double>(j) /
                             static_cast<double>(d - 1);
            sum += std::pow(10.0, e) * z[j] * z[j];
        }
        return sum;
    }
    }
    throw ConfigError{"unknown base function"};
}

Vec base_optimum(BaseFunction base, Eigen::Index dimension) {
    if (base == BaseFunction::Rosenbrock)
        return Vec::Ones(dimension);
    return Vec::Zero(dimension);
}

BenchmarkSpec resolve_benchmark(const std::string& name,
                                Eigen::Index dimension) {
    if (dimension < 2)
        throw ConfigError{"benchmark: dimension must be at least 2"};

    std::string rest = name;
    bool shifted = false, rotated = false;
    if (rest.starts_with("shifted-")) {
        shifted = true;
        rest = rest.substr(8);
        if (rest.starts_with("rotated-")) {
            rotated = true;
            rest = rest.substr(8);
        }
    }
    const auto it = std::find_if(kBases.begin(), kBases.end(),
                                 [&](const BaseInfo& b) { return rest == b.name; });
    if (it == kBases.end() || (rotated && !shifted))
        throw ConfigError{"benchmark: unknown name '" + name + "'"};

    BenchmarkSpec spec;
    spec.name = name;
    spec.dimension = dimension;
    spec.base = it->base;
    spec.use_shift = shifted;
    spec.use_rotation = rotated;
    spec.bounds = Bounds::uniform(dimension, -it->bound, it->bound);
    spec.optimum_fitness = 0.0;
    return spec;
}

Eigen::MatrixXd random_rotation(Eigen::Index dim, RandomStream& rng) {
    Eigen::MatrixXd a(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c)
        for (Eigen::Index r = 0; r < dim; ++r)
            a(r, c) = gaussian(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR();
    for (Eigen::Index c = 0; c < dim; ++c)
        if (r(c, c) < 0.0)
            q.col(c) *= -1.0;
    return q;
}

Problem make_benchmark(const BenchmarkSpec& spec, std::uint64_t seed) {
    if (spec.dimension < 2)
        throw ConfigError{"benchmark: dimension must be at least 2"};
    const Eigen::Index d = spec.dimension;

    Mt64Stream rng{seed};
    Vec shift = Vec::Zero(d);
    if (spec.use_shift) {
        if (spec.shift) {
            if (spec.shift->size() != d)
                throw ConfigError{"benchmark: shift dimension mismatch"};
            shift = *spec.shift;
        } else {
            for (Eigen::Index j = 0; j < d; ++j) {
                const double w = spec.bounds.upper[j] - spec.bounds.lower[j];
                shift[j] = rng.uniform(spec.bounds.lower[j] + 0.1 * w,
                                       spec.bounds.lower[j] + 0.9 * w);
            }
        }
    }
    Eigen::MatrixXd rotation;
    if (spec.use_rotation) {
        if (spec.rotation) {
            if (spec.rotation->rows() != d || spec.rotation->cols() != d)
                throw ConfigError{"benchmark: rotation dimension mismatch"};
            rotation = *spec.rotation;
        } else {
            rotation = random_rotation(d, rng);
        }
    }

    const BaseFunction base = spec.base;
    const double base_fitness = spec.optimum_fitness;
    const bool use_shift = spec.use_shift;
    const bool use_rotation = spec.use_rotation;

    Problem problem{
        spec.name,
        spec.bounds,
        [base, base_fitness, use_shift, use_rotation, shift,
         rotation](const Vec& x) {
            if (!use_shift && !use_rotation)
                return base_function_value(base, x) + base_fitness;
            Vec z = use_shift ? Vec(x - shift) : x;
            if (use_rotation)
                z = rotation * z;
            return base_function_value(base, z) + base_fitness;
        },
        spec.optimum_fitness,
        std::nullopt,
    };

    Vec opt = base_optimum(base, d);
    if (use_rotation)
        opt = rotation.transpose() * opt;
    if (use_shift)
        opt += shift;
    problem.optimum_point = std::move(opt);
    return problem;
}

Problem make_benchmark(const std::string& name, Eigen::Index dimension,
                       std::uint64_t seed) {
    return make_benchmark(resolve_benchmark(name, dimension), seed);
}

std::vector<std::string> list_benchmarks() {
    std::vector<std::string> names;
    names.reserve(kBases.size() * 3);
    for (const BaseInfo& b : kBases) {
        names.emplace_back(b.name);
        names.emplace_back(std::string("shifted-") + b.name);
        names.emplace_back(std::string("shifted-rotated-") + b.name);
    }
    std::sort(names.begin(), names.end());
    return names;
}

} // namespace mscap
