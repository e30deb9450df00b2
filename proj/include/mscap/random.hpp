#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace mscap {

/// Source of uniform randomness for one run. All draws in the library go
/// through this interface so that a run is reproducible from its seed and
/// tests can substitute scripted streams.
class RandomStream {
public:
    virtual ~RandomStream() = default;

    /// Uniform double in [0, 1).
    virtual double u01() = 0;

    /// Uniform double in [a, b).
    double uniform(double a, double b) {
        double r = a + (b - a) * u01();
        if (r >= b) r = std::nextafter(b, a);
        return r;
    }

    /// Uniform index in {0, ..., n-1}.
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(u01() * static_cast<double>(n));
    }

    /// Uniform index in {0, ..., n-1} \ {banned}.
    std::size_t index_excluding(std::size_t n, std::size_t banned) {
        std::size_t r = uniform_index(n - 1);
        return r >= banned ? r + 1 : r;
    }

    /// Fills `out` with pairwise-distinct indices in {0, ..., n-1}, all
    /// different from `banned`. Requires n > out.size().
    void distinct_indices(std::size_t n, std::size_t banned, std::span<std::size_t> out) {
        for (std::size_t k = 0; k < out.size(); ++k) {
            for (;;) {
                std::size_t cand = index_excluding(n, banned);
                bool fresh = true;
                for (std::size_t j = 0; j < k; ++j) {
                    if (out[j] == cand) { fresh = false; break; }
                }
                if (fresh) { out[k] = cand; break; }
            }
        }
    }
};

/// mt19937_64-backed stream. u01 uses the top 53 bits of each draw, so the
/// sequence depends only on the engine, not on any library distribution.
class Mt64Stream final : public RandomStream {
public:
    explicit Mt64Stream(std::uint64_t seed) : engine_(seed) {}

    double u01() override {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

private:
    std::mt19937_64 engine_;
};

} // namespace mscap
