#pragma once

#include <cstddef>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mscap/random.hpp"

namespace mscap::test {

/// Exact component-wise equality of two vectors (no tolerance).
inline bool same(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.size() == b.size() && (a.array() == b.array()).all();
}

/// RandomStream that replays a fixed list of u01 values.  Requesting more
/// draws than scripted throws, so a test with a wrong draw-count
/// expectation fails loudly instead of silently reusing values.
class ScriptedStream final : public RandomStream {
public:
    explicit ScriptedStream(std::vector<double> values)
        : values_(std::move(values)) {}

    double u01() override {
        if (next_ >= values_.size())
            throw std::logic_error("ScriptedStream exhausted after " +
                                   std::to_string(values_.size()) + " draws");
        return values_[next_++];
    }

    std::size_t drawn() const { return next_; }
    std::size_t remaining() const { return values_.size() - next_; }

private:
    std::vector<double> values_;
    std::size_t next_ = 0;
};

/// Unique temporary directory, removed (recursively) on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        const std::filesystem::path base =
            std::filesystem::temp_directory_path();
        std::random_device rd;
        for (int attempt = 0; attempt < 1000; ++attempt) {
            const std::filesystem::path cand =
                base / (tag + "-" + std::to_string(rd()));
            std::error_code ec;
            if (std::filesystem::create_directory(cand, ec) && !ec) {
                path_ = cand;
                return;
            }
        }
        throw std::runtime_error("TempDir: could not create a fresh directory");
    }

    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }

    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::string str() const { return path_.string(); }
    std::string file(const std::string& name) const {
        return (path_ / name).string();
    }

private:
    std::filesystem::path path_;
};

} // namespace mscap::test
