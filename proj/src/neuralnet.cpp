#include "mscap/neuralnet.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numbers>
#include <utility>

#include "mscap/random.hpp"

namespace mscap {

namespace {

constexpr const char* kCsvHeader =
    "theta1,theta2,theta3,theta4,theta5,theta6,theta7,theta8,distance";

/// Hidden activations for a batch: sigmoid of X * W1, one row per sample.
Eigen::MatrixXd hidden_activations(const Eigen::MatrixXd& x,
                                   const Eigen::MatrixXd& w1) {
    return (1.0 + (-(x * w1).array()).exp()).inverse().matrix();
}

} // namespace

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

double forward(const FFNetwork& net, const Vec& input) {
    if (input.size() != kNetInputs)
        throw ConfigError{"network: input must have 8 components"};
    const Vec pre = net.hidden_weights.transpose() * input;
    double out = 0.0;
    for (Eigen::Index k = 0; k < pre.size(); ++k)
        out += net.output_weights[k] * sigmoid(pre[k]);
    return out;
}

FFNetwork decode_weights(const Vec& v, Eigen::Index n_hidden) {
    if (n_hidden < 1)
        throw ConfigError{"network: hidden width must be positive"};
    if (v.size() != (kNetInputs + 1) * n_hidden)
        throw ConfigError{"network: weight vector length " +
                          std::to_string(v.size()) + " does not match 9*" +
                          std::to_string(n_hidden)};
    FFNetwork net;
    net.hidden_weights.resize(kNetInputs, n_hidden);
    for (Eigen::Index j = 0; j < kNetInputs; ++j)
        for (Eigen::Index k = 0; k < n_hidden; ++k)
            net.hidden_weights(j, k) = v[j * n_hidden + k];
    net.output_weights = v.segment(kNetInputs * n_hidden, n_hidden);
    return net;
}

Vec encode_weights(const FFNetwork& net) {
    const Eigen::Index n_hidden = net.hidden_count();
    Vec v((kNetInputs + 1) * n_hidden);
    for (Eigen::Index j = 0; j < kNetInputs; ++j)
        for (Eigen::Index k = 0; k < n_hidden; ++k)
            v[j * n_hidden + k] = net.hidden_weights(j, k);
    v.segment(kNetInputs * n_hidden, n_hidden) = net.output_weights;
    return v;
}

Eigen::Vector3d kinematics_target() { return {0.1, 0.1, 0.1}; }

Eigen::Vector3d chain_end_effector(const Vec& angles) {
    if (angles.size() != kNetInputs)
        throw ConfigError{"kinematics: expected 8 joint angles"};
    Eigen::Matrix3d frame = Eigen::Matrix3d::Identity();
    Eigen::Vector3d pos = Eigen::Vector3d::Zero();
    for (int i = 0; i < kNetInputs; ++i) {
        const double c = std::cos(angles[i]);
        const double s = std::sin(angles[i]);
        Eigen::Matrix3d rot;
        if (i % 2 == 0) // rotation about the local z axis
            rot << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
        else // rotation about the local y axis
            rot << c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c;
        frame = frame * rot;
        pos += frame * Eigen::Vector3d{kLinkLengths[static_cast<std::size_t>(i)], 0.0, 0.0};
    }
    return pos;
}

Eigen::MatrixXd synth_kinematics_raw(Eigen::Index n, NoiseLevel noise,
                                     std::uint64_t seed) {
    if (n < 1)
        throw ConfigError{"kinematics: need at least one row"};
    constexpr double pi = std::numbers::pi;
    Mt64Stream rng{seed};
    Eigen::MatrixXd raw(n, kNetInputs + 1);
    Vec angles(kNetInputs);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (int j = 0; j < kNetInputs; ++j) {
            angles[j] = rng.uniform(-pi, pi);
            raw(r, j) = angles[j];
        }
        raw(r, kNetInputs) =
            (chain_end_effector(angles) - kinematics_target()).norm();
    }
    if (noise != NoiseLevel::None) {
        const auto y = raw.col(kNetInputs);
        const double mean = y.mean();
        const double sd =
            std::sqrt((y.array() - mean).square().sum() / static_cast<double>(n));
        const double half_width =
            (noise == NoiseLevel::Medium ? 0.025 : 0.05) * sd;
        for (Eigen::Index r = 0; r < n; ++r)
            raw(r, kNetInputs) += rng.uniform(-half_width, half_width);
    }
    return raw;
}

KinDataset normalize_dataset(const Eigen::MatrixXd& raw) {
    if (raw.rows() < 1 || raw.cols() != kNetInputs + 1)
        throw DataError{"dataset: expected rows of 9 columns"};
    KinDataset ds;
    const Eigen::Index n = raw.rows();
    ds.inputs.resize(n, kNetInputs);
    ds.targets.resize(n);
    ds.col_min.resize(kNetInputs + 1);
    ds.col_max.resize(kNetInputs + 1);
    for (Eigen::Index c = 0; c <= kNetInputs; ++c) {
        const double lo = raw.col(c).minCoeff();
        const double hi = raw.col(c).maxCoeff();
        ds.col_min[c] = lo;
        ds.col_max[c] = hi;
        for (Eigen::Index r = 0; r < n; ++r) {
            const double v =
                hi > lo ? -1.0 + 2.0 * (raw(r, c) - lo) / (hi - lo) : 0.0;
            if (c < kNetInputs)
                ds.inputs(r, c) = v;
            else
                ds.targets[r] = v;
        }
    }
    return ds;
}

KinDataset synth_kinematics(Eigen::Index n, NoiseLevel noise,
                            std::uint64_t seed) {
    return normalize_dataset(synth_kinematics_raw(n, noise, seed));
}

KinDataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw DataError{"dataset: cannot open '" + path + "'"};

    std::string line;
    long line_no = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    };

    if (!next_line() || line != kCsvHeader)
        throw DataError{"dataset: line " + std::to_string(std::max(line_no, 1L)) +
                        ": expected header '" + kCsvHeader + "'"};

    std::vector<std::array<double, kNetInputs + 1>> rows;
    while (next_line()) {
        std::array<double, kNetInputs + 1> row{};
        std::size_t field = 0, start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            std::string_view token =
                std::string_view(line).substr(start, comma == std::string::npos
                                                         ? std::string::npos
                                                         : comma - start);
            while (!token.empty() && (token.front() == ' ' || token.front() == '\t'))
                token.remove_prefix(1);
            while (!token.empty() && (token.back() == ' ' || token.back() == '\t'))
                token.remove_suffix(1);
            if (field >= row.size())
                throw DataError{"dataset: line " + std::to_string(line_no) +
                                ": expected 9 columns"};
            const char* first = token.data();
            const char* last = token.data() + token.size();
            auto [ptr, ec] = std::from_chars(first, last, row[field]);
            if (ec != std::errc{} || ptr != last)
                throw DataError{"dataset: line " + std::to_string(line_no) +
                                ": malformed number '" + std::string(token) +
                                "'"};
            ++field;
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (field != row.size())
            throw DataError{"dataset: line " + std::to_string(line_no) +
                            ": expected 9 columns"};
        rows.push_back(row);
    }
    if (rows.empty())
        throw DataError{"dataset: no data rows in '" + path + "'"};

    Eigen::MatrixXd raw(static_cast<Eigen::Index>(rows.size()), kNetInputs + 1);
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (int c = 0; c <= kNetInputs; ++c)
            raw(static_cast<Eigen::Index>(r), c) = rows[r][static_cast<std::size_t>(c)];
    return normalize_dataset(raw);
}

void write_dataset_csv(const std::string& path, const Eigen::MatrixXd& raw) {
    if (raw.cols() != kNetInputs + 1)
        throw DataError{"dataset: expected 9 columns to write"};
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError{"dataset: cannot write '" + path + "'"};
    out << kCsvHeader << '\n';
    char buf[64];
    for (Eigen::Index r = 0; r < raw.rows(); ++r) {
        for (Eigen::Index c = 0; c <= kNetInputs; ++c) {
            std::snprintf(buf, sizeof buf, "%.17g", raw(r, c));
            if (c > 0) out << ',';
            out << buf;
        }
        out << '\n';
    }
    if (!out)
        throw IoError{"dataset: write failed for '" + path + "'"};
}

DataSplit split_three_ways(const KinDataset& dataset, std::uint64_t seed) {
    const Eigen::Index n = dataset.rows();
    if (n < 3)
        throw ConfigError{"split: need at least 3 rows"};

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
        order[static_cast<std::size_t>(i)] = i;
    Mt64Stream rng{seed};
    for (std::size_t i = order.size() - 1; i > 0; --i) {
        const std::size_t j = rng.uniform_index(i + 1);
        std::swap(order[i], order[j]);
    }

    const Eigen::Index base = n / 3;
    const Eigen::Index rem = n % 3;
    const auto train_n = static_cast<std::size_t>(base + (rem > 0 ? 1 : 0));
    const auto valid_n = static_cast<std::size_t>(base + (rem > 1 ? 1 : 0));

    DataSplit split;
    split.train.assign(order.begin(), order.begin() + static_cast<long>(train_n));
    split.validation.assign(order.begin() + static_cast<long>(train_n),
                            order.begin() + static_cast<long>(train_n + valid_n));
    split.test.assign(order.begin() + static_cast<long>(train_n + valid_n),
                      order.end());
    return split;
}

namespace {

struct MseData {
    Eigen::MatrixXd x; // |rows| x 8
    Vec y;             // |rows|
};

MseData gather(const KinDataset& dataset, std::span<const Eigen::Index> rows) {
    MseData data;
    data.x.resize(static_cast<Eigen::Index>(rows.size()), kNetInputs);
    data.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        data.x.row(static_cast<Eigen::Index>(i)) = dataset.inputs.row(rows[i]);
        data.y[static_cast<Eigen::Index>(i)] = dataset.targets[rows[i]];
    }
    return data;
}

double mse_impl(const MseData& data, const Eigen::MatrixXd& w1, const Vec& w2) {
    const Vec pred = hidden_activations(data.x, w1) * w2;
    return (pred - data.y).squaredNorm() / static_cast<double>(data.y.size());
}

} // namespace

double mse_of(const KinDataset& dataset, std::span<const Eigen::Index> rows,
              const FFNetwork& net) {
    if (rows.empty())
        throw ConfigError{"mse: row set must be non-empty"};
    return mse_impl(gather(dataset, rows), net.hidden_weights,
                    net.output_weights);
}

Problem mse_objective(const KinDataset& dataset,
                      std::span<const Eigen::Index> rows,
                      Eigen::Index n_hidden, std::string name) {
    if (rows.empty())
        throw ConfigError{"mse: row set must be non-empty"};
    if (n_hidden < 1)
        throw ConfigError{"network: hidden width must be positive"};

    auto data = std::make_shared<MseData>(gather(dataset, rows));
    const Eigen::Index dim = (kNetInputs + 1) * n_hidden;
    return Problem{
        std::move(name),
        Bounds::uniform(dim, -1.0, 1.0),
        [data, n_hidden](const Vec& w) {
            const FFNetwork net = decode_weights(w, n_hidden);
            return mse_impl(*data, net.hidden_weights, net.output_weights);
        },
        0.0,
        std::nullopt,
    };
}

} // namespace mscap
