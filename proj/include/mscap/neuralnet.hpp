#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mscap/core.hpp"

namespace mscap {

inline constexpr int kNetInputs = 8;

/// Single-hidden-layer feedforward network: 8 inputs, sigmoid hidden
/// units, one linear output, no bias terms.  Weight count 9 * hidden.
struct FFNetwork {
    Eigen::MatrixXd hidden_weights; // kNetInputs x N_hn
    Vec output_weights;             // N_hn

    Eigen::Index hidden_count() const { return output_weights.size(); }
};

double sigmoid(double t);

/// Network output for one (normalized) 8-component input.
double forward(const FFNetwork& net, const Vec& input);

/// Flat weight vector <-> network.  Layout: the first 8*N_hn entries fill
/// the hidden weights input-index major (entry j*N_hn + k connects input j
/// to hidden unit k); the last N_hn entries are the output weights.
FFNetwork decode_weights(const Vec& v, Eigen::Index n_hidden);
Vec encode_weights(const FFNetwork& net);

/// Normalized dataset: 8 input columns and one target column, each mapped
/// into [-1,1] by per-column min-max over all rows (constant columns map
/// to 0).  The raw column ranges are kept for reference.
struct KinDataset {
    Eigen::MatrixXd inputs; // rows x kNetInputs
    Vec targets;            // rows
    Vec col_min, col_max;   // kNetInputs + 1 raw column ranges

    Eigen::Index rows() const { return targets.size(); }
};

struct DataSplit {
    std::vector<Eigen::Index> train, validation, test;
};

enum class NoiseLevel { None, Medium, High };

/// Link lengths of the synthetic 8-joint arm (total reach 1).
inline constexpr std::array<double, 8> kLinkLengths{
    0.35, 0.25, 0.15, 0.10, 0.06, 0.04, 0.03, 0.02};

/// Fixed Cartesian point the arm's distance output is measured against.
Eigen::Vector3d kinematics_target();

/// End-effector position of the arm: each link rotates about its local
/// axis (z for even links, y for odd) by its joint angle, then extends
/// along its local x by its length.
Eigen::Vector3d chain_end_effector(const Vec& angles);

/// Raw synthetic rows (n x 9: eight angles plus distance), angles uniform
/// in [-pi, pi); noise adds a uniform perturbation of half-width 2.5%
/// (Medium) or 5% (High) of the clean distance's standard deviation.
Eigen::MatrixXd synth_kinematics_raw(Eigen::Index n, NoiseLevel noise,
                                     std::uint64_t seed);

/// Min-max normalization of raw rows into a dataset.
KinDataset normalize_dataset(const Eigen::MatrixXd& raw);

/// synth_kinematics_raw + normalize_dataset.
KinDataset synth_kinematics(Eigen::Index n, NoiseLevel noise,
                            std::uint64_t seed);

/// Reads the dataset CSV schema (header `theta1,...,theta8,distance`) and
/// normalizes.  Errors carry the 1-based line number.
KinDataset load_dataset(const std::string& path);

/// Writes raw rows under the dataset CSV schema, full double precision.
void write_dataset_csv(const std::string& path, const Eigen::MatrixXd& raw);

/// Seeded uniform shuffle, then contiguous thirds (sizes within 1).
DataSplit split_three_ways(const KinDataset& dataset, std::uint64_t seed);

/// Mean squared error of the network over the given rows.
double mse_of(const KinDataset& dataset, std::span<const Eigen::Index> rows,
              const FFNetwork& net);

/// The training objective: minimize MSE over `rows` as a function of the
/// flat weight vector, searched in [-1,1]^(9*n_hidden).
Problem mse_objective(const KinDataset& dataset,
                      std::span<const Eigen::Index> rows,
                      Eigen::Index n_hidden,
                      std::string name = "nn-mse");

} // namespace mscap
