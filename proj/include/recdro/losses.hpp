#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace recdro {

using TargetMatrix = Eigen::Matrix<std::uint32_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Per-user losses for one mini-batch. Losses are accumulated in 64-bit;
// positions with target 0 are masked and contribute 0.
struct BatchLosses {
    std::vector<std::uint32_t> user_ids;  // B
    Eigen::MatrixXd per_position;         // B x L
    TargetMatrix targets;                 // B x L, 0 = masked
    Eigen::VectorXd per_user;             // B, per_position row sum / normalizer
    std::vector<int> valid_counts;        // B
    std::vector<double> normalizers;      // B, valid count or L per config
    std::vector<std::uint8_t> flagged;    // B, set when valid_count == 0

    Eigen::Index batch_size() const { return per_user.size(); }
    Eigen::Index max_len() const { return per_position.cols(); }
};

}  // namespace recdro
