#pragma once

#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "uowc/channel.hpp"

namespace uowc {

/// Half-width of the training box X = [-0.5, 0.5]^2.
inline constexpr double kStateBoxHalfWidth = 0.5;

/// One-step pairs (x_k, x_{k+1}) under the constant training input u_bar.
struct Dataset {
    std::vector<LedState> states;
    std::vector<LedState> next;
    double u_bar = 0.0;
    std::uint64_t seed = 0;

    [[nodiscard]] std::size_t size() const { return states.size(); }

    /// 2 x n matrices, one sample per column.
    [[nodiscard]] Eigen::MatrixXd state_matrix() const;
    [[nodiscard]] Eigen::MatrixXd next_matrix() const;

    /// Number of pairs whose successor differs from the noise-free step.
    [[nodiscard]] std::size_t count_successor_violations(const ChannelParams& channel) const;
};

[[nodiscard]] Dataset generate_dataset(std::size_t size, double u_bar, const ChannelParams& channel,
                                       std::uint64_t seed);

/// Random disjoint partition with floor(fraction * n) pairs in the first part.
[[nodiscard]] std::pair<Dataset, Dataset> train_validation_split(const Dataset& ds, double fraction,
                                                                 std::uint64_t seed);

/// CSV `x1,x2,x1_next,x2_next` with `# u_bar=` and `# seed=` comment lines.
void write_dataset(const std::filesystem::path& path, const Dataset& ds);
[[nodiscard]] Dataset read_dataset(const std::filesystem::path& path);

}  // namespace uowc
