#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include <Eigen/Core>

namespace uowc {

/// Single-hidden-layer network  y = w2 tanh(w1 x + bias1) + bias2.
///
/// The output layer is linear. Batched entry points take one sample per
/// column.
struct NetworkParams {
    Eigen::MatrixXd w1;     // hidden x input
    Eigen::VectorXd bias1;  // hidden
    Eigen::MatrixXd w2;     // output x hidden
    Eigen::VectorXd bias2;  // output

    [[nodiscard]] int input_dim() const { return static_cast<int>(w1.cols()); }
    [[nodiscard]] int hidden_dim() const { return static_cast<int>(w1.rows()); }
    [[nodiscard]] int output_dim() const { return static_cast<int>(w2.rows()); }
    [[nodiscard]] Eigen::Index parameter_count() const;

    /// Network of the given shape with every entry zero.
    static NetworkParams zeros(int input_dim, int hidden_dim, int output_dim);

    /// Throws ContractError on inconsistent shapes or non-finite entries.
    void validate() const;

    /// Same shape as `other`.
    [[nodiscard]] bool same_shape(const NetworkParams& other) const;

    friend bool operator==(const NetworkParams& a, const NetworkParams& b);
};

/// Hidden activations and outputs of a batched forward pass, kept for backward.
struct Activations {
    Eigen::MatrixXd hidden;  // hidden x batch, post-tanh
    Eigen::MatrixXd output;  // output x batch
};

struct Gradients {
    NetworkParams params;        // summed over the batch
    Eigen::MatrixXd inputs;      // input x batch, empty unless requested
};

/// Glorot-uniform weights, zero biases; reproducible from `seed`.
[[nodiscard]] NetworkParams init_network(int input_dim, int hidden_dim, int output_dim, std::uint64_t seed);

[[nodiscard]] Eigen::VectorXd forward(const NetworkParams& net, const Eigen::Ref<const Eigen::VectorXd>& x);
[[nodiscard]] Eigen::MatrixXd forward_batch(const NetworkParams& net, const Eigen::Ref<const Eigen::MatrixXd>& inputs);
[[nodiscard]] Activations forward_cached(const NetworkParams& net, const Eigen::Ref<const Eigen::MatrixXd>& inputs);

/// Gradients of sum_n <upstream_n, net(x_n)> with respect to the parameters
/// and (optionally) each input column.
[[nodiscard]] Gradients backward_batch(const NetworkParams& net, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                                       const Activations& acts, const Eigen::Ref<const Eigen::MatrixXd>& upstream,
                                       bool want_input_gradients);

/// Single-sample backward; always returns the input gradient.
[[nodiscard]] Gradients backward(const NetworkParams& net, const Eigen::Ref<const Eigen::VectorXd>& x,
                                 const Eigen::Ref<const Eigen::VectorXd>& upstream);

struct AdamHyper {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    NetworkParams m;
    NetworkParams v;
    std::int64_t step = 0;
    AdamHyper hyper;

    static AdamState for_network(const NetworkParams& net, const AdamHyper& hyper = {});
};

/// One bias-corrected Adam update of `net` in place.
void adam_step(NetworkParams& net, const NetworkParams& grads, AdamState& state);

/// Checkpoint file: a network plus its init seed and optional named vectors.
/// Layout (text, one record per line, values at 17 significant digits):
///
///   uowc-dense-net 1
///   dims <input> <hidden> <output>
///   seed <u64>
///   w1 <hidden*input values, row-major>
///   bias1 <hidden values>
///   w2 <output*hidden values, row-major>
///   bias2 <output values>
///   meta <name> <count> <values...>      (zero or more)
///   end
struct Checkpoint {
    NetworkParams net;
    std::uint64_t seed = 0;
    std::map<std::string, Eigen::VectorXd> meta;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
[[nodiscard]] Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace uowc
