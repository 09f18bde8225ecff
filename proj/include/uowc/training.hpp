#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "uowc/channel.hpp"
#include "uowc/datagen.hpp"
#include "uowc/dense_net.hpp"
#include "uowc/kkl.hpp"

namespace uowc {

struct TrainConfig {
    int epochs_dyn = 50;
    int epochs_recon = 50;
    int batch_size = 256;
    int hidden_dim = 500;
    AdamHyper adam;
    /// Multiplier applied to the learning rate after every epoch.
    double lr_decay = 0.95;
    /// Epochs between latent rescalings during the encoder phase.
    int normalization_interval = 1;
    double validation_fraction = 0.1;
    std::uint64_t seed = 7;

    void validate() const;
};

struct EpochLog {
    int epoch = 0;
    std::string phase;  // "dyn" or "recon"
    double loss_train = 0.0;
    double loss_val = 0.0;
};

/// Encoder T (2 -> q), decoder T^-1 (q -> 2) and the cumulative latent scale.
///
/// The encoder already emits rescaled latents z~ = diag(scale) T(x), so the
/// observer must run with `observer_config(base)` (B -> diag(scale) B).
struct TrainedMaps {
    NetworkParams encoder;
    NetworkParams decoder;
    Eigen::VectorXd scale;
    double loss_dyn_val = 0.0;
    double loss_recon_val = 0.0;
    std::vector<EpochLog> log;

    [[nodiscard]] LatentMaps maps() const;
    [[nodiscard]] LatentConfig observer_config(const LatentConfig& base) const;
};

/// mean_n |z_next_n - A z_n - B y_n|^2 over columns.
[[nodiscard]] double dyn_residual_loss(const Eigen::Ref<const Eigen::MatrixXd>& z,
                                       const Eigen::Ref<const Eigen::MatrixXd>& z_next,
                                       const Eigen::Ref<const Eigen::MatrixXd>& outputs, const LatentConfig& cfg);

/// Noise-free outputs l(x) for each column of `states` (2 x n -> 2 x n).
[[nodiscard]] Eigen::MatrixXd output_matrix(const Eigen::Ref<const Eigen::MatrixXd>& states,
                                            const ChannelParams& channel);

/// Dynamic loss of an encoder on pairs collected at the constant input u_bar.
/// The input-mismatch term T(f(x,u)) - T(f(x,u_bar)) vanishes on such pairs.
[[nodiscard]] double loss_dyn(const NetworkParams& encoder, const Eigen::Ref<const Eigen::MatrixXd>& states,
                              const Eigen::Ref<const Eigen::MatrixXd>& next, const LatentConfig& cfg,
                              const ChannelParams& channel);

/// mean_n |x_n - T^-1(T(x_n))|^2.
[[nodiscard]] double loss_recon(const NetworkParams& encoder, const NetworkParams& decoder,
                                const Eigen::Ref<const Eigen::MatrixXd>& states);

struct LatentNormalization {
    Eigen::VectorXd factors;  // b_i = 1 / max(std_i, floor)
    Eigen::VectorXd scale;    // current_scale .* factors
    bool floored = false;     // some dimension hit the std floor
};

inline constexpr double kLatentStdFloor = 1e-6;

/// Per-dimension whitening factors for a batch of latents (q x n).
[[nodiscard]] LatentNormalization normalize_latent(const Eigen::Ref<const Eigen::MatrixXd>& latents,
                                                   const Eigen::Ref<const Eigen::VectorXd>& current_scale);

/// Multiply output row i (weights and bias) by factors[i]; equals diag(factors) * net(x).
void rescale_output_rows(NetworkParams& net, const Eigen::Ref<const Eigen::VectorXd>& factors);

using TrainLogger = std::function<void(const EpochLog&)>;

/// Two-phase training: encoder on the dynamic loss with periodic latent
/// rescaling, then the decoder on the reconstruction loss with the encoder
/// frozen. Throws NumericalError on divergence.
[[nodiscard]] TrainedMaps train(const Dataset& dataset, const LatentConfig& cfg, const TrainConfig& tcfg,
                                const ChannelParams& channel, const TrainLogger& logger = {});

/// encoder.ckpt / decoder.ckpt in `dir`.
void save_trained_maps(const std::filesystem::path& dir, const TrainedMaps& maps, std::uint64_t seed);
[[nodiscard]] TrainedMaps load_trained_maps(const std::filesystem::path& dir);

/// CSV `epoch,phase,loss_train,loss_val` (phase written as text).
void write_training_log(const std::filesystem::path& path, const std::vector<EpochLog>& log);

}  // namespace uowc
