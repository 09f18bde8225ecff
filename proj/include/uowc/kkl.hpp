#pragma once

#include <functional>
#include <span>

#include <Eigen/Core>

#include "uowc/channel.hpp"

namespace uowc {

/// Linear latent dynamics z' = A z + B y of the observer.
struct LatentConfig {
    Eigen::MatrixXd a;  // q x q
    Eigen::MatrixXd b;  // q x p

    [[nodiscard]] int q() const { return static_cast<int>(a.rows()); }
    [[nodiscard]] int p() const { return static_cast<int>(b.cols()); }

    [[nodiscard]] double spectral_radius() const;
    [[nodiscard]] int controllability_rank() const;

    /// Coordinates z~ = diag(scale) z: A -> S A S^-1, B -> S B.
    [[nodiscard]] LatentConfig rescaled(const Eigen::Ref<const Eigen::VectorXd>& scale) const;

    /// Throws ConfigError on shape mismatch, non-finite entries, or rho(A) >= 1.
    void validate() const;
};

/// A = diag(1 - te, 1 - 2te, 1 - 4te, 1 - 6te, 1 - 8te, 1 - 10te), B = ones(6, 2).
/// Requires 0 < te < 0.1.
[[nodiscard]] LatentConfig default_latent_config(double te);

/// Diagonal A from explicit eigenvalues and B filled with a constant.
[[nodiscard]] LatentConfig diagonal_latent_config(std::span<const double> a_diag, int p, double b_fill);

/// Encoder T and its left inverse, as used by the observer.
struct LatentMaps {
    std::function<Eigen::VectorXd(const LedState&)> encode;
    std::function<LedState(const Eigen::VectorXd&)> decode;
};

[[nodiscard]] Eigen::VectorXd latent_step(const Eigen::Ref<const Eigen::VectorXd>& z, const Output& y,
                                          const LatentConfig& cfg);

/// T(f(T^-1(z), u)) - T(f(T^-1(z), u_bar)), noise-free dynamics.
[[nodiscard]] Eigen::VectorXd omega_correction(const Eigen::Ref<const Eigen::VectorXd>& z, double u, double u_bar,
                                               const LatentMaps& maps, const ChannelParams& channel);

/// z' = A z + B y + omega_correction(z, u, u_bar).
[[nodiscard]] Eigen::VectorXd latent_step_corrected(const Eigen::Ref<const Eigen::VectorXd>& z, const Output& y,
                                                    double u, double u_bar, const LatentMaps& maps,
                                                    const LatentConfig& cfg, const ChannelParams& channel);

struct ContractionReport {
    bool contracts = false;
    double margin = 0.0;  // 1 - rho(A) - lambda_u
    double rho = 0.0;
    double lambda_u = 0.0;
};

/// Sufficient condition rho(A) + lambda_u < 1 (an upper bound on rho(A + lambda_u I)).
[[nodiscard]] ContractionReport contraction_check(const LatentConfig& cfg, double lambda_u);

/// Sampled Lipschitz estimate of z -> omega_correction(z, u, u_bar): the largest
/// ratio |Omega(z_i) - Omega(z_j)| / |z_i - z_j| over all pairs of `samples`
/// (one latent per column). A diagnostic, not a bound.
[[nodiscard]] double estimate_omega_lipschitz(const Eigen::Ref<const Eigen::MatrixXd>& samples, double u,
                                              double u_bar, const LatentMaps& maps, const ChannelParams& channel);

struct SeriesOptions {
    int min_terms = 2000;
    double summand_tolerance = 1e-12;
    int max_terms = 1'000'000;
};

struct SeriesResult {
    Eigen::VectorXd value;
    double tail_bound = 0.0;  // bound on the norm of the omitted terms
    int terms = 0;            // number of summands included
    double rho = 0.0;
};

/// Truncated series T(x) = sum_j A^j B l(f^-(j+1)(x, u_bar)), with l the noise-free
/// two-receiver output. Summation continues past `min_terms` until a summand norm
/// drops below `summand_tolerance`; throws NumericalError if that never happens
/// within `max_terms`.
[[nodiscard]] SeriesResult series_oracle_T(const LedState& x, const LatentConfig& cfg, const ChannelParams& channel,
                                           double u_bar, const SeriesOptions& options = {});

}  // namespace uowc
