#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace uowc {

using Rng = std::mt19937_64;
using Output = Eigen::Vector2d;

/// Shape of the receiver's incidence-angle sensitivity, a sum of two Gaussian bumps:
///   g(phi) = a1 exp(-((phi - b1)/c1)^2) + a2 exp(-((phi + b2)/c2)^2)
/// Offsets and widths in radians. The defaults place both lobes at positive
/// angles (+1.5 and +1.0 rad) so g, and with it y1 + y2, is strictly increasing
/// on the training box; a bump centred inside the box makes mirror-image states
/// produce the same summed output.
struct GaussianGainParams {
    double a1 = 1.0;
    double b1 = 1.5;
    double c1 = 1.5;
    double a2 = 0.5;
    double b2 = -1.0;
    double c2 = 1.0;

    /// Throws ConfigError unless a1 > 0, a2 >= 0, c1 > 0, c2 > 0.
    void validate() const;
};

/// Physical constants of the LED link.
///
/// The composite transmitter coefficient is derived, never stored, so it
/// always reflects the current distance and attenuation.
struct ChannelParams {
    GaussianGainParams gain;
    double raw_cp = 1.0;                 // C_p (W m^2)
    double transmitter_intensity = 1.0;  // angular intensity scale, dimensionless
    double attenuation_c = 0.5;          // beam attenuation (1/m)
    double link_distance_d0 = 0.085;     // transceiver separation (m)
    double delta_phi = 0.10471975511965977;  // second receiver shift, 6 deg in rad
    double te = 0.01;                    // sampling time (s)

    /// C_p * I * exp(-c d0) / d0^2, in W.
    [[nodiscard]] double cp_bar() const;

    void validate() const;
};

struct LedState {
    double x1 = 0.0;  // angular position (rad)
    double x2 = 0.0;  // angular velocity (rad/s)

    [[nodiscard]] Eigen::Vector2d vec() const { return {x1, x2}; }
    static LedState from(const Eigen::Ref<const Eigen::VectorXd>& v);

    friend bool operator==(const LedState&, const LedState&) = default;
};

struct NoiseConfig {
    double process_std_1 = 1e-3;
    double process_std_2 = 1e-3;
    double measurement_std = 0.031622776601683791;  // sqrt(0.001)
    std::uint64_t seed = 1;

    void validate() const;
};

[[nodiscard]] double gain(double phi, const GaussianGainParams& params);
[[nodiscard]] double gain_derivative(double phi, const GaussianGainParams& params);

/// Noise-free received power cp_bar * g(phi).
[[nodiscard]] double received_power(double phi, const ChannelParams& params);

/// Two-receiver output (cp_bar g(x1), cp_bar g(x1 + delta_phi)), noise-free.
[[nodiscard]] Output measure_pair(const LedState& state, const ChannelParams& params);

/// Same as above with i.i.d. N(0, measurement_std^2) added to each receiver.
[[nodiscard]] Output measure_pair(const LedState& state, const ChannelParams& params,
                                  const NoiseConfig& noise, Rng& rng);

/// x1' = x1 + te x2, x2' = x2 + u.
[[nodiscard]] LedState step(const LedState& state, double u, const ChannelParams& params);

/// Dynamics with additive process noise w1, w2.
[[nodiscard]] LedState step(const LedState& state, double u, const ChannelParams& params,
                            const NoiseConfig& noise, Rng& rng);

/// Exact inverse of the noise-free step.
[[nodiscard]] LedState inverse_step(const LedState& state, double u, const ChannelParams& params);

}  // namespace uowc
