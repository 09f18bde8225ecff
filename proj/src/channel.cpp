#include "uowc/channel.hpp"

#include <cmath>
#include <string>

#include "uowc/errors.hpp"

namespace uowc {

namespace {

double standard_normal(Rng& rng)
{
    std::normal_distribution<double> dist(0.0, 1.0);
    return dist(rng);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void GaussianGainParams::validate() const
{
    if (!(finite(a1) && finite(a2) && finite(b1) && finite(b2) && finite(c1) && finite(c2)))
        throw ConfigError("gain parameters must be finite");
    if (!(a1 > 0.0)) throw ConfigError("gain.a1 must be > 0");
    if (!(a2 >= 0.0)) throw ConfigError("gain.a2 must be >= 0");
    if (!(c1 > 0.0) || !(c2 > 0.0)) throw ConfigError("gain widths c1, c2 must be > 0");
}

double ChannelParams::cp_bar() const
{
    const double d = link_distance_d0;
    return raw_cp * transmitter_intensity * std::exp(-attenuation_c * d) / (d * d);
}

void ChannelParams::validate() const
{
    gain.validate();
    if (!(link_distance_d0 > 0.0)) throw ConfigError("channel.d0 must be > 0");
    if (!(te > 0.0)) throw ConfigError("channel.te must be > 0");
    if (!(attenuation_c >= 0.0)) throw ConfigError("channel.attenuation_c must be >= 0");
    if (!finite(raw_cp) || !finite(transmitter_intensity) || !finite(delta_phi))
        throw ConfigError("channel constants must be finite");
}

LedState LedState::from(const Eigen::Ref<const Eigen::VectorXd>& v)
{
    if (v.size() != 2) throw ContractError("LedState needs 2 components, got " + std::to_string(v.size()));
    return {v[0], v[1]};
}

void NoiseConfig::validate() const
{
    if (!(process_std_1 >= 0.0) || !(process_std_2 >= 0.0) || !(measurement_std >= 0.0))
        throw ConfigError("noise standard deviations must be >= 0");
}

double gain(double phi, const GaussianGainParams& p)
{
    const double r1 = (phi - p.b1) / p.c1;
    const double r2 = (phi + p.b2) / p.c2;
    return p.a1 * std::exp(-r1 * r1) + p.a2 * std::exp(-r2 * r2);
}

double gain_derivative(double phi, const GaussianGainParams& p)
{
    const double r1 = (phi - p.b1) / p.c1;
    const double r2 = (phi + p.b2) / p.c2;
    return -2.0 * p.a1 * r1 / p.c1 * std::exp(-r1 * r1) - 2.0 * p.a2 * r2 / p.c2 * std::exp(-r2 * r2);
}

double received_power(double phi, const ChannelParams& params)
{
    return params.cp_bar() * gain(phi, params.gain);
}

Output measure_pair(const LedState& state, const ChannelParams& params)
{
    const double cp = params.cp_bar();
    return {cp * gain(state.x1, params.gain), cp * gain(state.x1 + params.delta_phi, params.gain)};
}

Output measure_pair(const LedState& state, const ChannelParams& params, const NoiseConfig& noise, Rng& rng)
{
    Output y = measure_pair(state, params);
    y[0] += noise.measurement_std * standard_normal(rng);
    y[1] += noise.measurement_std * standard_normal(rng);
    return y;
}

LedState step(const LedState& state, double u, const ChannelParams& params)
{
    return {state.x1 + params.te * state.x2, state.x2 + u};
}

LedState step(const LedState& state, double u, const ChannelParams& params, const NoiseConfig& noise, Rng& rng)
{
    LedState next = step(state, u, params);
    next.x1 += noise.process_std_1 * standard_normal(rng);
    next.x2 += noise.process_std_2 * standard_normal(rng);
    return next;
}

LedState inverse_step(const LedState& state, double u, const ChannelParams& params)
{
    const double x2_prev = state.x2 - u;
    return {state.x1 - params.te * x2_prev, x2_prev};
}

}  // namespace uowc
