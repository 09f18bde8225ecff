#include <doctest.h>

#include <cmath>
#include <random>

#include "uowc/channel.hpp"
#include "uowc/errors.hpp"

using namespace uowc;

namespace {

GaussianGainParams reference_gain()
{
    GaussianGainParams g;
    g.a1 = 1.0;
    g.b1 = 0.2;
    g.c1 = 0.5;
    g.a2 = 0.5;
    g.b2 = 0.1;
    g.c2 = 0.4;
    return g;
}

}  // namespace

TEST_CASE("gain matches scalar evaluation")
{
    // exp(-(0.2/0.5)^2) + 0.5 exp(-(0.1/0.4)^2) = 0.8521438 + 0.4697065
    CHECK(gain(0.0, reference_gain()) == doctest::Approx(1.32185).epsilon(0).scale(1).epsilon(1e-5));
    CHECK(std::abs(gain(0.0, reference_gain()) - 1.3218503) < 1e-5);

    auto g = reference_gain();
    g.a2 = 0.0;
    CHECK(gain(g.b1, g) == g.a1);

    g = reference_gain();
    g.a1 = 0.0;
    CHECK(gain(-g.b2, g) == g.a2);
}

TEST_CASE("gain derivative agrees with central differences")
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> angle(-2.0, 2.0);
    for (const auto& params : {reference_gain(), GaussianGainParams{}}) {
        for (int i = 0; i < 100; ++i) {
            const double phi = angle(rng);
            const double h = 1e-6;
            const double fd = (gain(phi + h, params) - gain(phi - h, params)) / (2 * h);
            const double an = gain_derivative(phi, params);
            CHECK(std::abs(fd - an) <= 1e-6 * std::max(std::abs(an), 1e-3));
        }
    }
}

TEST_CASE("default gain is nonnegative and increasing on the training box")
{
    const GaussianGainParams g;
    for (double phi = -0.6; phi <= 0.7; phi += 0.01) {
        CHECK(gain(phi, g) >= 0.0);
        CHECK(gain_derivative(phi, g) > 0.0);
    }
}

TEST_CASE("composite coefficient and received power")
{
    ChannelParams ch;
    ch.attenuation_c = 0.5;
    ch.link_distance_d0 = 0.1;
    ch.raw_cp = 1.0;
    ch.transmitter_intensity = 1.0;
    CHECK(std::abs(ch.cp_bar() - 95.1229) < 1e-3);
    CHECK(std::abs(ch.cp_bar() - std::exp(-0.05) / 0.01) < 1e-12);

    const double p1 = received_power(0.3, ch);
    ChannelParams far = ch;
    far.link_distance_d0 = 0.2;
    const double p2 = received_power(0.3, far);
    CHECK(p2 / p1 == doctest::Approx(std::exp(-0.05) / 4.0).epsilon(1e-12));

    ChannelParams unit = ch;
    unit.raw_cp = 1.0 / (std::exp(-0.05) / 0.01);
    CHECK(received_power(0.25, unit) == doctest::Approx(gain(0.25, unit.gain)).epsilon(1e-14));
}

TEST_CASE("received power strictly decreases with distance")
{
    ChannelParams ch;
    for (double c : {0.0, 0.5, 3.0}) {
        ch.attenuation_c = c;
        double prev = INFINITY;
        for (double d = 0.01; d < 5.0; d *= 1.1) {
            ch.link_distance_d0 = d;
            const double p = received_power(0.1, ch);
            CHECK(p < prev);
            prev = p;
        }
    }
}

TEST_CASE("measure_pair")
{
    ChannelParams ch;
    SUBCASE("identical receivers when the shift is zero")
    {
        ch.delta_phi = 0.0;
        const Output y = measure_pair({0.3, -0.1}, ch);
        CHECK(y[0] == y[1]);
    }
    SUBCASE("noise-free composition")
    {
        const Output y = measure_pair({0.0, 0.4}, ch);
        CHECK(y[0] == received_power(0.0, ch));
        CHECK(y[1] == received_power(ch.delta_phi, ch));
    }
    SUBCASE("noise has the configured mean and variance")
    {
        NoiseConfig noise;
        noise.measurement_std = std::sqrt(0.001);
        Rng rng(5);
        const LedState x{0.1, 0.2};
        const Output clean = measure_pair(x, ch);
        const int n = 100000;
        double sum = 0.0, sq = 0.0;
        for (int i = 0; i < n; ++i) {
            const double e = measure_pair(x, ch, noise, rng)[0] - clean[0];
            sum += e;
            sq += e * e;
        }
        const double mean = sum / n;
        const double var = sq / n - mean * mean;
        CHECK(std::abs(mean) <= 3.0 * std::sqrt(0.001) / std::sqrt(double(n)));
        CHECK(std::abs(var - 0.001) <= 0.05 * 0.001);
    }
}

TEST_CASE("step and inverse_step")
{
    ChannelParams ch;
    ch.te = 0.01;
    CHECK(step({0.0, 0.0}, 0.0, ch) == LedState{0.0, 0.0});

    const LedState s = step({0.1, 0.2}, 0.05, ch);
    CHECK(s.x1 == doctest::Approx(0.102).epsilon(1e-15));
    CHECK(s.x2 == doctest::Approx(0.25).epsilon(1e-15));

    const LedState back = inverse_step({0.102, 0.25}, 0.05, ch);
    CHECK(back.x1 == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(back.x2 == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(inverse_step({0.0, 0.0}, 0.0, ch) == LedState{0.0, 0.0});

    LedState x{0.0, 0.0};
    for (int k = 1; k <= 50; ++k) {
        x = step(x, 0.03, ch);
        CHECK(x.x2 == doctest::Approx(k * 0.03).epsilon(1e-12));
    }
}

TEST_CASE("step round trip on the training box")
{
    ChannelParams ch;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> box(-0.5, 0.5);
    for (int i = 0; i < 1000; ++i) {
        const LedState x{box(rng), box(rng)};
        const double u = box(rng);
        const LedState a = step(inverse_step(x, u, ch), u, ch);
        const LedState b = inverse_step(step(x, u, ch), u, ch);
        CHECK(std::hypot(a.x1 - x.x1, a.x2 - x.x2) <= 1e-12);
        CHECK(std::hypot(b.x1 - x.x1, b.x2 - x.x2) <= 1e-12);
    }
}

TEST_CASE("process noise only perturbs through the configured deviations")
{
    ChannelParams ch;
    NoiseConfig quiet;
    quiet.process_std_1 = 0.0;
    quiet.process_std_2 = 0.0;
    Rng rng(1);
    CHECK(step({0.1, 0.2}, 0.05, ch, quiet, rng) == step({0.1, 0.2}, 0.05, ch));
}

TEST_CASE("parameter validation")
{
    ChannelParams ch;
    CHECK_NOTHROW(ch.validate());
    ch.link_distance_d0 = 0.0;
    CHECK_THROWS_AS(ch.validate(), ConfigError);
    ch = ChannelParams{};
    ch.gain.c1 = 0.0;
    CHECK_THROWS_AS(ch.validate(), ConfigError);
    ch = ChannelParams{};
    ch.attenuation_c = -0.1;
    CHECK_THROWS_AS(ch.validate(), ConfigError);
    NoiseConfig n;
    n.measurement_std = -1.0;
    CHECK_THROWS_AS(n.validate(), ConfigError);
}
