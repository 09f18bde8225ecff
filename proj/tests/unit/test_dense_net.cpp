#include <doctest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <random>

#include "uowc/dense_net.hpp"
#include "uowc/errors.hpp"

using namespace uowc;

namespace {

double scalar_objective(const NetworkParams& net, const Eigen::MatrixXd& x, const Eigen::MatrixXd& up)
{
    return (forward_batch(net, x).array() * up.array()).sum();
}

// Visit every parameter as a mutable reference, in a fixed order.
template <typename F>
void for_each_parameter(NetworkParams& net, F&& f)
{
    for (Eigen::Index i = 0; i < net.w1.size(); ++i) f(net.w1.data()[i]);
    for (Eigen::Index i = 0; i < net.bias1.size(); ++i) f(net.bias1.data()[i]);
    for (Eigen::Index i = 0; i < net.w2.size(); ++i) f(net.w2.data()[i]);
    for (Eigen::Index i = 0; i < net.bias2.size(); ++i) f(net.bias2.data()[i]);
}

std::vector<double> flatten(NetworkParams p)
{
    std::vector<double> out;
    for_each_parameter(p, [&](double& v) { out.push_back(v); });
    return out;
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6}); }

}  // namespace

TEST_CASE("tanh hidden unit with identity output")
{
    auto net = NetworkParams::zeros(1, 1, 1);
    net.w1(0, 0) = 1.0;
    net.w2(0, 0) = 1.0;
    Eigen::VectorXd x(1);
    x << 0.5;
    CHECK(std::abs(forward(net, x)[0] - 0.46212) < 1e-5);
    CHECK(forward(net, x)[0] == doctest::Approx(std::tanh(0.5)).epsilon(1e-14));

    net.bias2(0) = 0.25;
    x << -2.0;
    CHECK(forward(net, x)[0] == doctest::Approx(std::tanh(-2.0) + 0.25).epsilon(1e-14));
}

TEST_CASE("activation is accurate over a wide range")
{
    auto net = NetworkParams::zeros(1, 1, 1);
    net.w1(0, 0) = 1.0;
    net.w2(0, 0) = 1.0;
    for (double v = -40.0; v <= 40.0; v += 0.37) {
        Eigen::VectorXd x(1);
        x << v;
        CHECK(std::abs(forward(net, x)[0] - std::tanh(v)) <= 1e-15 + 4e-16 * std::abs(std::tanh(v)));
    }
}

TEST_CASE("batched forward equals per-sample forward")
{
    const auto net = init_network(2, 17, 6, 99);
    std::mt19937_64 rng(4);
    std::normal_distribution<double> n01;
    Eigen::MatrixXd x(2, 33);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n01(rng);
    const Eigen::MatrixXd batch = forward_batch(net, x);
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        CHECK((batch.col(c) - forward(net, x.col(c))).norm() <= 1e-13);
    }
}

TEST_CASE("analytic gradients agree with finite differences on random networks")
{
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> n01;
    std::uniform_int_distribution<int> dim(1, 6);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int in = dim(rng), hidden = dim(rng) + 2, out = dim(rng);
        NetworkParams net = init_network(in, hidden, out, 1000 + trial);
        for_each_parameter(net, [&](double& v) { v += 0.3 * n01(rng); });
        Eigen::MatrixXd x(in, 3), up(out, 3);
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = n01(rng);
        for (Eigen::Index i = 0; i < up.size(); ++i) up.data()[i] = n01(rng);

        const auto acts = forward_cached(net, x);
        const auto grads = backward_batch(net, x, acts, up, true);
        const auto analytic = flatten(grads.params);

        const double h = 1e-6;
        std::vector<double> numeric;
        for_each_parameter(net, [&](double& v) {
            const double saved = v;
            v = saved + h;
            const double fp = scalar_objective(net, x, up);
            v = saved - h;
            const double fm = scalar_objective(net, x, up);
            v = saved;
            numeric.push_back((fp - fm) / (2 * h));
        });
        REQUIRE(numeric.size() == analytic.size());
        for (std::size_t i = 0; i < numeric.size(); ++i) worst = std::max(worst, rel_err(numeric[i], analytic[i]));

        for (Eigen::Index i = 0; i < x.size(); ++i) {
            Eigen::MatrixXd xp = x, xm = x;
            xp.data()[i] += h;
            xm.data()[i] -= h;
            const double fd = (scalar_objective(net, xp, up) - scalar_objective(net, xm, up)) / (2 * h);
            worst = std::max(worst, rel_err(fd, grads.inputs.data()[i]));
        }
    }
    CHECK(worst <= 1e-4);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(seconds < 10.0);
}

TEST_CASE("single-sample backward matches the batched path")
{
    const auto net = init_network(2, 9, 4, 5);
    Eigen::VectorXd x(2), up(4);
    x << 0.3, -0.7;
    up << 1.0, -0.5, 0.25, 2.0;
    const auto single = backward(net, x, up);
    const auto batched = backward_batch(net, x, forward_cached(net, x), up, true);
    CHECK(single.params == batched.params);
    CHECK((single.inputs - batched.inputs).norm() == 0.0);
}

TEST_CASE("zero upstream gradient gives zero gradients")
{
    const auto net = init_network(2, 8, 3, 1);
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(2, 5);
    const auto g = backward_batch(net, x, forward_cached(net, x), Eigen::MatrixXd::Zero(3, 5), true);
    for (double v : flatten(g.params)) CHECK(v == 0.0);
    CHECK(g.inputs.norm() == 0.0);
}

TEST_CASE("gradients are summed over the batch")
{
    const auto net = init_network(2, 6, 2, 8);
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(2, 4);
    Eigen::MatrixXd up = Eigen::MatrixXd::Random(2, 4);
    const auto all = backward_batch(net, x, forward_cached(net, x), up, false);
    auto acc = NetworkParams::zeros(2, 6, 2);
    for (int c = 0; c < 4; ++c) {
        const auto g = backward(net, x.col(c), up.col(c));
        acc.w1 += g.params.w1;
        acc.bias1 += g.params.bias1;
        acc.w2 += g.params.w2;
        acc.bias2 += g.params.bias2;
    }
    CHECK((acc.w1 - all.params.w1).norm() <= 1e-13);
    CHECK((acc.w2 - all.params.w2).norm() <= 1e-13);
    CHECK((acc.bias1 - all.params.bias1).norm() <= 1e-13);
    CHECK((acc.bias2 - all.params.bias2).norm() <= 1e-13);
    CHECK(all.inputs.size() == 0);
}

TEST_CASE("adam")
{
    SUBCASE("zero gradient leaves parameters unchanged")
    {
        auto net = init_network(2, 5, 3, 3);
        const auto before = net;
        auto state = AdamState::for_network(net);
        adam_step(net, NetworkParams::zeros(2, 5, 3), state);
        CHECK(net == before);
        CHECK(state.step == 1);
    }
    SUBCASE("first step moves each parameter by about the learning rate")
    {
        auto net = init_network(2, 5, 3, 3);
        const auto before = flatten(net);
        auto grads = NetworkParams::zeros(2, 5, 3);
        std::mt19937_64 rng(6);
        std::normal_distribution<double> n01;
        for_each_parameter(grads, [&](double& v) { v = n01(rng); });
        auto state = AdamState::for_network(net, AdamHyper{0.01, 0.9, 0.999, 1e-8});
        adam_step(net, grads, state);
        const auto after = flatten(net);
        const auto g = flatten(grads);
        for (std::size_t i = 0; i < after.size(); ++i) {
            const double expected = -0.01 * g[i] / (std::abs(g[i]) + 1e-8);
            CHECK(after[i] - before[i] == doctest::Approx(expected).epsilon(1e-6));
        }
    }
    SUBCASE("shape mismatch is rejected")
    {
        auto net = init_network(2, 5, 3, 3);
        auto state = AdamState::for_network(net);
        CHECK_THROWS_AS(adam_step(net, NetworkParams::zeros(2, 4, 3), state), ContractError);
    }
}

TEST_CASE("initialization")
{
    const auto a = init_network(2, 500, 6, 17);
    const auto b = init_network(2, 500, 6, 17);
    const auto c = init_network(2, 500, 6, 18);
    CHECK(a == b);
    CHECK_FALSE(a == c);

    const double limit1 = std::sqrt(6.0 / (2 + 500));
    const double limit2 = std::sqrt(6.0 / (500 + 6));
    CHECK(a.w1.cwiseAbs().maxCoeff() <= limit1);
    CHECK(a.w2.cwiseAbs().maxCoeff() <= limit2);
    CHECK(a.bias1.norm() == 0.0);
    CHECK(a.bias2.norm() == 0.0);
    // Mean of 3000 uniform draws on [-L, L]: standard error L / sqrt(9000).
    CHECK(std::abs(a.w2.mean()) <= 4.0 * limit2 / std::sqrt(3.0 * 3000));
    CHECK(a.parameter_count() == 2 * 500 + 500 + 500 * 6 + 6);
}

TEST_CASE("checkpoint round trip is exact")
{
    const auto dir = std::filesystem::temp_directory_path() / "uowc_test_ckpt";
    std::filesystem::create_directories(dir);
    Checkpoint ck;
    ck.net = init_network(2, 11, 6, 12345);
    ck.net.bias2(3) = 1.0 / 3.0;
    ck.seed = 12345;
    Eigen::VectorXd s(3);
    s << 1e-300, -2.5, 7.0 / 9.0;
    ck.meta["latent_scale"] = s;
    save_checkpoint(dir / "a.ckpt", ck);
    const auto back = load_checkpoint(dir / "a.ckpt");
    CHECK(back.net == ck.net);
    CHECK(back.seed == ck.seed);
    REQUIRE(back.meta.count("latent_scale") == 1);
    CHECK(back.meta.at("latent_scale") == s);

    CHECK_THROWS_AS((void)load_checkpoint(dir / "missing.ckpt"), MissingArtifactError);
    std::filesystem::remove_all(dir);
}
