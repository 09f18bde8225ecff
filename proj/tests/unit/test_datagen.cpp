#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <set>
#include <utility>

#include "uowc/datagen.hpp"
#include "uowc/errors.hpp"

using namespace uowc;

TEST_CASE("generation is deterministic in the seed")
{
    const ChannelParams ch;
    const auto a = generate_dataset(500, 0.0, ch, 42);
    const auto b = generate_dataset(500, 0.0, ch, 42);
    const auto c = generate_dataset(500, 0.0, ch, 43);
    CHECK(a.states == b.states);
    CHECK(a.next == b.next);
    CHECK(a.states != c.states);
    CHECK(a.seed == 42);
}

TEST_CASE("states cover the training box uniformly")
{
    const ChannelParams ch;
    const auto ds = generate_dataset(100000, 0.0, ch, 1);
    const Eigen::MatrixXd s = ds.state_matrix();
    for (int r = 0; r < 2; ++r) {
        CHECK(s.row(r).minCoeff() >= -0.5);
        CHECK(s.row(r).maxCoeff() <= 0.5);
        CHECK(s.row(r).minCoeff() < -0.499);
        CHECK(s.row(r).maxCoeff() > 0.499);
        // Uniform on [-0.5, 0.5]: variance 1/12, standard error of the mean 0.2887 / sqrt(n).
        CHECK(std::abs(s.row(r).mean()) <= 4.0 * 0.2887 / std::sqrt(1e5));
    }
}

TEST_CASE("successors follow the noise-free step at u_bar")
{
    const ChannelParams ch;
    const auto ds = generate_dataset(2000, 0.05, ch, 9);
    CHECK(ds.count_successor_violations(ch) == 0);
    for (std::size_t i = 0; i < ds.size(); i += 97) {
        CHECK(ds.next[i].x1 == doctest::Approx(ds.states[i].x1 + ch.te * ds.states[i].x2).epsilon(1e-15));
        CHECK(ds.next[i].x2 == doctest::Approx(ds.states[i].x2 + 0.05).epsilon(1e-15));
    }
    auto broken = ds;
    broken.next[3].x2 += 1e-3;
    CHECK(broken.count_successor_violations(ch) == 1);
}

TEST_CASE("train/validation split")
{
    const ChannelParams ch;
    SUBCASE("sizes")
    {
        const auto ds = generate_dataset(10, 0.0, ch, 2);
        const auto [train, val] = train_validation_split(ds, 0.9, 5);
        CHECK(train.size() == 9);
        CHECK(val.size() == 1);
    }
    SUBCASE("partition of the original pairs")
    {
        const auto ds = generate_dataset(1000, 0.0, ch, 2);
        const auto [train, val] = train_validation_split(ds, 0.9, 5);
        using Pair = std::pair<double, double>;
        std::multiset<Pair> original, merged;
        for (const auto& s : ds.states) original.insert({s.x1, s.x2});
        for (const auto* part : {&train, &val})
            for (const auto& s : part->states) merged.insert({s.x1, s.x2});
        CHECK(original == merged);
        CHECK(train.count_successor_violations(ch) == 0);
        CHECK(val.count_successor_violations(ch) == 0);
    }
    SUBCASE("deterministic in the seed")
    {
        const auto ds = generate_dataset(100, 0.0, ch, 2);
        CHECK(train_validation_split(ds, 0.5, 1).first.states == train_validation_split(ds, 0.5, 1).first.states);
        CHECK(train_validation_split(ds, 0.5, 1).first.states != train_validation_split(ds, 0.5, 2).first.states);
    }
    SUBCASE("degenerate splits are rejected")
    {
        const auto ds = generate_dataset(3, 0.0, ch, 2);
        CHECK_THROWS_AS((void)train_validation_split(ds, 0.1, 1), ConfigError);
        CHECK_THROWS_AS((void)train_validation_split(ds, 1.0, 1), ConfigError);
    }
}

TEST_CASE("dataset file round trip")
{
    const ChannelParams ch;
    const auto ds = generate_dataset(257, 0.125, ch, 31);
    const auto dir = std::filesystem::temp_directory_path() / "uowc_test_datagen";
    std::filesystem::create_directories(dir);
    write_dataset(dir / "d.csv", ds);
    const auto back = read_dataset(dir / "d.csv");
    CHECK(back.states == ds.states);
    CHECK(back.next == ds.next);
    CHECK(back.u_bar == ds.u_bar);
    CHECK(back.seed == ds.seed);
    CHECK_THROWS_AS((void)read_dataset(dir / "none.csv"), MissingArtifactError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("zero-size datasets are rejected")
{
    CHECK_THROWS_AS((void)generate_dataset(0, 0.0, ChannelParams{}, 1), ConfigError);
}
