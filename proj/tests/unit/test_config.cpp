#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>

#include "uowc/config.hpp"
#include "uowc/errors.hpp"

using namespace uowc;

namespace {

std::filesystem::path write_file(const char* name, const std::string& text)
{
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("angles")
{
    CHECK(parse_angle("6deg") == doctest::Approx(0.10471975511965977).epsilon(1e-15));
    CHECK(parse_angle("0.25") == 0.25);
    CHECK(parse_angle("-90deg") == doctest::Approx(-std::numbers::pi / 2));
    CHECK_THROWS_AS((void)parse_angle("six"), ConfigError);
    CHECK_THROWS_AS((void)parse_angle("6 rad"), ConfigError);
}

TEST_CASE("setting keys")
{
    RunConfig c;
    c.set("channel.d0", "0.2");
    CHECK(c.channel.link_distance_d0 == 0.2);
    c.set("channel.delta_phi", "3deg");
    CHECK(c.channel.delta_phi == doctest::Approx(std::numbers::pi / 60));
    c.set("train.epochs_dyn", "12");
    CHECK(c.train.epochs_dyn == 12);
    c.set("eval.distances", "0.1, 0.3");
    CHECK(c.sweep_distances == std::vector<double>{0.1, 0.3});
    c.set("eval.scenarios", "IF1,CL");
    CHECK(c.scenarios == std::vector<std::string>{"IF1", "CL"});
    c.set("seed", "9");
    CHECK(c.seed == 9);
    CHECK(c.noise_seed() == 11);

    CHECK_THROWS_AS(c.set("channel.d1", "0.2"), ConfigError);
    CHECK_THROWS_AS(c.set("train.epochs_dyn", "twelve"), ConfigError);
    CHECK_THROWS_AS(c.set("train.epochs_dyn", "3.5"), ConfigError);
    CHECK_THROWS_AS(c.set("eval.observer_mode", "magic"), ConfigError);
}

TEST_CASE("config files are strict")
{
    RunConfig c;
    const auto good = write_file("uowc_cfg_good.conf", "# comment\nchannel.d0 = 0.1  # trailing\n\ndata.size=1000\n");
    c.merge_file(good);
    CHECK(c.channel.link_distance_d0 == 0.1);
    CHECK(c.data_size == 1000);

    RunConfig d;
    const auto bad = write_file("uowc_cfg_bad.conf", "channel.d0 = 0.1\nchanel.te = 0.01\n");
    CHECK_THROWS_AS(d.merge_file(bad), ConfigError);
    const auto garbled = write_file("uowc_cfg_garbled.conf", "channel.d0 0.1\n");
    CHECK_THROWS_AS(d.merge_file(garbled), ConfigError);
    CHECK_THROWS_AS(d.merge_file(std::filesystem::temp_directory_path() / "uowc_cfg_missing.conf"), ConfigError);
    std::filesystem::remove(good);
    std::filesystem::remove(bad);
    std::filesystem::remove(garbled);
}

TEST_CASE("validation")
{
    RunConfig c;
    CHECK_NOTHROW(c.validate());
    c.latent_q = 4;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig{};
    c.scenarios = {"XX"};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig{};
    c.channel.te = 0.2;
    CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("dump and reload reproduce the configuration")
{
    RunConfig c;
    c.set("channel.a1", "0.75");
    c.set("channel.delta_phi", "0.1");
    c.set("train.learning_rate", "0.0003");
    c.set("eval.distances", "0.085,0.15");
    c.set("eval.observer_mode", "corrected");
    c.set("paths.output", "/tmp/somewhere");
    c.set("seed", "123");
    const auto p = write_file("uowc_cfg_dump.conf", c.dump());
    RunConfig d;
    d.merge_file(p);
    CHECK(d.dump() == c.dump());
    CHECK(d.channel.gain.a1 == 0.75);
    CHECK(d.observer_mode == ObserverMode::corrected);
    CHECK(d.seed == 123);
    std::filesystem::remove(p);

    // Every key appears in the dump exactly once.
    const std::string text = "\n" + c.dump();
    for (const auto& k : config_keys()) {
        const std::string needle = std::string("\n") + k.name + " =";
        CHECK_MESSAGE(text.find(needle) != std::string::npos, k.name);
    }
}

TEST_CASE("scenarios and derived paths")
{
    RunConfig c;
    c.output_dir = "/tmp/uowc_out";
    CHECK(c.dataset_file() == std::filesystem::path("/tmp/uowc_out/dataset.csv"));
    CHECK(c.checkpoint_path() == std::filesystem::path("/tmp/uowc_out/checkpoints"));
    const auto sc = c.make_scenarios({"OL", "CL"});
    REQUIRE(sc.size() == 2);
    CHECK(sc[1].input == InputKind::closed_loop);
    CHECK(sc[0].noise.seed == c.noise_seed());
    CHECK(sc[0].duration_steps == 1000);
    CHECK(sc[0].initial_true_state == LedState{0.2, 0.0});
    CHECK(c.latent().spectral_radius() == doctest::Approx(0.99));
}
