#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "uowc/channel.hpp"
#include "uowc/eval.hpp"
#include "uowc/kkl.hpp"
#include "uowc/training.hpp"

namespace uowc {

/// Which subcommands read a config key (bit set).
enum CommandMask : unsigned {
    kCmdGenerate = 1u << 0,
    kCmdTrain = 1u << 1,
    kCmdEvaluate = 1u << 2,
    kCmdSweep = 1u << 3,
    kCmdOracle = 1u << 4,
    kCmdAll = 0x1fu,
};

struct ConfigKey {
    const char* name;
    const char* help;
    unsigned commands;
};

/// Every accepted `section.key`, in file order.
[[nodiscard]] const std::vector<ConfigKey>& config_keys();

/// Complete experiment description. Text form: one `section.key = value`
/// per line, `#` starts a comment, lists are comma-separated. Unknown keys
/// are errors.
struct RunConfig {
    ChannelParams channel;
    NoiseConfig noise;

    int latent_q = 6;
    std::vector<double> latent_a_diag;  // empty: derived from channel.te
    double latent_b_fill = 1.0;

    std::size_t data_size = 200000;
    double u_bar = 0.0;

    TrainConfig train;

    std::vector<std::string> scenarios{"OL", "IF1", "IF2", "CL"};
    ObserverMode observer_mode = ObserverMode::plain;
    int duration_steps = 1000;
    LedState x0{0.2, 0.0};
    LedState x0_guess{0.0, 0.0};
    std::vector<double> sweep_distances{0.085, 0.1, 0.2};
    std::vector<std::string> sweep_controllers{"IF1", "IF2", "CL"};
    int lipschitz_samples = 200;

    int oracle_samples = 100;
    SeriesOptions oracle;

    std::filesystem::path output_dir = "out";
    std::filesystem::path dataset_path;     // empty: <output_dir>/dataset.csv
    std::filesystem::path checkpoint_dir;   // empty: <output_dir>/checkpoints

    /// Root seed; data, training, noise and diagnostic streams derive from it.
    std::uint64_t seed = 42;

    /// Assign one key from its text value. Throws ConfigError on unknown keys or bad values.
    void set(const std::string& key, const std::string& value);

    /// Apply a config file on top of the current values.
    void merge_file(const std::filesystem::path& path);

    void validate() const;

    [[nodiscard]] LatentConfig latent() const;
    [[nodiscard]] std::vector<Scenario> make_scenarios(const std::vector<std::string>& names) const;

    [[nodiscard]] std::filesystem::path dataset_file() const;
    [[nodiscard]] std::filesystem::path checkpoint_path() const;

    [[nodiscard]] std::uint64_t data_seed() const { return seed; }
    [[nodiscard]] std::uint64_t train_seed() const { return seed + 1; }
    [[nodiscard]] std::uint64_t noise_seed() const { return seed + 2; }
    [[nodiscard]] std::uint64_t oracle_seed() const { return seed + 3; }
    [[nodiscard]] std::uint64_t lipschitz_seed() const { return seed + 4; }

    /// Text form containing every key, loadable by merge_file.
    [[nodiscard]] std::string dump() const;
};

/// Angle text in radians, or degrees with a `deg` suffix ("6deg").
[[nodiscard]] double parse_angle(const std::string& text);

}  // namespace uowc
