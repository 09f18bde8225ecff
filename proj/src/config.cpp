#include "uowc/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "uowc/csv.hpp"
#include "uowc/errors.hpp"

namespace uowc {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || *end != '\0' || !std::isfinite(v))
        throw ConfigError("config key '" + key + "': expected a number, got '" + text + "'");
    return v;
}

long long to_integer(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    char* end = nullptr;
    const long long v = std::strtoll(t.c_str(), &end, 10);
    if (t.empty() || *end != '\0') throw ConfigError("config key '" + key + "': expected an integer, got '" + text + "'");
    return v;
}

int to_int(const std::string& key, const std::string& text)
{
    return static_cast<int>(to_integer(key, text));
}

std::uint64_t to_u64(const std::string& key, const std::string& text)
{
    const std::string t = trim(text);
    char* end = nullptr;
    const unsigned long long v = std::strtoull(t.c_str(), &end, 10);
    if (t.empty() || t[0] == '-' || *end != '\0')
        throw ConfigError("config key '" + key + "': expected an unsigned integer, got '" + text + "'");
    return v;
}

std::vector<std::string> to_words(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<double> to_doubles(const std::string& key, const std::string& text)
{
    std::vector<double> out;
    for (const auto& w : to_words(text)) out.push_back(to_double(key, w));
    return out;
}

std::string join_doubles(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_double(v[i]);
    return s;
}

std::string join_words(const std::vector<std::string>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
}

struct KeyEntry {
    ConfigKey key;
    std::function<void(RunConfig&, const std::string& key, const std::string& value)> set;
    std::function<std::string(const RunConfig&)> get;
};

#define UOWC_DOUBLE(NAME, FIELD, HELP, CMDS)                                                                 \
    KeyEntry{{NAME, HELP, CMDS},                                                                             \
             [](RunConfig& c, const std::string& k, const std::string& v) { c.FIELD = to_double(k, v); },    \
             [](const RunConfig& c) { return format_double(c.FIELD); }}

#define UOWC_INT(NAME, FIELD, HELP, CMDS)                                                                    \
    KeyEntry{{NAME, HELP, CMDS},                                                                             \
             [](RunConfig& c, const std::string& k, const std::string& v) { c.FIELD = to_int(k, v); },       \
             [](const RunConfig& c) { return std::to_string(c.FIELD); }}

constexpr unsigned kSim = kCmdEvaluate | kCmdSweep;
constexpr unsigned kModel = kCmdAll;

const std::vector<KeyEntry>& entries()
{
    static const std::vector<KeyEntry> table = {
        UOWC_DOUBLE("channel.a1", channel.gain.a1, "gain: first lobe amplitude", kModel),
        UOWC_DOUBLE("channel.b1", channel.gain.b1, "gain: first lobe offset (rad), centre at +b1", kModel),
        UOWC_DOUBLE("channel.c1", channel.gain.c1, "gain: first lobe width (rad)", kModel),
        UOWC_DOUBLE("channel.a2", channel.gain.a2, "gain: second lobe amplitude", kModel),
        UOWC_DOUBLE("channel.b2", channel.gain.b2, "gain: second lobe offset (rad), centre at -b2", kModel),
        UOWC_DOUBLE("channel.c2", channel.gain.c2, "gain: second lobe width (rad)", kModel),
        UOWC_DOUBLE("channel.cp", channel.raw_cp, "transmitter constant C_p (W m^2)", kModel),
        UOWC_DOUBLE("channel.intensity", channel.transmitter_intensity, "transmitter angular intensity scale", kModel),
        UOWC_DOUBLE("channel.attenuation_c", channel.attenuation_c, "beam attenuation c (1/m)", kModel),
        UOWC_DOUBLE("channel.d0", channel.link_distance_d0, "link distance d0 (m)", kModel),
        KeyEntry{{"channel.delta_phi", "second receiver shift (rad, or e.g. 6deg)", kModel},
                 [](RunConfig& c, const std::string&, const std::string& v) { c.channel.delta_phi = parse_angle(v); },
                 [](const RunConfig& c) { return format_double(c.channel.delta_phi); }},
        UOWC_DOUBLE("channel.te", channel.te, "sampling time T_e (s)", kModel),
        UOWC_DOUBLE("channel.process_std_1", noise.process_std_1, "process noise std on x1 (rad)", kSim),
        UOWC_DOUBLE("channel.process_std_2", noise.process_std_2, "process noise std on x2 (rad/s)", kSim),
        UOWC_DOUBLE("channel.measurement_std", noise.measurement_std, "measurement noise std (W)", kSim),

        UOWC_INT("latent.q", latent_q, "latent dimension", kCmdTrain | kSim | kCmdOracle),
        KeyEntry{{"latent.a_diag", "diagonal of A (list); empty derives it from channel.te",
                  kCmdTrain | kSim | kCmdOracle},
                 [](RunConfig& c, const std::string& k, const std::string& v) { c.latent_a_diag = to_doubles(k, v); },
                 [](const RunConfig& c) { return join_doubles(c.latent_a_diag); }},
        UOWC_DOUBLE("latent.b_fill", latent_b_fill, "constant filling B (q x 2)", kCmdTrain | kSim | kCmdOracle),

        KeyEntry{{"data.size", "number of training pairs", kCmdGenerate},
                 [](RunConfig& c, const std::string& k, const std::string& v) {
                     const long long n = to_integer(k, v);
                     if (n < 1) throw ConfigError("data.size must be >= 1");
                     c.data_size = static_cast<std::size_t>(n);
                 },
                 [](const RunConfig& c) { return std::to_string(c.data_size); }},
        UOWC_DOUBLE("data.u_bar", u_bar, "constant training input", kCmdGenerate | kSim | kCmdOracle),

        UOWC_INT("train.epochs_dyn", train.epochs_dyn, "encoder epochs", kCmdTrain),
        UOWC_INT("train.epochs_recon", train.epochs_recon, "decoder epochs", kCmdTrain),
        UOWC_INT("train.batch_size", train.batch_size, "minibatch size", kCmdTrain),
        UOWC_INT("train.hidden_dim", train.hidden_dim, "hidden units per network", kCmdTrain),
        UOWC_DOUBLE("train.learning_rate", train.adam.learning_rate, "Adam learning rate", kCmdTrain),
        UOWC_DOUBLE("train.beta1", train.adam.beta1, "Adam beta1", kCmdTrain),
        UOWC_DOUBLE("train.beta2", train.adam.beta2, "Adam beta2", kCmdTrain),
        UOWC_DOUBLE("train.epsilon", train.adam.epsilon, "Adam epsilon", kCmdTrain),
        UOWC_DOUBLE("train.lr_decay", train.lr_decay, "learning-rate multiplier per epoch", kCmdTrain),
        UOWC_INT("train.normalization_interval", train.normalization_interval, "epochs between latent rescalings",
                 kCmdTrain),
        UOWC_DOUBLE("train.validation_fraction", train.validation_fraction, "held-out fraction", kCmdTrain),

        KeyEntry{{"eval.scenarios", "scenarios to run (OL, IF1, IF2, CL)", kCmdEvaluate},
                 [](RunConfig& c, const std::string&, const std::string& v) { c.scenarios = to_words(v); },
                 [](const RunConfig& c) { return join_words(c.scenarios); }},
        KeyEntry{{"eval.observer_mode", "plain or corrected", kSim},
                 [](RunConfig& c, const std::string&, const std::string& v) { c.observer_mode = parse_mode(trim(v)); },
                 [](const RunConfig& c) { return mode_name(c.observer_mode); }},
        UOWC_INT("eval.duration_steps", duration_steps, "steps per scenario", kSim),
        UOWC_DOUBLE("eval.x0_1", x0.x1, "initial angular position (rad)", kSim),
        UOWC_DOUBLE("eval.x0_2", x0.x2, "initial angular velocity (rad/s)", kSim),
        UOWC_DOUBLE("eval.guess_1", x0_guess.x1, "observer initial guess, position (rad)", kSim),
        UOWC_DOUBLE("eval.guess_2", x0_guess.x2, "observer initial guess, velocity (rad/s)", kSim),
        KeyEntry{{"eval.distances", "sweep link distances (m)", kCmdSweep},
                 [](RunConfig& c, const std::string& k, const std::string& v) { c.sweep_distances = to_doubles(k, v); },
                 [](const RunConfig& c) { return join_doubles(c.sweep_distances); }},
        KeyEntry{{"eval.sweep_controllers", "sweep controllers (OL, IF1, IF2, CL)", kCmdSweep},
                 [](RunConfig& c, const std::string&, const std::string& v) { c.sweep_controllers = to_words(v); },
                 [](const RunConfig& c) { return join_words(c.sweep_controllers); }},
        UOWC_INT("eval.lipschitz_samples", lipschitz_samples, "latent samples for the contraction diagnostic",
                 kCmdEvaluate),

        UOWC_INT("oracle.samples", oracle_samples, "random states checked by oracle-check", kCmdOracle),
        UOWC_INT("oracle.min_terms", oracle.min_terms, "minimum series terms", kCmdOracle),
        UOWC_DOUBLE("oracle.tolerance", oracle.summand_tolerance, "stop once a summand norm is below this",
                    kCmdOracle),
        UOWC_INT("oracle.max_terms", oracle.max_terms, "give up after this many terms", kCmdOracle),

        KeyEntry{{"paths.output", "output directory", kCmdAll},
                 [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = trim(v); },
                 [](const RunConfig& c) { return c.output_dir.string(); }},
        KeyEntry{{"paths.dataset", "dataset CSV (default <output>/dataset.csv)", kCmdGenerate | kCmdTrain | kCmdEvaluate},
                 [](RunConfig& c, const std::string&, const std::string& v) { c.dataset_path = trim(v); },
                 [](const RunConfig& c) { return c.dataset_path.string(); }},
        KeyEntry{{"paths.checkpoints", "checkpoint directory (default <output>/checkpoints)",
                  kCmdTrain | kSim | kCmdOracle},
                 [](RunConfig& c, const std::string&, const std::string& v) { c.checkpoint_dir = trim(v); },
                 [](const RunConfig& c) { return c.checkpoint_dir.string(); }},

        KeyEntry{{"seed", "root seed for data, training, noise and diagnostics", kCmdAll},
                 [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = to_u64(k, v); },
                 [](const RunConfig& c) { return std::to_string(c.seed); }},
    };
    return table;
}

#undef UOWC_DOUBLE
#undef UOWC_INT

}  // namespace

const std::vector<ConfigKey>& config_keys()
{
    static const std::vector<ConfigKey> keys = [] {
        std::vector<ConfigKey> out;
        for (const auto& e : entries()) out.push_back(e.key);
        return out;
    }();
    return keys;
}

double parse_angle(const std::string& text)
{
    std::string t = trim(text);
    if (t.size() > 3 && t.compare(t.size() - 3, 3, "deg") == 0)
        return to_double("angle", t.substr(0, t.size() - 3)) * std::numbers::pi / 180.0;
    return to_double("angle", t);
}

void RunConfig::set(const std::string& key, const std::string& value)
{
    const std::string k = trim(key);
    for (const auto& e : entries()) {
        if (k == e.key.name) {
            e.set(*this, k, value);
            return;
        }
    }
    throw ConfigError("unknown config key '" + k + "'");
}

void RunConfig::merge_file(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot read config file " + path.string());
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
        try {
            set(line.substr(0, eq), line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
}

void RunConfig::validate() const
{
    channel.validate();
    noise.validate();
    train.validate();
    (void)latent();
    if (duration_steps < 1) throw ConfigError("eval.duration_steps must be >= 1");
    if (lipschitz_samples < 2) throw ConfigError("eval.lipschitz_samples must be >= 2");
    if (oracle_samples < 1) throw ConfigError("oracle.samples must be >= 1");
    if (oracle.min_terms < 1 || oracle.max_terms < oracle.min_terms)
        throw ConfigError("oracle.min_terms must be >= 1 and <= oracle.max_terms");
    if (!(oracle.summand_tolerance > 0.0)) throw ConfigError("oracle.tolerance must be > 0");
    for (const auto& s : scenarios) (void)parse_controller(s);
    for (const auto& s : sweep_controllers) (void)parse_controller(s);
    for (double d : sweep_distances)
        if (!(d > 0.0)) throw ConfigError("eval.distances must be > 0");
}

LatentConfig RunConfig::latent() const
{
    LatentConfig cfg;
    if (latent_a_diag.empty()) {
        cfg = default_latent_config(channel.te);
        if (latent_b_fill != 1.0) cfg.b.setConstant(latent_b_fill);
    } else {
        cfg = diagonal_latent_config(latent_a_diag, 2, latent_b_fill);
    }
    if (cfg.q() != latent_q)
        throw ConfigError("latent.q = " + std::to_string(latent_q) + " but A has dimension " + std::to_string(cfg.q()));
    if (cfg.controllability_rank() != cfg.q()) throw ConfigError("latent (A, B) is not controllable");
    return cfg;
}

std::vector<Scenario> RunConfig::make_scenarios(const std::vector<std::string>& names) const
{
    std::vector<Scenario> out;
    for (const auto& n : names) {
        Scenario s;
        s.name = n;
        s.input = parse_controller(n);
        s.mode = observer_mode;
        s.duration_steps = duration_steps;
        s.initial_true_state = x0;
        s.initial_guess = x0_guess;
        s.noise = noise;
        s.noise.seed = noise_seed();
        s.link_distance = channel.link_distance_d0;
        s.u_bar = u_bar;
        out.push_back(s);
    }
    return out;
}

std::filesystem::path RunConfig::dataset_file() const
{
    return dataset_path.empty() ? output_dir / "dataset.csv" : dataset_path;
}

std::filesystem::path RunConfig::checkpoint_path() const
{
    return checkpoint_dir.empty() ? output_dir / "checkpoints" : checkpoint_dir;
}

std::string RunConfig::dump() const
{
    std::ostringstream os;
    for (const auto& e : entries()) os << e.key.name << " = " << e.get(*this) << '\n';
    return os.str();
}

}  // namespace uowc
