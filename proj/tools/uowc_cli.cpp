// Command-line front end: generate, train, evaluate, sweep, oracle-check.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uowc/commands.hpp"
#include "uowc/config.hpp"
#include "uowc/errors.hpp"

namespace {

std::string keys_footer(unsigned command)
{
    std::string s = "\nConfig keys read (set in --config file or with --set key=value):\n";
    for (const auto& k : uowc::config_keys()) {
        if (!(k.commands & command)) continue;
        const std::string name = k.name;
        s += "  " + name + std::string(name.size() < 30 ? 30 - name.size() : 1, ' ') + k.help + '\n';
    }
    return s;
}

struct CommonOptions {
    std::string config_path;
    std::vector<std::string> sets;
    std::string seed;
    std::string out_dir;
    std::string d0;
    std::string delta_phi;
};

void add_common(CLI::App* sub, CommonOptions& opts)
{
    sub->add_option("--config", opts.config_path, "config file of 'section.key = value' lines");
    sub->add_option("--set", opts.sets, "override one config key, e.g. --set train.epochs_dyn=10")
        ->type_name("KEY=VALUE");
    sub->add_option("--seed", opts.seed, "root seed (config key: seed)");
    sub->add_option("--out", opts.out_dir, "output directory (config key: paths.output)");
    sub->add_option("--d0", opts.d0, "link distance in m (config key: channel.d0)");
    sub->add_option("--delta-phi", opts.delta_phi, "receiver shift, radians or with 'deg' suffix (channel.delta_phi)");
}

uowc::RunConfig build_config(const CommonOptions& opts)
{
    uowc::RunConfig cfg;
    if (!opts.config_path.empty()) cfg.merge_file(opts.config_path);
    for (const auto& kv : opts.sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw uowc::ConfigError("--set expects KEY=VALUE, got '" + kv + "'");
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (!opts.seed.empty()) cfg.set("seed", opts.seed);
    if (!opts.out_dir.empty()) cfg.set("paths.output", opts.out_dir);
    if (!opts.d0.empty()) cfg.set("channel.d0", opts.d0);
    if (!opts.delta_phi.empty()) cfg.set("channel.delta_phi", opts.delta_phi);
    return cfg;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"LED underwater optical link simulator with a learned KKL observer"};
    app.require_subcommand(1);

    CommonOptions opts;
    std::string size;
    bool dump_config = false;

    auto* gen = app.add_subcommand("generate", "sample the training dataset");
    add_common(gen, opts);
    gen->add_option("--size", size, "number of pairs (config key: data.size)");
    gen->footer(keys_footer(uowc::kCmdGenerate));

    auto* tr = app.add_subcommand("train", "train encoder and decoder from the dataset");
    add_common(tr, opts);
    tr->footer(keys_footer(uowc::kCmdTrain));

    auto* ev = app.add_subcommand("evaluate", "run the observer scenarios and write traces and RMSE summary");
    add_common(ev, opts);
    ev->footer(keys_footer(uowc::kCmdEvaluate));

    auto* sw = app.add_subcommand("sweep", "link-distance sensitivity table");
    add_common(sw, opts);
    sw->footer(keys_footer(uowc::kCmdSweep));

    auto* oc = app.add_subcommand("oracle-check", "check the truncated-series transformation against its functional equation");
    add_common(oc, opts);
    oc->footer(keys_footer(uowc::kCmdOracle));

    auto* dc = app.add_subcommand("config", "print the effective configuration");
    add_common(dc, opts);
    dc->add_flag("--dump", dump_config, "print every key with its value");

    CLI11_PARSE(app, argc, argv);

    uowc::RunConfig cfg;
    int code = uowc::run_guarded(
        [&] {
            cfg = build_config(opts);
            if (!size.empty()) cfg.set("data.size", size);
        },
        std::cerr);
    if (code != uowc::kExitOk) return code;

    return uowc::run_guarded(
        [&] {
            if (gen->parsed()) (void)uowc::cmd_generate(cfg, std::cout);
            else if (tr->parsed()) (void)uowc::cmd_train(cfg, std::cout);
            else if (ev->parsed()) (void)uowc::cmd_evaluate(cfg, std::cout);
            else if (sw->parsed()) (void)uowc::cmd_sweep(cfg, std::cout);
            else if (oc->parsed()) (void)uowc::cmd_oracle_check(cfg, std::cout);
            else if (dc->parsed()) std::cout << cfg.dump();
        },
        std::cerr);
}
