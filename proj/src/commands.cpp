#include "uowc/commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>

#include "uowc/csv.hpp"
#include "uowc/datagen.hpp"
#include "uowc/errors.hpp"

namespace uowc {

namespace {

void ensure_dir(const std::filesystem::path& dir)
{
    if (dir.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void require_file(const std::filesystem::path& p, const char* what)
{
    if (!std::filesystem::exists(p)) throw MissingArtifactError(std::string(what) + " not found: " + p.string());
}

TrainedMaps load_maps(const RunConfig& cfg)
{
    const auto dir = cfg.checkpoint_path();
    require_file(dir / "encoder.ckpt", "encoder checkpoint");
    require_file(dir / "decoder.ckpt", "decoder checkpoint");
    TrainedMaps maps = load_trained_maps(dir);
    if (maps.encoder.output_dim() != cfg.latent().q())
        throw ConfigError("checkpoint latent dimension does not match latent.q");
    return maps;
}

}  // namespace

int run_guarded(const std::function<void()>& body, std::ostream& err)
{
    try {
        body();
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const MissingArtifactError& e) {
        err << "missing artifact: " << e.what() << '\n';
        return kExitMissingArtifact;
    } catch (const IoError& e) {
        err << "i/o error: " << e.what() << '\n';
        return kExitMissingArtifact;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const ContractError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitConfig;
    }
}

std::filesystem::path cmd_generate(const RunConfig& cfg, std::ostream& out)
{
    cfg.channel.validate();
    const Dataset ds = generate_dataset(cfg.data_size, cfg.u_bar, cfg.channel, cfg.data_seed());
    const auto path = cfg.dataset_file();
    ensure_dir(path.parent_path());
    write_dataset(path, ds);
    out << "wrote " << path.string() << ": size=" << ds.size() << " seed=" << ds.seed
        << " u_bar=" << format_double(ds.u_bar) << '\n';
    return path;
}

TrainedMaps cmd_train(const RunConfig& cfg, std::ostream& out)
{
    cfg.validate();
    const auto data_path = cfg.dataset_file();
    require_file(data_path, "dataset");
    const Dataset ds = read_dataset(data_path);
    if (ds.count_successor_violations(cfg.channel) != 0)
        throw ConfigError("dataset successors do not match the configured dynamics (te or u_bar changed?)");

    TrainConfig tcfg = cfg.train;
    tcfg.seed = cfg.train_seed();
    const TrainedMaps maps = train(ds, cfg.latent(), tcfg, cfg.channel, [&out](const EpochLog& e) {
        out << "epoch " << std::setw(3) << e.epoch << ' ' << std::setw(5) << e.phase << "  train " << std::scientific
            << std::setprecision(4) << e.loss_train << "  val " << e.loss_val << std::defaultfloat << std::endl;
    });

    ensure_dir(cfg.output_dir);
    save_trained_maps(cfg.checkpoint_path(), maps, tcfg.seed);
    write_training_log(cfg.output_dir / "training_log.csv", maps.log);
    out << "final loss_dyn_val=" << format_double(maps.loss_dyn_val)
        << " loss_recon_val=" << format_double(maps.loss_recon_val) << '\n';
    out << "checkpoints in " << cfg.checkpoint_path().string() << '\n';
    return maps;
}

EvaluateOutput cmd_evaluate(const RunConfig& cfg, std::ostream& out)
{
    cfg.validate();
    const TrainedMaps maps = load_maps(cfg);
    const LatentConfig base = cfg.latent();
    ensure_dir(cfg.output_dir);

    EvaluateOutput res;
    for (const Scenario& s : cfg.make_scenarios(cfg.scenarios)) {
        ScenarioResult r = run_scenario(s, maps, base, cfg.channel);
        write_trace(r, cfg.output_dir / ("trace_" + s.name + ".csv"));
        res.summary.push_back({s.name, s.link_distance, r.summary});
        out << std::left << std::setw(4) << s.name << std::right << std::scientific << std::setprecision(3)
            << " rmse_x1=" << r.summary.rmse_x1 << " rmse_x2=" << r.summary.rmse_x2
            << " rmse_y1=" << r.summary.rmse_y1 << " rmse_y2=" << r.summary.rmse_y2 << std::defaultfloat << '\n';
        res.results.push_back(std::move(r));
    }
    write_summary(res.summary, cfg.output_dir / "summary.csv");

    // Both observer variants for the non-autonomous scenarios.
    {
        std::ofstream os(cfg.output_dir / "observer_modes.csv");
        if (!os) throw IoError("cannot write observer_modes.csv");
        os << "controller,mode,rmse_x1,rmse_x2,rmse_y1,rmse_y2\n";
        for (Scenario s : cfg.make_scenarios(cfg.scenarios)) {
            if (s.input == InputKind::zero) continue;
            for (ObserverMode m : {ObserverMode::plain, ObserverMode::corrected}) {
                s.mode = m;
                const ScenarioResult r = run_scenario(s, maps, base, cfg.channel);
                os << s.name << ',' << mode_name(m) << ',' << format_double(r.summary.rmse_x1) << ','
                   << format_double(r.summary.rmse_x2) << ',' << format_double(r.summary.rmse_y1) << ','
                   << format_double(r.summary.rmse_y2) << '\n';
            }
        }
    }

    // Contraction diagnostics over encoded states drawn from the training box.
    const Dataset probe = generate_dataset(static_cast<std::size_t>(cfg.lipschitz_samples), cfg.u_bar, cfg.channel,
                                           cfg.lipschitz_seed());
    const Eigen::MatrixXd latents = forward_batch(maps.encoder, probe.state_matrix());
    const ContractionReport nominal = contraction_check(maps.observer_config(base), 0.0);
    out << "contraction rho(A)=" << format_double(nominal.rho) << " margin(lambda=0)=" << format_double(nominal.margin)
        << '\n';
    std::ofstream cs(cfg.output_dir / "contraction.csv");
    if (!cs) throw IoError("cannot write contraction.csv");
    cs << "controller,u_max,lambda_u,rho,margin,contracts\n";
    for (const auto& r : res.results) {
        ContractionDiagnostic d = contraction_diagnostic(r, maps, base, cfg.channel, latents, cfg.u_bar);
        cs << d.scenario << ',' << format_double(d.u_max) << ',' << format_double(d.report.lambda_u) << ','
           << format_double(d.report.rho) << ',' << format_double(d.report.margin) << ','
           << (d.report.contracts ? "pass" : "fail") << '\n';
        out << "contraction " << std::left << std::setw(4) << d.scenario << std::right
            << " u_max=" << format_double(d.u_max) << " lambda_u=" << format_double(d.report.lambda_u)
            << " margin=" << format_double(d.report.margin) << ' ' << (d.report.contracts ? "PASS" : "FAIL") << '\n';
        res.contraction.push_back(std::move(d));
    }
    return res;
}

std::vector<SweepRow> cmd_sweep(const RunConfig& cfg, std::ostream& out)
{
    cfg.validate();
    const TrainedMaps maps = load_maps(cfg);
    const auto scenarios = cfg.make_scenarios(cfg.sweep_controllers);

    // Controller-major rows, like the published table.
    std::vector<SweepRow> rows;
    for (const Scenario& s : scenarios) {
        const auto part = sensitivity_sweep(cfg.sweep_distances, std::span<const Scenario>(&s, 1), maps, cfg.latent(),
                                            cfg.channel);
        rows.insert(rows.end(), part.begin(), part.end());
    }
    ensure_dir(cfg.output_dir);
    write_summary(rows, cfg.output_dir / "sweep.csv");
    for (const auto& r : rows)
        out << std::left << std::setw(4) << r.controller << std::right << " d=" << format_double(r.distance)
            << std::scientific << std::setprecision(3) << " rmse_x1=" << r.summary.rmse_x1
            << " rmse_x2=" << r.summary.rmse_x2 << " rmse_y1=" << r.summary.rmse_y1 << " rmse_y2=" << r.summary.rmse_y2
            << " power=" << r.summary.mean_power << std::defaultfloat << '\n';
    return rows;
}

OracleReport cmd_oracle_check(const RunConfig& cfg, std::ostream& out)
{
    cfg.channel.validate();
    const LatentConfig base = cfg.latent();
    const Dataset probe = generate_dataset(static_cast<std::size_t>(cfg.oracle_samples), cfg.u_bar, cfg.channel,
                                           cfg.oracle_seed());

    OracleReport rep;
    rep.samples = cfg.oracle_samples;
    rep.rho = base.spectral_radius();
    rep.min_terms = std::numeric_limits<int>::max();
    Eigen::MatrixXd oracle_values(base.q(), rep.samples);
    for (int i = 0; i < rep.samples; ++i) {
        const LedState& x = probe.states[static_cast<std::size_t>(i)];
        const SeriesResult tx = series_oracle_T(x, base, cfg.channel, cfg.u_bar, cfg.oracle);
        const SeriesResult tfx = series_oracle_T(step(x, cfg.u_bar, cfg.channel), base, cfg.channel, cfg.u_bar,
                                                 cfg.oracle);
        const double residual = (tfx.value - base.a * tx.value - base.b * measure_pair(x, cfg.channel)).norm();
        rep.max_residual = std::max(rep.max_residual, residual);
        rep.max_tail_bound = std::max({rep.max_tail_bound, tx.tail_bound, tfx.tail_bound});
        rep.min_terms = std::min({rep.min_terms, tx.terms, tfx.terms});
        rep.max_terms = std::max({rep.max_terms, tx.terms, tfx.terms});
        if (residual > tx.tail_bound + tfx.tail_bound) rep.per_sample_ok = false;
        oracle_values.col(i) = tx.value;
    }
    rep.ok = rep.per_sample_ok && rep.max_residual <= 2.0 * rep.max_tail_bound;

    const auto ckpt = cfg.checkpoint_path();
    if (std::filesystem::exists(ckpt / "encoder.ckpt") && std::filesystem::exists(ckpt / "decoder.ckpt")) {
        const TrainedMaps maps = load_trained_maps(ckpt);
        if (maps.encoder.output_dim() == base.q()) {
            const Eigen::MatrixXd enc = forward_batch(maps.encoder, probe.state_matrix());
            rep.fitted_scale.resize(base.q());
            Eigen::MatrixXd fitted(base.q(), rep.samples);
            for (int d = 0; d < base.q(); ++d) {
                const double den = oracle_values.row(d).squaredNorm();
                rep.fitted_scale[d] = den > 0.0 ? enc.row(d).dot(oracle_values.row(d)) / den : 0.0;
                fitted.row(d) = rep.fitted_scale[d] * oracle_values.row(d);
            }
            rep.stored_scale = maps.scale;
            rep.encoder_relative_error = (enc - fitted).norm() / enc.norm();
            rep.encoder_compared = true;
        }
    }

    std::ostringstream os;
    os << "samples " << rep.samples << '\n';
    os << "rho(A) " << format_double(rep.rho) << '\n';
    os << "terms_used " << rep.min_terms << ".." << rep.max_terms << '\n';
    os << "max_residual " << format_double(rep.max_residual) << '\n';
    os << "tail_bound " << format_double(rep.max_tail_bound) << '\n';
    os << "residual_within_2x_tail " << (rep.ok ? "PASS" : "FAIL") << '\n';
    if (rep.encoder_compared) {
        os << "encoder_fitted_scale";
        for (double v : rep.fitted_scale) os << ' ' << format_double(v);
        os << "\nencoder_stored_scale";
        for (double v : rep.stored_scale) os << ' ' << format_double(v);
        os << "\nencoder_relative_error " << format_double(rep.encoder_relative_error) << '\n';
    }
    out << os.str();
    ensure_dir(cfg.output_dir);
    std::ofstream file(cfg.output_dir / "oracle_report.txt");
    if (!file) throw IoError("cannot write oracle_report.txt");
    file << os.str();

    if (!rep.ok) throw NumericalError("oracle residual exceeds twice the tail bound");
    return rep;
}

}  // namespace uowc
