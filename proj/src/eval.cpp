#include "uowc/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "uowc/csv.hpp"
#include "uowc/errors.hpp"

namespace uowc {

std::string controller_name(InputKind kind)
{
    switch (kind) {
    case InputKind::zero: return "OL";
    case InputKind::if1: return "IF1";
    case InputKind::if2: return "IF2";
    case InputKind::closed_loop: return "CL";
    }
    return "?";
}

InputKind parse_controller(const std::string& name)
{
    if (name == "OL") return InputKind::zero;
    if (name == "IF1") return InputKind::if1;
    if (name == "IF2") return InputKind::if2;
    if (name == "CL") return InputKind::closed_loop;
    throw ConfigError("unknown controller '" + name + "' (expected OL, IF1, IF2 or CL)");
}

std::string mode_name(ObserverMode mode) { return mode == ObserverMode::plain ? "plain" : "corrected"; }

ObserverMode parse_mode(const std::string& name)
{
    if (name == "plain") return ObserverMode::plain;
    if (name == "corrected") return ObserverMode::corrected;
    throw ConfigError("unknown observer mode '" + name + "' (expected plain or corrected)");
}

void Scenario::validate() const
{
    if (duration_steps < 1) throw ConfigError("scenario '" + name + "': duration_steps must be >= 1");
    if (!(link_distance > 0.0)) throw ConfigError("scenario '" + name + "': link distance must be > 0");
    noise.validate();
}

std::vector<Scenario> default_scenarios()
{
    std::vector<Scenario> out;
    for (InputKind kind : {InputKind::zero, InputKind::if1, InputKind::if2, InputKind::closed_loop}) {
        Scenario s;
        s.name = controller_name(kind);
        s.input = kind;
        out.push_back(s);
    }
    return out;
}

double input_signal(InputKind kind, int k, double te, std::optional<double> x2_hat)
{
    const double t = 5.0 * static_cast<double>(k) * te;
    switch (kind) {
    case InputKind::zero: return 0.0;
    case InputKind::if1: return 0.1 * std::cos(t);
    case InputKind::if2: return 0.1 * std::cos(t) + 0.2 * std::sin(t);
    case InputKind::closed_loop:
        if (!x2_hat) throw ContractError("closed-loop input needs the velocity estimate");
        return -0.001 * *x2_hat;
    }
    return 0.0;
}

LatentObserver::LatentObserver(LatentMaps maps, LatentConfig cfg, ChannelParams channel, ObserverMode mode,
                               double u_bar, Eigen::VectorXd z0)
    : maps_(std::move(maps)), cfg_(std::move(cfg)), channel_(channel), mode_(mode), u_bar_(u_bar), z_(std::move(z0))
{
    if (z_.size() != cfg_.q()) throw ContractError("observer: initial latent has wrong dimension");
}

LedState LatentObserver::estimate() const { return maps_.decode(z_); }

void LatentObserver::update(const Output& y, double u)
{
    if (mode_ == ObserverMode::plain)
        z_ = latent_step(z_, y, cfg_);
    else
        z_ = latent_step_corrected(z_, y, u, u_bar_, maps_, cfg_, channel_);
}

ScenarioResult run_scenario(const Scenario& scenario, const TrainedMaps& maps, const LatentConfig& base,
                            const ChannelParams& channel)
{
    scenario.validate();
    ChannelParams ch = channel;
    ch.link_distance_d0 = scenario.link_distance;
    ch.validate();

    const LatentMaps lm = maps.maps();
    Eigen::VectorXd z0 = scenario.initial_latent ? *scenario.initial_latent : lm.encode(scenario.initial_guess);
    LatentObserver observer(lm, maps.observer_config(base), ch, scenario.mode, scenario.u_bar, std::move(z0));

    Rng rng(scenario.noise.seed);
    ScenarioResult result;
    result.name = scenario.name;
    result.input = scenario.input;
    result.link_distance = scenario.link_distance;
    result.records.reserve(static_cast<std::size_t>(scenario.duration_steps));

    LedState x = scenario.initial_true_state;
    for (int k = 0; k < scenario.duration_steps; ++k) {
        const Output y = measure_pair(x, ch, scenario.noise, rng);
        const LedState xh = observer.estimate();
        const Output yh = measure_pair(xh, ch);
        const double u = input_signal(scenario.input, k, ch.te, xh.x2);

        TraceRecord rec;
        rec.k = k;
        rec.t = static_cast<double>(k) * ch.te;
        rec.x1 = x.x1;
        rec.x2 = x.x2;
        rec.x1_hat = xh.x1;
        rec.x2_hat = xh.x2;
        rec.y1 = y[0];
        rec.y2 = y[1];
        rec.y1_hat = yh[0];
        rec.y2_hat = yh[1];
        rec.u = u;
        if (!(std::isfinite(rec.x1) && std::isfinite(rec.x2) && std::isfinite(rec.x1_hat) &&
              std::isfinite(rec.x2_hat) && std::isfinite(rec.y1_hat) && std::isfinite(rec.y2_hat))) {
            std::ostringstream os;
            os << "scenario '" << scenario.name << "': non-finite value at step " << k;
            throw NumericalError(os.str());
        }
        result.records.push_back(rec);

        observer.update(y, u);
        x = step(x, u, ch, scenario.noise, rng);
    }
    result.summary = summarize(result.records);
    return result;
}

double rmse(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) throw ContractError("rmse: series lengths differ");
    if (a.empty()) throw ContractError("rmse: empty series");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(a.size()));
}

ErrorSummary summarize(std::span<const TraceRecord> records)
{
    const std::size_t n = records.size();
    std::vector<double> x1(n), x2(n), x1h(n), x2h(n), y1(n), y2(n), y1h(n), y2h(n);
    double power = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = records[i];
        x1[i] = r.x1;
        x2[i] = r.x2;
        x1h[i] = r.x1_hat;
        x2h[i] = r.x2_hat;
        y1[i] = r.y1;
        y2[i] = r.y2;
        y1h[i] = r.y1_hat;
        y2h[i] = r.y2_hat;
        power += 0.5 * (r.y1 + r.y2);
    }
    ErrorSummary s;
    s.rmse_x1 = rmse(x1, x1h);
    s.rmse_x2 = rmse(x2, x2h);
    s.rmse_y1 = rmse(y1, y1h);
    s.rmse_y2 = rmse(y2, y2h);
    s.mean_power = power / static_cast<double>(n);
    return s;
}

std::vector<SweepRow> sensitivity_sweep(std::span<const double> distances, std::span<const Scenario> scenarios,
                                        const TrainedMaps& maps, const LatentConfig& base, const ChannelParams& channel)
{
    for (double d : distances)
        if (!(d > 0.0)) throw ConfigError("sweep distances must be > 0");
    std::vector<SweepRow> rows;
    for (double d : distances) {
        for (const Scenario& s : scenarios) {
            Scenario cell = s;
            cell.link_distance = d;
            const ScenarioResult r = run_scenario(cell, maps, base, channel);
            rows.push_back({s.name, d, r.summary});
        }
    }
    return rows;
}

double max_abs_input(const ScenarioResult& result)
{
    double m = 0.0;
    for (const auto& r : result.records) m = std::max(m, std::abs(r.u));
    return m;
}

ContractionDiagnostic contraction_diagnostic(const ScenarioResult& result, const TrainedMaps& maps,
                                             const LatentConfig& base, const ChannelParams& channel,
                                             const Eigen::Ref<const Eigen::MatrixXd>& latent_samples, double u_bar)
{
    ChannelParams ch = channel;
    ch.link_distance_d0 = result.link_distance;
    const LatentMaps lm = maps.maps();

    ContractionDiagnostic d;
    d.scenario = result.name;
    d.u_max = max_abs_input(result);
    double lambda = 0.0;
    if (d.u_max > 0.0) {
        lambda = std::max(estimate_omega_lipschitz(latent_samples, u_bar + d.u_max, u_bar, lm, ch),
                          estimate_omega_lipschitz(latent_samples, u_bar - d.u_max, u_bar, lm, ch));
    }
    d.report = contraction_check(maps.observer_config(base), lambda);
    return d;
}

void write_trace(const ScenarioResult& result, const std::filesystem::path& path)
{
    std::ofstream os(path);
    if (!os) throw IoError("cannot open trace for writing: " + path.string());
    os << kTraceHeader << '\n';
    for (const auto& r : result.records) {
        os << r.k << ',' << format_double(r.t) << ',' << format_double(r.x1) << ',' << format_double(r.x2) << ','
           << format_double(r.x1_hat) << ',' << format_double(r.x2_hat) << ',' << format_double(r.y1) << ','
           << format_double(r.y2) << ',' << format_double(r.y1_hat) << ',' << format_double(r.y2_hat) << ','
           << format_double(r.u) << '\n';
    }
    const auto& s = result.summary;
    os << "# scenario=" << result.name << '\n';
    os << "# distance=" << format_double(result.link_distance) << '\n';
    os << "# rmse_x1=" << format_double(s.rmse_x1) << '\n';
    os << "# rmse_x2=" << format_double(s.rmse_x2) << '\n';
    os << "# rmse_y1=" << format_double(s.rmse_y1) << '\n';
    os << "# rmse_y2=" << format_double(s.rmse_y2) << '\n';
    os << "# mean_power=" << format_double(s.mean_power) << '\n';
    if (!os) throw IoError("failed writing trace: " + path.string());
}

std::vector<TraceRecord> read_trace(const std::filesystem::path& path)
{
    const CsvTable table = read_csv(path);
    if (join_header(table.header) != kTraceHeader) throw MissingArtifactError(path.string() + ": not a trace file");
    std::vector<TraceRecord> out;
    out.reserve(table.rows.size());
    for (const auto& v : table.rows) {
        TraceRecord r;
        r.k = static_cast<int>(v[0]);
        r.t = v[1];
        r.x1 = v[2];
        r.x2 = v[3];
        r.x1_hat = v[4];
        r.x2_hat = v[5];
        r.y1 = v[6];
        r.y2 = v[7];
        r.y1_hat = v[8];
        r.y2_hat = v[9];
        r.u = v[10];
        out.push_back(r);
    }
    return out;
}

void write_summary(std::span<const SweepRow> rows, const std::filesystem::path& path)
{
    std::ofstream os(path);
    if (!os) throw IoError("cannot open summary for writing: " + path.string());
    os << kSummaryHeader << '\n';
    for (const auto& r : rows) {
        os << r.controller << ',' << format_double(r.distance) << ',' << format_double(r.summary.rmse_x1) << ','
           << format_double(r.summary.rmse_x2) << ',' << format_double(r.summary.rmse_y1) << ','
           << format_double(r.summary.rmse_y2) << ',' << format_double(r.summary.mean_power) << '\n';
    }
    if (!os) throw IoError("failed writing summary: " + path.string());
}

}  // namespace uowc
