#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "uowc/channel.hpp"
#include "uowc/kkl.hpp"
#include "uowc/training.hpp"

namespace uowc {

enum class InputKind { zero, if1, if2, closed_loop };
enum class ObserverMode { plain, corrected };

/// Short controller names used in files: OL, IF1, IF2, CL.
[[nodiscard]] std::string controller_name(InputKind kind);
[[nodiscard]] InputKind parse_controller(const std::string& name);
[[nodiscard]] std::string mode_name(ObserverMode mode);
[[nodiscard]] ObserverMode parse_mode(const std::string& name);

struct Scenario {
    std::string name;
    InputKind input = InputKind::zero;
    ObserverMode mode = ObserverMode::plain;
    int duration_steps = 1000;
    LedState initial_true_state{0.2, 0.0};
    /// Latent start; when empty the observer starts at encoder(initial_guess).
    std::optional<Eigen::VectorXd> initial_latent;
    LedState initial_guess{0.0, 0.0};
    NoiseConfig noise;
    double link_distance = 0.085;
    double u_bar = 0.0;

    void validate() const;
};

/// OL, IF1, IF2, CL with the default initial conditions and noise.
[[nodiscard]] std::vector<Scenario> default_scenarios();

struct TraceRecord {
    int k = 0;
    double t = 0.0;
    double x1 = 0.0, x2 = 0.0;
    double x1_hat = 0.0, x2_hat = 0.0;
    double y1 = 0.0, y2 = 0.0;
    double y1_hat = 0.0, y2_hat = 0.0;
    double u = 0.0;
};

struct ErrorSummary {
    double rmse_x1 = 0.0;
    double rmse_x2 = 0.0;
    double rmse_y1 = 0.0;
    double rmse_y2 = 0.0;
    double mean_power = 0.0;  // mean over the run of (y1 + y2) / 2, measured
};

struct ScenarioResult {
    std::string name;
    InputKind input = InputKind::zero;
    double link_distance = 0.0;
    std::vector<TraceRecord> records;
    ErrorSummary summary;
};

/// zero -> 0, if1 -> 0.1 cos(5 k te), if2 -> 0.1 cos(5 k te) + 0.2 sin(5 k te),
/// closed_loop -> -0.001 x2_hat (x2_hat required).
[[nodiscard]] double input_signal(InputKind kind, int k, double te, std::optional<double> x2_hat = std::nullopt);

/// Online latent observer: z advances by the (optionally corrected) latent
/// dynamics and the estimate is decoder(z).
class LatentObserver {
public:
    LatentObserver(LatentMaps maps, LatentConfig cfg, ChannelParams channel, ObserverMode mode, double u_bar,
                   Eigen::VectorXd z0);

    [[nodiscard]] LedState estimate() const;
    [[nodiscard]] const Eigen::VectorXd& latent() const { return z_; }

    /// Absorb output y_k and input u_k; afterwards estimate() is x_hat_{k+1}.
    void update(const Output& y, double u);

private:
    LatentMaps maps_;
    LatentConfig cfg_;
    ChannelParams channel_;
    ObserverMode mode_;
    double u_bar_;
    Eigen::VectorXd z_;
};

/// Simulate the true system with noise and the observer side by side.
/// The estimate at step k depends on y_0..y_{k-1} and u_0..u_{k-1} only.
/// `base` is the un-normalized latent config; the maps' scale is applied here.
[[nodiscard]] ScenarioResult run_scenario(const Scenario& scenario, const TrainedMaps& maps,
                                          const LatentConfig& base, const ChannelParams& channel);

/// sqrt(mean((a - b)^2)); throws ContractError on length mismatch or empty input.
[[nodiscard]] double rmse(std::span<const double> a, std::span<const double> b);

/// RMSEs and mean power recomputed from trace records.
[[nodiscard]] ErrorSummary summarize(std::span<const TraceRecord> records);

struct SweepRow {
    std::string controller;
    double distance = 0.0;
    ErrorSummary summary;
};

/// One row per (distance, scenario), distance-major.
[[nodiscard]] std::vector<SweepRow> sensitivity_sweep(std::span<const double> distances,
                                                      std::span<const Scenario> scenarios, const TrainedMaps& maps,
                                                      const LatentConfig& base, const ChannelParams& channel);

/// Largest |u| applied during a run.
[[nodiscard]] double max_abs_input(const ScenarioResult& result);

struct ContractionDiagnostic {
    std::string scenario;
    double u_max = 0.0;
    ContractionReport report;
};

/// Lipschitz estimate of the input correction at +-u_max over `latent_samples`
/// (one latent per column), checked against the observer's A.
[[nodiscard]] ContractionDiagnostic contraction_diagnostic(const ScenarioResult& result, const TrainedMaps& maps,
                                                           const LatentConfig& base, const ChannelParams& channel,
                                                           const Eigen::Ref<const Eigen::MatrixXd>& latent_samples,
                                                           double u_bar);

inline constexpr const char* kTraceHeader = "k,t,x1,x2,x1_hat,x2_hat,y1,y2,y1_hat,y2_hat,u";
inline constexpr const char* kSummaryHeader = "controller,distance,rmse_x1,rmse_x2,rmse_y1,rmse_y2,mean_power";

void write_trace(const ScenarioResult& result, const std::filesystem::path& path);
[[nodiscard]] std::vector<TraceRecord> read_trace(const std::filesystem::path& path);

void write_summary(std::span<const SweepRow> rows, const std::filesystem::path& path);

}  // namespace uowc
