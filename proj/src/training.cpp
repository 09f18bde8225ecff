#include "uowc/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "uowc/csv.hpp"
#include "uowc/errors.hpp"

namespace uowc {

namespace {

Eigen::VectorXd row_std(const Eigen::Ref<const Eigen::MatrixXd>& m)
{
    const double n = static_cast<double>(m.cols());
    const Eigen::VectorXd mean = m.rowwise().mean();
    return ((m.colwise() - mean).array().square().rowwise().sum() / n).sqrt();
}

Eigen::MatrixXd gather(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& idx, std::size_t begin,
                       std::size_t end)
{
    Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(end - begin));
    for (std::size_t i = begin; i < end; ++i) out.col(static_cast<Eigen::Index>(i - begin)) = m.col(idx[i]);
    return out;
}

void add_into(NetworkParams& acc, const NetworkParams& g)
{
    acc.w1 += g.w1;
    acc.bias1 += g.bias1;
    acc.w2 += g.w2;
    acc.bias2 += g.bias2;
}

void check_finite(double loss, const char* phase, int epoch)
{
    if (!std::isfinite(loss)) {
        std::ostringstream os;
        os << "training diverged: " << phase << " loss is " << loss << " at epoch " << epoch;
        throw NumericalError(os.str());
    }
}

// Latent scale that makes diag(s) B l(x) have roughly the one-step magnitude
// (1 - a_i) of a unit-variance latent, so the first epoch starts near the
// normalized solution.
Eigen::VectorXd initial_scale(const LatentConfig& cfg, const Eigen::MatrixXd& outputs)
{
    const Eigen::MatrixXd drive = cfg.b * outputs;
    const Eigen::VectorXd sd = row_std(drive);
    Eigen::VectorXd s(cfg.q());
    const bool diagonal = cfg.a.isDiagonal();
    const double rho = cfg.spectral_radius();
    for (int i = 0; i < cfg.q(); ++i) {
        const double contraction = 1.0 - (diagonal ? std::abs(cfg.a(i, i)) : rho);
        s[i] = sd[i] > kLatentStdFloor ? contraction / sd[i] : 1.0;
    }
    return s;
}

}  // namespace

void TrainConfig::validate() const
{
    if (epochs_dyn <= 0 || epochs_recon <= 0) throw ConfigError("train.epochs_dyn and train.epochs_recon must be > 0");
    if (batch_size <= 0) throw ConfigError("train.batch_size must be > 0");
    if (hidden_dim <= 0) throw ConfigError("train.hidden_dim must be > 0");
    if (normalization_interval <= 0) throw ConfigError("train.normalization_interval must be > 0");
    if (!(adam.learning_rate > 0.0)) throw ConfigError("train.learning_rate must be > 0");
    if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0))
        throw ConfigError("train.beta1 and train.beta2 must lie in [0, 1)");
    if (!(adam.epsilon > 0.0)) throw ConfigError("train.epsilon must be > 0");
    if (!(lr_decay > 0.0 && lr_decay <= 1.0)) throw ConfigError("train.lr_decay must lie in (0, 1]");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
        throw ConfigError("train.validation_fraction must lie in (0, 1)");
}

LatentMaps TrainedMaps::maps() const
{
    LatentMaps m;
    m.encode = [enc = encoder](const LedState& x) { return forward(enc, x.vec()); };
    m.decode = [dec = decoder](const Eigen::VectorXd& z) { return LedState::from(forward(dec, z)); };
    return m;
}

LatentConfig TrainedMaps::observer_config(const LatentConfig& base) const { return base.rescaled(scale); }

double dyn_residual_loss(const Eigen::Ref<const Eigen::MatrixXd>& z, const Eigen::Ref<const Eigen::MatrixXd>& z_next,
                         const Eigen::Ref<const Eigen::MatrixXd>& outputs, const LatentConfig& cfg)
{
    if (z.cols() == 0) throw ContractError("dyn loss needs a non-empty batch");
    if (z.rows() != cfg.q() || z_next.rows() != cfg.q() || outputs.rows() != cfg.p() || z_next.cols() != z.cols() ||
        outputs.cols() != z.cols())
        throw ContractError("dyn loss: shape mismatch");
    const Eigen::MatrixXd r = z_next - cfg.a * z - cfg.b * outputs;
    return r.squaredNorm() / static_cast<double>(z.cols());
}

Eigen::MatrixXd output_matrix(const Eigen::Ref<const Eigen::MatrixXd>& states, const ChannelParams& channel)
{
    Eigen::MatrixXd y(2, states.cols());
    for (Eigen::Index i = 0; i < states.cols(); ++i) y.col(i) = measure_pair(LedState::from(states.col(i)), channel);
    return y;
}

double loss_dyn(const NetworkParams& encoder, const Eigen::Ref<const Eigen::MatrixXd>& states,
                const Eigen::Ref<const Eigen::MatrixXd>& next, const LatentConfig& cfg, const ChannelParams& channel)
{
    return dyn_residual_loss(forward_batch(encoder, states), forward_batch(encoder, next),
                             output_matrix(states, channel), cfg);
}

double loss_recon(const NetworkParams& encoder, const NetworkParams& decoder,
                  const Eigen::Ref<const Eigen::MatrixXd>& states)
{
    if (states.cols() == 0) throw ContractError("recon loss needs a non-empty batch");
    const Eigen::MatrixXd rec = forward_batch(decoder, forward_batch(encoder, states));
    return (states - rec).squaredNorm() / static_cast<double>(states.cols());
}

LatentNormalization normalize_latent(const Eigen::Ref<const Eigen::MatrixXd>& latents,
                                     const Eigen::Ref<const Eigen::VectorXd>& current_scale)
{
    if (latents.cols() == 0) throw ContractError("normalize_latent needs a non-empty batch");
    if (current_scale.size() != latents.rows()) throw ContractError("normalize_latent: scale length must equal q");
    const Eigen::VectorXd sd = row_std(latents);
    LatentNormalization out;
    out.factors.resize(sd.size());
    for (Eigen::Index i = 0; i < sd.size(); ++i) {
        if (!(sd[i] >= kLatentStdFloor)) out.floored = true;
        out.factors[i] = 1.0 / std::max(sd[i], kLatentStdFloor);
    }
    out.scale = current_scale.cwiseProduct(out.factors);
    return out;
}

void rescale_output_rows(NetworkParams& net, const Eigen::Ref<const Eigen::VectorXd>& factors)
{
    if (factors.size() != net.output_dim()) throw ContractError("rescale_output_rows: factor count mismatch");
    net.w2 = factors.asDiagonal() * net.w2;
    net.bias2 = net.bias2.cwiseProduct(factors);
}

TrainedMaps train(const Dataset& dataset, const LatentConfig& cfg, const TrainConfig& tcfg,
                  const ChannelParams& channel, const TrainLogger& logger)
{
    tcfg.validate();
    cfg.validate();
    if (cfg.p() != 2) throw ConfigError("latent B must have 2 columns (two receivers)");

    const auto [train_set, val_set] = train_validation_split(dataset, 1.0 - tcfg.validation_fraction, tcfg.seed);
    const Eigen::MatrixXd x_train = train_set.state_matrix();
    const Eigen::MatrixXd xn_train = train_set.next_matrix();
    const Eigen::MatrixXd y_train = output_matrix(x_train, channel);
    const Eigen::MatrixXd x_val = val_set.state_matrix();
    const Eigen::MatrixXd xn_val = val_set.next_matrix();
    const Eigen::MatrixXd y_val = output_matrix(x_val, channel);

    const Eigen::Index n = x_train.cols();
    const auto batch = static_cast<std::size_t>(tcfg.batch_size);
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    Rng shuffle_rng(tcfg.seed ^ 0x9e3779b97f4a7c15ULL);

    TrainedMaps out;
    out.encoder = init_network(2, tcfg.hidden_dim, cfg.q(), tcfg.seed);
    out.decoder = init_network(cfg.q(), tcfg.hidden_dim, 2, tcfg.seed + 1);
    out.scale = initial_scale(cfg, y_train);

    auto emit = [&](EpochLog entry) {
        out.log.push_back(entry);
        if (logger) logger(entry);
    };

    // Phase 1: encoder on the dynamic loss.
    AdamState enc_opt = AdamState::for_network(out.encoder, tcfg.adam);
    for (int epoch = 0; epoch < tcfg.epochs_dyn; ++epoch) {
        if (epoch > 0 && epoch % tcfg.normalization_interval == 0) {
            const LatentNormalization norm = normalize_latent(forward_batch(out.encoder, x_train), out.scale);
            if (norm.floored) std::cerr << "warning: latent dimension with std below floor at epoch " << epoch << '\n';
            rescale_output_rows(out.encoder, norm.factors);
            out.scale = norm.scale;
        }
        const LatentConfig eff = cfg.rescaled(out.scale);
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t stop = std::min(order.size(), start + batch);
            const Eigen::MatrixXd xb = gather(x_train, order, start, stop);
            const Eigen::MatrixXd xnb = gather(xn_train, order, start, stop);
            const Eigen::MatrixXd yb = gather(y_train, order, start, stop);
            const double m = static_cast<double>(stop - start);

            const Activations a_now = forward_cached(out.encoder, xb);
            const Activations a_next = forward_cached(out.encoder, xnb);
            const Eigen::MatrixXd r = a_next.output - eff.a * a_now.output - eff.b * yb;
            loss_sum += r.squaredNorm();

            const Eigen::MatrixXd up_next = (2.0 / m) * r;
            const Eigen::MatrixXd up_now = -(eff.a.transpose() * up_next);
            Gradients g = backward_batch(out.encoder, xnb, a_next, up_next, false);
            add_into(g.params, backward_batch(out.encoder, xb, a_now, up_now, false).params);
            adam_step(out.encoder, g.params, enc_opt);
        }
        enc_opt.hyper.learning_rate *= tcfg.lr_decay;

        const double val = dyn_residual_loss(forward_batch(out.encoder, x_val), forward_batch(out.encoder, xn_val),
                                             y_val, eff);
        const double tr = loss_sum / static_cast<double>(n);
        check_finite(tr, "dyn", epoch);
        check_finite(val, "dyn", epoch);
        emit({epoch, "dyn", tr, val});
        out.loss_dyn_val = val;
    }

    // Phase 2: decoder on the reconstruction loss; encoder frozen.
    const Eigen::MatrixXd z_train = forward_batch(out.encoder, x_train);
    const Eigen::MatrixXd z_val = forward_batch(out.encoder, x_val);
    AdamState dec_opt = AdamState::for_network(out.decoder, tcfg.adam);
    for (int epoch = 0; epoch < tcfg.epochs_recon; ++epoch) {
        std::shuffle(order.begin(), order.end(), shuffle_rng);
        double loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t stop = std::min(order.size(), start + batch);
            const Eigen::MatrixXd zb = gather(z_train, order, start, stop);
            const Eigen::MatrixXd xb = gather(x_train, order, start, stop);
            const double m = static_cast<double>(stop - start);

            const Activations acts = forward_cached(out.decoder, zb);
            const Eigen::MatrixXd r = acts.output - xb;
            loss_sum += r.squaredNorm();
            const Gradients g = backward_batch(out.decoder, zb, acts, (2.0 / m) * r, false);
            adam_step(out.decoder, g.params, dec_opt);
        }
        dec_opt.hyper.learning_rate *= tcfg.lr_decay;

        const double val = (forward_batch(out.decoder, z_val) - x_val).squaredNorm() / static_cast<double>(x_val.cols());
        const double tr = loss_sum / static_cast<double>(n);
        check_finite(tr, "recon", epoch);
        check_finite(val, "recon", epoch);
        emit({tcfg.epochs_dyn + epoch, "recon", tr, val});
        out.loss_recon_val = val;
    }
    return out;
}

void save_trained_maps(const std::filesystem::path& dir, const TrainedMaps& maps, std::uint64_t seed)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create checkpoint directory " + dir.string() + ": " + ec.message());

    Checkpoint enc{maps.encoder, seed, {}};
    enc.meta["latent_scale"] = maps.scale;
    enc.meta["loss_dyn_val"] = Eigen::VectorXd::Constant(1, maps.loss_dyn_val);
    save_checkpoint(dir / "encoder.ckpt", enc);

    Checkpoint dec{maps.decoder, seed + 1, {}};
    dec.meta["loss_recon_val"] = Eigen::VectorXd::Constant(1, maps.loss_recon_val);
    save_checkpoint(dir / "decoder.ckpt", dec);
}

TrainedMaps load_trained_maps(const std::filesystem::path& dir)
{
    const Checkpoint enc = load_checkpoint(dir / "encoder.ckpt");
    const Checkpoint dec = load_checkpoint(dir / "decoder.ckpt");
    if (enc.net.input_dim() != 2 || dec.net.output_dim() != 2 || enc.net.output_dim() != dec.net.input_dim())
        throw MissingArtifactError("checkpoint dimensions in " + dir.string() + " do not form an encoder/decoder pair");

    TrainedMaps maps;
    maps.encoder = enc.net;
    maps.decoder = dec.net;
    const auto it = enc.meta.find("latent_scale");
    if (it == enc.meta.end() || it->second.size() != enc.net.output_dim())
        throw MissingArtifactError((dir / "encoder.ckpt").string() + ": missing latent_scale");
    maps.scale = it->second;
    if (auto l = enc.meta.find("loss_dyn_val"); l != enc.meta.end() && l->second.size() == 1)
        maps.loss_dyn_val = l->second[0];
    if (auto l = dec.meta.find("loss_recon_val"); l != dec.meta.end() && l->second.size() == 1)
        maps.loss_recon_val = l->second[0];
    return maps;
}

void write_training_log(const std::filesystem::path& path, const std::vector<EpochLog>& log)
{
    std::ofstream os(path);
    if (!os) throw IoError("cannot open training log for writing: " + path.string());
    os << "epoch,phase,loss_train,loss_val\n";
    for (const auto& e : log)
        os << e.epoch << ',' << e.phase << ',' << format_double(e.loss_train) << ',' << format_double(e.loss_val)
           << '\n';
    if (!os) throw IoError("failed writing training log: " + path.string());
}

}  // namespace uowc
