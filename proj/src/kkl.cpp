#include "uowc/kkl.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "uowc/errors.hpp"

namespace uowc {

double LatentConfig::spectral_radius() const
{
    if (a.rows() == 0) return 0.0;
    if (a.isDiagonal()) return a.diagonal().cwiseAbs().maxCoeff();
    Eigen::EigenSolver<Eigen::MatrixXd> solver(a, false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

int LatentConfig::controllability_rank() const
{
    const Eigen::Index n = a.rows();
    Eigen::MatrixXd ctrb(n, n * b.cols());
    Eigen::MatrixXd block = b;
    for (Eigen::Index k = 0; k < n; ++k) {
        ctrb.middleCols(k * b.cols(), b.cols()) = block;
        block = a * block;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(ctrb);
    // Column scaling makes the default tolerance too loose for A^k B with
    // eigenvalues near 1, so use a relative threshold on the singular values.
    const auto& sv = svd.singularValues();
    const double tol = sv.size() > 0 ? sv[0] * 1e-12 * static_cast<double>(ctrb.cols()) : 0.0;
    return static_cast<int>((sv.array() > tol).count());
}

LatentConfig LatentConfig::rescaled(const Eigen::Ref<const Eigen::VectorXd>& scale) const
{
    if (scale.size() != a.rows()) throw ContractError("latent scale length must equal q");
    if ((scale.array() <= 0.0).any()) throw ContractError("latent scale entries must be positive");
    LatentConfig out;
    out.a = scale.asDiagonal() * a * scale.cwiseInverse().asDiagonal();
    out.b = scale.asDiagonal() * b;
    return out;
}

void LatentConfig::validate() const
{
    if (a.rows() == 0 || a.rows() != a.cols()) throw ConfigError("latent A must be square and non-empty");
    if (b.rows() != a.rows() || b.cols() == 0) throw ConfigError("latent B must have q rows");
    if (!a.allFinite() || !b.allFinite()) throw ConfigError("latent A, B must be finite");
    const double rho = spectral_radius();
    if (!(rho < 1.0)) {
        std::ostringstream os;
        os << "latent A must have spectral radius < 1, got " << rho;
        throw ConfigError(os.str());
    }
}

LatentConfig default_latent_config(double te)
{
    if (!(te > 0.0 && te < 0.1)) {
        std::ostringstream os;
        os << "default latent config needs 0 < te < 0.1, got " << te;
        throw ConfigError(os.str());
    }
    const double factors[] = {1.0, 2.0, 4.0, 6.0, 8.0, 10.0};
    std::vector<double> diag;
    for (double f : factors) diag.push_back(1.0 - f * te);
    return diagonal_latent_config(diag, 2, 1.0);
}

LatentConfig diagonal_latent_config(std::span<const double> a_diag, int p, double b_fill)
{
    if (a_diag.empty() || p <= 0) throw ConfigError("latent config needs q >= 1 and p >= 1");
    const auto q = static_cast<Eigen::Index>(a_diag.size());
    LatentConfig cfg;
    cfg.a = Eigen::MatrixXd::Zero(q, q);
    for (Eigen::Index i = 0; i < q; ++i) cfg.a(i, i) = a_diag[static_cast<std::size_t>(i)];
    cfg.b = Eigen::MatrixXd::Constant(q, p, b_fill);
    cfg.validate();
    return cfg;
}

Eigen::VectorXd latent_step(const Eigen::Ref<const Eigen::VectorXd>& z, const Output& y, const LatentConfig& cfg)
{
    if (z.size() != cfg.q() || cfg.p() != y.size()) throw ContractError("latent_step: shape mismatch");
    return cfg.a * z + cfg.b * y;
}

Eigen::VectorXd omega_correction(const Eigen::Ref<const Eigen::VectorXd>& z, double u, double u_bar,
                                 const LatentMaps& maps, const ChannelParams& channel)
{
    if (u == u_bar) return Eigen::VectorXd::Zero(z.size());
    const LedState x = maps.decode(z);
    return maps.encode(step(x, u, channel)) - maps.encode(step(x, u_bar, channel));
}

Eigen::VectorXd latent_step_corrected(const Eigen::Ref<const Eigen::VectorXd>& z, const Output& y, double u,
                                      double u_bar, const LatentMaps& maps, const LatentConfig& cfg,
                                      const ChannelParams& channel)
{
    return latent_step(z, y, cfg) + omega_correction(z, u, u_bar, maps, channel);
}

ContractionReport contraction_check(const LatentConfig& cfg, double lambda_u)
{
    if (!(lambda_u >= 0.0)) throw ContractError("contraction_check: lambda_u must be >= 0");
    ContractionReport r;
    r.rho = cfg.spectral_radius();
    r.lambda_u = lambda_u;
    r.margin = 1.0 - r.rho - lambda_u;
    r.contracts = r.margin > 0.0;
    return r;
}

double estimate_omega_lipschitz(const Eigen::Ref<const Eigen::MatrixXd>& samples, double u, double u_bar,
                                const LatentMaps& maps, const ChannelParams& channel)
{
    const Eigen::Index n = samples.cols();
    Eigen::MatrixXd omegas(samples.rows(), n);
    for (Eigen::Index i = 0; i < n; ++i) omegas.col(i) = omega_correction(samples.col(i), u, u_bar, maps, channel);

    double best = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double dz = (samples.col(i) - samples.col(j)).norm();
            if (dz <= 0.0) continue;
            best = std::max(best, (omegas.col(i) - omegas.col(j)).norm() / dz);
        }
    }
    return best;
}

SeriesResult series_oracle_T(const LedState& x, const LatentConfig& cfg, const ChannelParams& channel, double u_bar,
                             const SeriesOptions& options)
{
    cfg.validate();
    if (options.min_terms < 1) throw ContractError("series_oracle_T: min_terms must be >= 1");

    const Eigen::Index q = cfg.q();
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(q);
    Eigen::VectorXd carry = Eigen::VectorXd::Zero(q);  // Neumaier compensation
    Eigen::MatrixXd power_b = cfg.b;                    // A^j B
    LedState back = x;

    int j = 0;
    for (;; ++j) {
        if (j >= options.max_terms) {
            std::ostringstream os;
            os << "series_oracle_T: summands did not fall below " << options.summand_tolerance << " within "
               << options.max_terms << " terms at x = (" << x.x1 << ", " << x.x2 << ")";
            throw NumericalError(os.str());
        }
        back = inverse_step(back, u_bar, channel);
        const Eigen::VectorXd term = power_b * measure_pair(back, channel);
        if (!term.allFinite()) {
            std::ostringstream os;
            os << "series_oracle_T: non-finite summand at j = " << j;
            throw NumericalError(os.str());
        }
        for (Eigen::Index i = 0; i < q; ++i) {
            const double t = sum[i] + term[i];
            if (std::abs(sum[i]) >= std::abs(term[i]))
                carry[i] += (sum[i] - t) + term[i];
            else
                carry[i] += (term[i] - t) + sum[i];
            sum[i] = t;
        }
        power_b = cfg.a * power_b;
        if (j + 1 >= options.min_terms && term.norm() < options.summand_tolerance) break;
    }

    SeriesResult r;
    r.value = sum + carry;
    r.terms = j + 1;
    r.rho = cfg.spectral_radius();

    // Omitted terms j >= J obey |A^j B l| <= |A|^j |B| sup|l|, sup|l| <= sqrt(2) cp_bar (a1 + a2).
    const double a_norm = Eigen::JacobiSVD<Eigen::MatrixXd>(cfg.a).singularValues()[0];
    const double b_norm = Eigen::JacobiSVD<Eigen::MatrixXd>(cfg.b).singularValues()[0];
    const double sup_output = std::sqrt(2.0) * std::abs(channel.cp_bar()) * (channel.gain.a1 + channel.gain.a2);
    r.tail_bound = a_norm < 1.0 ? std::pow(a_norm, r.terms) / (1.0 - a_norm) * b_norm * sup_output
                                : std::numeric_limits<double>::infinity();
    return r;
}

}  // namespace uowc
