#include "uowc/dense_net.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "uowc/errors.hpp"

namespace uowc {

namespace {

// tanh through the vectorized exp; saturates cleanly at +-1.
void tanh_inplace(Eigen::MatrixXd& m)
{
    m.array() = 1.0 - 2.0 / ((2.0 * m.array()).exp() + 1.0);
}

void check_dims(const NetworkParams& net, Eigen::Index rows, const char* what)
{
    if (rows != net.input_dim()) {
        std::ostringstream os;
        os << what << ": expected input dimension " << net.input_dim() << ", got " << rows;
        throw ContractError(os.str());
    }
}

template <typename Op>
void for_each_block(NetworkParams& a, const NetworkParams& b, Op op)
{
    op(a.w1, b.w1);
    op(a.bias1, b.bias1);
    op(a.w2, b.w2);
    op(a.bias2, b.bias2);
}

}  // namespace

Eigen::Index NetworkParams::parameter_count() const
{
    return w1.size() + bias1.size() + w2.size() + bias2.size();
}

NetworkParams NetworkParams::zeros(int input_dim, int hidden_dim, int output_dim)
{
    if (input_dim <= 0 || hidden_dim <= 0 || output_dim <= 0)
        throw ContractError("network dimensions must be positive");
    return {Eigen::MatrixXd::Zero(hidden_dim, input_dim), Eigen::VectorXd::Zero(hidden_dim),
            Eigen::MatrixXd::Zero(output_dim, hidden_dim), Eigen::VectorXd::Zero(output_dim)};
}

void NetworkParams::validate() const
{
    if (w1.rows() == 0 || w1.cols() == 0 || w2.rows() == 0)
        throw ContractError("network has an empty layer");
    if (bias1.size() != w1.rows() || w2.cols() != w1.rows() || bias2.size() != w2.rows())
        throw ContractError("network layer shapes are inconsistent");
    if (!w1.allFinite() || !bias1.allFinite() || !w2.allFinite() || !bias2.allFinite())
        throw ContractError("network has non-finite entries");
}

bool NetworkParams::same_shape(const NetworkParams& o) const
{
    return w1.rows() == o.w1.rows() && w1.cols() == o.w1.cols() && w2.rows() == o.w2.rows() &&
           w2.cols() == o.w2.cols() && bias1.size() == o.bias1.size() && bias2.size() == o.bias2.size();
}

bool operator==(const NetworkParams& a, const NetworkParams& b)
{
    return a.same_shape(b) && a.w1 == b.w1 && a.bias1 == b.bias1 && a.w2 == b.w2 && a.bias2 == b.bias2;
}

NetworkParams init_network(int input_dim, int hidden_dim, int output_dim, std::uint64_t seed)
{
    NetworkParams net = NetworkParams::zeros(input_dim, hidden_dim, output_dim);
    std::mt19937_64 rng(seed);
    auto fill = [&rng](Eigen::MatrixXd& w) {
        const double bound = std::sqrt(6.0 / static_cast<double>(w.rows() + w.cols()));
        std::uniform_real_distribution<double> dist(-bound, bound);
        for (Eigen::Index r = 0; r < w.rows(); ++r)
            for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = dist(rng);
    };
    fill(net.w1);
    fill(net.w2);
    return net;
}

Eigen::VectorXd forward(const NetworkParams& net, const Eigen::Ref<const Eigen::VectorXd>& x)
{
    check_dims(net, x.size(), "forward");
    Eigen::MatrixXd out = forward_batch(net, x);
    return out.col(0);
}

Eigen::MatrixXd forward_batch(const NetworkParams& net, const Eigen::Ref<const Eigen::MatrixXd>& inputs)
{
    return forward_cached(net, inputs).output;
}

Activations forward_cached(const NetworkParams& net, const Eigen::Ref<const Eigen::MatrixXd>& inputs)
{
    check_dims(net, inputs.rows(), "forward");
    Activations acts;
    acts.hidden.noalias() = net.w1 * inputs;
    acts.hidden.colwise() += net.bias1;
    tanh_inplace(acts.hidden);
    acts.output.noalias() = net.w2 * acts.hidden;
    acts.output.colwise() += net.bias2;
    return acts;
}

Gradients backward_batch(const NetworkParams& net, const Eigen::Ref<const Eigen::MatrixXd>& inputs,
                         const Activations& acts, const Eigen::Ref<const Eigen::MatrixXd>& upstream,
                         bool want_input_gradients)
{
    check_dims(net, inputs.rows(), "backward");
    if (upstream.rows() != net.output_dim() || upstream.cols() != inputs.cols())
        throw ContractError("backward: upstream gradient shape does not match outputs");
    if (acts.hidden.rows() != net.hidden_dim() || acts.hidden.cols() != inputs.cols())
        throw ContractError("backward: activations do not match inputs");

    Gradients g;
    g.params.w2.noalias() = upstream * acts.hidden.transpose();
    g.params.bias2 = upstream.rowwise().sum();

    Eigen::MatrixXd delta(net.hidden_dim(), inputs.cols());
    delta.noalias() = net.w2.transpose() * upstream;
    delta.array() *= 1.0 - acts.hidden.array().square();

    g.params.w1.noalias() = delta * inputs.transpose();
    g.params.bias1 = delta.rowwise().sum();
    if (want_input_gradients) g.inputs.noalias() = net.w1.transpose() * delta;
    return g;
}

Gradients backward(const NetworkParams& net, const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::Ref<const Eigen::VectorXd>& upstream)
{
    check_dims(net, x.size(), "backward");
    const Activations acts = forward_cached(net, x);
    return backward_batch(net, x, acts, upstream, true);
}

AdamState AdamState::for_network(const NetworkParams& net, const AdamHyper& hyper)
{
    AdamState s;
    s.m = NetworkParams::zeros(net.input_dim(), net.hidden_dim(), net.output_dim());
    s.v = s.m;
    s.hyper = hyper;
    return s;
}

void adam_step(NetworkParams& net, const NetworkParams& grads, AdamState& state)
{
    if (!net.same_shape(grads) || !net.same_shape(state.m) || !net.same_shape(state.v))
        throw ContractError("adam_step: parameter, gradient, and moment shapes differ");

    ++state.step;
    const auto& h = state.hyper;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(h.beta1, t);
    const double c2 = 1.0 - std::pow(h.beta2, t);

    auto update = [&](auto& p, const auto& g, auto& m, auto& v) {
        m.array() = h.beta1 * m.array() + (1.0 - h.beta1) * g.array();
        v.array() = h.beta2 * v.array() + (1.0 - h.beta2) * g.array().square();
        p.array() -= h.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + h.epsilon);
    };
    update(net.w1, grads.w1, state.m.w1, state.v.w1);
    update(net.bias1, grads.bias1, state.m.bias1, state.v.bias1);
    update(net.w2, grads.w2, state.m.w2, state.v.w2);
    update(net.bias2, grads.bias2, state.m.bias2, state.v.bias2);
}

namespace {

void write_values(std::ostream& os, const char* tag, const Eigen::MatrixXd& m)
{
    os << tag;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) os << ' ' << m(r, c);
    os << '\n';
}

void read_values(std::istream& is, const char* tag, Eigen::MatrixXd& m, const std::filesystem::path& path)
{
    std::string word;
    if (!(is >> word) || word != tag)
        throw MissingArtifactError(path.string() + ": expected record '" + tag + "', found '" + word + "'");
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            if (!(is >> m(r, c))) throw MissingArtifactError(path.string() + ": truncated record '" + tag + "'");
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt)
{
    ckpt.net.validate();
    std::ofstream os(path);
    if (!os) throw IoError("cannot open checkpoint for writing: " + path.string());
    os << std::setprecision(17);
    os << "uowc-dense-net 1\n";
    os << "dims " << ckpt.net.input_dim() << ' ' << ckpt.net.hidden_dim() << ' ' << ckpt.net.output_dim() << '\n';
    os << "seed " << ckpt.seed << '\n';
    write_values(os, "w1", ckpt.net.w1);
    write_values(os, "bias1", ckpt.net.bias1);
    write_values(os, "w2", ckpt.net.w2);
    write_values(os, "bias2", ckpt.net.bias2);
    for (const auto& [name, values] : ckpt.meta) {
        os << "meta " << name << ' ' << values.size();
        for (double v : values) os << ' ' << v;
        os << '\n';
    }
    os << "end\n";
    if (!os) throw IoError("failed writing checkpoint: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path)
{
    std::ifstream is(path);
    if (!is) throw MissingArtifactError("cannot open checkpoint: " + path.string());

    std::string magic, word;
    int version = 0;
    if (!(is >> magic >> version) || magic != "uowc-dense-net" || version != 1)
        throw MissingArtifactError(path.string() + ": not a uowc-dense-net v1 checkpoint");

    int in = 0, hidden = 0, out = 0;
    if (!(is >> word >> in >> hidden >> out) || word != "dims" || in <= 0 || hidden <= 0 || out <= 0)
        throw MissingArtifactError(path.string() + ": bad dims record");

    Checkpoint ckpt;
    if (!(is >> word >> ckpt.seed) || word != "seed") throw MissingArtifactError(path.string() + ": bad seed record");

    ckpt.net = NetworkParams::zeros(in, hidden, out);
    Eigen::MatrixXd b1(hidden, 1), b2(out, 1);
    read_values(is, "w1", ckpt.net.w1, path);
    read_values(is, "bias1", b1, path);
    read_values(is, "w2", ckpt.net.w2, path);
    read_values(is, "bias2", b2, path);
    ckpt.net.bias1 = b1.col(0);
    ckpt.net.bias2 = b2.col(0);

    while (is >> word && word == "meta") {
        std::string name;
        Eigen::Index n = 0;
        if (!(is >> name >> n) || n < 0) throw MissingArtifactError(path.string() + ": bad meta record");
        Eigen::VectorXd values(n);
        for (Eigen::Index i = 0; i < n; ++i)
            if (!(is >> values[i])) throw MissingArtifactError(path.string() + ": truncated meta '" + name + "'");
        ckpt.meta.emplace(name, std::move(values));
    }
    if (word != "end") throw MissingArtifactError(path.string() + ": missing end record");
    ckpt.net.validate();
    return ckpt;
}

}  // namespace uowc
