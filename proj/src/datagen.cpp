#include "uowc/datagen.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>

#include "uowc/csv.hpp"
#include "uowc/errors.hpp"

namespace uowc {

namespace {

Eigen::MatrixXd to_matrix(const std::vector<LedState>& xs)
{
    Eigen::MatrixXd m(2, static_cast<Eigen::Index>(xs.size()));
    for (std::size_t i = 0; i < xs.size(); ++i) {
        m(0, static_cast<Eigen::Index>(i)) = xs[i].x1;
        m(1, static_cast<Eigen::Index>(i)) = xs[i].x2;
    }
    return m;
}

Dataset subset(const Dataset& ds, const std::vector<std::size_t>& idx)
{
    Dataset out;
    out.u_bar = ds.u_bar;
    out.seed = ds.seed;
    out.states.reserve(idx.size());
    out.next.reserve(idx.size());
    for (std::size_t i : idx) {
        out.states.push_back(ds.states[i]);
        out.next.push_back(ds.next[i]);
    }
    return out;
}

}  // namespace

Eigen::MatrixXd Dataset::state_matrix() const { return to_matrix(states); }
Eigen::MatrixXd Dataset::next_matrix() const { return to_matrix(next); }

std::size_t Dataset::count_successor_violations(const ChannelParams& channel) const
{
    std::size_t bad = 0;
    for (std::size_t i = 0; i < size(); ++i)
        if (!(step(states[i], u_bar, channel) == next[i])) ++bad;
    return bad;
}

Dataset generate_dataset(std::size_t size, double u_bar, const ChannelParams& channel, std::uint64_t seed)
{
    if (size == 0) throw ConfigError("dataset size must be >= 1");
    Rng rng(seed);
    std::uniform_real_distribution<double> dist(-kStateBoxHalfWidth, kStateBoxHalfWidth);

    Dataset ds;
    ds.u_bar = u_bar;
    ds.seed = seed;
    ds.states.reserve(size);
    ds.next.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        LedState x;
        x.x1 = dist(rng);
        x.x2 = dist(rng);
        ds.states.push_back(x);
        ds.next.push_back(step(x, u_bar, channel));
    }
    return ds;
}

std::pair<Dataset, Dataset> train_validation_split(const Dataset& ds, double fraction, std::uint64_t seed)
{
    if (!(fraction > 0.0 && fraction < 1.0)) throw ConfigError("split fraction must lie in (0, 1)");
    const std::size_t n = ds.size();
    const auto n_first = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
    if (n_first == 0 || n_first == n)
        throw ConfigError("split of " + std::to_string(n) + " pairs leaves an empty part");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);

    std::vector<std::size_t> first(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_first));
    std::vector<std::size_t> second(idx.begin() + static_cast<std::ptrdiff_t>(n_first), idx.end());
    return {subset(ds, first), subset(ds, second)};
}

void write_dataset(const std::filesystem::path& path, const Dataset& ds)
{
    std::ofstream os(path);
    if (!os) throw IoError("cannot open dataset for writing: " + path.string());
    os << "# u_bar=" << format_double(ds.u_bar) << '\n';
    os << "# seed=" << ds.seed << '\n';
    os << "# size=" << ds.size() << '\n';
    os << "x1,x2,x1_next,x2_next\n";
    for (std::size_t i = 0; i < ds.size(); ++i) {
        os << format_double(ds.states[i].x1) << ',' << format_double(ds.states[i].x2) << ','
           << format_double(ds.next[i].x1) << ',' << format_double(ds.next[i].x2) << '\n';
    }
    if (!os) throw IoError("failed writing dataset: " + path.string());
}

Dataset read_dataset(const std::filesystem::path& path)
{
    const CsvTable table = read_csv(path);
    if (join_header(table.header) != "x1,x2,x1_next,x2_next")
        throw MissingArtifactError(path.string() + ": unexpected dataset header");

    Dataset ds;
    for (const auto& c : table.comments) {
        if (c.rfind("u_bar=", 0) == 0) ds.u_bar = std::stod(c.substr(6));
        else if (c.rfind("seed=", 0) == 0) ds.seed = std::stoull(c.substr(5));
    }
    ds.states.reserve(table.rows.size());
    ds.next.reserve(table.rows.size());
    for (const auto& r : table.rows) {
        ds.states.push_back({r[0], r[1]});
        ds.next.push_back({r[2], r[3]});
    }
    return ds;
}

}  // namespace uowc
