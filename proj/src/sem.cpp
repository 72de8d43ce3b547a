#include <frontdoor/sem.hpp>

#include <cmath>
#include <stdexcept>

namespace frontdoor {

std::string to_string(Regime r) {
    switch (r) {
        case Regime::observational: return "observational";
        case Regime::do_t0: return "do(T=0)";
        case Regime::do_t1: return "do(T=1)";
    }
    return "?";
}

namespace {

std::size_t rank_in(NodeSet s, NodeId v) {
    return static_cast<std::size_t>(std::popcount(s.bits() & ((std::uint64_t{1} << v) - 1)));
}

}  // namespace

double SemModel::parent_weight(NodeId parent, NodeId child) const {
    const NodeSet pa = graph.parents(child);
    if (!pa.contains(parent)) throw std::invalid_argument("not a parent");
    return weights[child][rank_in(pa, parent)];
}

double SemModel::latent_weight(NodeId node, NodeId sibling) const {
    const NodeSet sib = graph.siblings(node);
    if (!sib.contains(sibling)) throw std::invalid_argument("no bidirected edge");
    return weights[node][graph.parents(node).size() + rank_in(sib, sibling)];
}

SemModel draw_model(const Smcm& g, Rng& rng, double lo, double hi) {
    g.require_roles();
    SemModel m;
    m.graph = g;
    m.weights.resize(g.size());
    for (NodeId v = 0; v < g.size(); ++v) {
        const std::size_t k = g.parents(v).size() + g.siblings(v).size();
        for (std::size_t i = 0; i < k; ++i) m.weights[v].push_back(uniform(rng, lo, hi));
    }
    return m;
}

DataTable generate(const SemModel& model, std::size_t n, Regime regime, Rng& rng) {
    const Smcm& g = model.graph;
    const NodeId t = g.require_roles().treatment;
    const auto rows = static_cast<Eigen::Index>(n);
    const auto latents = g.bidirected_edges();
    Eigen::MatrixXd u(rows, static_cast<Eigen::Index>(latents.size()));
    for (Eigen::Index e = 0; e < u.cols(); ++e)
        for (Eigen::Index r = 0; r < rows; ++r) u(r, e) = uniform(rng, 1.0, 2.0);
    auto latent_index = [&](NodeId a, NodeId b) {
        const Edge key{std::min(a, b), std::max(a, b)};
        for (std::size_t e = 0; e < latents.size(); ++e)
            if (latents[e] == key) return static_cast<Eigen::Index>(e);
        throw std::logic_error("missing latent");
    };

    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(g.size()));
    for (auto v : g.topological_order()) {
        auto col = x.col(static_cast<Eigen::Index>(v));
        if (v == t && regime != Regime::observational) {
            col.setConstant(regime == Regime::do_t1 ? 1.0 : 0.0);
            continue;
        }
        std::size_t k = 0;
        for (auto p : g.parents(v)) col += model.weights[v][k++] * x.col(static_cast<Eigen::Index>(p));
        for (auto s : g.siblings(v)) col += model.weights[v][k++] * u.col(latent_index(v, s));
        if (v == t) {
            for (Eigen::Index r = 0; r < rows; ++r) {
                const double prob = 1.0 / (1.0 + std::exp(-col(r)));
                col(r) = uniform01(rng) < prob ? 1.0 : 0.0;
            }
        } else {
            for (Eigen::Index r = 0; r < rows; ++r) col(r) += model.noise_scale * standard_normal(rng);
        }
    }
    return DataTable(std::move(x), g.names());
}

double true_ate(const SemModel& model, NodeId t, NodeId y) {
    const Smcm& g = model.graph;
    if (t >= g.size() || y >= g.size()) throw std::out_of_range("node out of range");
    // effect[v] = d E[v | do(T=t)] / dt, zero for non-descendants of T
    std::vector<double> effect(g.size(), 0.0);
    effect[t] = 1.0;
    for (auto v : g.topological_order()) {
        if (v == t) continue;
        std::size_t k = 0;
        for (auto p : g.parents(v)) effect[v] += model.weights[v][k++] * effect[p];
    }
    return effect[y];
}

double true_ate(const SemModel& model) {
    const auto& r = model.graph.require_roles();
    return true_ate(model, r.treatment, r.outcome);
}

MonteCarloEstimate monte_carlo_ate(const SemModel& model, std::size_t n, Rng& rng) {
    const auto y = static_cast<Eigen::Index>(model.graph.require_roles().outcome);
    const auto d1 = generate(model, n, Regime::do_t1, rng);
    const auto d0 = generate(model, n, Regime::do_t0, rng);
    const auto y1 = d1.column(static_cast<std::size_t>(y));
    const auto y0 = d0.column(static_cast<std::size_t>(y));
    const double m1 = y1.mean();
    const double m0 = y0.mean();
    const double v1 = (y1.array() - m1).square().sum() / static_cast<double>(n - 1);
    const double v0 = (y0.array() - m0).square().sum() / static_cast<double>(n - 1);
    return {m1 - m0, std::sqrt((v1 + v0) / static_cast<double>(n))};
}

}  // namespace frontdoor
