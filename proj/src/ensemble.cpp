#include <frontdoor/ensemble.hpp>
#include <frontdoor/parallel.hpp>

namespace frontdoor {

std::string to_string(Variant v) { return v == Variant::no_grandparent ? "no-grandparent" : "no-parent"; }

Variant parse_variant(const std::string& s) {
    if (s == "no-grandparent") return Variant::no_grandparent;
    if (s == "no-parent") return Variant::no_parent;
    throw std::invalid_argument("unknown variant '" + s + "' (expected no-grandparent or no-parent)");
}

void EnsembleParams::validate() const {
    if (p < 4) throw std::invalid_argument("p must be at least 4");
    if (p > Smcm::max_nodes) throw std::invalid_argument("p exceeds the supported node count");
    if (!(d > 0) || d > static_cast<double>(p) / 2) throw std::invalid_argument("d must lie in (0, p/2]");
    if (!(q >= 0) || q > static_cast<double>(p)) throw std::invalid_argument("q must lie in [0, p]");
    if (max_redraws == 0) throw std::invalid_argument("max_redraws must be positive");
}

Smcm draw_mixed_graph(const EnsembleParams& params, Rng& rng) {
    const std::size_t p = params.p;
    const double bidirected_prob = params.q / static_cast<double>(p);
    std::vector<Edge> directed;
    std::vector<Edge> bidirected;
    // Node index k is v_{k+1} in the causal ordering.
    for (std::size_t j = 1; j < p; ++j) {
        const double jj = static_cast<double>(j + 1);
        const double prob = jj <= 2 * params.d ? 0.5 : params.d / (jj - 1);
        for (std::size_t i = 0; i < j; ++i)
            if (uniform01(rng) < prob) directed.push_back({i, j});
    }
    for (std::size_t j = 1; j < p; ++j)
        for (std::size_t i = 0; i < j; ++i)
            if (uniform01(rng) < bidirected_prob) bidirected.push_back({i, j});
    return Smcm(p, directed, bidirected);
}

SampledGraph sample_smcm(const EnsembleParams& params, Rng& rng) {
    params.validate();
    const NodeId y = params.p - 1;
    for (std::size_t attempt = 0; attempt < params.max_redraws; ++attempt) {
        Smcm g = draw_mixed_graph(params, rng);
        NodeSet excluded = g.parents(y);
        if (params.variant == Variant::no_grandparent)
            for (auto v : g.parents(y)) excluded |= g.parents(v);
        const NodeSet eligible = g.ancestors(y) - excluded;
        if (eligible.empty()) continue;

        const auto candidates = eligible.to_vector();
        const NodeId t = candidates[uniform_index(rng, candidates.size())];
        if (!g.has_bidirected(t, y)) {
            auto bidirected = g.bidirected_edges();
            bidirected.push_back({t, y});
            g = Smcm(g.size(), g.directed_edges(), bidirected);
        }
        return {g.with_roles({t, y, g.children(t)}), attempt};
    }
    throw ResampleExhausted("no eligible treatment after " + std::to_string(params.max_redraws) + " draws");
}

NodeSet candidate_pool(const Smcm& g) {
    const auto& r = g.require_roles();
    NodeSet pool = g.nodes() - r.children;
    pool.erase(r.treatment);
    pool.erase(r.outcome);
    return pool;
}

bool holds_eq4(const Smcm& g, NodeSet z) {
    const auto& r = g.require_roles();
    return m_separated(g, {r.children, NodeSet::singleton(r.outcome), z | NodeSet::singleton(r.treatment)});
}

bool holds_eq5(const Smcm& g, NodeSet z_i, NodeSet z_o) {
    const auto& r = g.require_roles();
    const NodeSet t = NodeSet::singleton(r.treatment);
    return m_separated(g, {z_i, t, {}}) && m_separated(g, {z_o, t, r.children | z_i});
}

namespace {

// Visits witnesses in canonical order until fn returns false.
template <typename Fn>
void for_each_witness(const Smcm& g, std::optional<std::size_t> max_size, Fn&& fn) {
    const auto& r = g.require_roles();
    const NodeSet t = NodeSet::singleton(r.treatment);
    const NodeSet pool = candidate_pool(g);
    // Z_i ⊥ T with empty conditioning set reduces to avoiding T's reach.
    const NodeSet t_reach = m_reachable(g, t, {});

    bool keep_going = true;
    for_each_subset_by_size(pool, max_size, [&](NodeSet z) {
        if (!holds_eq4(g, z)) return true;
        for_each_subset_by_size(z, std::nullopt, [&](NodeSet z_o) {
            const NodeSet z_i = z - z_o;
            if (z_i.intersects(t_reach)) return true;
            if (!m_separated(g, {z_o, t, r.children | z_i})) return true;
            keep_going = fn(Witness{z, z_i, z_o});
            return keep_going;
        });
        return keep_going;
    });
}

}  // namespace

ScanOutcome scan_graph(const Smcm& g, std::optional<std::size_t> max_size) {
    ScanOutcome out;
    for_each_witness(g, max_size, [&](const Witness& w) {
        out.success = true;
        out.witness = w;
        return false;
    });
    return out;
}

std::vector<Witness> scan_all_witnesses(const Smcm& g, std::optional<std::size_t> max_size) {
    std::vector<Witness> out;
    for_each_witness(g, max_size, [&](const Witness& w) {
        out.push_back(w);
        return true;
    });
    return out;
}

EnsembleResult run_ensemble(const EnsembleParams& params, std::size_t n_graphs, std::size_t threads) {
    params.validate();
    struct Slot {
        bool exhausted = false;
        bool exhaustive = false;
        bool bounded = false;
        std::size_t redraws = 0;
    };
    std::vector<Slot> slots(n_graphs);
    parallel_for(
        n_graphs,
        [&](std::size_t k) {
            Rng rng = make_stream(params.seed, k);
            SampledGraph sg;
            try {
                sg = sample_smcm(params, rng);
            } catch (const ResampleExhausted&) {
                slots[k].exhausted = true;
                slots[k].redraws = params.max_redraws;
                return;
            }
            slots[k].redraws = sg.redraws;
            // The first witness is the smallest, so one full scan answers both.
            const auto outcome = scan_graph(sg.graph);
            slots[k].exhaustive = outcome.success;
            slots[k].bounded = outcome.success &&
                               (!params.max_subset_size || outcome.witness->z.size() <= *params.max_subset_size);
        },
        threads);

    EnsembleResult res;
    res.n_graphs = n_graphs;
    for (const auto& s : slots) {
        res.exhausted += s.exhausted;
        res.successes_exhaustive += s.exhaustive;
        res.successes_bounded += s.bounded;
        res.redraws += s.redraws;
    }
    return res;
}

}  // namespace frontdoor
