#include <frontdoor/smcm.hpp>

#include <algorithm>
#include <sstream>

namespace frontdoor {

std::string to_string(NodeSet s) {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (auto v : s) {
        if (!first) os << ',';
        os << v;
        first = false;
    }
    os << '}';
    return os.str();
}

bool lexicographic_less(NodeSet a, NodeSet b) {
    auto ia = a.begin();
    auto ib = b.begin();
    for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
        if (*ia != *ib) return *ia < *ib;
    }
    return ia == a.end() && ib != b.end();
}

Smcm::Smcm(std::size_t n_nodes, const std::vector<Edge>& directed, const std::vector<Edge>& bidirected,
           std::vector<std::string> names)
    : parents_(n_nodes), children_(n_nodes), siblings_(n_nodes), names_(std::move(names)) {
    if (n_nodes > max_nodes) throw GraphError("graph exceeds " + std::to_string(max_nodes) + " nodes");
    if (names_.empty()) {
        names_.reserve(n_nodes);
        for (std::size_t i = 0; i < n_nodes; ++i) names_.push_back("v" + std::to_string(i));
    } else if (names_.size() != n_nodes) {
        throw GraphError("name count does not match node count");
    }

    auto check_pair = [n_nodes](const Edge& e) {
        if (e.from >= n_nodes || e.to >= n_nodes) throw GraphError("edge endpoint out of range");
        if (e.from == e.to) throw GraphError("self-loop on node " + std::to_string(e.from));
    };
    for (const auto& e : directed) {
        check_pair(e);
        if (children_[e.from].contains(e.to)) throw GraphError("duplicate directed edge");
        children_[e.from].insert(e.to);
        parents_[e.to].insert(e.from);
    }
    for (const auto& e : bidirected) {
        check_pair(e);
        if (siblings_[e.from].contains(e.to)) throw GraphError("duplicate bidirected edge");
        siblings_[e.from].insert(e.to);
        siblings_[e.to].insert(e.from);
    }

    // Kahn's algorithm; lowest id first keeps the order deterministic.
    std::vector<std::size_t> indegree(n_nodes);
    for (std::size_t v = 0; v < n_nodes; ++v) indegree[v] = parents_[v].size();
    NodeSet ready;
    for (std::size_t v = 0; v < n_nodes; ++v)
        if (indegree[v] == 0) ready.insert(v);
    topo_.reserve(n_nodes);
    while (!ready.empty()) {
        const NodeId v = ready.front();
        ready.erase(v);
        topo_.push_back(v);
        for (auto c : children_[v])
            if (--indegree[c] == 0) ready.insert(c);
    }
    if (topo_.size() != n_nodes) throw GraphError("directed edges contain a cycle");

    ancestors_.resize(n_nodes);
    descendants_.resize(n_nodes);
    for (auto v : topo_)
        for (auto p : parents_[v]) ancestors_[v] |= ancestors_[p] | NodeSet::singleton(p);
    for (auto it = topo_.rbegin(); it != topo_.rend(); ++it)
        for (auto c : children_[*it]) descendants_[*it] |= descendants_[c] | NodeSet::singleton(c);
}

std::vector<Edge> Smcm::directed_edges() const {
    std::vector<Edge> out;
    for (NodeId v = 0; v < size(); ++v)
        for (auto c : children_[v]) out.push_back({v, c});
    return out;
}

std::vector<Edge> Smcm::bidirected_edges() const {
    std::vector<Edge> out;
    for (NodeId v = 0; v < size(); ++v)
        for (auto s : siblings_[v])
            if (v < s) out.push_back({v, s});
    return out;
}

std::size_t Smcm::edge_count() const { return directed_edges().size() + bidirected_edges().size(); }

std::optional<NodeId> Smcm::find(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<NodeId>(it - names_.begin());
}

const Roles& Smcm::require_roles() const {
    if (!roles_) throw GraphError("graph has no treatment/outcome roles");
    return *roles_;
}

Smcm Smcm::with_roles(const Roles& roles) const {
    checked(roles.treatment);
    checked(roles.outcome);
    if (roles.treatment == roles.outcome) throw GraphError("treatment and outcome coincide");
    if (!roles.children.is_subset_of(nodes())) throw std::out_of_range("children contain an unknown node");
    if (roles.children != children_[roles.treatment])
        throw GraphError("children set " + to_string(roles.children) + " is not the treatment's children " +
                         to_string(children_[roles.treatment]));
    if (roles.children.contains(roles.outcome)) throw GraphError("outcome is a child of the treatment");
    Smcm out = *this;
    out.roles_ = roles;
    return out;
}

Smcm Smcm::without_roles() const {
    Smcm out = *this;
    out.roles_.reset();
    return out;
}

NodeSet Smcm::ancestors(NodeSet vs) const {
    NodeSet out;
    for (auto v : vs) out |= ancestors_[checked(v)];
    return out;
}

NodeSet Smcm::ancestors(NodeId v) const { return ancestors_[checked(v)]; }

NodeSet Smcm::descendants(NodeSet vs) const {
    NodeSet out;
    for (auto v : vs) out |= descendants_[checked(v)];
    return out;
}

NodeSet Smcm::descendants(NodeId v) const { return descendants_[checked(v)]; }

bool Smcm::operator==(const Smcm& o) const {
    return parents_ == o.parents_ && siblings_ == o.siblings_ && names_ == o.names_ && roles_ == o.roles_;
}

NodeSet m_reachable(const Smcm& g, NodeSet sources, NodeSet given) {
    const NodeSet all = g.nodes();
    if (!sources.is_subset_of(all) || !given.is_subset_of(all)) throw std::out_of_range("query node out of range");
    if (sources.intersects(given)) throw std::invalid_argument("sources intersect the conditioning set");

    const auto& pa = g.parent_sets();
    const auto& ch = g.child_sets();
    const auto& sib = g.sibling_sets();
    // A collider passes iff it is in `given` or has a descendant there.
    const auto& an = g.ancestor_sets();
    NodeSet collider_open = given;
    for (auto v : given) collider_open |= an[v];

    // Two visit states per node: entered through an arrowhead, or through a
    // tail (walked from a child up to its parent). States are propagated a
    // frontier at a time.
    NodeSet head_seen;
    NodeSet tail_seen;
    NodeSet head_front;
    NodeSet tail_front;
    for (auto s : sources) {
        head_front |= ch[s] | sib[s];
        tail_front |= pa[s];
    }

    while (!head_front.empty() || !tail_front.empty()) {
        head_seen |= head_front;
        tail_seen |= tail_front;
        NodeSet next_head;
        NodeSet next_tail;
        // a non-collider passes in every direction unless conditioned on
        for (auto v : tail_front - given) {
            next_head |= ch[v] | sib[v];
            next_tail |= pa[v];
        }
        for (auto v : head_front - given) next_head |= ch[v];
        for (auto v : head_front & collider_open) {
            next_head |= sib[v];
            next_tail |= pa[v];
        }
        head_front = next_head - head_seen;
        tail_front = next_tail - tail_seen;
    }
    return (head_seen | tail_seen) - given - sources;
}

bool m_separated(const Smcm& g, const SeparationQuery& q) {
    const NodeSet all = g.nodes();
    if (!q.x.is_subset_of(all) || !q.y.is_subset_of(all) || !q.given.is_subset_of(all))
        throw std::out_of_range("query node out of range");
    if (q.x.intersects(q.y) || q.x.intersects(q.given) || q.y.intersects(q.given))
        throw std::invalid_argument("separation query sets must be pairwise disjoint");
    if (q.x.empty() || q.y.empty()) return true;
    return !m_reachable(g, q.x, q.given).intersects(q.y);
}

namespace {

Smcm rebuild(const Smcm& g, const std::vector<Edge>& directed, const std::vector<Edge>& bidirected) {
    return Smcm(g.size(), directed, bidirected, g.names());
}

}  // namespace

Smcm remove_incoming(const Smcm& g, NodeSet s) {
    if (!s.is_subset_of(g.nodes())) throw std::out_of_range("mutilation set out of range");
    std::vector<Edge> directed;
    std::vector<Edge> bidirected;
    for (const auto& e : g.directed_edges())
        if (!s.contains(e.to)) directed.push_back(e);
    for (const auto& e : g.bidirected_edges())
        if (!s.contains(e.from) && !s.contains(e.to)) bidirected.push_back(e);
    return rebuild(g, directed, bidirected);
}

Smcm remove_outgoing(const Smcm& g, NodeSet s) {
    if (!s.is_subset_of(g.nodes())) throw std::out_of_range("mutilation set out of range");
    std::vector<Edge> directed;
    for (const auto& e : g.directed_edges())
        if (!s.contains(e.from)) directed.push_back(e);
    return rebuild(g, directed, g.bidirected_edges());
}

std::pair<Smcm, NodeId> add_regime_node(const Smcm& g, NodeSet s, const std::string& name) {
    if (!s.is_subset_of(g.nodes())) throw std::out_of_range("regime target out of range");
    const NodeId f = g.size();
    auto directed = g.directed_edges();
    for (auto v : s) directed.push_back({f, v});
    auto names = g.names();
    names.push_back(name);
    return {Smcm(g.size() + 1, directed, g.bidirected_edges(), std::move(names)), f};
}

AssumptionReport check_assumptions(const Smcm& g, const Roles& roles) {
    AssumptionReport r;
    r.outcome_descends_from_treatment = g.ancestors(roles.outcome).contains(roles.treatment);
    r.treatment_outcome_confounded = g.has_bidirected(roles.treatment, roles.outcome);
    r.children_complete = roles.children == g.children(roles.treatment);
    return r;
}

}  // namespace frontdoor
