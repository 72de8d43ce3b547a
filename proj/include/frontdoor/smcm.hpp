#ifndef FRONTDOOR_SMCM_HPP
#define FRONTDOOR_SMCM_HPP

#include <frontdoor/node_set.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace frontdoor {

struct Edge {
    NodeId from;
    NodeId to;
    bool operator==(const Edge&) const = default;
};

// Treatment, outcome and the full set of treatment children.
struct Roles {
    NodeId treatment;
    NodeId outcome;
    NodeSet children;
    bool operator==(const Roles&) const = default;
};

class GraphError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Semi-Markovian causal model over observed nodes. Latent confounders are
// represented only through bidirected edges. Immutable once constructed.
class Smcm {
public:
    static constexpr std::size_t max_nodes = NodeSet::capacity;

    Smcm() = default;

    // Throws GraphError on out-of-range ids, self-loops, duplicate edges or a
    // directed cycle. Bidirected pairs are unordered; (i,j) and (j,i) are the
    // same edge.
    Smcm(std::size_t n_nodes, const std::vector<Edge>& directed, const std::vector<Edge>& bidirected,
         std::vector<std::string> names = {});

    std::size_t size() const { return parents_.size(); }
    NodeSet nodes() const { return NodeSet::range(size()); }

    NodeSet parents(NodeId v) const { return parents_[checked(v)]; }
    NodeSet children(NodeId v) const { return children_[checked(v)]; }
    NodeSet siblings(NodeId v) const { return siblings_[checked(v)]; }

    // Whole adjacency tables, indexed by node.
    const std::vector<NodeSet>& parent_sets() const { return parents_; }
    const std::vector<NodeSet>& child_sets() const { return children_; }
    const std::vector<NodeSet>& sibling_sets() const { return siblings_; }
    const std::vector<NodeSet>& ancestor_sets() const { return ancestors_; }

    bool has_directed(NodeId from, NodeId to) const { return children(from).contains(to); }
    bool has_bidirected(NodeId a, NodeId b) const { return siblings(a).contains(b); }

    // Sorted by (from, to).
    std::vector<Edge> directed_edges() const;
    // Sorted with from < to.
    std::vector<Edge> bidirected_edges() const;
    std::size_t edge_count() const;

    const std::string& name(NodeId v) const { return names_[checked(v)]; }
    const std::vector<std::string>& names() const { return names_; }
    std::optional<NodeId> find(const std::string& name) const;

    const std::optional<Roles>& roles() const { return roles_; }
    const Roles& require_roles() const;

    // Validates that the children set is exactly the treatment's children.
    Smcm with_roles(const Roles& roles) const;
    Smcm without_roles() const;

    // Set overloads return the union over members, so a member of vs appears
    // only if it is an ancestor (descendant) of another member.
    NodeSet ancestors(NodeId v) const;
    NodeSet ancestors(NodeSet vs) const;
    NodeSet descendants(NodeId v) const;
    NodeSet descendants(NodeSet vs) const;

    // Node ids ordered so that every parent precedes its children.
    const std::vector<NodeId>& topological_order() const { return topo_; }

    bool operator==(const Smcm& o) const;

private:
    NodeId checked(NodeId v) const {
        if (v >= size()) throw std::out_of_range("node id " + std::to_string(v) + " out of range");
        return v;
    }

    std::vector<NodeSet> parents_;
    std::vector<NodeSet> children_;
    std::vector<NodeSet> siblings_;
    std::vector<std::string> names_;
    std::vector<NodeId> topo_;
    // Proper ancestors and descendants of each node.
    std::vector<NodeSet> ancestors_;
    std::vector<NodeSet> descendants_;
    std::optional<Roles> roles_;
};

struct SeparationQuery {
    NodeSet x;
    NodeSet y;
    NodeSet given;
};

// True iff every path between a node of q.x and a node of q.y is blocked by
// q.given, where a bidirected endpoint counts as an arrowhead. Empty x or y is
// vacuously separated. Throws std::invalid_argument for overlapping sets and
// std::out_of_range for unknown nodes.
bool m_separated(const Smcm& g, const SeparationQuery& q);

// Nodes outside sources ∪ given that are m-connected to some source given
// `given`. Sources must not intersect `given`.
NodeSet m_reachable(const Smcm& g, NodeSet sources, NodeSet given);

// Drops every directed edge into `s` and every bidirected edge touching `s`.
Smcm remove_incoming(const Smcm& g, NodeSet s);
// Drops every directed edge out of `s`.
Smcm remove_outgoing(const Smcm& g, NodeSet s);
// Appends a node F with F -> v for each v in s. Returns the graph and F.
std::pair<Smcm, NodeId> add_regime_node(const Smcm& g, NodeSet s, const std::string& name = "F");

// Which of the three structural assumptions fail for the graph's roles.
struct AssumptionReport {
    bool outcome_descends_from_treatment = false;
    bool treatment_outcome_confounded = false;
    bool children_complete = false;
    bool all() const { return outcome_descends_from_treatment && treatment_outcome_confounded && children_complete; }
};

AssumptionReport check_assumptions(const Smcm& g, const Roles& roles);

}  // namespace frontdoor

#endif  // FRONTDOOR_SMCM_HPP
