#ifndef FRONTDOOR_ENSEMBLE_HPP
#define FRONTDOOR_ENSEMBLE_HPP

#include <frontdoor/rng.hpp>
#include <frontdoor/smcm.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace frontdoor {

enum class Variant { no_grandparent, no_parent };

std::string to_string(Variant v);
Variant parse_variant(const std::string& s);

struct EnsembleParams {
    std::size_t p = 10;
    double d = 2;
    double q = 0;
    Variant variant = Variant::no_grandparent;
    std::optional<std::size_t> max_subset_size = 5;
    std::uint64_t seed = 0;
    std::size_t max_redraws = 1000;

    // Throws std::invalid_argument unless p >= 4, 0 < d <= p/2, 0 <= q <= p.
    void validate() const;
};

class ResampleExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SampledGraph {
    Smcm graph;
    // Draws discarded because Y had no eligible treatment ancestor.
    std::size_t redraws = 0;
};

// One raw draw of the edge process, before roles are chosen.
Smcm draw_mixed_graph(const EnsembleParams& params, Rng& rng);

SampledGraph sample_smcm(const EnsembleParams& params, Rng& rng);

// Z = Z_i ⊎ Z_o.
struct Witness {
    NodeSet z;
    NodeSet z_i;
    NodeSet z_o;
    bool operator==(const Witness&) const = default;
};

struct ScanOutcome {
    bool success = false;
    std::optional<Witness> witness;
};

// Candidate pool V \ ({T, Y} ∪ B).
NodeSet candidate_pool(const Smcm& g);

// The three conditions for one candidate partition.
bool holds_eq4(const Smcm& g, NodeSet z);
bool holds_eq5(const Smcm& g, NodeSet z_i, NodeSet z_o);

// First witness with Z ordered by size then lexicographically, and Z_o ranked
// the same way within Z.
ScanOutcome scan_graph(const Smcm& g, std::optional<std::size_t> max_size = std::nullopt);

// Every witness, in the same canonical order.
std::vector<Witness> scan_all_witnesses(const Smcm& g, std::optional<std::size_t> max_size = std::nullopt);

struct EnsembleResult {
    std::size_t n_graphs = 0;
    std::size_t successes_exhaustive = 0;
    std::size_t successes_bounded = 0;
    std::size_t redraws = 0;
    // Graphs abandoned after max_redraws; counted as neither success.
    std::size_t exhausted = 0;
};

// Graph k uses stream (params.seed, k). Output is independent of `threads`.
EnsembleResult run_ensemble(const EnsembleParams& params, std::size_t n_graphs, std::size_t threads = 0);

}  // namespace frontdoor

#endif  // FRONTDOOR_ENSEMBLE_HPP
