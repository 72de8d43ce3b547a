#ifndef FRONTDOOR_EXPERIMENT_HPP
#define FRONTDOOR_EXPERIMENT_HPP

#include <frontdoor/search.hpp>
#include <frontdoor/sem.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace frontdoor {

// Node names of the two-stage graph Z1 -> {T, B}, T -> B -> Z2 -> Y.
struct TwoStageNodes {
    std::string z1 = "Z1";
    std::string z2 = "Z2";
};

struct SimulationSpec {
    Smcm graph;  // must carry roles
    std::size_t n_samples = 10000;
    std::size_t n_runs = 10;
    std::uint64_t seed = 0;
    double noise_scale = 0.1;
    bool algorithm1 = true;
    std::optional<TwoStageNodes> two_stage;
    std::size_t two_stage_draws = 10000;
    SearchConfig search;  // search.seed is replaced per run

    void validate() const;
};

// One synthetic run: a fresh SEM model and data set. Estimates that were not
// requested, or a failed search, are left empty.
struct SimulationRow {
    std::size_t run = 0;
    double true_ate = 0;
    double naive = 0;
    bool searched = false;
    std::optional<double> ate_z;
    std::optional<double> ate_s;
    std::size_t runs_succeeded = 0;
    std::optional<double> two_stage;
};

// Run k draws model and data from make_stream(seed, k) and searches with seed
// derive_seed(seed, k). Rows are in run order for any thread count.
std::vector<SimulationRow> simulate(const SimulationSpec& spec);

struct SimulationSummary {
    std::size_t runs = 0;
    std::size_t search_failures = 0;
    double naive_error = 0;         // over all runs
    double naive_error_paired = 0;  // over runs where the search succeeded
    std::optional<double> ate_z_error;
    std::optional<double> ate_s_error;
    std::optional<double> two_stage_error;
};

// Mean absolute errors against true_ate.
SimulationSummary summarize(const std::vector<SimulationRow>& rows);

}  // namespace frontdoor

#endif  // FRONTDOOR_EXPERIMENT_HPP
