#ifndef FRONTDOOR_SEARCH_HPP
#define FRONTDOOR_SEARCH_HPP

#include <frontdoor/citest.hpp>
#include <frontdoor/data_table.hpp>
#include <frontdoor/smcm.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

namespace frontdoor {

// Answers "x ⊥ y | given" over variable ids with a p-value. Larger means
// more compatible with independence; empty x or y gives 1.
class IndependenceOracle {
public:
    virtual ~IndependenceOracle() = default;
    virtual double p_value(NodeSet x, NodeSet y, NodeSet given) const = 0;
};

// Finite-sample CI tests on a table's variables. Each query gets its own seed
// hashed from (method.seed, x, y, given), so answers do not depend on the
// order in which queries are made.
class DataOracle : public IndependenceOracle {
public:
    DataOracle(const DataTable& data, CiMethod method)
        : data_(data), method_(method), bandwidths_(std::make_unique<BandwidthCache>()) {}
    double p_value(NodeSet x, NodeSet y, NodeSet given) const override;
    CiResult test(NodeSet x, NodeSet y, NodeSet given) const;

private:
    const DataTable& data_;
    CiMethod method_;
    std::unique_ptr<BandwidthCache> bandwidths_;
};

// Exact answers from a known graph: 1 if m-separated, else 0.
class SeparationOracle : public IndependenceOracle {
public:
    explicit SeparationOracle(Smcm g) : g_(std::move(g)) {}
    double p_value(NodeSet x, NodeSet y, NodeSet given) const override;

private:
    Smcm g_;
};

struct AdmissibleSet {
    NodeSet z;
    NodeSet z_i;
    NodeSet z_o;
    double p_eq4 = 1;
    double p_eq5i = 1;
    double p_eq5ii = 1;

    double min_p() const { return std::min({p_eq4, p_eq5i, p_eq5ii}); }
    bool same_sets(const AdmissibleSet& o) const { return z == o.z && z_i == o.z_i && z_o == o.z_o; }
};

// Variables other than treatment, outcome and children.
NodeSet candidate_pool(std::size_t n_variables, const Roles& roles);

// Every (Z, Z_i, Z_o) over `pool` with all three p-values above p_v, in
// canonical order: Z by size then lexicographically, and Z_o within Z the
// same way. Z candidates are spread over `threads` workers (0 = default).
std::vector<AdmissibleSet> enumerate_admissible(const IndependenceOracle& oracle, const Roles& roles, NodeSet pool,
                                                std::optional<std::size_t> max_size, double p_v,
                                                std::size_t threads = 1);

struct SearchConfig {
    std::size_t n_r = 100;
    double p_v = 0.1;
    std::optional<std::size_t> max_subset_size;
    double split_fraction = 0.5;
    CiMethod ci_method;
    std::uint64_t seed = 0;
    std::size_t threads = 0;

    void validate() const;
};

// One accepted candidate's estimates on the held-out rows.
struct Contribution {
    std::size_t run = 0;
    AdmissibleSet set;
    double ate_z = 0;
    double ate_s = 0;
};

struct AteReport {
    double ate_z = 0;
    double ate_s = 0;
    std::size_t runs_succeeded = 0;               // c1
    std::vector<std::size_t> candidates_per_run;  // c2 of each run
    bool failure = true;
    std::vector<std::vector<AdmissibleSet>> witnesses;  // per run
    std::vector<Contribution> contributions;            // run-major, canonical order
};

// Repeated train/test splits; CI tests on the train rows, plug-in estimates
// on the test rows. Each accepted candidate adds its adjust-for-Z and
// adjust-for-(B, Z_i) estimates; a run's average is over its candidates and
// the report averages over the runs that accepted any. Treatment must be a
// single binary column.
AteReport run_algorithm1(const DataTable& data, const Roles& roles, const SearchConfig& cfg);

// Random split of row indices: the first part has round(fraction * rows)
// rows, both parts non-empty.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_rows(std::size_t rows, double fraction,
                                                                         std::uint64_t seed);

enum class CiCheck { eq4, eq5i, eq5ii };
const char* to_string(CiCheck c);

struct BootstrapResult {
    // samples[b] holds the eq4, eq5i, eq5ii p-values of bootstrap b.
    std::vector<std::array<double, 3>> samples;
    std::array<double, 3> median{};

    double min_median() const { return std::min({median[0], median[1], median[2]}); }
};

// Rows (sorted) and CI seed of bootstrap b.
struct BootstrapDraw {
    std::vector<std::size_t> rows;
    std::uint64_t ci_seed = 0;
};
BootstrapDraw bootstrap_draw(std::size_t rows, std::uint64_t seed, std::size_t b);

// n_boot resamples of floor(rows / 2) rows without replacement, recomputing
// the three p-values of the witness on each.
BootstrapResult bootstrap_pvalues(const DataTable& data, const AdmissibleSet& witness, const Roles& roles,
                                  std::size_t n_boot, const SearchConfig& cfg);

// Index of the witness with the largest smallest-median p-value; ties go to
// the smaller Z, then canonical order.
std::size_t select_witness(const std::vector<AdmissibleSet>& witnesses, const std::vector<BootstrapResult>& boots);

// Distinct accepted (Z, Z_i, Z_o) across the runs of a report, in canonical
// order, with the number of runs that accepted each. p-values are from the
// first accepting run.
struct WitnessCount {
    AdmissibleSet set;
    std::size_t runs = 0;
};
std::vector<WitnessCount> distinct_witnesses(const AteReport& report);

struct WitnessSelection {
    std::vector<WitnessCount> candidates;
    std::vector<BootstrapResult> bootstraps;  // parallel to candidates
    std::size_t selected = 0;
};

// Bootstraps every distinct witness of the report on `data` and picks one with
// select_witness. Requires a report that did not fail.
WitnessSelection select_by_bootstrap(const DataTable& data, const Roles& roles, const AteReport& report,
                                     std::size_t n_boot, const SearchConfig& cfg);

}  // namespace frontdoor

#endif  // FRONTDOOR_SEARCH_HPP
