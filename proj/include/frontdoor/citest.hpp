#ifndef FRONTDOOR_CITEST_HPP
#define FRONTDOOR_CITEST_HPP

#include <frontdoor/data_table.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <string>

namespace frontdoor {

enum class CiKind { fisher_z, rcot, permutation };

std::string to_string(CiKind k);
CiKind parse_ci_kind(const std::string& s);

struct RcotConfig {
    std::size_t n_features_xy = 5;
    std::size_t n_features_cond = 25;
    // Rows used for the median-distance bandwidth.
    std::size_t bandwidth_rows = 500;
    double ridge = 1e-10;
};

struct CiMethod {
    CiKind kind = CiKind::rcot;
    RcotConfig rcot;
    std::size_t permutations = 199;
    std::size_t stratum_size = 10;
    std::uint64_t seed = 0;

    void validate() const;
};

struct CiResult {
    double statistic = 0;
    double p_value = 1;
    CiKind method = CiKind::rcot;
    std::size_t n_used = 0;
    // x or y has no variation; p_value is 1 by convention.
    bool degenerate = false;
    // The conditioning design was singular and only the ridge kept it solvable.
    bool ridge_floor = false;
};

inline constexpr std::size_t min_ci_rows = 30;

// Tests x ⊥ y | cond on the rows of the given matrices (one column per
// coordinate, equal row counts). An empty x or y is vacuously independent.
// Throws std::invalid_argument with fewer than min_ci_rows rows.
CiResult test_ci(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, const Eigen::MatrixXd& cond,
                 const CiMethod& method);

// Median-heuristic bandwidths keyed by column list. The bandwidth of a
// column set depends only on the table, so one cache may serve every test on
// the same table. Thread-safe.
class BandwidthCache {
public:
    double get(const ColumnList& cols, const std::function<double()>& compute);

private:
    std::mutex mutex_;
    std::map<ColumnList, double> values_;
};

// With a cache, results are identical to the uncached call.
CiResult test_ci(const DataTable& data, const ColumnList& x, const ColumnList& y, const ColumnList& cond,
                 const CiMethod& method, BandwidthCache* cache = nullptr);

CiResult test_ci_unconditional(const DataTable& data, const ColumnList& x, const ColumnList& y,
                               const CiMethod& method);

}  // namespace frontdoor

#endif  // FRONTDOOR_CITEST_HPP
