#include <frontdoor/adjust.hpp>
#include <frontdoor/parallel.hpp>
#include <frontdoor/rng.hpp>
#include <frontdoor/search.hpp>

#include <map>
#include <numeric>
#include <stdexcept>

namespace frontdoor {

namespace {

std::uint64_t query_seed(std::uint64_t base, NodeSet x, NodeSet y, NodeSet given) {
    return derive_seed(derive_seed(derive_seed(base, x.bits()), y.bits()), given.bits());
}

// Separate seed families for splits, per-run CI tests and bootstraps.
constexpr std::uint64_t split_tag = 0x73706c6974ULL;
constexpr std::uint64_t ci_tag = 0x6369ULL;
constexpr std::uint64_t boot_tag = 0x626f6f74ULL;

}  // namespace

CiResult DataOracle::test(NodeSet x, NodeSet y, NodeSet given) const {
    CiMethod m = method_;
    m.seed = query_seed(method_.seed, x, y, given);
    return test_ci(data_, data_.columns_of(x), data_.columns_of(y), data_.columns_of(given), m,
                   bandwidths_.get());
}

double DataOracle::p_value(NodeSet x, NodeSet y, NodeSet given) const {
    if (x.empty() || y.empty()) return 1.0;
    return test(x, y, given).p_value;
}

double SeparationOracle::p_value(NodeSet x, NodeSet y, NodeSet given) const {
    return m_separated(g_, {x, y, given}) ? 1.0 : 0.0;
}

NodeSet candidate_pool(std::size_t n_variables, const Roles& roles) {
    return NodeSet::range(n_variables) - roles.children - NodeSet::singleton(roles.treatment) -
           NodeSet::singleton(roles.outcome);
}

std::vector<AdmissibleSet> enumerate_admissible(const IndependenceOracle& oracle, const Roles& roles, NodeSet pool,
                                                std::optional<std::size_t> max_size, double p_v,
                                                std::size_t threads) {
    const NodeSet t = NodeSet::singleton(roles.treatment);
    const NodeSet y = NodeSet::singleton(roles.outcome);
    if (pool.intersects(t | y | roles.children)) throw std::invalid_argument("pool overlaps the roles");

    std::vector<NodeSet> zs;
    for_each_subset_by_size(pool, max_size, [&](NodeSet z) {
        zs.push_back(z);
        return true;
    });
    std::vector<std::vector<AdmissibleSet>> per_z(zs.size());
    parallel_for(
        zs.size(),
        [&](std::size_t k) {
            const NodeSet z = zs[k];
            const double p4 = oracle.p_value(roles.children, y, z | t);
            if (!(p4 > p_v)) return;
            for_each_subset_by_size(z, std::nullopt, [&](NodeSet z_o) {
                AdmissibleSet a{z, z - z_o, z_o, p4, 1.0, 1.0};
                a.p_eq5i = oracle.p_value(a.z_i, t, {});
                if (!(a.p_eq5i > p_v)) return true;
                a.p_eq5ii = oracle.p_value(z_o, t, roles.children | a.z_i);
                if (a.p_eq5ii > p_v) per_z[k].push_back(a);
                return true;
            });
        },
        threads);
    std::vector<AdmissibleSet> out;
    for (auto& v : per_z) out.insert(out.end(), v.begin(), v.end());
    return out;
}

void SearchConfig::validate() const {
    if (n_r < 1) throw std::invalid_argument("n_r must be at least 1");
    if (!(p_v > 0 && p_v < 1)) throw std::invalid_argument("p_v must lie in (0, 1)");
    if (!(split_fraction > 0 && split_fraction < 1)) throw std::invalid_argument("split_fraction must lie in (0, 1)");
    ci_method.validate();
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> split_rows(std::size_t rows, double fraction,
                                                                         std::uint64_t seed) {
    if (rows < 2) throw std::invalid_argument("need at least two rows to split");
    std::vector<std::size_t> idx(rows);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    for (std::size_t i = rows - 1; i > 0; --i) std::swap(idx[i], idx[uniform_index(rng, i + 1)]);
    auto k = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(rows)));
    k = std::clamp<std::size_t>(k, 1, rows - 1);
    std::vector<std::size_t> first(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
    std::vector<std::size_t> second(idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end());
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());
    return {first, second};
}

namespace {

std::size_t treatment_column(const DataTable& data, const Roles& roles) {
    const auto& v = data.variable(roles.treatment);
    if (v.columns.size() != 1) throw std::invalid_argument("treatment must be a single column");
    treated_fraction(data, v.columns.front());
    return v.columns.front();
}

}  // namespace

AteReport run_algorithm1(const DataTable& data, const Roles& roles, const SearchConfig& cfg) {
    cfg.validate();
    const std::size_t nv = data.variables().size();
    if (roles.treatment >= nv || roles.outcome >= nv || !roles.children.is_subset_of(NodeSet::range(nv)))
        throw std::out_of_range("role variable out of range");
    if (roles.children.empty()) throw std::invalid_argument("children set is empty");
    if (data.variable(roles.outcome).columns.size() != 1) throw std::invalid_argument("outcome must be a single column");
    const std::size_t t_col = treatment_column(data, roles);
    const std::size_t y_col = data.variable(roles.outcome).columns.front();
    const NodeSet pool = candidate_pool(nv, roles);

    struct RunResult {
        std::vector<AdmissibleSet> accepted;
        std::vector<Contribution> contributions;
    };
    std::vector<RunResult> runs(cfg.n_r);
    parallel_for(
        cfg.n_r,
        [&](std::size_t r) {
            const auto [train_rows, test_rows] =
                split_rows(data.rows(), cfg.split_fraction, derive_seed(cfg.seed ^ split_tag, r));
            const DataTable train = data.take_rows(train_rows);
            const DataTable test = data.take_rows(test_rows);
            CiMethod method = cfg.ci_method;
            method.seed = derive_seed(cfg.seed ^ ci_tag, r);
            const DataOracle oracle(train, method);
            auto& out = runs[r];
            out.accepted = enumerate_admissible(oracle, roles, pool, cfg.max_subset_size, cfg.p_v, 1);
            if (out.accepted.empty()) return;

            const double p_t = treated_fraction(train, t_col);
            // The Z regression is shared by all partitions of the same Z.
            std::map<std::uint64_t, double> by_z;
            for (const auto& a : out.accepted) {
                auto it = by_z.find(a.z.bits());
                if (it == by_z.end()) {
                    const auto cols = train.columns_of(a.z);
                    const auto model = fit_outcome_regression(train, y_col, cols, t_col);
                    it = by_z.emplace(a.z.bits(), ate_plugin(test, model, cols, t_col, p_t)).first;
                }
                const auto s_cols = train.columns_of(roles.children | a.z_i);
                const auto s_model = fit_outcome_regression(train, y_col, s_cols, t_col);
                out.contributions.push_back({r, a, it->second, ate_plugin(test, s_model, s_cols, t_col, p_t)});
            }
        },
        cfg.threads);

    AteReport report;
    double sum_z = 0;
    double sum_s = 0;
    for (auto& run : runs) {
        const std::size_t c2 = run.contributions.size();
        report.candidates_per_run.push_back(c2);
        report.witnesses.push_back(std::move(run.accepted));
        if (c2 == 0) continue;
        double rz = 0;
        double rs = 0;
        for (const auto& c : run.contributions) {
            rz += c.ate_z;
            rs += c.ate_s;
        }
        sum_z += rz / static_cast<double>(c2);
        sum_s += rs / static_cast<double>(c2);
        ++report.runs_succeeded;
        report.contributions.insert(report.contributions.end(), run.contributions.begin(), run.contributions.end());
    }
    report.failure = report.runs_succeeded == 0;
    if (!report.failure) {
        report.ate_z = sum_z / static_cast<double>(report.runs_succeeded);
        report.ate_s = sum_s / static_cast<double>(report.runs_succeeded);
    }
    return report;
}

const char* to_string(CiCheck c) {
    switch (c) {
        case CiCheck::eq4: return "children_outcome";
        case CiCheck::eq5i: return "inner_treatment";
        case CiCheck::eq5ii: return "outer_treatment";
    }
    return "?";
}

BootstrapDraw bootstrap_draw(std::size_t rows, std::uint64_t seed, std::size_t b) {
    Rng rng = make_stream(seed ^ boot_tag, b);
    const std::size_t half = rows / 2;
    std::vector<std::size_t> idx(rows);
    std::iota(idx.begin(), idx.end(), 0);
    // partial Fisher-Yates: the first `half` slots are the sample
    for (std::size_t i = 0; i < half; ++i) std::swap(idx[i], idx[i + uniform_index(rng, rows - i)]);
    idx.resize(half);
    std::sort(idx.begin(), idx.end());
    return {std::move(idx), derive_seed(seed ^ boot_tag ^ ci_tag, b)};
}

BootstrapResult bootstrap_pvalues(const DataTable& data, const AdmissibleSet& w, const Roles& roles,
                                  std::size_t n_boot, const SearchConfig& cfg) {
    if (n_boot < 1) throw std::invalid_argument("n_boot must be at least 1");
    if (!w.z_i.is_subset_of(w.z) || (w.z_i | w.z_o) != w.z || w.z_i.intersects(w.z_o))
        throw std::invalid_argument("witness is not a partition of z");
    const NodeSet t = NodeSet::singleton(roles.treatment);
    const NodeSet y = NodeSet::singleton(roles.outcome);
    BootstrapResult out;
    out.samples.resize(n_boot);
    parallel_for(
        n_boot,
        [&](std::size_t b) {
            const auto draw = bootstrap_draw(data.rows(), cfg.seed, b);
            const DataTable sub = data.take_rows(draw.rows);
            CiMethod method = cfg.ci_method;
            method.seed = draw.ci_seed;
            const DataOracle oracle(sub, method);
            out.samples[b] = {oracle.p_value(roles.children, y, w.z | t), oracle.p_value(w.z_i, t, {}),
                              oracle.p_value(w.z_o, t, roles.children | w.z_i)};
        },
        cfg.threads);

    for (std::size_t k = 0; k < 3; ++k) {
        std::vector<double> v;
        for (const auto& s : out.samples) v.push_back(s[k]);
        std::sort(v.begin(), v.end());
        const std::size_t m = v.size();
        out.median[k] = m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
    }
    return out;
}

namespace {

bool canonical_less(const AdmissibleSet& a, const AdmissibleSet& b) {
    if (a.z.size() != b.z.size()) return a.z.size() < b.z.size();
    if (a.z != b.z) return lexicographic_less(a.z, b.z);
    if (a.z_o.size() != b.z_o.size()) return a.z_o.size() < b.z_o.size();
    return lexicographic_less(a.z_o, b.z_o);
}

}  // namespace

std::size_t select_witness(const std::vector<AdmissibleSet>& witnesses, const std::vector<BootstrapResult>& boots) {
    if (witnesses.empty()) throw std::invalid_argument("no witnesses to select from");
    if (boots.size() != witnesses.size()) throw std::invalid_argument("one bootstrap result per witness required");
    std::size_t best = 0;
    for (std::size_t k = 1; k < witnesses.size(); ++k) {
        const double a = boots[k].min_median();
        const double b = boots[best].min_median();
        if (a > b || (a == b && canonical_less(witnesses[k], witnesses[best]))) best = k;
    }
    return best;
}

std::vector<WitnessCount> distinct_witnesses(const AteReport& report) {
    std::vector<WitnessCount> out;
    for (const auto& run : report.witnesses)
        for (const auto& a : run) {
            auto it = std::find_if(out.begin(), out.end(), [&](const WitnessCount& w) { return w.set.same_sets(a); });
            if (it == out.end())
                out.push_back({a, 1});
            else
                ++it->runs;
        }
    std::stable_sort(out.begin(), out.end(),
                     [](const WitnessCount& a, const WitnessCount& b) { return canonical_less(a.set, b.set); });
    return out;
}

WitnessSelection select_by_bootstrap(const DataTable& data, const Roles& roles, const AteReport& report,
                                     std::size_t n_boot, const SearchConfig& cfg) {
    if (report.failure) throw std::invalid_argument("report has no witnesses");
    WitnessSelection sel;
    sel.candidates = distinct_witnesses(report);
    std::vector<AdmissibleSet> sets;
    for (const auto& c : sel.candidates) {
        sets.push_back(c.set);
        sel.bootstraps.push_back(bootstrap_pvalues(data, c.set, roles, n_boot, cfg));
    }
    sel.selected = select_witness(sets, sel.bootstraps);
    return sel;
}

}  // namespace frontdoor
