// Acceptance gate. `acceptance <id>...` runs the listed criteria (default:
// all) and prints one PASS/FAIL/SKIP line per criterion. Exit status is 0 when
// every selected criterion passes, 77 when the only non-passing criteria were
// skipped for missing data, and 1 otherwise.

#include <frontdoor/adjust.hpp>
#include <frontdoor/citest.hpp>
#include <frontdoor/ensemble.hpp>
#include <frontdoor/experiment.hpp>
#include <frontdoor/fixtures.hpp>
#include <frontdoor/ingest.hpp>
#include <frontdoor/search.hpp>
#include <frontdoor/sem.hpp>

#include "support/discrete_scm.hpp"
#include "support/path_oracle.hpp"
#include "support/random_graphs.hpp"
#include "support/stats.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <unistd.h>

using namespace frontdoor;
using Eigen::MatrixXd;
namespace fs = std::filesystem;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
    Status status;
    std::string detail;
};

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::pass : Status::fail, std::move(detail)}; }

std::vector<NodeId> ids(NodeSet s) { return {s.begin(), s.end()}; }

double max_tv(const InterventionalLaw& a, const InterventionalLaw& b) {
    return std::max(total_variation(a[0], b[0]), total_variation(a[1], b[1]));
}

// ---- 1: m-separation against path enumeration ------------------------------

constexpr std::size_t kExhaustiveNodes = 6;
constexpr std::size_t kExhaustiveEdges = 8;
constexpr std::size_t kRandomGraphs = 500;
constexpr std::size_t kRandomNodes = 8;

// Singleton queries x, y with every conditioning set drawn from the rest.
std::size_t mismatches_small(const Smcm& g) {
    const std::size_t n = g.size();
    std::size_t bad = 0;
    for (NodeId x = 0; x + 1 < n; ++x) {
        const auto open = oracle::open_given_masks(g, x);
        for (NodeId y = x + 1; y < n; ++y)
            for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
                if ((mask >> x & 1) || (mask >> y & 1)) continue;
                const bool sep = m_separated(g, {NodeSet::singleton(x), NodeSet::singleton(y), NodeSet(mask)});
                if (sep == static_cast<bool>(open[y] >> mask & 1)) ++bad;
            }
    }
    return bad;
}

Outcome criterion1() {
    std::size_t graphs = 0;
    std::size_t bad = 0;
    // Every forward-labeled SMCM on 2..6 nodes with at most 8 edges and no
    // isolated node. An isolated node lies on no path, so adding one never
    // changes another query.
    for (std::size_t n = 2; n <= kExhaustiveNodes; ++n) {
        std::vector<Edge> pairs;
        for (NodeId j = 1; j < n; ++j)
            for (NodeId i = 0; i < j; ++i) pairs.push_back({i, j});
        std::vector<Edge> d;
        std::vector<Edge> b;
        std::vector<int> degree(n, 0);
        std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t k, std::size_t edges) {
            if (k == pairs.size()) {
                for (int deg : degree)
                    if (deg == 0) return;
                ++graphs;
                bad += mismatches_small(Smcm(n, d, b));
                return;
            }
            const auto [i, j] = pairs[k];
            rec(k + 1, edges);
            if (edges >= kExhaustiveEdges) return;
            ++degree[i];
            ++degree[j];
            d.push_back({i, j});
            rec(k + 1, edges + 1);
            b.push_back({i, j});
            if (edges + 2 <= kExhaustiveEdges) rec(k + 1, edges + 2);
            d.pop_back();
            rec(k + 1, edges + 1);
            b.pop_back();
            --degree[i];
            --degree[j];
        };
        rec(0, 0);
    }

    std::size_t random_bad = 0;
    for (std::size_t s = 0; s < kRandomGraphs; ++s) {
        Rng rng = make_stream(0xc1, s);
        const Smcm g = testkit::random_smcm(kRandomNodes, 0.3, 0.15, rng);
        for (NodeId x = 0; x < kRandomNodes; ++x)
            for (NodeId y = x + 1; y < kRandomNodes; ++y)
                for (std::uint64_t mask = 0; mask < (1ULL << kRandomNodes); ++mask) {
                    if ((mask >> x & 1) || (mask >> y & 1)) continue;
                    const NodeSet z(mask);
                    const bool sep = m_separated(g, {NodeSet::singleton(x), NodeSet::singleton(y), z});
                    if (sep == oracle::m_connected(g, x, y, z)) ++random_bad;
                }
    }
    return verdict(bad == 0 && random_bad == 0,
                   fmt::format("{} exhaustive graphs, {} mismatches; {} random {}-node graphs, {} mismatches", graphs,
                               bad, kRandomGraphs, kRandomNodes, random_bad));
}

// ---- 2, 3: ensemble success counts ----------------------------------------

constexpr int kTable1Band = 15;
constexpr int kTable2Band = 8;
constexpr std::size_t kEnsembleGraphs = 100;
constexpr std::uint64_t kEnsembleSeed = 7;

struct TableCell {
    std::size_t p;
    double d;
    double q;
    int exhaustive;
    int bounded;
};

// Reference success counts (exhaustive, |Z| <= 5) for the no-grandparent ensemble.
const std::vector<TableCell> kTable1 = {
    {10, 2, 0, 43, 43}, {10, 3, 0, 20, 20}, {10, 4, 0, 21, 21}, {15, 2, 0, 27, 26}, {15, 3, 0, 9, 9},
    {15, 4, 0, 4, 2},   {10, 2, 1, 6, 6},   {10, 3, 1, 4, 4},   {10, 4, 1, 5, 5},   {15, 2, 1, 9, 9},
    {15, 3, 1, 10, 9},  {15, 4, 1, 0, 0},
};

Outcome check_cells(const std::vector<TableCell>& cells, Variant variant, int band) {
    bool ok = true;
    std::string detail;
    for (const auto& c : cells) {
        EnsembleParams params;
        params.p = c.p;
        params.d = c.d;
        params.q = c.q;
        params.variant = variant;
        params.seed = kEnsembleSeed;
        const auto r = run_ensemble(params, kEnsembleGraphs);
        const int ex = static_cast<int>(r.successes_exhaustive);
        const int bo = static_cast<int>(r.successes_bounded);
        const bool cell_ok = std::abs(ex - c.exhaustive) <= band && std::abs(bo - c.bounded) <= band;
        ok = ok && cell_ok;
        detail += fmt::format("{}(p={},d={},q={}: ({},{}) vs ({},{}))", detail.empty() ? "" : " ", c.p, c.d, c.q, ex,
                              bo, c.exhaustive, c.bounded);
    }
    return verdict(ok, fmt::format("band +-{}: {}", band, detail));
}

Outcome criterion2() { return check_cells(kTable1, Variant::no_grandparent, kTable1Band); }

Outcome criterion3() { return check_cells({{10, 2, 0, 6, 6}}, Variant::no_parent, kTable2Band); }

// ---- 4: exact discrete evaluation -----------------------------------------

constexpr std::size_t kDiscreteFixtures = 20;
constexpr double kExactTv = 1e-10;
constexpr double kViolationTv = 1e-3;

Outcome criterion4() {
    std::vector<std::pair<std::string, Smcm>> graphs;
    for (const auto& name : fixture_names()) {
        const Smcm g = load_fixture(name);
        if (check_assumptions(g, *g.roles()).all() && scan_graph(g).success) graphs.emplace_back(name, g);
    }
    // Top up with ensemble graphs that meet the same premises.
    EnsembleParams params;
    params.p = 8;
    params.d = 2;
    params.q = 0.5;
    params.seed = 0xc4;
    for (std::size_t k = 0; graphs.size() < kDiscreteFixtures + 4 && k < 1000; ++k) {
        Rng rng = make_stream(params.seed, k);
        const Smcm g = sample_smcm(params, rng).graph;
        if (g.bidirected_edges().size() > 10) continue;
        if (check_assumptions(g, *g.roles()).all() && scan_graph(g).success)
            graphs.emplace_back(fmt::format("ensemble{}", k), g);
    }

    double worst = 0;
    std::size_t checked = 0;
    for (std::size_t k = 0; k < graphs.size(); ++k) {
        const auto& [name, g] = graphs[k];
        const auto& r = *g.roles();
        const auto w = *scan_graph(g).witness;
        Rng rng = make_stream(0xc4, 1000 + k);
        const auto scm = oracle::DiscreteScm::random(g, rng);
        const auto truth = scm.interventional(r.treatment, r.outcome);
        const auto ev = eval_generalized_frontdoor_discrete(scm.observational(), r.treatment, r.outcome,
                                                            ids(r.children), ids(w.z), ids(w.z_i));
        worst = std::max({worst, max_tv(ev.by_z, truth), max_tv(ev.by_s, truth)});
        ++checked;
    }

    const Smcm fig6 = load_fixture("fig6");
    const auto& r6 = *fig6.roles();
    const auto w6 = *scan_graph(fig6).witness;
    const auto scm6 = oracle::fig6_tables(fig6);
    const auto ev6 = eval_generalized_frontdoor_discrete(scm6.observational(), r6.treatment, r6.outcome,
                                                         ids(r6.children), ids(w6.z), ids(w6.z_i));
    const double gap = max_tv(ev6.by_z, scm6.interventional(r6.treatment, r6.outcome));
    return verdict(checked >= kDiscreteFixtures && worst < kExactTv && gap > kViolationTv,
                   fmt::format("{} graphs, worst TV {:.3g} (< {:g}); violated-assumption graph TV {:.4f} (> {:g})",
                               checked, worst, kExactTv, gap, kViolationTv));
}

// ---- 5: counterexample to the plain front-door formula --------------------

constexpr std::size_t kC5Runs = 50;
constexpr std::size_t kC5Samples = 50000;
constexpr double kC5NaiveLo = 0.30;
constexpr double kC5NaiveHi = 0.46;
constexpr double kC5TwoStageMax = 0.1;

Outcome criterion5() {
    SimulationSpec spec;
    spec.graph = load_fixture("fig3left");
    spec.n_samples = kC5Samples;
    spec.n_runs = kC5Runs;
    spec.seed = 0xc5;
    spec.algorithm1 = false;
    spec.two_stage = TwoStageNodes{};
    const auto s = summarize(simulate(spec));
    const bool naive_ok = s.naive_error >= kC5NaiveLo && s.naive_error <= kC5NaiveHi;
    const bool two_ok = *s.two_stage_error < kC5TwoStageMax;
    return verdict(naive_ok && two_ok,
                   fmt::format("naive error {:.4f} ({} [{}, {}]); two-stage error {:.4f} ({} < {})", s.naive_error,
                               naive_ok ? "in" : "NOT in", kC5NaiveLo, kC5NaiveHi, *s.two_stage_error,
                               two_ok ? "ok" : "NOT", kC5TwoStageMax));
}

// ---- 6: subset search beats the naive baseline ----------------------------

constexpr std::size_t kC6Models = 10;
constexpr std::size_t kC6Splits = 5;
constexpr std::size_t kC6MaxSize = 5;

Outcome criterion6() {
    bool ok = true;
    std::string detail;
    for (std::size_t n : {1000, 10000}) {
        double ez = 0, es = 0, naive = 0;
        std::size_t failures = 0;
        const auto fixtures = random_fixture_names();
        for (const auto& name : fixtures) {
            SimulationSpec spec;
            spec.graph = load_fixture(name);
            spec.n_samples = n;
            spec.n_runs = kC6Models;
            spec.seed = 0xc6;
            spec.search.n_r = kC6Splits;
            spec.search.max_subset_size = kC6MaxSize;
            const auto s = summarize(simulate(spec));
            failures += s.search_failures;
            // A fixture whose searches all failed has no search error to
            // compare; count it against the criterion.
            if (!s.ate_z_error) {
                ok = false;
                continue;
            }
            ez += *s.ate_z_error;
            es += *s.ate_s_error;
            naive += s.naive_error_paired;
        }
        const double k = static_cast<double>(fixtures.size());
        ez /= k;
        es /= k;
        naive /= k;
        const double bound = n == 10000 ? naive / 2 : naive;
        ok = ok && ez < bound && es < bound;
        detail += fmt::format("{}n={}: ATE_z {:.4f}, ATE_s {:.4f}, naive {:.4f}, bound {:.4f}, failed models {}",
                              detail.empty() ? "" : "; ", n, ez, es, naive, bound, failures);
    }
    return verdict(ok, detail);
}

// ---- 7: search with a separation oracle -----------------------------------

Outcome criterion7() {
    std::size_t mismatched = 0;
    std::size_t total = 0;
    for (const auto& name : fixture_names()) {
        const Smcm g = load_fixture(name);
        const Roles& r = *g.roles();
        const SeparationOracle oracle(g);
        const auto accepted = enumerate_admissible(oracle, r, candidate_pool(g), std::nullopt, 0.5);
        const auto witnesses = scan_all_witnesses(g);
        bool same = accepted.size() == witnesses.size();
        for (std::size_t k = 0; same && k < accepted.size(); ++k)
            same = accepted[k].z == witnesses[k].z && accepted[k].z_i == witnesses[k].z_i &&
                   accepted[k].z_o == witnesses[k].z_o;
        if (!same) ++mismatched;
        total += witnesses.size();
    }
    return verdict(mismatched == 0, fmt::format("{} fixtures, {} witnesses, {} fixtures differ", fixture_names().size(),
                                                total, mismatched));
}

// ---- 8: CI calibration and power ------------------------------------------

constexpr std::size_t kC8Seeds = 500;
constexpr std::size_t kC8Rows = 1000;
constexpr double kC8Ks = 0.08;
constexpr std::size_t kC8PowerSeeds = 200;
constexpr double kC8Alpha = 0.05;
constexpr double kC8Power = 0.99;

MatrixXd gaussian(std::size_t rows, std::size_t cols, Rng& rng) {
    MatrixXd m(rows, cols);
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = standard_normal(rng);
    return m;
}

Outcome criterion8() {
    bool ok = true;
    std::string detail;
    for (auto kind : {CiKind::fisher_z, CiKind::rcot}) {
        for (std::size_t dims : {0, 1}) {
            std::vector<double> p;
            for (std::size_t s = 0; s < kC8Seeds; ++s) {
                Rng rng = make_stream(0xc8, s);
                const MatrixXd z = gaussian(kC8Rows, dims, rng);
                MatrixXd x = gaussian(kC8Rows, 1, rng);
                MatrixXd y = gaussian(kC8Rows, 1, rng);
                // with a conditioning variable, x and y share it as a cause
                if (dims == 1) {
                    x += z;
                    y += z;
                }
                CiMethod m;
                m.kind = kind;
                m.seed = s;
                p.push_back(test_ci(x, y, z, m).p_value);
            }
            const double ks = testkit::ks_uniform(p);
            ok = ok && ks < kC8Ks;
            detail += fmt::format("{}{} null cond={}: KS {:.4f}", detail.empty() ? "" : "; ", to_string(kind), dims, ks);
        }
        std::size_t rejections = 0;
        for (std::size_t s = 0; s < kC8PowerSeeds; ++s) {
            Rng rng = make_stream(0xc8 + 1, s);
            const MatrixXd x = gaussian(kC8Rows, 1, rng);
            CiMethod m;
            m.kind = kind;
            m.seed = s;
            if (test_ci(x, x, MatrixXd(kC8Rows, 0), m).p_value < kC8Alpha) ++rejections;
        }
        const double power = static_cast<double>(rejections) / kC8PowerSeeds;
        ok = ok && power > kC8Power;
        detail += fmt::format("; {} power y=x {:.3f}", to_string(kind), power);
    }
    return verdict(ok, fmt::format("KS < {}, power > {}: {}", kC8Ks, kC8Power, detail));
}

// ---- 9: German Credit audit (user-supplied data) --------------------------

constexpr std::size_t kC9Seeds = 3;
constexpr double kC9AteLo = 0.0;
constexpr double kC9AteHi = 0.03;

Outcome criterion9() {
    const char* env = std::getenv("FRONTDOOR_GERMAN_CREDIT_CSV");
    const fs::path csv = env ? fs::path(env) : fs::path(FRONTDOOR_SOURCE_DIR) / "data" / "german_credit.csv";
    if (!fs::exists(csv)) return {Status::skip, "no German Credit CSV at " + csv.string()};
    std::ifstream in(fs::path(FRONTDOOR_SOURCE_DIR) / "data" / "german_credit.manifest.json");
    std::stringstream text;
    text << in.rdbuf();
    AuditManifest m = parse_audit_manifest(text.str());
    m.csv_path = csv.string();
    const IngestResult ing = ingest(read_csv_file(m.csv_path), m);

    const std::vector<std::string> expected{"purpose", "foreign_worker", "other_installment_plans"};
    std::size_t matches = 0;
    bool ate_ok = true;
    std::string detail;
    for (std::size_t s = 0; s < kC9Seeds; ++s) {
        SearchConfig cfg;
        cfg.n_r = 100;
        cfg.p_v = 0.1;
        cfg.max_subset_size = 3;
        cfg.seed = s;
        const AteReport rep = run_algorithm1(ing.table, ing.roles, cfg);
        if (rep.failure) {
            ate_ok = false;
            detail += fmt::format(" seed {}: no witness;", s);
            continue;
        }
        const auto sel = select_by_bootstrap(ing.table, ing.roles, rep, 100, cfg);
        const auto& z = sel.candidates[sel.selected].set.z;
        std::vector<std::string> names;
        for (auto v : z) names.push_back(ing.table.variable(v).name);
        bool has_all = true;
        for (const auto& e : expected) has_all = has_all && std::find(names.begin(), names.end(), e) != names.end();
        if (has_all) ++matches;
        ate_ok = ate_ok && rep.ate_z >= kC9AteLo && rep.ate_z <= kC9AteHi;
        detail += fmt::format(" seed {}: Z = {{{}}}, ATE_z {:.4f}, ATE_s {:.4f};", s, fmt::join(names, ", "),
                              rep.ate_z, rep.ate_s);
    }
    return verdict(2 * matches > kC9Seeds && ate_ok,
                   fmt::format("expected Z in {}/{} seeds, ATE_z in [{}, {}]:{}", matches, kC9Seeds, kC9AteLo,
                               kC9AteHi, detail));
}

// ---- 10: byte-identical CLI reruns ----------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome criterion10() {
    const fs::path root = fs::temp_directory_path() / fmt::format("frontdoor_acceptance_{}", getpid());
    fs::create_directories(root);
    const std::string tool = FRONTDOOR_CLI_PATH;

    // Each command writes into its own directory; {dir} is replaced per rerun.
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"ensemble", "ensemble --p 10 --d 2 3 --q 0 1 --n 20 --seed 3 --out {dir}/out.csv"},
        {"simulate", "simulate --fixture fig4a --n 2000 --runs 2 --n-r 2 --seed 5 --out {dir}/out.csv"},
        {"sample", "sample --fixture fig4a --n 3000 --seed 9 --out {dir}/out.csv"},
        {"scan", "scan --fixture rnd1 --all"},
        {"audit", "audit --manifest {root}/audit.json --n-r 3 --n-boot 10 --seed 2 --report {dir}/report.json "
                  "--bootstrap-csv {dir}/out.csv"},
    };
    // The audit reads data produced by `sample`.
    {
        const int rc = std::system(fmt::format("{} sample --fixture fig4a --n 3000 --seed 9 --out {}/audit.csv > /dev/null",
                                               tool, root.string())
                                       .c_str());
        if (rc != 0) return verdict(false, "could not create audit input");
        std::ofstream m(root / "audit.json");
        m << fmt::format(R"({{"csv_path": "{}/audit.csv", "treatment": "T", "outcome": "Y", "children": ["B"]}})",
                         root.string());
    }

    bool ok = true;
    std::string detail;
    for (const auto& [name, args] : commands) {
        std::string outputs[2];
        for (int rep = 0; rep < 2; ++rep) {
            const fs::path dir = root / fmt::format("{}_{}", name, rep);
            fs::create_directories(dir);
            std::string a = args;
            for (const auto& [key, value] : {std::pair{std::string("{dir}"), dir.string()},
                                             std::pair{std::string("{root}"), root.string()}})
                for (auto pos = a.find(key); pos != std::string::npos; pos = a.find(key))
                    a.replace(pos, key.size(), value);
            const int rc =
                std::system(fmt::format("{} {} > {}/stdout.txt", tool, a, dir.string()).c_str());
            if (rc != 0) {
                ok = false;
                detail += fmt::format(" {}: exit {};", name, rc);
            }
            // Paths differ between reruns by construction; compare with them removed.
            std::string all = slurp(dir / "stdout.txt");
            for (auto pos = all.find(dir.string()); pos != std::string::npos; pos = all.find(dir.string()))
                all.replace(pos, dir.string().size(), "<dir>");
            for (const char* f : {"out.csv", "report.json", "out.csv.json"})
                if (fs::exists(dir / f)) {
                    std::string body = slurp(dir / f);
                    for (auto pos = body.find(dir.string()); pos != std::string::npos; pos = body.find(dir.string()))
                        body.replace(pos, dir.string().size(), "<dir>");
                    all += "\n--" + std::string(f) + "--\n" + body;
                }
            outputs[rep] = all;
        }
        const bool same = outputs[0] == outputs[1] && !outputs[0].empty();
        ok = ok && same;
        detail += fmt::format(" {} {};", name, same ? "identical" : "DIFFERS");
    }
    fs::remove_all(root);
    return verdict(ok, "reruns:" + detail);
}

const std::map<int, std::pair<const char*, std::function<Outcome()>>> kCriteria = {
    {1, {"m-separation matches path enumeration", criterion1}},
    {2, {"ensemble success counts, no-grandparent variant", criterion2}},
    {3, {"ensemble success counts, no-parent variant", criterion3}},
    {4, {"exact discrete adjustment formulas", criterion4}},
    {5, {"plain front-door bias and two-stage estimator", criterion5}},
    {6, {"subset search beats the naive baseline", criterion6}},
    {7, {"separation-oracle search equals graphical scan", criterion7}},
    {8, {"CI test calibration and power", criterion8}},
    {9, {"German Credit audit", criterion9}},
    {10, {"byte-identical reruns", criterion10}},
};

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    if (selected.empty())
        for (const auto& [id, _] : kCriteria) selected.push_back(id);

    bool failed = false;
    bool skipped = false;
    for (int id : selected) {
        const auto it = kCriteria.find(id);
        if (it == kCriteria.end()) {
            std::cout << "FAIL criterion " << id << ": unknown criterion\n";
            failed = true;
            continue;
        }
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = it->second.second();
        } catch (const std::exception& e) {
            o = {Status::fail, std::string("exception: ") + e.what()};
        }
        const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::skip ? "SKIP" : "FAIL";
        std::cout << fmt::format("{} criterion {} ({}): {} [{:.1f} s]", tag, id, it->second.first, o.detail, sec)
                  << std::endl;
        failed = failed || o.status == Status::fail;
        skipped = skipped || o.status == Status::skip;
    }
    if (failed) return 1;
    return skipped ? 77 : 0;
}
