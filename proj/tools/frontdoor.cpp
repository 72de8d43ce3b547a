// Command-line front end. Every command prints its full configuration as JSON
// on stdout; rerunning that configuration reproduces the outputs byte for byte.

#include <frontdoor/adjust.hpp>
#include <frontdoor/ensemble.hpp>
#include <frontdoor/experiment.hpp>
#include <frontdoor/fixtures.hpp>
#include <frontdoor/graph_io.hpp>
#include <frontdoor/ingest.hpp>
#include <frontdoor/parallel.hpp>
#include <frontdoor/search.hpp>
#include <frontdoor/sem.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

using namespace frontdoor;
using Json = nlohmann::ordered_json;

namespace {

struct GraphSource {
    std::string fixture;
    std::string path;

    void add_to(CLI::App* app) {
        auto* f = app->add_option("--fixture", fixture, "builtin graph: " + fmt::format("{}", fmt::join(fixture_names(), ", ")));
        auto* g = app->add_option("--graph", path, "graph file");
        f->excludes(g);
    }

    Smcm load() const {
        if (!fixture.empty()) return load_fixture(fixture);
        if (!path.empty()) return read_smcm_file(path);
        throw std::invalid_argument("give --fixture or --graph");
    }

    Json json() const {
        Json j;
        if (!fixture.empty()) j["fixture"] = fixture;
        if (!path.empty()) j["graph"] = path;
        return j;
    }
};

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

std::string num(double x) { return fmt::format("{}", x); }
std::string num(const std::optional<double>& x) { return x ? num(*x) : std::string(); }

Json names_of(const Smcm& g, NodeSet s) {
    Json a = Json::array();
    for (auto v : s) a.push_back(g.name(v));
    return a;
}

Json names_of(const DataTable& d, NodeSet s) {
    Json a = Json::array();
    for (auto v : s) a.push_back(d.variable(v).name);
    return a;
}

struct SearchFlags {
    std::size_t n_r = 100;
    double p_v = 0.1;
    std::size_t max_size = 0;
    double split = 0.5;
    std::string ci = "rcot";
    std::size_t features_xy = 5;
    std::size_t features_cond = 25;

    void add_to(CLI::App* app, std::size_t default_max) {
        max_size = default_max;
        app->add_option("--n-r", n_r, "train/test splits per search")->capture_default_str();
        app->add_option("--p-v", p_v, "p-value threshold")->capture_default_str();
        app->add_option("--max-size", max_size, "largest |Z| searched (0 = no limit)")->capture_default_str();
        app->add_option("--split", split, "training share of each split")->capture_default_str();
        app->add_option("--ci", ci, "CI test: rcot, fisher_z or permutation")->capture_default_str();
        app->add_option("--rcot-features-xy", features_xy)->capture_default_str();
        app->add_option("--rcot-features-cond", features_cond)->capture_default_str();
    }

    SearchConfig config(std::uint64_t seed, std::size_t threads) const {
        SearchConfig cfg;
        cfg.n_r = n_r;
        cfg.p_v = p_v;
        if (max_size > 0) cfg.max_subset_size = max_size;
        cfg.split_fraction = split;
        cfg.ci_method.kind = parse_ci_kind(ci);
        cfg.ci_method.rcot.n_features_xy = features_xy;
        cfg.ci_method.rcot.n_features_cond = features_cond;
        cfg.seed = seed;
        cfg.threads = threads;
        cfg.validate();
        return cfg;
    }

    Json json() const {
        return Json{{"n_r", n_r},       {"p_v", p_v}, {"max_size", max_size},
                    {"split", split},   {"ci", ci},   {"rcot_features_xy", features_xy},
                    {"rcot_features_cond", features_cond}};
    }
};

// ---- ensemble -------------------------------------------------------------

struct EnsembleCmd {
    std::vector<std::size_t> p{10};
    std::vector<double> d{2};
    std::vector<double> q{0};
    std::vector<std::string> variant{"no-grandparent"};
    std::size_t n_graphs = 100;
    std::size_t max_size = 5;
    std::uint64_t seed = 0;
    std::string out;

    void add_to(CLI::App* app) {
        app->add_option("--p", p, "node counts")->capture_default_str();
        app->add_option("--d", d, "expected directed degrees")->capture_default_str();
        app->add_option("--q", q, "bidirected edge probabilities")->capture_default_str();
        app->add_option("--variant", variant, "no-grandparent or no-parent")->capture_default_str();
        app->add_option("--n", n_graphs, "graphs per cell")->capture_default_str();
        app->add_option("--max-size", max_size, "bound on |Z| for the bounded count")->capture_default_str();
        app->add_option("--seed", seed)->capture_default_str();
        app->add_option("--out", out, "CSV output")->required();
    }

    int run(std::size_t threads) const {
        Json manifest{{"command", "ensemble"}, {"p", p},           {"d", d},       {"q", q},
                      {"variant", variant},    {"n", n_graphs},    {"max_size", max_size},
                      {"seed", seed},          {"out", out}};
        std::cout << manifest.dump(2) << '\n';
        auto csv = open_out(out);
        csv << "p,d,q,variant,max_size,n_graphs,successes_exhaustive,successes_bounded,redraws,exhausted,seed\n";
        for (const auto& v : variant)
            for (auto pp : p)
                for (auto dd : d)
                    for (auto qq : q) {
                        EnsembleParams params;
                        params.p = pp;
                        params.d = dd;
                        params.q = qq;
                        params.variant = parse_variant(v);
                        params.max_subset_size = max_size;
                        params.seed = seed;
                        params.validate();
                        const auto r = run_ensemble(params, n_graphs, threads);
                        csv << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", pp, num(dd), num(qq), v, max_size,
                                           r.n_graphs, r.successes_exhaustive, r.successes_bounded, r.redraws,
                                           r.exhausted, seed);
                    }
        return 0;
    }
};

// ---- simulate -------------------------------------------------------------

struct SimulateCmd {
    GraphSource graph;
    std::vector<std::size_t> n{10000};
    std::size_t n_runs = 10;
    std::uint64_t seed = 0;
    double noise = 0.1;
    bool no_search = false;
    bool two_stage = false;
    std::string z1 = "Z1";
    std::string z2 = "Z2";
    std::size_t draws = 10000;
    SearchFlags search;
    std::string out;

    void add_to(CLI::App* app) {
        graph.add_to(app);
        app->add_option("--n", n, "sample sizes")->capture_default_str();
        app->add_option("--runs", n_runs, "models per sample size")->capture_default_str();
        app->add_option("--seed", seed)->capture_default_str();
        app->add_option("--noise", noise, "noise scale of non-treatment nodes")->capture_default_str();
        app->add_flag("--no-search", no_search, "skip the subset search");
        app->add_flag("--two-stage", two_stage, "also run the two-stage estimator");
        app->add_option("--z1", z1, "two-stage pre-treatment node")->capture_default_str();
        app->add_option("--z2", z2, "two-stage mediator node")->capture_default_str();
        app->add_option("--draws", draws, "Monte Carlo draws of the two-stage estimator")->capture_default_str();
        search.add_to(app, 5);
        app->add_option("--out", out, "per-run CSV output")->required();
    }

    int run(std::size_t threads) const {
        Json manifest{{"command", "simulate"}, {"source", graph.json()}, {"n", n},     {"runs", n_runs},
                      {"seed", seed},          {"noise", noise},         {"search", !no_search},
                      {"two_stage", two_stage}};
        if (two_stage) manifest["two_stage_nodes"] = {z1, z2, draws};
        manifest["search_config"] = search.json();
        manifest["out"] = out;

        SimulationSpec spec;
        spec.graph = graph.load();
        spec.n_runs = n_runs;
        spec.seed = seed;
        spec.noise_scale = noise;
        spec.algorithm1 = !no_search;
        if (two_stage) spec.two_stage = TwoStageNodes{z1, z2};
        spec.two_stage_draws = draws;
        spec.search = search.config(seed, threads);

        auto csv = open_out(out);
        csv << "n,run,true_ate,naive,ate_z,ate_s,two_stage,runs_succeeded,search_failed\n";
        Json summaries = Json::array();
        for (auto nn : n) {
            spec.n_samples = nn;
            const auto rows = simulate(spec);
            for (const auto& r : rows)
                csv << fmt::format("{},{},{},{},{},{},{},{},{}\n", nn, r.run, num(r.true_ate), num(r.naive),
                                   num(r.ate_z), num(r.ate_s), num(r.two_stage), r.runs_succeeded,
                                   r.searched && !r.ate_z ? 1 : 0);
            const auto s = summarize(rows);
            Json j{{"n", nn}, {"runs", s.runs}, {"naive_error", s.naive_error}};
            if (spec.algorithm1) {
                j["search_failures"] = s.search_failures;
                j["naive_error_paired"] = s.naive_error_paired;
                j["ate_z_error"] = s.ate_z_error ? Json(*s.ate_z_error) : Json();
                j["ate_s_error"] = s.ate_s_error ? Json(*s.ate_s_error) : Json();
            }
            if (s.two_stage_error) j["two_stage_error"] = *s.two_stage_error;
            summaries.push_back(j);
        }
        manifest["summary"] = summaries;
        std::cout << manifest.dump(2) << '\n';
        return 0;
    }
};

// ---- sample ---------------------------------------------------------------

struct SampleCmd {
    GraphSource graph;
    std::size_t n = 1000;
    std::string regime = "observational";
    std::uint64_t seed = 0;
    double noise = 0.1;
    std::string out;

    void add_to(CLI::App* app) {
        graph.add_to(app);
        app->add_option("--n", n, "rows")->capture_default_str();
        app->add_option("--regime", regime, "observational, do_t0 or do_t1")->capture_default_str();
        app->add_option("--seed", seed)->capture_default_str();
        app->add_option("--noise", noise)->capture_default_str();
        app->add_option("--out", out, "CSV output; the manifest goes to <out>.json")->required();
    }

    int run(std::size_t) const {
        Regime r;
        if (regime == "observational")
            r = Regime::observational;
        else if (regime == "do_t0")
            r = Regime::do_t0;
        else if (regime == "do_t1")
            r = Regime::do_t1;
        else
            throw std::invalid_argument("unknown regime '" + regime + "'");

        const Smcm g = graph.load();
        Rng rng = make_stream(seed, 0);
        SemModel model = draw_model(g, rng);
        model.noise_scale = noise;
        const DataTable data = generate(model, n, r, rng);
        auto csv = open_out(out);
        data.write_csv(csv);

        Json weights = Json::object();
        for (NodeId v = 0; v < g.size(); ++v) weights[g.name(v)] = model.weights[v];
        Json manifest{{"command", "sample"}, {"source", graph.json()}, {"n", n},          {"regime", to_string(r)},
                      {"seed", seed},        {"noise", noise},         {"out", out},      {"weights", weights},
                      {"true_ate", true_ate(model)}};
        auto side = open_out(out + ".json");
        side << manifest.dump(2) << '\n';
        std::cout << manifest.dump(2) << '\n';
        return 0;
    }
};

// ---- scan -----------------------------------------------------------------

struct ScanCmd {
    GraphSource graph;
    std::size_t max_size = 0;
    bool all = false;

    void add_to(CLI::App* app) {
        graph.add_to(app);
        app->add_option("--max-size", max_size, "largest |Z| (0 = no limit)")->capture_default_str();
        app->add_flag("--all", all, "list every witness");
    }

    int run(std::size_t) const {
        const Smcm g = graph.load();
        const auto& roles = g.require_roles();
        const std::optional<std::size_t> bound = max_size > 0 ? std::optional(max_size) : std::nullopt;
        const auto a = check_assumptions(g, roles);
        const auto outcome = scan_graph(g, bound);
        auto witness_json = [&](const Witness& w) {
            return Json{{"z", names_of(g, w.z)}, {"z_i", names_of(g, w.z_i)}, {"z_o", names_of(g, w.z_o)}};
        };
        Json j{{"command", "scan"},
               {"source", graph.json()},
               {"max_size", max_size},
               {"assumptions",
                {{"outcome_descends_from_treatment", a.outcome_descends_from_treatment},
                 {"treatment_outcome_confounded", a.treatment_outcome_confounded},
                 {"children_complete", a.children_complete}}},
               {"success", outcome.success}};
        j["witness"] = outcome.witness ? witness_json(*outcome.witness) : Json();
        if (all) {
            Json list = Json::array();
            for (const auto& w : scan_all_witnesses(g, bound)) list.push_back(witness_json(w));
            j["witnesses"] = list;
        }
        std::cout << j.dump(2) << '\n';
        return 0;
    }
};

// ---- audit ----------------------------------------------------------------

struct AuditCmd {
    std::string manifest_path;
    std::string csv_path;
    std::uint64_t seed = 0;
    std::size_t n_boot = 100;
    SearchFlags search;
    std::string report_path;
    std::string bootstrap_path;

    void add_to(CLI::App* app) {
        app->add_option("--manifest", manifest_path, "audit manifest (JSON)")->required();
        app->add_option("--csv", csv_path, "overrides csv_path of the manifest");
        app->add_option("--seed", seed)->capture_default_str();
        app->add_option("--n-boot", n_boot, "bootstrap resamples per witness")->capture_default_str();
        search.add_to(app, 3);
        app->add_option("--report", report_path, "report JSON output");
        app->add_option("--bootstrap-csv", bootstrap_path, "bootstrap p-values of the selected witness");
    }

    int run(std::size_t threads) const {
        std::ifstream in(manifest_path);
        if (!in) throw std::runtime_error("cannot open " + manifest_path);
        std::stringstream text;
        text << in.rdbuf();
        AuditManifest m = parse_audit_manifest(text.str());
        if (!csv_path.empty()) m.csv_path = csv_path;
        const SearchConfig cfg = search.config(seed, threads);

        const IngestResult ing = ingest(read_csv_file(m.csv_path), m);
        const DataTable& data = ing.table;
        const AteReport rep = run_algorithm1(data, ing.roles, cfg);

        auto set_json = [&](const AdmissibleSet& a) {
            return Json{{"z", names_of(data, a.z)},
                        {"z_i", names_of(data, a.z_i)},
                        {"z_o", names_of(data, a.z_o)},
                        {"p_children_outcome", a.p_eq4},
                        {"p_inner_treatment", a.p_eq5i},
                        {"p_outer_treatment", a.p_eq5ii}};
        };

        Json j{{"command", "audit"}, {"manifest", Json::parse(to_json(m))}, {"seed", seed}, {"n_boot", n_boot},
               {"search_config", search.json()}};
        Json encodings = Json::array();
        for (const auto& e : ing.encodings) encodings.push_back({{"column", e.column}, {"levels", e.levels}});
        j["ingest"] = {{"rows_read", ing.rows_read},
                       {"rows_dropped", ing.rows_dropped},
                       {"rows", data.rows()},
                       {"columns", data.column_names()},
                       {"categorical", encodings}};
        j["failure"] = rep.failure;
        j["runs_succeeded"] = rep.runs_succeeded;
        j["candidates_per_run"] = rep.candidates_per_run;
        if (rep.failure) {
            j["ate_z"] = Json();
            j["ate_s"] = Json();
            j["diagnostic"] = "failed to find Z = (Z_i, Z_o) satisfying the independence checks in any run";
        } else {
            j["ate_z"] = rep.ate_z;
            j["ate_s"] = rep.ate_s;
            const auto sel = select_by_bootstrap(data, ing.roles, rep, n_boot, cfg);
            Json cands = Json::array();
            for (std::size_t k = 0; k < sel.candidates.size(); ++k) {
                Json c = set_json(sel.candidates[k].set);
                c["runs"] = sel.candidates[k].runs;
                c["median_p"] = sel.bootstraps[k].median;
                cands.push_back(c);
            }
            j["witnesses"] = cands;
            j["selected"] = sel.selected;
            if (!bootstrap_path.empty()) {
                auto csv = open_out(bootstrap_path);
                csv << "test_name,bootstrap_index,p_value\n";
                const auto& b = sel.bootstraps[sel.selected];
                for (std::size_t k = 0; k < 3; ++k)
                    for (std::size_t i = 0; i < b.samples.size(); ++i)
                        csv << fmt::format("{},{},{}\n", to_string(static_cast<CiCheck>(k)), i, num(b.samples[i][k]));
            }
        }
        const std::string dump = j.dump(2);
        if (!report_path.empty()) open_out(report_path) << dump << '\n';
        std::cout << dump << '\n';
        return 0;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Front-door effect estimation with post-treatment variables"};
    app.require_subcommand(1);
    std::size_t threads = default_threads();
    app.add_option("--threads", threads, "worker threads (default from FRONTDOOR_THREADS)");

    EnsembleCmd ensemble;
    SimulateCmd simulate_cmd;
    SampleCmd sample;
    ScanCmd scan;
    AuditCmd audit;
    auto* e = app.add_subcommand("ensemble", "success counts over random graph ensembles");
    ensemble.add_to(e);
    auto* si = app.add_subcommand("simulate", "ATE errors on synthetic data from a graph");
    simulate_cmd.add_to(si);
    auto* sa = app.add_subcommand("sample", "draw one SEM data set");
    sample.add_to(sa);
    auto* sc = app.add_subcommand("scan", "graphical search for a witness set");
    scan.add_to(sc);
    auto* au = app.add_subcommand("audit", "subset search and bootstrap on a CSV data set");
    audit.add_to(au);

    CLI11_PARSE(app, argc, argv);
    try {
        if (threads == 0) threads = default_threads();
        if (e->parsed()) return ensemble.run(threads);
        if (si->parsed()) return simulate_cmd.run(threads);
        if (sa->parsed()) return sample.run(threads);
        if (sc->parsed()) return scan.run(threads);
        if (au->parsed()) return audit.run(threads);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << '\n';
        return 2;
    }
    return 1;
}
