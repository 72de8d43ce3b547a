#include <frontdoor/experiment.hpp>

#include <frontdoor/adjust.hpp>
#include <frontdoor/parallel.hpp>
#include <frontdoor/rng.hpp>

#include <cmath>
#include <stdexcept>

namespace frontdoor {

void SimulationSpec::validate() const {
    graph.require_roles();
    if (n_samples == 0) throw std::invalid_argument("n_samples must be positive");
    if (!(noise_scale >= 0)) throw std::invalid_argument("noise_scale must be non-negative");
    if (algorithm1) search.validate();
    if (two_stage) {
        if (!graph.find(two_stage->z1) || !graph.find(two_stage->z2))
            throw std::invalid_argument("two-stage nodes not found in graph");
        if (graph.roles()->children.size() != 1) throw std::invalid_argument("two-stage estimator needs one child");
    }
}

std::vector<SimulationRow> simulate(const SimulationSpec& spec) {
    spec.validate();
    const Roles& roles = *spec.graph.roles();
    std::vector<SimulationRow> rows(spec.n_runs);
    // Runs are parallel; the search inside each run stays sequential so that
    // thread count never changes which work a run does.
    parallel_for(
        spec.n_runs,
        [&](std::size_t k) {
            Rng rng = make_stream(spec.seed, k);
            SemModel model = draw_model(spec.graph, rng);
            model.noise_scale = spec.noise_scale;
            const DataTable data = generate(model, spec.n_samples, Regime::observational, rng);
            const std::size_t t_col = data.variable(roles.treatment).columns.front();
            const std::size_t y_col = data.variable(roles.outcome).columns.front();
            const ColumnList b_cols = data.columns_of(roles.children);

            SimulationRow& row = rows[k];
            row.run = k;
            row.true_ate = true_ate(model);
            row.naive = ate_frontdoor_naive(data, t_col, b_cols, y_col);
            if (spec.algorithm1) {
                row.searched = true;
                SearchConfig cfg = spec.search;
                cfg.seed = derive_seed(spec.seed, k);
                cfg.threads = 1;
                const AteReport rep = run_algorithm1(data, roles, cfg);
                row.runs_succeeded = rep.runs_succeeded;
                if (!rep.failure) {
                    row.ate_z = rep.ate_z;
                    row.ate_s = rep.ate_s;
                }
            }
            if (spec.two_stage) {
                const auto z1 = data.variable(*spec.graph.find(spec.two_stage->z1)).columns;
                const auto z2 = data.variable(*spec.graph.find(spec.two_stage->z2)).columns;
                row.two_stage = ate_twostage_fig3(data, t_col, z1, b_cols, z2, y_col, derive_seed(spec.seed, k),
                                                  spec.two_stage_draws);
            }
        },
        spec.search.threads);
    return rows;
}

SimulationSummary summarize(const std::vector<SimulationRow>& rows) {
    SimulationSummary s;
    s.runs = rows.size();
    double naive = 0, paired = 0, ez = 0, es = 0, two = 0;
    std::size_t ok = 0, searched = 0, n_two = 0;
    for (const auto& r : rows) {
        const double e = std::abs(r.naive - r.true_ate);
        naive += e;
        if (r.searched) ++searched;
        if (r.ate_z) {
            ++ok;
            paired += e;
            ez += std::abs(*r.ate_z - r.true_ate);
            es += std::abs(*r.ate_s - r.true_ate);
        }
        if (r.two_stage) {
            ++n_two;
            two += std::abs(*r.two_stage - r.true_ate);
        }
    }
    if (rows.empty()) return s;
    s.naive_error = naive / static_cast<double>(rows.size());
    s.search_failures = searched - ok;
    if (ok > 0) {
        s.naive_error_paired = paired / static_cast<double>(ok);
        s.ate_z_error = ez / static_cast<double>(ok);
        s.ate_s_error = es / static_cast<double>(ok);
    }
    if (n_two > 0) s.two_stage_error = two / static_cast<double>(n_two);
    return s;
}

}  // namespace frontdoor
