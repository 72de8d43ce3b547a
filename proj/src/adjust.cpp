#include <frontdoor/adjust.hpp>
#include <frontdoor/rng.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace frontdoor {

Eigen::VectorXd RegressionModel::predict_rows(const Eigen::MatrixXd& x) const {
    return (x * weights).array() + intercept;
}

const std::vector<double>& default_penalty_grid() {
    static const std::vector<double> grid{1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3};
    return grid;
}

namespace {

struct Centered {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    Eigen::RowVectorXd x_mean;
    double y_mean = 0;
};

Centered center(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    Centered c;
    c.x_mean = x.colwise().mean();
    c.y_mean = y.mean();
    c.x = x.rowwise() - c.x_mean;
    c.y = y.array() - c.y_mean;
    return c;
}

Eigen::VectorXd ridge_solve(const Eigen::MatrixXd& gram, const Eigen::VectorXd& xty, double penalty) {
    Eigen::MatrixXd a = gram;
    a.diagonal().array() += penalty;
    return a.ldlt().solve(xty);
}

RegressionModel finish(const Centered& c, double penalty, bool rank_deficient) {
    RegressionModel m;
    m.weights = ridge_solve(c.x.transpose() * c.x, c.x.transpose() * c.y, penalty);
    m.intercept = c.y_mean - c.x_mean.dot(m.weights);
    m.penalty = penalty;
    m.rank_deficient = rank_deficient;
    return m;
}

}  // namespace

RegressionModel fit_ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const std::vector<double>& grid,
                          int folds) {
    if (x.rows() != y.rows()) throw std::invalid_argument("design and response lengths differ");
    if (grid.empty()) throw std::invalid_argument("empty penalty grid");
    if (folds < 2 || x.rows() < folds) throw std::invalid_argument("too few rows for cross-validation");
    for (double g : grid)
        if (!(g > 0)) throw std::invalid_argument("penalties must be positive");

    const Centered all = center(x, y);
    if (x.cols() == 0) return finish(all, grid.front(), false);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(all.x);
    if (qr.rank() < x.cols()) return finish(all, *std::max_element(grid.begin(), grid.end()), true);

    const Eigen::Index n = x.rows();
    std::vector<double> loss(grid.size(), 0.0);
    for (int f = 0; f < folds; ++f) {
        const Eigen::Index lo = n * f / folds;
        const Eigen::Index hi = n * (f + 1) / folds;
        Eigen::MatrixXd xt(n - (hi - lo), x.cols());
        Eigen::VectorXd yt(n - (hi - lo));
        xt << x.topRows(lo), x.bottomRows(n - hi);
        yt << y.head(lo), y.tail(n - hi);
        const Centered c = center(xt, yt);
        const Eigen::MatrixXd gram = c.x.transpose() * c.x;
        const Eigen::VectorXd xty = c.x.transpose() * c.y;
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const Eigen::VectorXd w = ridge_solve(gram, xty, grid[g]);
            const double b = c.y_mean - c.x_mean.dot(w);
            const Eigen::VectorXd resid =
                (y.segment(lo, hi - lo).array() - b).matrix() - x.middleRows(lo, hi - lo) * w;
            loss[g] += resid.squaredNorm();
        }
    }
    const auto best = std::min_element(loss.begin(), loss.end()) - loss.begin();
    return finish(all, grid[static_cast<std::size_t>(best)], false);
}

RegressionModel fit_outcome_regression(const DataTable& data, std::size_t y_col, const ColumnList& z_cols,
                                       std::size_t t_col) {
    if (data.rows() < (z_cols.size() + 2) * 10) throw std::invalid_argument("too few rows for the outcome regression");
    ColumnList design = z_cols;
    design.push_back(t_col);
    RegressionModel m = fit_ridge(data.select(design), data.column(y_col));
    m.design = std::move(design);
    return m;
}

double treated_fraction(const DataTable& data, std::size_t t_col) {
    const auto t = data.column(t_col);
    for (Eigen::Index r = 0; r < t.size(); ++r)
        if (t(r) != 0.0 && t(r) != 1.0) throw std::invalid_argument("treatment column is not binary");
    return t.mean();
}

double ate_plugin(const DataTable& test, const OutcomePredictor& f, const ColumnList& adjust_cols, std::size_t t_col,
                  double p_treated) {
    const Eigen::MatrixXd s = test.select(adjust_cols);
    const auto t = test.column(t_col);
    double sum[2] = {0, 0};
    std::size_t count[2] = {0, 0};
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
        const Eigen::RowVectorXd row = s.row(r);
        const double m = f(row, 1.0) * p_treated + f(row, 0.0) * (1.0 - p_treated);
        const int group = t(r) == 1.0 ? 1 : 0;
        sum[group] += m;
        ++count[group];
    }
    if (count[1] == 0) throw std::invalid_argument("no treated rows in the evaluation data");
    if (count[0] == 0) throw std::invalid_argument("no control rows in the evaluation data");
    return sum[1] / static_cast<double>(count[1]) - sum[0] / static_cast<double>(count[0]);
}

double ate_plugin(const DataTable& test, const RegressionModel& model, const ColumnList& adjust_cols,
                  std::size_t t_col, double p_treated) {
    if (model.design.size() != adjust_cols.size() + 1) throw std::invalid_argument("model design does not match");
    const auto k = static_cast<Eigen::Index>(adjust_cols.size());
    const Eigen::VectorXd wz = model.weights.head(k);
    const double wt = model.weights(k);
    return ate_plugin(
        test, [&](const Eigen::Ref<const Eigen::RowVectorXd>& s, double t) { return model.intercept + s.dot(wz) + wt * t; },
        adjust_cols, t_col, p_treated);
}

double ate_frontdoor_naive(const DataTable& data, std::size_t t_col, const ColumnList& b_cols, std::size_t y_col) {
    const auto model = fit_outcome_regression(data, y_col, b_cols, t_col);
    return ate_plugin(data, model, b_cols, t_col, treated_fraction(data, t_col));
}

Eigen::VectorXd fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& t) {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd design(n, x.cols() + 1);
    design << Eigen::VectorXd::Ones(n), x;
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(design.cols());
    // A tiny ridge keeps separable data from diverging.
    constexpr double ridge = 1e-8;
    for (int iter = 0; iter < 100; ++iter) {
        const Eigen::ArrayXd p = 1.0 / (1.0 + (-(design * beta)).array().exp());
        const Eigen::ArrayXd w = (p * (1.0 - p)).max(1e-12);
        Eigen::VectorXd grad = design.transpose() * (t.array() - p).matrix() - ridge * beta;
        Eigen::MatrixXd hess = design.transpose() * (design.array().colwise() * w).matrix();
        hess.diagonal().array() += ridge;
        const Eigen::VectorXd step = hess.ldlt().solve(grad);
        beta += step;
        if (step.cwiseAbs().maxCoeff() < 1e-10) break;
    }
    return beta;
}

namespace {

// Linear-Gaussian conditional: out = [1, in] * coef + chol * N(0, I).
struct GaussianConditional {
    Eigen::MatrixXd coef;
    Eigen::MatrixXd chol;

    static GaussianConditional fit(const Eigen::MatrixXd& in, const Eigen::MatrixXd& out) {
        Eigen::MatrixXd design(in.rows(), in.cols() + 1);
        design << Eigen::VectorXd::Ones(in.rows()), in;
        GaussianConditional g;
        g.coef = design.colPivHouseholderQr().solve(out);
        const Eigen::MatrixXd resid = out - design * g.coef;
        Eigen::MatrixXd cov = resid.transpose() * resid / static_cast<double>(std::max<Eigen::Index>(in.rows() - 1, 1));
        cov.diagonal().array() += 1e-12;
        g.chol = cov.llt().matrixL();
        return g;
    }

    Eigen::RowVectorXd draw(const Eigen::RowVectorXd& in, Rng& rng) const {
        Eigen::RowVectorXd x(in.size() + 1);
        x << 1.0, in;
        Eigen::VectorXd e(chol.cols());
        for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = standard_normal(rng);
        return x * coef + (chol * e).transpose();
    }
};

}  // namespace

double ate_twostage_fig3(const DataTable& data, std::size_t t_col, const ColumnList& z1, const ColumnList& b,
                         const ColumnList& z2, std::size_t y_col, std::uint64_t seed, std::size_t draws) {
    if (z1.empty() || b.empty() || z2.empty()) throw std::invalid_argument("two-stage roles need z1, b and z2 columns");
    for (auto group : {z1, b, z2})
        for (auto c : group)
            if (c == t_col || c == y_col) throw std::invalid_argument("role columns overlap");
    if (draws == 0) throw std::invalid_argument("need at least one draw");
    treated_fraction(data, t_col);

    const Eigen::MatrixXd z1x = data.select(z1);
    const Eigen::MatrixXd bx = data.select(b);
    const Eigen::MatrixXd z2x = data.select(z2);
    const Eigen::VectorXd t = data.column(t_col);

    ColumnList outcome_design = z1;
    outcome_design.insert(outcome_design.end(), z2.begin(), z2.end());
    outcome_design.push_back(t_col);
    const RegressionModel outcome = fit_ridge(data.select(outcome_design), data.column(y_col));
    const Eigen::VectorXd propensity = fit_logistic(z1x, t);

    Eigen::MatrixXd b_in(data.rows(), static_cast<Eigen::Index>(z1.size()) + 1);
    b_in << z1x, t;
    const auto b_given = GaussianConditional::fit(b_in, bx);
    const auto z2_given = GaussianConditional::fit(bx, z2x);

    const auto k1 = static_cast<Eigen::Index>(z1.size());
    const auto k2 = static_cast<Eigen::Index>(z2.size());
    Rng rng = make_stream(seed, 0);
    double total[2] = {0, 0};
    Eigen::RowVectorXd b_cond(k1 + 1);
    Eigen::RowVectorXd y_in(k1 + k2 + 1);
    for (std::size_t k = 0; k < draws; ++k) {
        const auto row = static_cast<Eigen::Index>(uniform_index(rng, data.rows()));
        const Eigen::RowVectorXd zz1 = z1x.row(row);
        const double p1 = 1.0 / (1.0 + std::exp(-(propensity(0) + zz1.dot(propensity.tail(k1)))));
        // Both arms share the z1 draw and the noise; only t differs.
        Rng arm_rng = make_stream(seed, k + 1);
        for (int arm = 0; arm < 2; ++arm) {
            Rng local = arm_rng;
            b_cond << zz1, static_cast<double>(arm);
            const Eigen::RowVectorXd bb = b_given.draw(b_cond, local);
            const Eigen::RowVectorXd zz2 = z2_given.draw(bb, local);
            y_in << zz1, zz2, 0.0;
            const double y0 = outcome.predict(y_in);
            y_in(k1 + k2) = 1.0;
            const double y1 = outcome.predict(y_in);
            total[arm] += y1 * p1 + y0 * (1.0 - p1);
        }
    }
    return (total[1] - total[0]) / static_cast<double>(draws);
}

DiscreteJoint::DiscreteJoint(std::vector<std::string> names, std::vector<int> cardinality, std::vector<double> prob)
    : names_(std::move(names)), card_(std::move(cardinality)), prob_(std::move(prob)) {
    if (names_.size() != card_.size()) throw std::invalid_argument("names and cardinalities differ in length");
    std::size_t cells = 1;
    for (int c : card_) {
        if (c < 1) throw std::invalid_argument("cardinality must be positive");
        cells *= static_cast<std::size_t>(c);
    }
    if (prob_.size() != cells) throw std::invalid_argument("probability table has the wrong size");
    double sum = 0;
    for (double p : prob_) {
        if (!(p >= 0)) throw std::invalid_argument("negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("probabilities do not sum to one");
}

std::size_t DiscreteJoint::find(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw std::invalid_argument("unknown variable " + name);
    return static_cast<std::size_t>(it - names_.begin());
}

std::size_t DiscreteJoint::configurations(const std::vector<std::size_t>& vars) const {
    std::size_t cells = 1;
    for (auto v : vars) cells *= static_cast<std::size_t>(card_.at(v));
    return cells;
}

std::vector<double> DiscreteJoint::marginal(const std::vector<std::size_t>& vars) const {
    std::vector<std::size_t> stride(card_.size(), 0);
    std::size_t s = 1;
    for (auto v : vars) {
        if (stride.at(v) != 0) throw std::invalid_argument("repeated variable in marginal");
        stride[v] = s;
        s *= static_cast<std::size_t>(card_[v]);
    }
    std::vector<double> out(s, 0.0);
    std::vector<int> config(card_.size(), 0);
    std::size_t target = 0;
    for (double p : prob_) {
        out[target] += p;
        // odometer increment, keeping the target index in step
        for (std::size_t v = 0; v < config.size(); ++v) {
            if (++config[v] < card_[v]) {
                target += stride[v];
                break;
            }
            target -= stride[v] * static_cast<std::size_t>(card_[v] - 1);
            config[v] = 0;
        }
    }
    return out;
}

InterventionalLaw frontdoor_sum(const DiscreteJoint& joint, std::size_t t, std::size_t y,
                                const std::vector<std::size_t>& adjust, bool* zero_cell) {
    if (joint.cardinality().at(t) != 2) throw std::invalid_argument("treatment must be binary");
    std::vector<std::size_t> vars = adjust;
    vars.push_back(t);
    vars.push_back(y);
    const auto table = joint.marginal(vars);
    const std::size_t ns = joint.configurations(adjust);
    const auto ny = static_cast<std::size_t>(joint.cardinality()[y]);
    auto at = [&](std::size_t s, std::size_t tv, std::size_t yv) { return table[s + ns * (tv + 2 * yv)]; };

    double p_t[2] = {0, 0};
    std::vector<double> p_st(2 * ns, 0.0);
    for (std::size_t s = 0; s < ns; ++s)
        for (std::size_t tv = 0; tv < 2; ++tv)
            for (std::size_t yv = 0; yv < ny; ++yv) {
                p_st[s + ns * tv] += at(s, tv, yv);
                p_t[tv] += at(s, tv, yv);
            }
    if (p_t[0] <= 0 || p_t[1] <= 0) throw std::invalid_argument("a treatment arm has zero probability");

    InterventionalLaw law{std::vector<double>(ny, 0.0), std::vector<double>(ny, 0.0)};
    for (std::size_t s = 0; s < ns; ++s) {
        std::vector<double> inner(ny, 0.0);
        for (std::size_t tp = 0; tp < 2; ++tp) {
            const double denom = p_st[s + ns * tp];
            if (denom <= 0) {
                if (zero_cell && (p_st[s] > 0 || p_st[s + ns] > 0)) *zero_cell = true;
                continue;
            }
            for (std::size_t yv = 0; yv < ny; ++yv) inner[yv] += at(s, tp, yv) / denom * p_t[tp];
        }
        for (std::size_t tv = 0; tv < 2; ++tv) {
            const double weight = p_st[s + ns * tv] / p_t[tv];
            for (std::size_t yv = 0; yv < ny; ++yv) law[tv][yv] += inner[yv] * weight;
        }
    }
    return law;
}

FrontdoorEvaluation eval_generalized_frontdoor_discrete(const DiscreteJoint& joint, std::size_t t, std::size_t y,
                                                        const std::vector<std::size_t>& b,
                                                        const std::vector<std::size_t>& z,
                                                        const std::vector<std::size_t>& z_i) {
    for (auto v : z_i)
        if (std::find(z.begin(), z.end(), v) == z.end()) throw std::invalid_argument("z_i is not a subset of z");
    FrontdoorEvaluation out;
    out.by_z = frontdoor_sum(joint, t, y, z, &out.zero_cell);
    std::vector<std::size_t> s = b;
    s.insert(s.end(), z_i.begin(), z_i.end());
    out.by_s = frontdoor_sum(joint, t, y, s, &out.zero_cell);
    return out;
}

InterventionalLaw eval_twostage_discrete(const DiscreteJoint& joint, std::size_t t, std::size_t z1, std::size_t b,
                                         std::size_t z2, std::size_t y, bool* zero_cell) {
    const auto& card = joint.cardinality();
    if (card.at(t) != 2) throw std::invalid_argument("treatment must be binary");
    const auto n1 = static_cast<std::size_t>(card.at(z1));
    const auto nb = static_cast<std::size_t>(card.at(b));
    const auto n2 = static_cast<std::size_t>(card.at(z2));
    const auto ny = static_cast<std::size_t>(card.at(y));
    // order: z1, b, z2, t, y
    const auto table = joint.marginal({z1, b, z2, t, y});
    auto p = [&](std::size_t a1, std::size_t ab, std::size_t a2, std::size_t at, std::size_t ay) {
        return table[a1 + n1 * (ab + nb * (a2 + n2 * (at + 2 * ay)))];
    };
    // Sums over the axes flagged false.
    auto sum = [&](int a1, int ab, int a2, int at, int ay) {
        double s = 0;
        for (std::size_t i1 = 0; i1 < n1; ++i1)
            for (std::size_t ib = 0; ib < nb; ++ib)
                for (std::size_t i2 = 0; i2 < n2; ++i2)
                    for (std::size_t it = 0; it < 2; ++it)
                        for (std::size_t iy = 0; iy < ny; ++iy) {
                            if ((a1 >= 0 && static_cast<std::size_t>(a1) != i1) ||
                                (ab >= 0 && static_cast<std::size_t>(ab) != ib) ||
                                (a2 >= 0 && static_cast<std::size_t>(a2) != i2) ||
                                (at >= 0 && static_cast<std::size_t>(at) != it) ||
                                (ay >= 0 && static_cast<std::size_t>(ay) != iy))
                                continue;
                            s += p(i1, ib, i2, it, iy);
                        }
        return s;
    };
    auto ratio = [&](double num, double den) {
        if (den <= 0) {
            if (zero_cell) *zero_cell = true;
            return 0.0;
        }
        return num / den;
    };

    InterventionalLaw law{std::vector<double>(ny, 0.0), std::vector<double>(ny, 0.0)};
    for (std::size_t i1 = 0; i1 < n1; ++i1) {
        const auto a1 = static_cast<int>(i1);
        const double pz1 = sum(a1, -1, -1, -1, -1);
        if (pz1 <= 0) continue;
        for (std::size_t i2 = 0; i2 < n2; ++i2) {
            const auto a2 = static_cast<int>(i2);
            std::vector<double> inner(ny, 0.0);
            for (int tp = 0; tp < 2; ++tp) {
                const double p_tp_z1 = sum(a1, -1, -1, tp, -1) / pz1;
                const double den = sum(a1, -1, a2, tp, -1);
                for (std::size_t iy = 0; iy < ny; ++iy)
                    inner[iy] += ratio(sum(a1, -1, a2, tp, static_cast<int>(iy)), den) * p_tp_z1;
            }
            for (int tv = 0; tv < 2; ++tv) {
                double mix = 0;
                for (std::size_t ib = 0; ib < nb; ++ib) {
                    const auto ab = static_cast<int>(ib);
                    const double p_z2_b = ratio(sum(-1, ab, a2, -1, -1), sum(-1, ab, -1, -1, -1));
                    const double p_b_tz1 = ratio(sum(a1, ab, -1, tv, -1), sum(a1, -1, -1, tv, -1));
                    mix += p_z2_b * p_b_tz1;
                }
                for (std::size_t iy = 0; iy < ny; ++iy)
                    law[static_cast<std::size_t>(tv)][iy] += inner[iy] * mix * pz1;
            }
        }
    }
    return law;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
    if (p.size() != q.size()) throw std::invalid_argument("distributions differ in support size");
    double d = 0;
    for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
    return 0.5 * d;
}

}  // namespace frontdoor
