#include <frontdoor/citest.hpp>
#include <frontdoor/rng.hpp>

#include <boost/math/distributions/gamma.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace frontdoor {

std::string to_string(CiKind k) {
    switch (k) {
        case CiKind::fisher_z: return "fisher_z";
        case CiKind::rcot: return "rcot";
        case CiKind::permutation: return "permutation";
    }
    return "?";
}

CiKind parse_ci_kind(const std::string& s) {
    if (s == "fisher_z") return CiKind::fisher_z;
    if (s == "rcot") return CiKind::rcot;
    if (s == "permutation") return CiKind::permutation;
    throw std::invalid_argument("unknown CI method '" + s + "' (expected fisher_z, rcot or permutation)");
}

void CiMethod::validate() const {
    if (rcot.n_features_xy < 1 || rcot.n_features_cond < 1) throw std::invalid_argument("feature counts must be >= 1");
    if (rcot.bandwidth_rows < 2) throw std::invalid_argument("bandwidth_rows must be >= 2");
    if (!(rcot.ridge > 0)) throw std::invalid_argument("ridge must be positive");
    if (permutations < 1) throw std::invalid_argument("permutations must be >= 1");
    if (stratum_size < 2) throw std::invalid_argument("stratum_size must be >= 2");
}

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double constant_tol = 1e-12;

// Centered columns scaled to unit sample variance; constant columns dropped.
MatrixXd standardize(const MatrixXd& m) {
    std::vector<Index> keep;
    MatrixXd out(m.rows(), m.cols());
    for (Index c = 0; c < m.cols(); ++c) {
        const VectorXd centered = m.col(c).array() - m.col(c).mean();
        const double sd = std::sqrt(centered.squaredNorm() / static_cast<double>(std::max<Index>(m.rows() - 1, 1)));
        if (sd <= constant_tol * std::max(1.0, m.col(c).cwiseAbs().maxCoeff())) continue;
        out.col(static_cast<Index>(keep.size())) = centered / sd;
        keep.push_back(c);
    }
    out.conservativeResize(Eigen::NoChange, static_cast<Index>(keep.size()));
    return out;
}

struct Residualizer {
    // Orthonormal basis of span{1, cond}.
    MatrixXd basis;
    bool rank_deficient = false;

    explicit Residualizer(const MatrixXd& cond) {
        MatrixXd design(cond.rows(), cond.cols() + 1);
        design.col(0).setOnes();
        design.rightCols(cond.cols()) = cond;
        Eigen::ColPivHouseholderQR<MatrixXd> qr(design);
        const Index rank = qr.rank();
        rank_deficient = rank < design.cols();
        basis = qr.householderQ() * MatrixXd::Identity(design.rows(), rank);
    }

    MatrixXd operator()(const MatrixXd& m) const { return m - basis * (basis.transpose() * m); }
};

double normal_two_sided(double z) { return std::erfc(std::abs(z) / std::sqrt(2.0)); }

CiResult fisher_z(const MatrixXd& x, const MatrixXd& y, const MatrixXd& cond) {
    CiResult res;
    const Residualizer resid(cond);
    res.ridge_floor = resid.rank_deficient;
    const MatrixXd rx = resid(x);
    const MatrixXd ry = resid(y);
    const double n = static_cast<double>(x.rows());
    const double dof = n - static_cast<double>(cond.cols()) - 3.0;
    if (dof <= 0) throw std::invalid_argument("too few rows for the conditioning set");

    double best_z = 0;
    for (Index i = 0; i < rx.cols(); ++i)
        for (Index j = 0; j < ry.cols(); ++j) {
            const double den = rx.col(i).norm() * ry.col(j).norm();
            double r = den > 0 ? rx.col(i).dot(ry.col(j)) / den : 0.0;
            r = std::clamp(r, -1.0 + 1e-15, 1.0 - 1e-15);
            best_z = std::max(best_z, std::abs(std::atanh(r)) * std::sqrt(dof));
        }
    const double pairs = static_cast<double>(rx.cols() * ry.cols());
    res.statistic = best_z;
    res.p_value = std::min(1.0, pairs * normal_two_sided(best_z));
    return res;
}

double median_distance(const MatrixXd& m, std::size_t max_rows) {
    const Index r = std::min<Index>(m.rows(), static_cast<Index>(max_rows));
    const Index k = m.cols();
    // row-major copy keeps the pair loop contiguous
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = m.topRows(r);
    std::vector<double> d;
    d.reserve(static_cast<std::size_t>(r * (r - 1) / 2));
    for (Index i = 0; i < r; ++i) {
        const double* a = rows.data() + i * k;
        for (Index j = i + 1; j < r; ++j) {
            const double* b = rows.data() + j * k;
            double s = 0;
            for (Index c = 0; c < k; ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
            if (s > 0) d.push_back(s);
        }
    }
    if (d.empty()) return 1.0;
    auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    return std::sqrt(*mid);
}

// sqrt(2) cos(m W + b) with W ~ N(0, 1/sigma^2), b ~ U[0, 2 pi], then
// standardized feature by feature.
MatrixXd fourier_features(const MatrixXd& m, std::size_t k, double sigma, Rng& rng) {
    MatrixXd w(m.cols(), static_cast<Index>(k));
    for (Index j = 0; j < w.cols(); ++j)
        for (Index i = 0; i < w.rows(); ++i) w(i, j) = standard_normal(rng) / sigma;
    VectorXd b(static_cast<Index>(k));
    for (Index j = 0; j < b.size(); ++j) b(j) = uniform(rng, 0.0, 2 * M_PI);
    MatrixXd f = ((m * w).rowwise() + b.transpose()).array().cos() * std::sqrt(2.0);
    MatrixXd centered = f.rowwise() - f.colwise().mean();
    for (Index j = 0; j < centered.cols(); ++j) {
        const double sd = std::sqrt(centered.col(j).squaredNorm() / static_cast<double>(f.rows() - 1));
        if (sd > 0) centered.col(j) /= sd;
    }
    return centered;
}

// Upper tail of the gamma law matching the mean and variance of
// sum_k lambda_k chi2_1.
double gamma_tail(double stat, const VectorXd& lambda) {
    const double mean = lambda.sum();
    const double var = 2.0 * lambda.squaredNorm();
    if (!(mean > 0) || !(var > 0)) return 1.0;
    const boost::math::gamma_distribution<double> law(mean * mean / var, var / mean);
    if (stat <= 0) return 1.0;
    return boost::math::cdf(boost::math::complement(law, stat));
}

// Median-heuristic bandwidths of x, y and cond.
using Bandwidths = std::array<double, 3>;

CiResult rcot(const MatrixXd& x, const MatrixXd& y, const MatrixXd& cond, const RcotConfig& cfg, std::uint64_t seed,
              const Bandwidths& sigma) {
    CiResult res;
    const Index n = x.rows();
    Rng rng = make_stream(seed, 0);
    const MatrixXd fx = fourier_features(x, cfg.n_features_xy, sigma[0], rng);
    const MatrixXd fy = fourier_features(y, cfg.n_features_xy, sigma[1], rng);
    const double scale = 1.0 / static_cast<double>(n - 1);

    MatrixXd rx = fx;
    MatrixXd ry = fy;
    MatrixXd cxy = fx.transpose() * fy * scale;
    if (cond.cols() > 0) {
        const MatrixXd fz = fourier_features(cond, cfg.n_features_cond, sigma[2], rng);
        const MatrixXd czz = fz.transpose() * fz * scale;
        const MatrixXd czx = fz.transpose() * fx * scale;
        const MatrixXd czy = fz.transpose() * fy * scale;
        double ridge = cfg.ridge;
        Eigen::LLT<MatrixXd> llt;
        const MatrixXd eye = MatrixXd::Identity(czz.rows(), czz.cols());
        for (int tries = 0;; ++tries) {
            llt.compute(czz + ridge * eye);
            if (llt.info() == Eigen::Success) break;
            if (tries > 20) throw std::runtime_error("conditioning features could not be regularized");
            ridge *= 10;
            res.ridge_floor = true;
        }
        const MatrixXd ax = llt.solve(czx);
        const MatrixXd ay = llt.solve(czy);
        cxy -= czx.transpose() * ay;
        rx -= fz * ax;
        ry -= fz * ay;
    }
    res.statistic = static_cast<double>(n) * cxy.squaredNorm();

    // Null covariance of the vectorized residual cross-products.
    MatrixXd prod(n, rx.cols() * ry.cols());
    for (Index i = 0; i < rx.cols(); ++i)
        for (Index j = 0; j < ry.cols(); ++j) prod.col(i * ry.cols() + j) = rx.col(i).cwiseProduct(ry.col(j));
    const MatrixXd cov = prod.transpose() * prod / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
    const VectorXd lambda = eig.eigenvalues().cwiseMax(0.0);
    res.p_value = gamma_tail(res.statistic, lambda);
    return res;
}

double residual_correlation_stat(const MatrixXd& rx, const MatrixXd& ry) {
    double s = 0;
    for (Index i = 0; i < rx.cols(); ++i)
        for (Index j = 0; j < ry.cols(); ++j) {
            const double den = rx.col(i).norm() * ry.col(j).norm();
            if (den > 0) {
                const double r = rx.col(i).dot(ry.col(j)) / den;
                s += r * r;
            }
        }
    return static_cast<double>(rx.rows()) * s;
}

// Rows sorted along the leading principal direction of cond, cut into
// consecutive groups; the last group absorbs any remainder.
std::vector<std::vector<Index>> strata(const MatrixXd& cond, std::size_t size) {
    const Index n = cond.rows();
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    if (cond.cols() == 0) return {order};
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cond.transpose() * cond);
    const VectorXd dir = eig.eigenvectors().col(cond.cols() - 1);
    const VectorXd proj = cond * dir;
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return proj(a) < proj(b); });
    std::vector<std::vector<Index>> out;
    const auto k = static_cast<std::size_t>(n) / size;
    for (std::size_t g = 0; g < std::max<std::size_t>(k, 1); ++g) {
        const auto lo = order.begin() + static_cast<std::ptrdiff_t>(g * size);
        const auto hi = g + 1 >= k ? order.end() : lo + static_cast<std::ptrdiff_t>(size);
        out.emplace_back(lo, hi);
    }
    return out;
}

CiResult permutation(const MatrixXd& x, const MatrixXd& y, const MatrixXd& cond, const CiMethod& m) {
    CiResult res;
    const Residualizer resid(cond);
    res.ridge_floor = resid.rank_deficient;
    const MatrixXd ry = resid(y);
    res.statistic = residual_correlation_stat(resid(x), ry);

    const auto groups = strata(cond, m.stratum_size);
    Rng rng = make_stream(m.seed, 1);
    MatrixXd xp(x.rows(), x.cols());
    std::vector<Index> perm;
    std::size_t exceed = 0;
    for (std::size_t k = 0; k < m.permutations; ++k) {
        for (const auto& grp : groups) {
            perm = grp;
            for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[uniform_index(rng, i)]);
            for (std::size_t i = 0; i < grp.size(); ++i) xp.row(grp[i]) = x.row(perm[i]);
        }
        if (residual_correlation_stat(resid(xp), ry) >= res.statistic) ++exceed;
    }
    res.p_value = static_cast<double>(1 + exceed) / static_cast<double>(m.permutations + 1);
    return res;
}

}  // namespace

namespace {

using BandwidthFn = std::function<double(int, const MatrixXd&)>;

CiResult run_test(const MatrixXd& x, const MatrixXd& y, const MatrixXd& cond, const CiMethod& method,
                  const BandwidthFn& bandwidth) {
    method.validate();
    if (x.rows() != y.rows() || x.rows() != cond.rows()) throw std::invalid_argument("CI inputs differ in row count");
    CiResult res;
    res.method = method.kind;
    res.n_used = static_cast<std::size_t>(x.rows());
    if (x.cols() == 0 || y.cols() == 0) return res;
    if (x.rows() < static_cast<Index>(min_ci_rows))
        throw std::invalid_argument("CI test needs at least " + std::to_string(min_ci_rows) + " rows");

    const MatrixXd sx = standardize(x);
    const MatrixXd sy = standardize(y);
    const MatrixXd sz = standardize(cond);
    if (sx.cols() == 0 || sy.cols() == 0) {
        res.degenerate = true;
        return res;
    }
    CiResult out;
    switch (method.kind) {
        case CiKind::fisher_z: out = fisher_z(sx, sy, sz); break;
        case CiKind::rcot: {
            const Bandwidths sigma{bandwidth(0, sx), bandwidth(1, sy), sz.cols() > 0 ? bandwidth(2, sz) : 1.0};
            out = rcot(sx, sy, sz, method.rcot, method.seed, sigma);
            break;
        }
        case CiKind::permutation: out = permutation(sx, sy, sz, method); break;
    }
    out.method = method.kind;
    out.n_used = res.n_used;
    out.p_value = std::clamp(out.p_value, 0.0, 1.0);
    return out;
}

}  // namespace

CiResult test_ci(const MatrixXd& x, const MatrixXd& y, const MatrixXd& cond, const CiMethod& method) {
    return run_test(x, y, cond, method,
                    [&](int, const MatrixXd& m) { return median_distance(m, method.rcot.bandwidth_rows); });
}

double BandwidthCache::get(const ColumnList& cols, const std::function<double()>& compute) {
    {
        std::lock_guard lock(mutex_);
        auto it = values_.find(cols);
        if (it != values_.end()) return it->second;
    }
    const double v = compute();
    std::lock_guard lock(mutex_);
    values_.emplace(cols, v);
    return v;
}

CiResult test_ci(const DataTable& data, const ColumnList& x, const ColumnList& y, const ColumnList& cond,
                 const CiMethod& method, BandwidthCache* cache) {
    auto overlap = [](const ColumnList& a, const ColumnList& b) {
        return std::any_of(a.begin(), a.end(), [&](auto c) { return std::find(b.begin(), b.end(), c) != b.end(); });
    };
    if (overlap(x, y) || overlap(x, cond) || overlap(y, cond))
        throw std::invalid_argument("CI test column sets must be disjoint");
    if (!cache) return test_ci(data.select(x), data.select(y), data.select(cond), method);
    const ColumnList* sets[3] = {&x, &y, &cond};
    return run_test(data.select(x), data.select(y), data.select(cond), method, [&](int which, const MatrixXd& m) {
        return cache->get(*sets[which], [&] { return median_distance(m, method.rcot.bandwidth_rows); });
    });
}

CiResult test_ci_unconditional(const DataTable& data, const ColumnList& x, const ColumnList& y,
                               const CiMethod& method) {
    return test_ci(data, x, y, {}, method);
}

}  // namespace frontdoor
