#ifndef FRONTDOOR_ADJUST_HPP
#define FRONTDOOR_ADJUST_HPP

#include <frontdoor/data_table.hpp>

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace frontdoor {

// Linear model y ~ intercept + weights' x, with the intercept unpenalized.
struct RegressionModel {
    ColumnList design;  // table columns in weight order
    Eigen::VectorXd weights;
    double intercept = 0;
    double penalty = 0;
    // Design was rank-deficient, so the largest grid penalty was used.
    bool rank_deficient = false;

    double predict(const Eigen::Ref<const Eigen::RowVectorXd>& x) const { return intercept + x.dot(weights); }
    Eigen::VectorXd predict_rows(const Eigen::MatrixXd& x) const;
};

// 10^-3 .. 10^3, one point per decade.
const std::vector<double>& default_penalty_grid();

// Ridge regression with the penalty chosen by k-fold cross-validation over
// contiguous folds. Deterministic: no shuffling, ties go to the smaller penalty.
RegressionModel fit_ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                          const std::vector<double>& grid = default_penalty_grid(), int folds = 5);

// Regresses y on (z_cols..., t_col). Needs at least (|z_cols| + 2) * 10 rows.
RegressionModel fit_outcome_regression(const DataTable& data, std::size_t y_col, const ColumnList& z_cols,
                                       std::size_t t_col);

// Mean over treated rows minus mean over control rows of
//   m(j) = sum over t' in {0,1} of f(adjust_j, t') * P(t').
// `f` receives the adjustment columns of one row and a treatment value.
using OutcomePredictor = std::function<double(const Eigen::Ref<const Eigen::RowVectorXd>&, double)>;

double ate_plugin(const DataTable& test, const OutcomePredictor& f, const ColumnList& adjust_cols, std::size_t t_col,
                  double p_treated);

// Same with a fitted regression whose design is (adjust_cols..., t_col).
double ate_plugin(const DataTable& test, const RegressionModel& model, const ColumnList& adjust_cols,
                  std::size_t t_col, double p_treated);

// Share of rows with T = 1.
double treated_fraction(const DataTable& data, std::size_t t_col);

// Front-door adjustment with Z = B: regression and P(t') from the same data.
double ate_frontdoor_naive(const DataTable& data, std::size_t t_col, const ColumnList& b_cols, std::size_t y_col);

// Plug-in of the two-stage formula for the graph Z1 -> T, Z1 -> B, T -> B,
// B -> Z2 -> Y, T <-> Y:
//   P(y | do t) = sum over z1, b, z2 of (sum over t' of P(y | z1, z2, t') P(t' | z1))
//                 * P(z2 | b) P(b | t, z1) P(z1).
// E[Y | z1, z2, t'] is a ridge fit, P(t' | z1) a logistic fit, and B and Z2
// are linear-Gaussian in their conditioning sets. The outer sum is taken by
// Monte Carlo over `draws` samples, with z1 drawn from the empirical rows.
double ate_twostage_fig3(const DataTable& data, std::size_t t_col, const ColumnList& z1, const ColumnList& b,
                         const ColumnList& z2, std::size_t y_col, std::uint64_t seed, std::size_t draws = 10000);

// Logistic regression of a binary column on x (with intercept) by Newton
// iterations. Returns coefficients (intercept first).
Eigen::VectorXd fit_logistic(const Eigen::MatrixXd& x, const Eigen::VectorXd& t);

// Probability table over finitely supported variables. Configurations are
// indexed in mixed radix with variable 0 varying fastest.
class DiscreteJoint {
public:
    DiscreteJoint(std::vector<std::string> names, std::vector<int> cardinality, std::vector<double> prob);

    std::size_t variable_count() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<int>& cardinality() const { return card_; }
    const std::vector<double>& prob() const { return prob_; }
    std::size_t find(const std::string& name) const;

    // Marginal table over `vars`, in the given order.
    std::vector<double> marginal(const std::vector<std::size_t>& vars) const;
    std::size_t configurations(const std::vector<std::size_t>& vars) const;

private:
    std::vector<std::string> names_;
    std::vector<int> card_;
    std::vector<double> prob_;
};

// P(Y = y | do(T = t)) for t = 0, 1.
using InterventionalLaw = std::array<std::vector<double>, 2>;

struct FrontdoorEvaluation {
    InterventionalLaw by_z;  // adjusting for Z
    InterventionalLaw by_s;  // adjusting for S = (B, Z_i)
    // Some P(adjust, t') cell was zero where P(adjust | t) > 0; that cell
    // contributed nothing.
    bool zero_cell = false;
};

// sum over s of (sum over t' of P(y | s, t') P(t')) P(s | t), exactly.
InterventionalLaw frontdoor_sum(const DiscreteJoint& joint, std::size_t t, std::size_t y,
                                const std::vector<std::size_t>& adjust, bool* zero_cell = nullptr);

// T must be binary. Evaluates the adjustment with Z and with (B, Z_i).
FrontdoorEvaluation eval_generalized_frontdoor_discrete(const DiscreteJoint& joint, std::size_t t, std::size_t y,
                                                        const std::vector<std::size_t>& b,
                                                        const std::vector<std::size_t>& z,
                                                        const std::vector<std::size_t>& z_i);

// Exact two-stage formula (see ate_twostage_fig3) on a discrete joint.
InterventionalLaw eval_twostage_discrete(const DiscreteJoint& joint, std::size_t t, std::size_t z1,
                                         std::size_t b, std::size_t z2, std::size_t y, bool* zero_cell = nullptr);

double total_variation(const std::vector<double>& p, const std::vector<double>& q);

}  // namespace frontdoor

#endif  // FRONTDOOR_ADJUST_HPP
