#pragma once

#include <Eigen/Dense>
#include <optional>

namespace simwt {

struct LogisticFit {
    Eigen::VectorXd coefficients;          // intercept first, then one slope per column
    Eigen::VectorXd fitted_probabilities;  // strictly inside (0, 1)
    bool converged = false;
    int iterations = 0;
    double final_deviance = 0.0;  // penalized deviance: -2 log-lik + ridge * |slopes|^2
    double ridge_penalty = 0.0;
};

struct LinearFit {
    Eigen::VectorXd coefficients;  // intercept first
    double training_weight_total = 0.0;
};

// IRLS defaults used by the propensity pipeline. The tiny ridge keeps
// coefficients finite under the quasi-separation that is likely on samples of
// 10-50 rows per subgroup.
inline constexpr int kLogisticMaxIter = 100;
inline constexpr double kLogisticTol = 1e-8;
inline constexpr double kLogisticRidge = 1e-6;

// Maximizes the weight-scaled log-likelihood minus ridge/2 * |slopes|^2
// (intercept always included, never penalized) by iteratively reweighted
// least squares with step halving. Convergence is a relative change of the
// penalized deviance below tol; converged=false when max_iter is exhausted.
//
// The ridge penalty is absolute, not per observation: a fit with integer
// weights equals the unweighted fit of the row-replicated data at the same
// ridge value. Covariates are not standardized internally.
//
// Throws SingleClassError when the positively weighted rows carry only one
// label, NumericalError when the weighted design is rank-deficient beyond
// ridge repair.
LogisticFit fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& labels,
                         const std::optional<Eigen::VectorXd>& weights = std::nullopt,
                         double ridge = 0.0, int max_iter = kLogisticMaxIter,
                         double tol = kLogisticTol);

// Elementwise logistic of intercept + X * slopes; outputs in (0, 1).
Eigen::VectorXd predict_proba(const LogisticFit& fit, const Eigen::MatrixXd& X);

// Minimizes sum_j w_j (y_j - b0 - x_j' b)^2. Zero-weight rows are skipped
// during accumulation, so they have exactly no influence. Throws
// NumericalError when the weighted normal equations are singular.
LinearFit fit_weighted_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& weights);

Eigen::VectorXd predict_linear(const LinearFit& fit, const Eigen::MatrixXd& X);

// Root mean squared difference, accumulated in row order.
double rmse(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual);

}  // namespace simwt
