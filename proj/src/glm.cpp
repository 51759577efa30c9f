#include "simwt/glm.hpp"

#include <cmath>

#include "simwt/errors.hpp"

namespace simwt {

namespace {

constexpr double kProbClamp = 1e-15;   // reported probabilities stay inside (0, 1)
constexpr double kIrlsClamp = 1e-10;   // keeps the working weights positive

double clamp01(double p, double eps) {
    if (p < eps) return eps;
    if (p > 1.0 - eps) return 1.0 - eps;
    return p;
}

// log(1 + exp(eta)) without overflow
double log1pexp(double eta) {
    return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

Eigen::VectorXd linear_predictor(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta) {
    return (X * beta.tail(X.cols())).array() + beta[0];
}

// -2 * weighted log-likelihood + ridge * |slopes|^2
double penalized_deviance(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& w, const Eigen::VectorXd& beta,
                          double ridge) {
    const Eigen::VectorXd eta = linear_predictor(X, beta);
    double ll = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        if (w[i] == 0.0) continue;
        ll += w[i] * (y[i] * eta[i] - log1pexp(eta[i]));
    }
    return -2.0 * ll + ridge * beta.tail(X.cols()).squaredNorm();
}

// Solves H x = g for a symmetric PSD system, failing loudly on rank
// deficiency (relative pivot threshold on the LDLT diagonal).
Eigen::VectorXd solve_checked(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                              double pivot_rel_tol, const char* what) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    const Eigen::VectorXd d = ldlt.vectorD().cwiseAbs();
    const double dmax = d.maxCoeff();
    const double dmin = d.minCoeff();
    if (!(dmax > 0.0) || dmin <= dmax * pivot_rel_tol) throw NumericalError(what);
    Eigen::VectorXd x = ldlt.solve(g);
    if (!x.allFinite()) throw NumericalError(what);
    return x;
}

}  // namespace

LogisticFit fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXd& labels,
                         const std::optional<Eigen::VectorXd>& weights, double ridge,
                         int max_iter, double tol) {
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    if (labels.size() != n) throw DimensionError("fit_logistic: label length does not match rows");
    if (n == 0) throw ValueError("fit_logistic: no rows");
    if (ridge < 0.0) throw ValueError("fit_logistic: negative ridge");
    if (max_iter < 1) throw ValueError("fit_logistic: max_iter must be positive");
    Eigen::VectorXd w = weights ? *weights : Eigen::VectorXd::Ones(n);
    if (w.size() != n) throw DimensionError("fit_logistic: weight length does not match rows");

    bool has_zero = false, has_one = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (w[i] < 0.0) throw ValueError("fit_logistic: negative weight");
        if (labels[i] != 0.0 && labels[i] != 1.0)
            throw ValueError("fit_logistic: labels must be 0 or 1");
        if (w[i] > 0.0) (labels[i] == 1.0 ? has_one : has_zero) = true;
    }
    if (!has_zero || !has_one)
        throw SingleClassError("fit_logistic: all positively weighted labels identical");

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(d + 1);
    double dev = penalized_deviance(X, labels, w, beta, ridge);

    LogisticFit fit;
    fit.ridge_penalty = ridge;

    Eigen::MatrixXd H(d + 1, d + 1);
    Eigen::VectorXd g(d + 1);
    int iter = 0;
    for (iter = 1; iter <= max_iter; ++iter) {
        const Eigen::VectorXd eta = linear_predictor(X, beta);
        H.setZero();
        g.setZero();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (w[i] == 0.0) continue;
            const double p = clamp01(1.0 / (1.0 + std::exp(-eta[i])), kIrlsClamp);
            const double wi = w[i] * p * (1.0 - p);
            const double ri = w[i] * (labels[i] - p);
            g[0] += ri;
            H(0, 0) += wi;
            for (Eigen::Index a = 0; a < d; ++a) {
                const double xa = X(i, a);
                g[a + 1] += ri * xa;
                H(0, a + 1) += wi * xa;
                for (Eigen::Index b = a; b < d; ++b) H(a + 1, b + 1) += wi * xa * X(i, b);
            }
        }
        for (Eigen::Index a = 1; a <= d; ++a) {
            g[a] -= ridge * beta[a];
            H(a, a) += ridge;
        }
        H = H.selfadjointView<Eigen::Upper>();

        const Eigen::VectorXd delta = solve_checked(
            H, g, 1e-13, "fit_logistic: weighted design matrix rank-deficient beyond ridge repair");

        // step halving keeps the penalized deviance non-increasing
        double step = 1.0;
        Eigen::VectorXd beta_new;
        double dev_new = 0.0;
        for (int half = 0; half < 30; ++half) {
            beta_new = beta + step * delta;
            dev_new = penalized_deviance(X, labels, w, beta_new, ridge);
            if (dev_new <= dev + 1e-12) break;
            step *= 0.5;
        }
        beta = beta_new;
        const double rel = std::abs(dev - dev_new) / (std::abs(dev_new) + 0.1);
        dev = dev_new;
        if (rel < tol) {
            fit.converged = true;
            break;
        }
    }
    fit.iterations = std::min(iter, max_iter);
    fit.final_deviance = dev;
    fit.coefficients = beta;
    const Eigen::VectorXd eta = linear_predictor(X, beta);
    fit.fitted_probabilities.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
        fit.fitted_probabilities[i] = clamp01(1.0 / (1.0 + std::exp(-eta[i])), kProbClamp);
    return fit;
}

Eigen::VectorXd predict_proba(const LogisticFit& fit, const Eigen::MatrixXd& X) {
    if (X.cols() + 1 != fit.coefficients.size())
        throw DimensionError("predict_proba: column count does not match fit");
    const Eigen::VectorXd eta = linear_predictor(X, fit.coefficients);
    Eigen::VectorXd p(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        p[i] = clamp01(1.0 / (1.0 + std::exp(-eta[i])), kProbClamp);
    return p;
}

LinearFit fit_weighted_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& weights) {
    const Eigen::Index n = X.rows();
    const Eigen::Index d = X.cols();
    if (y.size() != n) throw DimensionError("fit_weighted_linear: outcome length does not match rows");
    if (weights.size() != n)
        throw DimensionError("fit_weighted_linear: weight length does not match rows");
    if (n == 0) throw ValueError("fit_weighted_linear: no rows");

    double total = 0.0;
    Eigen::Index positive = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (weights[i] < 0.0) throw ValueError("fit_weighted_linear: negative weight");
        if (weights[i] > 0.0) {
            total += weights[i];
            ++positive;
        }
    }
    if (total <= 0.0) throw ValueError("fit_weighted_linear: weights sum to zero");
    if (positive < d + 1)
        throw NumericalError("fit_weighted_linear: fewer positive-weight rows than coefficients");

    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(d + 1, d + 1);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(d + 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double wi = weights[i];
        if (wi == 0.0) continue;
        const double wy = wi * y[i];
        H(0, 0) += wi;
        b[0] += wy;
        for (Eigen::Index a = 0; a < d; ++a) {
            const double xa = X(i, a);
            H(0, a + 1) += wi * xa;
            b[a + 1] += wy * xa;
            for (Eigen::Index c = a; c < d; ++c) H(a + 1, c + 1) += wi * xa * X(i, c);
        }
    }
    H = H.selfadjointView<Eigen::Upper>();

    LinearFit fit;
    fit.coefficients =
        solve_checked(H, b, 1e-12, "fit_weighted_linear: weighted normal equations singular");
    fit.training_weight_total = total;
    return fit;
}

Eigen::VectorXd predict_linear(const LinearFit& fit, const Eigen::MatrixXd& X) {
    if (X.cols() + 1 != fit.coefficients.size())
        throw DimensionError("predict_linear: column count does not match fit");
    return linear_predictor(X, fit.coefficients);
}

double rmse(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual) {
    if (predicted.size() != actual.size()) throw DimensionError("rmse: length mismatch");
    if (predicted.size() == 0) throw ValueError("rmse: empty input");
    double s = 0.0;
    for (Eigen::Index i = 0; i < predicted.size(); ++i) {
        const double e = predicted[i] - actual[i];
        s += e * e;
    }
    return std::sqrt(s / static_cast<double>(predicted.size()));
}

}  // namespace simwt
