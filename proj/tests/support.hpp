// Test-only oracles and helpers. Everything here is deliberately independent
// of the library's computation paths: plain loops, exhaustive enumeration,
// staged grid search.
#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace testsupport {

// All-pairs AUC with tie credit 0.5, the brute-force definition.
inline double brute_force_auc(const Eigen::VectorXd& p_target,
                              const Eigen::VectorXd& p_external) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < p_target.size(); ++i) {
        for (Eigen::Index j = 0; j < p_external.size(); ++j) {
            if (p_target[i] > p_external[j])
                s += 1.0;
            else if (p_target[i] == p_external[j])
                s += 0.5;
        }
    }
    return s / (static_cast<double>(p_target.size()) * static_cast<double>(p_external.size()));
}

inline double log1pexp(double eta) {
    return eta > 0.0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

// Penalized log-likelihood of a one-covariate logistic model.
inline double logistic_penloglik(const std::vector<double>& x, const std::vector<double>& y,
                                 double b0, double b1, double ridge) {
    double ll = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double eta = b0 + b1 * x[i];
        ll += y[i] * eta - log1pexp(eta);
    }
    return ll - 0.5 * ridge * b1 * b1;
}

// Maximizes the penalized likelihood over (intercept, slope) in [-10, 10]^2
// by grid search with three refinement stages; final resolution ~5e-6.
inline std::pair<double, double> grid_search_logistic(const std::vector<double>& x,
                                                      const std::vector<double>& y,
                                                      double ridge) {
    double lo0 = -10.0, hi0 = 10.0, lo1 = -10.0, hi1 = 10.0;
    double best0 = 0.0, best1 = 0.0;
    constexpr int kPoints = 401;
    for (int stage = 0; stage < 3; ++stage) {
        const double step0 = (hi0 - lo0) / (kPoints - 1);
        const double step1 = (hi1 - lo1) / (kPoints - 1);
        double best = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < kPoints; ++i) {
            const double b0 = lo0 + i * step0;
            for (int j = 0; j < kPoints; ++j) {
                const double b1 = lo1 + j * step1;
                const double ll = logistic_penloglik(x, y, b0, b1, ridge);
                if (ll > best) {
                    best = ll;
                    best0 = b0;
                    best1 = b1;
                }
            }
        }
        lo0 = best0 - 2 * step0;
        hi0 = best0 + 2 * step0;
        lo1 = best1 - 2 * step1;
        hi1 = best1 + 2 * step1;
    }
    return {best0, best1};
}

inline std::vector<double> average_ranks(const std::vector<double>& v) {
    const std::size_t n = v.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&v](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;  // mean of 1-based ranks
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    return pearson(average_ranks(x), average_ranks(y));
}

// Textbook OLS with intercept via explicit normal-equation inversion.
inline Eigen::VectorXd ols_closed_form(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    Eigen::MatrixXd A(X.rows(), X.cols() + 1);
    A.col(0).setOnes();
    A.rightCols(X.cols()) = X;
    return (A.transpose() * A).inverse() * (A.transpose() * y);
}

// Expands integer-weighted rows into replicated rows.
inline std::pair<Eigen::MatrixXd, Eigen::VectorXd> replicate_rows(
    const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<int>& times) {
    int total = 0;
    for (int t : times) total += t;
    Eigen::MatrixXd Xr(total, X.cols());
    Eigen::VectorXd yr(total);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (int t = 0; t < times[static_cast<std::size_t>(i)]; ++t) {
            Xr.row(r) = X.row(i);
            yr[r] = y[i];
            ++r;
        }
    }
    return {Xr, yr};
}

}  // namespace testsupport
