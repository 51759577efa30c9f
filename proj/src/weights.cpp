#include "simwt/weights.hpp"

#include <algorithm>
#include <cmath>

#include "simwt/errors.hpp"
#include "simwt/stats.hpp"

namespace simwt {

double compute_auc(const Eigen::VectorXd& p_target, const Eigen::VectorXd& p_external) {
    if (p_target.size() == 0 || p_external.size() == 0)
        throw ValueError("compute_auc: empty score vector");
    std::vector<double> ext(p_external.begin(), p_external.end());
    std::sort(ext.begin(), ext.end());
    double s = 0.0;  // exact: every summand is an integer or half-integer
    for (Eigen::Index i = 0; i < p_target.size(); ++i) {
        const auto lo = std::lower_bound(ext.begin(), ext.end(), p_target[i]);
        const auto hi = std::upper_bound(lo, ext.end(), p_target[i]);
        s += static_cast<double>(lo - ext.begin()) + 0.5 * static_cast<double>(hi - lo);
    }
    return s / (static_cast<double>(p_target.size()) * static_cast<double>(p_external.size()));
}

PropensityComparison fit_propensity(const Dataset& target, const Dataset& external) {
    if (target.n_rows() == 0 || external.n_rows() == 0)
        throw ValueError("fit_propensity: empty subgroup");
    if (!same_schema(target, external))
        throw DimensionError("fit_propensity: feature schemas differ");

    const Eigen::Index nt = target.n_rows();
    const Eigen::Index ne = external.n_rows();
    const Eigen::Index d = target.n_features();

    // Z matrix: covariates plus the outcome as the last predictor
    Eigen::MatrixXd Z(nt + ne, d + 1);
    Z.block(0, 0, nt, d) = target.covariates;
    Z.block(0, d, nt, 1) = target.outcome;
    Z.block(nt, 0, ne, d) = external.covariates;
    Z.block(nt, d, ne, 1) = external.outcome;

    Eigen::VectorXd membership(nt + ne);
    membership.head(nt).setOnes();
    membership.tail(ne).setZero();

    PropensityComparison c;
    c.target_label = target.subgroup.empty() ? std::string{} : target.subgroup.front();
    c.external_label = external.subgroup.empty() ? std::string{} : external.subgroup.front();
    c.fit = fit_logistic(Z, membership, std::nullopt, kLogisticRidge, kLogisticMaxIter,
                         kLogisticTol);
    c.p_target = c.fit.fitted_probabilities.head(nt);
    c.p_external = c.fit.fitted_probabilities.tail(ne);
    c.auc = compute_auc(c.p_target, c.p_external);
    c.auc_clamped = std::max(c.auc, 0.5);
    return c;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> compute_weights(
    const PropensityComparison& comparison) {
    Eigen::VectorXd target = Eigen::VectorXd::Ones(comparison.p_target.size());
    Eigen::VectorXd external = comparison.p_external / comparison.auc_clamped;
    return {std::move(target), std::move(external)};
}

Eigen::VectorXd truncate_weights(const PropensityComparison& comparison,
                                 const Eigen::VectorXd& external_weights, double percentile) {
    if (!(percentile >= 0.0 && percentile < 100.0))
        throw ValueError("truncate_weights: percentile outside [0, 100)");
    if (external_weights.size() != comparison.p_external.size())
        throw DimensionError("truncate_weights: weight length does not match comparison");
    const double threshold = percentile_type7(
        std::vector<double>(comparison.p_target.begin(), comparison.p_target.end()), percentile);
    Eigen::VectorXd out = external_weights;
    for (Eigen::Index j = 0; j < out.size(); ++j) {
        if (comparison.p_external[j] < threshold) out[j] = 0.0;
    }
    return out;
}

double effective_sample_size(const Eigen::VectorXd& weights) {
    if (weights.size() == 0) throw ValueError("effective_sample_size: empty weights");
    double s = 0.0, s2 = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        if (weights[i] < 0.0) throw ValueError("effective_sample_size: negative weight");
        s += weights[i];
        s2 += weights[i] * weights[i];
    }
    if (s2 <= 0.0) throw ValueError("effective_sample_size: all weights zero");
    return s * s / s2;
}

WeightedSample build_weighted_sample(const Dataset& target, const std::vector<Dataset>& externals,
                                     const WeightOptions& options) {
    target.validate();
    if (externals.empty()) throw ValueError("build_weighted_sample: no external subgroups");
    if (options.truncation_percentile &&
        !(*options.truncation_percentile >= 0.0 && *options.truncation_percentile < 100.0))
        throw ValueError("build_weighted_sample: truncation percentile outside [0, 100)");
    for (const Dataset& e : externals) {
        if (!same_schema(target, e))
            throw DimensionError("build_weighted_sample: feature schemas differ");
    }

    WeightedSample ws;
    ws.n_target = target.n_rows();
    ws.truncation_percentile = options.truncation_percentile;

    std::vector<const Dataset*> parts;
    parts.push_back(&target);
    for (const Dataset& e : externals) parts.push_back(&e);
    ws.data = concat_rows(parts);

    Eigen::Index total = target.n_rows();
    for (const Dataset& e : externals) total += e.n_rows();
    ws.weights.resize(total);
    ws.weights.head(target.n_rows()).setOnes();

    Eigen::Index row = target.n_rows();
    std::size_t idx = 0;
    for (const Dataset& e : externals) {
        ++idx;
        std::string label = e.subgroup.empty() ? "external" + std::to_string(idx)
                                               : e.subgroup.front();
        try {
            e.validate();
            PropensityComparison c = fit_propensity(target, e);
            Eigen::VectorXd w =
                options.auc_adjustment ? compute_weights(c).second : c.p_external;
            if (options.truncation_percentile)
                w = truncate_weights(c, w, *options.truncation_percentile);
            ws.weights.segment(row, e.n_rows()) = w;
            ws.comparisons.push_back(std::move(c));
        } catch (const Error& err) {
            ws.weights.segment(row, e.n_rows()).setZero();
            ws.failures.push_back({std::move(label), err.what()});
        }
        row += e.n_rows();
    }

    ws.ess = effective_sample_size(ws.weights);
    ws.ess_ratio = ws.ess / static_cast<double>(ws.n_target);
    return ws;
}

}  // namespace simwt
