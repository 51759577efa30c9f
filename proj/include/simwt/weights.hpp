#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "simwt/dataset.hpp"
#include "simwt/glm.hpp"

namespace simwt {

// One target-vs-external comparison: a logistic membership model fitted on
// covariates plus outcome, its in-sample scores split by origin, and the
// score AUC (the probability that a random target observation scores above a
// random external one).
struct PropensityComparison {
    std::string target_label;
    std::string external_label;
    LogisticFit fit;
    Eigen::VectorXd p_target;
    Eigen::VectorXd p_external;
    double auc = 0.5;
    double auc_clamped = 0.5;  // max(auc, 0.5); caps the weight multiplier at 2
};

// An external subgroup whose propensity fit failed; its rows carry weight 0.
struct FailedComparison {
    std::string external_label;
    std::string reason;
};

struct WeightedSample {
    Dataset data;             // target rows first, then externals grouped by subgroup
    Eigen::VectorXd weights;  // target rows all exactly 1
    Eigen::Index n_target = 0;
    double ess = 0.0;
    double ess_ratio = 0.0;  // ess / n_target
    std::optional<double> truncation_percentile;
    std::vector<PropensityComparison> comparisons;
    std::vector<FailedComparison> failures;
};

struct WeightOptions {
    // Percentile of the target score distribution below which external
    // weights are zeroed; disabled when unset. 5 is the conventional choice.
    std::optional<double> truncation_percentile;
    // When false, external weights are the raw propensity scores p_hat
    // without the subgroup-level 1/AUC adjustment.
    bool auc_adjustment = true;
};

// Tie-corrected Mann-Whitney statistic:
// (#{p_t > p_e} + 0.5 #{p_t = p_e}) / (n_target * n_external).
double compute_auc(const Eigen::VectorXd& p_target, const Eigen::VectorXd& p_external);

// Fits target-vs-external membership on the stacked rows with predictors
// covariates + outcome, label 1 for target rows. Uses the IRLS defaults
// (ridge 1e-6, max_iter 100, tol 1e-8). Scores and the AUC are in-sample;
// the subgroup sizes in play are far too small for held-out estimation.
PropensityComparison fit_propensity(const Dataset& target, const Dataset& external);

// Target weights are all exactly one; external weight_j = p_hat_j / auc_clamped.
std::pair<Eigen::VectorXd, Eigen::VectorXd> compute_weights(const PropensityComparison& comparison);

// Zeroes the weight of every external observation whose propensity score lies
// strictly below the given percentile (type 7) of the target score
// distribution. The comparison is on the score scale, not the weight scale.
Eigen::VectorXd truncate_weights(const PropensityComparison& comparison,
                                 const Eigen::VectorXd& external_weights, double percentile);

// Kish effective sample size (sum w)^2 / (sum w^2).
double effective_sample_size(const Eigen::VectorXd& weights);

// Runs fit_propensity + compute_weights (+ truncation) independently per
// external subgroup and concatenates target rows (weight 1, included once)
// with all external rows. An external whose fit fails is assigned all-zero
// weights and recorded in failures rather than aborting the whole sample.
WeightedSample build_weighted_sample(const Dataset& target, const std::vector<Dataset>& externals,
                                     const WeightOptions& options = {});

}  // namespace simwt
