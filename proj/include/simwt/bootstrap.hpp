#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "simwt/dataset.hpp"
#include "simwt/weights.hpp"

namespace simwt {

enum class TrainingMethod { Weighted, Global, Local };
enum class LossKind { Absolute, Squared };

const char* to_string(TrainingMethod method);
std::string to_string(LossKind loss);

struct BootstrapOptions {
    int B = 1000;
    LossKind loss = LossKind::Absolute;
    // Power transform exponent for the outcome (2 squares it, the clinical
    // pipeline's convention); predictions are inverted back before losses are
    // computed, so all reported errors live on the original outcome scale.
    std::optional<double> boxcox_lambda;
    std::optional<double> truncation_percentile;  // weighted pipeline
    std::uint64_t seed = 0;
    int jobs = 0;  // worker threads for replicates; 0 = hardware concurrency
};

struct ObservationError {
    Eigen::Index row = 0;  // row index within the target subgroup
    double outcome = 0.0;  // original scale
    double mean_loss = 0.0;  // mean over out-of-bag replicates (MAE under absolute loss)
    double p5 = 0.0;
    double p95 = 0.0;
    int n_oob = 0;  // replicates in which this row was out of bag
};

struct MethodReport {
    TrainingMethod method = TrainingMethod::Weighted;
    double apparent_error = 0.0;
    double oob_error = 0.0;             // leave-one-out bootstrap error
    double no_information_error = 0.0;  // gamma
    double relative_overfitting = 0.0;  // clipped to [0, 1]
    double weight_632 = 0.0;
    double estimate = 0.0;  // the .632+ estimate
    bool degenerate_gamma = false;
    double training_ess = 0.0;  // ESS of the full-data training sample
    int failed_replicates = 0;
    std::vector<ObservationError> per_observation;
    // raw out-of-bag losses per target row, in replicate order; feeds the
    // percentile bands and the formula-replay checks
    std::vector<std::vector<double>> oob_losses;
    Eigen::VectorXd full_fit_predictions;  // target rows, original scale
};

struct WeightedCdf {
    std::vector<double> values;      // sorted distinct support
    std::vector<double> cumulative;  // non-decreasing, ends at 1
};

struct BootstrapReport {
    std::string target_label;
    int B = 0;
    std::vector<MethodReport> methods;  // weighted, global, local
    // per-method weighted CDFs of the outcome on the original scale
    std::vector<std::pair<std::string, WeightedCdf>> cdfs;
};

// Power transform y -> y^lambda (lambda = 2 squares, the stated convention);
// lambda must be positive and inputs nonnegative.
Eigen::VectorXd box_cox(const Eigen::VectorXd& y, double lambda);

// Inverse transform t -> t^(1/lambda); inputs must be nonnegative.
Eigen::VectorXd box_cox_inverse(const Eigen::VectorXd& t, double lambda);

// Step CDF with a jump of w_j / sum(w) at each sorted value, ties merged.
WeightedCdf weighted_cdf(const Eigen::VectorXd& values, const Eigen::VectorXd& weights);

// The .632+ combination rule. R = (oob - apparent) / (gamma - apparent)
// clipped to [0, 1] (0 and flagged when gamma <= apparent),
// w = .632 / (1 - .368 R), estimate = (1 - w) apparent + w min(oob, gamma).
struct Dot632Parts {
    double apparent = 0.0;
    double oob = 0.0;
    double gamma = 0.0;
};
struct Dot632Combined {
    double r_hat = 0.0;
    double w_hat = 0.0;
    double estimate = 0.0;
    bool degenerate_gamma = false;
};
Dot632Combined combine_632plus(const Dot632Parts& parts);

// .632+ bootstrap prediction error for one training method. Rows are
// resampled with replacement stratified by subgroup (each subgroup keeps its
// size, so the weighted pipeline always sees every center); the resample
// sequence depends only on (seed, replicate), so all three methods pair up on
// identical resamples. Out-of-bag evaluation uses target rows only.
MethodReport bootstrap_632plus(const Dataset& data, const std::string& target_label,
                               TrainingMethod method, const BootstrapOptions& options);

// Runs the three methods plus the outcome CDFs for one target subgroup.
BootstrapReport run_bootstrap_report(const Dataset& data, const std::string& target_label,
                                     const BootstrapOptions& options);

}  // namespace simwt
