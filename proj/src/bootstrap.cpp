#include "simwt/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "parallel_for.hpp"
#include "simwt/errors.hpp"
#include "simwt/glm.hpp"
#include "simwt/rng.hpp"
#include "simwt/stats.hpp"

namespace simwt {

namespace {

double loss_of(LossKind kind, double actual, double predicted) {
    const double e = actual - predicted;
    return kind == LossKind::Absolute ? std::abs(e) : e * e;
}

// Training sample for one method on (possibly resampled) data split into the
// target block and the external blocks.
struct TrainingSample {
    Dataset data;
    Eigen::VectorXd weights;
    double ess = 0.0;
};

TrainingSample assemble_training(TrainingMethod method, const Dataset& target,
                                 const std::vector<Dataset>& externals,
                                 const BootstrapOptions& options) {
    TrainingSample t;
    switch (method) {
        case TrainingMethod::Local:
            t.data = target;
            t.weights = Eigen::VectorXd::Ones(target.n_rows());
            t.ess = static_cast<double>(target.n_rows());
            break;
        case TrainingMethod::Global: {
            std::vector<const Dataset*> parts{&target};
            for (const Dataset& e : externals) parts.push_back(&e);
            t.data = concat_rows(parts);
            t.weights = Eigen::VectorXd::Ones(t.data.n_rows());
            t.ess = static_cast<double>(t.data.n_rows());
            break;
        }
        case TrainingMethod::Weighted: {
            WeightOptions wopt;
            wopt.truncation_percentile = options.truncation_percentile;
            wopt.auc_adjustment = true;
            WeightedSample ws = build_weighted_sample(target, externals, wopt);
            t.data = std::move(ws.data);
            t.weights = std::move(ws.weights);
            t.ess = ws.ess;
            break;
        }
    }
    return t;
}

// Predictions mapped back to the original outcome scale. Negative values on
// the transformed scale have no preimage under the power transform and are
// clamped to zero before inversion.
Eigen::VectorXd to_original_scale(Eigen::VectorXd predictions,
                                  const std::optional<double>& lambda) {
    if (!lambda) return predictions;
    for (Eigen::Index i = 0; i < predictions.size(); ++i)
        if (predictions[i] < 0.0) predictions[i] = 0.0;
    return box_cox_inverse(predictions, *lambda);
}

struct ReplicateOutcome {
    bool failed = false;
    std::vector<std::pair<Eigen::Index, double>> losses;  // (target row, loss)
};

}  // namespace

const char* to_string(TrainingMethod method) {
    switch (method) {
        case TrainingMethod::Weighted: return "weighted";
        case TrainingMethod::Global: return "global";
        case TrainingMethod::Local: return "local";
    }
    return "?";
}

std::string to_string(LossKind loss) {
    return loss == LossKind::Absolute ? "absolute" : "squared";
}

Eigen::VectorXd box_cox(const Eigen::VectorXd& y, double lambda) {
    if (!(lambda > 0.0)) throw ValueError("box_cox: lambda must be positive");
    Eigen::VectorXd out(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (y[i] < 0.0) throw ValueError("box_cox: negative input");
        out[i] = lambda == 2.0 ? y[i] * y[i] : std::pow(y[i], lambda);
    }
    return out;
}

Eigen::VectorXd box_cox_inverse(const Eigen::VectorXd& t, double lambda) {
    if (!(lambda > 0.0)) throw ValueError("box_cox_inverse: lambda must be positive");
    Eigen::VectorXd out(t.size());
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        if (t[i] < 0.0) throw ValueError("box_cox_inverse: negative input");
        out[i] = lambda == 2.0 ? std::sqrt(t[i]) : std::pow(t[i], 1.0 / lambda);
    }
    return out;
}

WeightedCdf weighted_cdf(const Eigen::VectorXd& values, const Eigen::VectorXd& weights) {
    if (values.size() != weights.size()) throw DimensionError("weighted_cdf: length mismatch");
    if (values.size() == 0) throw ValueError("weighted_cdf: empty input");
    double total = 0.0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        if (weights[i] < 0.0) throw ValueError("weighted_cdf: negative weight");
        total += weights[i];
    }
    if (total <= 0.0) throw ValueError("weighted_cdf: all weights zero");

    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(static_cast<std::size_t>(values.size()));
    for (Eigen::Index i = 0; i < values.size(); ++i) pairs.emplace_back(values[i], weights[i]);
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    WeightedCdf cdf;
    double running = 0.0;
    std::size_t i = 0;
    while (i < pairs.size()) {
        const double v = pairs[i].first;
        double w = 0.0;
        while (i < pairs.size() && pairs[i].first == v) {
            w += pairs[i].second;
            ++i;
        }
        running += w;
        cdf.values.push_back(v);
        cdf.cumulative.push_back(running / total);
    }
    cdf.cumulative.back() = 1.0;
    return cdf;
}

Dot632Combined combine_632plus(const Dot632Parts& parts) {
    Dot632Combined out;
    if (parts.gamma > parts.apparent) {
        const double r = (parts.oob - parts.apparent) / (parts.gamma - parts.apparent);
        out.r_hat = std::clamp(r, 0.0, 1.0);
    } else {
        out.r_hat = 0.0;
        out.degenerate_gamma = true;
    }
    out.w_hat = 0.632 / (1.0 - 0.368 * out.r_hat);
    out.estimate = (1.0 - out.w_hat) * parts.apparent +
                   out.w_hat * std::min(parts.oob, parts.gamma);
    return out;
}

MethodReport bootstrap_632plus(const Dataset& data, const std::string& target_label,
                               TrainingMethod method, const BootstrapOptions& options) {
    data.validate();
    if (options.B < 1) throw ValueError("bootstrap_632plus: B must be positive");

    auto [target_orig, externals_orig] = split_by_target(data, target_label);
    if (target_orig.n_rows() < target_orig.n_features() + 2)
        throw DataError("bootstrap_632plus: target subgroup smaller than d + 2");
    if (method == TrainingMethod::Weighted && externals_orig.empty())
        throw DataError("bootstrap_632plus: weighted method needs at least one external subgroup");

    // model on the transformed scale, losses on the original scale
    Dataset target = target_orig;
    std::vector<Dataset> externals = externals_orig;
    if (options.boxcox_lambda) {
        target.outcome = box_cox(target.outcome, *options.boxcox_lambda);
        for (Dataset& e : externals) e.outcome = box_cox(e.outcome, *options.boxcox_lambda);
    }

    MethodReport report;
    report.method = method;

    const Eigen::Index nt = target.n_rows();

    const TrainingSample full = assemble_training(method, target, externals, options);
    report.training_ess = full.ess;
    const LinearFit full_fit =
        fit_weighted_linear(full.data.covariates, full.data.outcome, full.weights);
    report.full_fit_predictions =
        to_original_scale(predict_linear(full_fit, target.covariates), options.boxcox_lambda);

    double apparent = 0.0;
    for (Eigen::Index i = 0; i < nt; ++i)
        apparent +=
            loss_of(options.loss, target_orig.outcome[i], report.full_fit_predictions[i]);
    apparent /= static_cast<double>(nt);

    // no-information error: every prediction paired with every outcome
    double gamma = 0.0;
    for (Eigen::Index i = 0; i < nt; ++i)
        for (Eigen::Index j = 0; j < nt; ++j)
            gamma += loss_of(options.loss, target_orig.outcome[j], report.full_fit_predictions[i]);
    gamma /= static_cast<double>(nt) * static_cast<double>(nt);

    // bootstrap replicates; the resample draw depends only on (seed, b)
    std::vector<ReplicateOutcome> replicate(static_cast<std::size_t>(options.B));
    detail::parallel_for(replicate.size(), options.jobs, [&](std::size_t b) {
        RandomStream rs = RandomStream::derive(options.seed, {static_cast<std::uint64_t>(b)});

        Dataset target_b;
        std::vector<Dataset> externals_b;
        std::set<Eigen::Index> in_bag;
        {
            std::vector<Eigen::Index> idx(static_cast<std::size_t>(nt));
            for (auto& v : idx) {
                v = static_cast<Eigen::Index>(rs.next_below(static_cast<std::uint64_t>(nt)));
                in_bag.insert(v);
            }
            target_b = target.subset(idx);
        }
        for (const Dataset& e : externals) {
            std::vector<Eigen::Index> idx(static_cast<std::size_t>(e.n_rows()));
            for (auto& v : idx)
                v = static_cast<Eigen::Index>(
                    rs.next_below(static_cast<std::uint64_t>(e.n_rows())));
            externals_b.push_back(e.subset(idx));
        }

        ReplicateOutcome& out = replicate[b];
        try {
            const TrainingSample train = assemble_training(method, target_b, externals_b, options);
            const LinearFit fit =
                fit_weighted_linear(train.data.covariates, train.data.outcome, train.weights);
            for (Eigen::Index i = 0; i < nt; ++i) {
                if (in_bag.count(i)) continue;
                Eigen::VectorXd pred = to_original_scale(
                    predict_linear(fit, target.covariates.row(i)), options.boxcox_lambda);
                out.losses.emplace_back(i, loss_of(options.loss, target_orig.outcome[i], pred[0]));
            }
        } catch (const Error&) {
            out.failed = true;
        }
    });

    report.oob_losses.assign(static_cast<std::size_t>(nt), {});
    for (const ReplicateOutcome& r : replicate) {
        if (r.failed) {
            ++report.failed_replicates;
            continue;
        }
        for (const auto& [row, loss] : r.losses)
            report.oob_losses[static_cast<std::size_t>(row)].push_back(loss);
    }

    // leave-one-out bootstrap error: per-row mean over the replicates where
    // the row was out of bag, averaged over rows seen at least once
    double oob_sum = 0.0;
    Eigen::Index oob_rows = 0;
    for (Eigen::Index i = 0; i < nt; ++i) {
        const auto& losses = report.oob_losses[static_cast<std::size_t>(i)];
        ObservationError obs;
        obs.row = i;
        obs.outcome = target_orig.outcome[i];
        obs.n_oob = static_cast<int>(losses.size());
        if (!losses.empty()) {
            obs.mean_loss = mean_of(losses);
            obs.p5 = percentile_type7(losses, 5.0);
            obs.p95 = percentile_type7(losses, 95.0);
            oob_sum += obs.mean_loss;
            ++oob_rows;
        }
        report.per_observation.push_back(obs);
    }
    // with B so small that no row was ever left out, fall back to the
    // apparent error rather than dividing by zero
    const double oob = oob_rows > 0 ? oob_sum / static_cast<double>(oob_rows) : apparent;

    report.apparent_error = apparent;
    report.oob_error = oob;
    report.no_information_error = gamma;
    const Dot632Combined c = combine_632plus({apparent, oob, gamma});
    report.relative_overfitting = c.r_hat;
    report.weight_632 = c.w_hat;
    report.estimate = c.estimate;
    report.degenerate_gamma = c.degenerate_gamma;
    return report;
}

BootstrapReport run_bootstrap_report(const Dataset& data, const std::string& target_label,
                                     const BootstrapOptions& options) {
    BootstrapReport report;
    report.target_label = target_label;
    report.B = options.B;
    for (TrainingMethod m :
         {TrainingMethod::Weighted, TrainingMethod::Global, TrainingMethod::Local}) {
        report.methods.push_back(bootstrap_632plus(data, target_label, m, options));
    }

    // outcome CDFs on the original scale; the weighted one uses the final
    // weights of the full-data pipeline (fitted on the modeling scale)
    auto [target, externals] = split_by_target(data, target_label);
    {
        Dataset t = target;
        std::vector<Dataset> ex = externals;
        if (options.boxcox_lambda) {
            t.outcome = box_cox(t.outcome, *options.boxcox_lambda);
            for (Dataset& e : ex) e.outcome = box_cox(e.outcome, *options.boxcox_lambda);
        }
        WeightOptions wopt;
        wopt.truncation_percentile = options.truncation_percentile;
        const WeightedSample ws = build_weighted_sample(t, ex, wopt);

        std::vector<const Dataset*> parts{&target};
        for (const Dataset& e : externals) parts.push_back(&e);
        const Dataset all = concat_rows(parts);  // original-scale outcomes, same row order

        report.cdfs.emplace_back("weighted", weighted_cdf(all.outcome, ws.weights));
        report.cdfs.emplace_back("global",
                                 weighted_cdf(all.outcome, Eigen::VectorXd::Ones(all.n_rows())));
        report.cdfs.emplace_back(
            "local", weighted_cdf(target.outcome, Eigen::VectorXd::Ones(target.n_rows())));
    }
    return report;
}

}  // namespace simwt
