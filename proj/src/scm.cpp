#include "simwt/scm.hpp"

#include <string>

#include "simwt/errors.hpp"
#include "simwt/rng.hpp"

namespace simwt {

namespace {

// Stream tags keep training, test and membership draws independent.
constexpr std::uint64_t kStreamTraining = 0;
constexpr std::uint64_t kStreamTest = 1;
constexpr std::uint64_t kStreamMembership = 2;

std::vector<std::string> feature_names(int k, int c) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(k + c));
    for (int p = 1; p <= k; ++p) names.push_back("x_s" + std::to_string(p));
    for (int i = 1; i <= c; ++i) names.push_back("x_g" + std::to_string(i));
    return names;
}

void validate_spec(const ScenarioSpec& spec) {
    if (spec.shift_vector.size() < 2) throw ValueError("ScenarioSpec: needs at least 2 subgroups");
    if (spec.subgroup_sizes.size() != spec.shift_vector.size())
        throw DimensionError("ScenarioSpec: shift_vector and subgroup_sizes lengths differ");
    for (int s : spec.subgroup_sizes) {
        if (s < 1) throw ValueError("ScenarioSpec: subgroup sizes must be positive");
    }
    if (spec.k < 1) throw ValueError("ScenarioSpec: k must be at least 1");
    if (spec.c < 0) throw ValueError("ScenarioSpec: c must be nonnegative");
}

// Generates `count` rows of one subgroup with shift `a`, writing covariates,
// outcome and the latent h starting at `row`. The noise draw order
// (eps_h, eps_xs..., eps_xg..., eps_y) is identical across scenario kinds.
void generate_block(const ScenarioSpec& spec, double a, int count, RandomStream& rs,
                    Eigen::Index row, Eigen::MatrixXd& covariates, Eigen::VectorXd& outcome,
                    Eigen::VectorXd& hidden) {
    const int k = spec.k;
    const int c = spec.c;
    const ScmCoefficients& cf = spec.coefficients;
    for (int r = 0; r < count; ++r, ++row) {
        const double eps_h = rs.next_normal();
        double h = eps_h;
        if (spec.kind == ScenarioKind::CovariateOutcome) h = eps_h + a;

        double sum_xs = 0.0;
        for (int p = 0; p < k; ++p) {
            double x = rs.next_normal() + h;
            if (spec.kind == ScenarioKind::Covariate) x += a;
            covariates(row, p) = x;
            sum_xs += x;
        }
        double sum_xg = 0.0;
        for (int i = 0; i < c; ++i) {
            const double x = rs.next_normal();
            covariates(row, k + i) = x;
            sum_xg += x;
        }
        const double eps_y = rs.next_normal();
        double y = cf.global_covariate_effect * sum_xg + cf.subgroup_covariate_effect * sum_xs +
                   cf.confounder_effect * h + eps_y;
        if (spec.kind == ScenarioKind::Outcome) y += a;
        outcome[row] = y;
        hidden[row] = h;
    }
}

std::vector<int> draw_categorical_sizes(const ScenarioSpec& spec) {
    const auto m = spec.subgroup_sizes.size();
    int total = 0;
    for (int s : spec.subgroup_sizes) total += s;
    RandomStream rs = RandomStream::derive(spec.seed, {kStreamMembership});
    std::vector<int> sizes(m, 0);
    // redraw until every subgroup is present, keeping the Dataset invariant
    for (;;) {
        std::fill(sizes.begin(), sizes.end(), 0);
        for (int i = 0; i < total; ++i) ++sizes[rs.next_below(m)];
        bool all_present = true;
        for (int s : sizes) all_present = all_present && s > 0;
        if (all_present) return sizes;
    }
}

}  // namespace

const char* to_string(ScenarioKind kind) {
    switch (kind) {
        case ScenarioKind::Covariate: return "covariate";
        case ScenarioKind::Outcome: return "outcome";
        case ScenarioKind::CovariateOutcome: return "covariate-outcome";
    }
    return "?";
}

const char* to_string(Similarity similarity) {
    switch (similarity) {
        case Similarity::Similar: return "similar";
        case Similarity::Medium: return "medium";
        case Similarity::Dissimilar: return "dissimilar";
    }
    return "?";
}

ScenarioKind scenario_kind_from_string(std::string_view s) {
    if (s == "covariate") return ScenarioKind::Covariate;
    if (s == "outcome") return ScenarioKind::Outcome;
    if (s == "covariate-outcome" || s == "covariate+outcome")
        return ScenarioKind::CovariateOutcome;
    throw ValueError("unknown scenario kind '" + std::string(s) + "'");
}

Similarity similarity_from_string(std::string_view s) {
    if (s == "similar") return Similarity::Similar;
    if (s == "medium") return Similarity::Medium;
    if (s == "dissimilar") return Similarity::Dissimilar;
    throw ValueError("unknown similarity '" + std::string(s) + "'");
}

std::vector<double> make_shift_vector(int num_external, Similarity similarity) {
    if (num_external < 1) throw ValueError("make_shift_vector: need at least one external subgroup");
    double v_max = 1.0;
    switch (similarity) {
        case Similarity::Similar: v_max = 1.0; break;
        case Similarity::Medium: v_max = 2.0; break;
        case Similarity::Dissimilar: v_max = 3.0; break;
    }
    std::vector<double> v(static_cast<std::size_t>(num_external) + 1);
    for (int i = 0; i <= num_external; ++i)
        v[static_cast<std::size_t>(i)] = static_cast<double>(i) * v_max / num_external;
    return v;
}

SimulatedData simulate(const ScenarioSpec& spec) {
    validate_spec(spec);
    std::vector<int> sizes =
        spec.categorical_membership ? draw_categorical_sizes(spec) : spec.subgroup_sizes;

    Eigen::Index n = 0;
    for (int s : sizes) n += s;

    SimulatedData out;
    out.true_shifts = spec.shift_vector;
    out.data.feature_names = feature_names(spec.k, spec.c);
    out.data.covariates.resize(n, spec.k + spec.c);
    out.data.outcome.resize(n);
    out.data.subgroup.reserve(static_cast<std::size_t>(n));
    out.hidden_h.resize(n);

    Eigen::Index row = 0;
    for (std::size_t g = 0; g < sizes.size(); ++g) {
        RandomStream rs =
            RandomStream::derive(spec.seed, {kStreamTraining, static_cast<std::uint64_t>(g)});
        generate_block(spec, spec.shift_vector[g], sizes[g], rs, row, out.data.covariates,
                       out.data.outcome, out.hidden_h);
        const std::string label = std::to_string(g);
        for (int r = 0; r < sizes[g]; ++r) out.data.subgroup.push_back(label);
        row += sizes[g];
    }
    return out;
}

Dataset simulate_target_test(const ScenarioSpec& spec, int n_test) {
    validate_spec(spec);
    if (n_test < 1) throw ValueError("simulate_target_test: n_test must be positive");

    Dataset out;
    out.feature_names = feature_names(spec.k, spec.c);
    out.covariates.resize(n_test, spec.k + spec.c);
    out.outcome.resize(n_test);
    out.subgroup.assign(static_cast<std::size_t>(n_test), "0");
    Eigen::VectorXd hidden(n_test);

    RandomStream rs = RandomStream::derive(spec.seed, {kStreamTest});
    generate_block(spec, 0.0, n_test, rs, 0, out.covariates, out.outcome, hidden);
    return out;
}

}  // namespace simwt
