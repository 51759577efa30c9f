#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "simwt/dataset.hpp"

namespace simwt {

// Where the subgroup-specific shift enters the generating equations: a subset
// of covariates, the outcome, or a shared latent confounder feeding both.
enum class ScenarioKind { Covariate, Outcome, CovariateOutcome };

// How far the external subgroups drift from the target: maximum shift 1, 2 or 3.
enum class Similarity { Similar, Medium, Dissimilar };

const char* to_string(ScenarioKind kind);
const char* to_string(Similarity similarity);
ScenarioKind scenario_kind_from_string(std::string_view s);  // throws ValueError
Similarity similarity_from_string(std::string_view s);       // throws ValueError

// Structural coefficients of the generating equations; defaults are the
// simulation design's unit covariate effects and confounder effect of two.
struct ScmCoefficients {
    double subgroup_covariate_effect = 1.0;  // x_s terms in y
    double global_covariate_effect = 1.0;    // x_g terms in y
    double confounder_effect = 2.0;          // h term in y
};

struct ScenarioSpec {
    ScenarioKind kind = ScenarioKind::Covariate;
    std::vector<double> shift_vector;  // one entry per subgroup; entry 0 is the target's
    std::vector<int> subgroup_sizes;   // same length; rows per subgroup
    int k = 3;                         // subgroup-specific covariates x_s
    int c = 1;                         // global covariates x_g
    std::uint64_t seed = 0;
    // Draw subgroup membership categorically (sizes become Multinomial(n, 1/m),
    // redrawn until every subgroup is present) instead of fixed blocks.
    bool categorical_membership = false;
    ScmCoefficients coefficients;
};

struct SimulatedData {
    Dataset data;                     // subgroup labels "0".."m-1", target block first
    std::vector<double> true_shifts;  // copy of the shift vector
    Eigen::VectorXd hidden_h;         // latent confounder, retained for diagnostics
};

// Uniform shift sequence from 0 (target) to the similarity's maximum in
// num_external equal steps, e.g. (3, Similar) -> [0, 1/3, 2/3, 1].
std::vector<double> make_shift_vector(int num_external, Similarity similarity);

// Draws the scenario. Deterministic: identical spec (including seed) gives
// bit-identical output; each subgroup reads an independent stream. All three
// kinds draw their noise terms in the same order, so at shift 0 they produce
// bit-identical data.
SimulatedData simulate(const ScenarioSpec& spec);

// Fresh target-subgroup draw (shift 0) from a stream independent of the
// training draw.
Dataset simulate_target_test(const ScenarioSpec& spec, int n_test);

}  // namespace simwt
