#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace simwt {

// Tabular container shared by every pipeline stage: a covariate matrix, a
// numeric outcome, and a categorical subgroup label per row.
struct Dataset {
    Eigen::MatrixXd covariates;               // n x d
    Eigen::VectorXd outcome;                  // n
    std::vector<std::string> subgroup;        // n labels
    std::vector<std::string> feature_names;   // d

    Eigen::Index n_rows() const { return covariates.rows(); }
    Eigen::Index n_features() const { return covariates.cols(); }

    // Distinct labels in order of first appearance.
    std::vector<std::string> subgroup_labels() const;

    std::vector<Eigen::Index> rows_with_label(const std::string& label) const;

    Dataset subset(const std::vector<Eigen::Index>& rows) const;

    // Shape consistency, finiteness, n >= 1, d >= 1. Throws on violation.
    void validate() const;
};

// True when both datasets carry the same feature columns.
bool same_schema(const Dataset& a, const Dataset& b);

// Splits into the target subgroup and the remaining subgroups (each external
// as its own single-label dataset, first-appearance order). Throws DataError
// when the target label is absent, listing the available labels.
std::pair<Dataset, std::vector<Dataset>> split_by_target(const Dataset& data,
                                                         const std::string& target_label);

// Row-wise concatenation; schemas must match.
Dataset concat_rows(const std::vector<const Dataset*>& parts);

}  // namespace simwt
