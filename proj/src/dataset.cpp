#include "simwt/dataset.hpp"

#include <set>
#include <sstream>

#include "simwt/errors.hpp"

namespace simwt {

std::vector<std::string> Dataset::subgroup_labels() const {
    std::vector<std::string> labels;
    std::set<std::string> seen;
    for (const auto& s : subgroup) {
        if (seen.insert(s).second) labels.push_back(s);
    }
    return labels;
}

std::vector<Eigen::Index> Dataset::rows_with_label(const std::string& label) const {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(subgroup.size()); ++i) {
        if (subgroup[static_cast<std::size_t>(i)] == label) rows.push_back(i);
    }
    return rows;
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& rows) const {
    Dataset out;
    out.feature_names = feature_names;
    out.covariates.resize(static_cast<Eigen::Index>(rows.size()), covariates.cols());
    out.outcome.resize(static_cast<Eigen::Index>(rows.size()));
    out.subgroup.reserve(rows.size());
    Eigen::Index r = 0;
    for (Eigen::Index idx : rows) {
        out.covariates.row(r) = covariates.row(idx);
        out.outcome[r] = outcome[idx];
        out.subgroup.push_back(subgroup[static_cast<std::size_t>(idx)]);
        ++r;
    }
    return out;
}

void Dataset::validate() const {
    const Eigen::Index n = covariates.rows();
    const Eigen::Index d = covariates.cols();
    if (n < 1) throw ValueError("Dataset: needs at least one row");
    if (d < 1) throw ValueError("Dataset: needs at least one covariate column");
    if (outcome.size() != n) throw DimensionError("Dataset: outcome length does not match row count");
    if (static_cast<Eigen::Index>(subgroup.size()) != n)
        throw DimensionError("Dataset: subgroup length does not match row count");
    if (static_cast<Eigen::Index>(feature_names.size()) != d)
        throw DimensionError("Dataset: feature_names length does not match column count");
    if (!covariates.allFinite() || !outcome.allFinite())
        throw ValueError("Dataset: non-finite entry");
}

bool same_schema(const Dataset& a, const Dataset& b) {
    return a.feature_names == b.feature_names && a.n_features() == b.n_features();
}

std::pair<Dataset, std::vector<Dataset>> split_by_target(const Dataset& data,
                                                         const std::string& target_label) {
    const auto labels = data.subgroup_labels();
    bool found = false;
    for (const auto& l : labels) {
        if (l == target_label) {
            found = true;
            break;
        }
    }
    if (!found) {
        std::ostringstream msg;
        msg << "unknown subgroup '" << target_label << "'; available:";
        for (const auto& l : labels) msg << " '" << l << "'";
        throw DataError(msg.str());
    }
    Dataset target = data.subset(data.rows_with_label(target_label));
    std::vector<Dataset> externals;
    for (const auto& l : labels) {
        if (l == target_label) continue;
        externals.push_back(data.subset(data.rows_with_label(l)));
    }
    return {std::move(target), std::move(externals)};
}

Dataset concat_rows(const std::vector<const Dataset*>& parts) {
    if (parts.empty()) throw ValueError("concat_rows: no parts");
    Eigen::Index n = 0;
    for (const Dataset* p : parts) {
        if (!same_schema(*parts.front(), *p))
            throw DimensionError("concat_rows: feature schemas differ");
        n += p->n_rows();
    }
    Dataset out;
    out.feature_names = parts.front()->feature_names;
    out.covariates.resize(n, parts.front()->n_features());
    out.outcome.resize(n);
    out.subgroup.reserve(static_cast<std::size_t>(n));
    Eigen::Index row = 0;
    for (const Dataset* p : parts) {
        out.covariates.middleRows(row, p->n_rows()) = p->covariates;
        out.outcome.segment(row, p->n_rows()) = p->outcome;
        out.subgroup.insert(out.subgroup.end(), p->subgroup.begin(), p->subgroup.end());
        row += p->n_rows();
    }
    return out;
}

}  // namespace simwt
