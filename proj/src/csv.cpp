#include "simwt/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "simwt/errors.hpp"

namespace simwt {

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

double parse_double(const std::string& token, const std::string& source, std::size_t line,
                    const std::string& column) {
    double value = 0.0;
    const char* begin = token.data();
    const char* end = begin + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
        std::ostringstream msg;
        msg << source << ":" << line << ": invalid number '" << token << "' in column '" << column
            << "'";
        throw DataError(msg.str());
    }
    return value;
}

std::string sanitize_note(std::string note) {
    for (char& ch : note) {
        if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
    }
    return note;
}

}  // namespace

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

Dataset read_dataset_csv(std::istream& in, const std::string& source) {
    std::string line;
    if (!std::getline(in, line)) throw DataError(source + ":1: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::vector<std::string> header = split_fields(line);
    if (header.size() < 3 || header[0] != "subgroup" || header[1] != "y") {
        throw DataError(source +
                        ":1: header must be 'subgroup,y,<covariate columns...>'");
    }
    const std::vector<std::string> features(header.begin() + 2, header.end());

    std::vector<std::string> labels;
    std::vector<double> outcome;
    std::vector<double> covariates;  // row-major
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;  // tolerate a trailing blank line
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != header.size()) {
            std::ostringstream msg;
            msg << source << ":" << line_no << ": expected " << header.size() << " fields, got "
                << fields.size();
            throw DataError(msg.str());
        }
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (fields[i].empty()) {
                std::ostringstream msg;
                msg << source << ":" << line_no << ": missing value in column '" << header[i]
                    << "'";
                throw DataError(msg.str());
            }
        }
        labels.push_back(fields[0]);
        outcome.push_back(parse_double(fields[1], source, line_no, "y"));
        for (std::size_t i = 2; i < fields.size(); ++i)
            covariates.push_back(parse_double(fields[i], source, line_no, header[i]));
    }
    if (labels.empty()) throw DataError(source + ": no data rows");

    Dataset data;
    data.feature_names = features;
    data.subgroup = std::move(labels);
    const auto n = static_cast<Eigen::Index>(data.subgroup.size());
    const auto d = static_cast<Eigen::Index>(features.size());
    data.outcome = Eigen::Map<Eigen::VectorXd>(outcome.data(), n);
    data.covariates =
        Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
            covariates.data(), n, d);
    data.validate();
    return data;
}

Dataset read_dataset_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return read_dataset_csv(in, path);
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
    out << "subgroup,y";
    for (const auto& f : data.feature_names) out << ',' << f;
    out << '\n';
    for (Eigen::Index i = 0; i < data.n_rows(); ++i) {
        out << data.subgroup[static_cast<std::size_t>(i)] << ','
            << format_double(data.outcome[i]);
        for (Eigen::Index j = 0; j < data.n_features(); ++j)
            out << ',' << format_double(data.covariates(i, j));
        out << '\n';
    }
}

void write_dataset_csv_file(const std::string& path, const Dataset& data) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    write_dataset_csv(out, data);
}

void write_weights_csv(std::ostream& out, const WeightedSample& sample) {
    out << "subgroup,weight,y";
    for (const auto& f : sample.data.feature_names) out << ',' << f;
    out << '\n';
    for (Eigen::Index i = 0; i < sample.data.n_rows(); ++i) {
        out << sample.data.subgroup[static_cast<std::size_t>(i)] << ','
            << format_double(sample.weights[i]) << ',' << format_double(sample.data.outcome[i]);
        for (Eigen::Index j = 0; j < sample.data.n_features(); ++j)
            out << ',' << format_double(sample.data.covariates(i, j));
        out << '\n';
    }
}

nlohmann::json weigh_diagnostics_json(const WeightedSample& sample) {
    nlohmann::json externals = nlohmann::json::array();
    Eigen::Index row = sample.n_target;
    for (const auto& c : sample.comparisons) {
        const Eigen::Index n = c.p_external.size();
        const Eigen::VectorXd w = sample.weights.segment(row, n);
        int zeros = 0;
        for (Eigen::Index j = 0; j < n; ++j)
            if (w[j] == 0.0) ++zeros;
        externals.push_back({{"label", c.external_label},
                             {"n", n},
                             {"auc", c.auc},
                             {"auc_clamped", c.auc_clamped},
                             {"mean_weight", n > 0 ? w.mean() : 0.0},
                             {"zero_weights", zeros},
                             {"propensity_converged", c.fit.converged}});
        row += n;
    }
    nlohmann::json failures = nlohmann::json::array();
    for (const auto& f : sample.failures)
        failures.push_back({{"label", f.external_label}, {"reason", f.reason}});
    nlohmann::json j{{"n_target", sample.n_target},
                     {"n_total", sample.data.n_rows()},
                     {"ess", sample.ess},
                     {"ess_ratio", sample.ess_ratio},
                     {"externals", externals},
                     {"failures", failures}};
    if (sample.truncation_percentile)
        j["truncation_percentile"] = *sample.truncation_percentile;
    return j;
}

void write_results_csv(std::ostream& out, const std::vector<CellResult>& cells) {
    out << "kind,similarity,n_external,external_size,target_size,replicate,"
           "rmse_weighted,rmse_p_only,rmse_local,rmse_global,"
           "ess_weighted,ess_p_only,ess_ratio_rounded,note\n";
    for (const CellResult& c : cells) {
        out << to_string(c.coords.kind) << ',' << to_string(c.coords.similarity) << ','
            << c.coords.external_count << ',' << c.coords.external_size << ','
            << c.coords.target_size << ',' << c.coords.replicate << ','
            << format_double(c.rmse_weighted) << ',' << format_double(c.rmse_p_only) << ','
            << format_double(c.rmse_local) << ',' << format_double(c.rmse_global) << ','
            << format_double(c.ess_weighted) << ',' << format_double(c.ess_p_only) << ','
            << c.ess_ratio_rounded << ',' << sanitize_note(c.note) << '\n';
    }
}

nlohmann::json grid_summary_json(const GridSummary& summary) {
    nlohmann::json strata = nlohmann::json::array();
    for (const RmseStratum& s : summary.strata) {
        strata.push_back({{"ess_ratio", s.ess_ratio_rounded},
                          {"similarity", to_string(s.similarity)},
                          {"kind", to_string(s.kind)},
                          {"sample", s.sample},
                          {"count", s.count},
                          {"mean", s.mean},
                          {"q1", s.q1},
                          {"median", s.median},
                          {"q3", s.q3}});
    }
    return {{"cells", summary.total_cells},
            {"average_rmse",
             {{"weighted", summary.averages.rmse_weighted},
              {"p_only", summary.averages.rmse_p_only},
              {"local", summary.averages.rmse_local},
              {"global", summary.averages.rmse_global}}},
            {"average_ess_ratio",
             {{"weighted", summary.averages.ess_ratio_weighted},
              {"p_only", summary.averages.ess_ratio_p_only}}},
            {"failed_cells",
             {{"weighted", summary.failed_weighted},
              {"p_only", summary.failed_p_only},
              {"local", summary.failed_local},
              {"global", summary.failed_global}}},
            {"rmse_by_ess_ratio", strata}};
}

nlohmann::json bootstrap_report_json(const BootstrapReport& report) {
    nlohmann::json methods = nlohmann::json::array();
    for (const MethodReport& m : report.methods) {
        methods.push_back({{"method", to_string(m.method)},
                           {"estimate_632plus", m.estimate},
                           {"apparent_error", m.apparent_error},
                           {"oob_error", m.oob_error},
                           {"no_information_error", m.no_information_error},
                           {"relative_overfitting", m.relative_overfitting},
                           {"weight_632", m.weight_632},
                           {"degenerate_gamma", m.degenerate_gamma},
                           {"training_ess", m.training_ess},
                           {"failed_replicates", m.failed_replicates}});
    }
    return {{"target", report.target_label}, {"bootstrap_samples", report.B},
            {"methods", methods}};
}

void write_observation_errors_csv(std::ostream& out, const BootstrapReport& report) {
    out << "method,row,outcome,mean_loss,p5,p95,n_oob\n";
    for (const MethodReport& m : report.methods) {
        for (const ObservationError& o : m.per_observation) {
            out << to_string(m.method) << ',' << o.row << ',' << format_double(o.outcome) << ','
                << format_double(o.mean_loss) << ',' << format_double(o.p5) << ','
                << format_double(o.p95) << ',' << o.n_oob << '\n';
        }
    }
}

void write_cdf_csv(std::ostream& out, const BootstrapReport& report) {
    out << "method,value,cumulative\n";
    for (const auto& [method, cdf] : report.cdfs) {
        for (std::size_t i = 0; i < cdf.values.size(); ++i) {
            out << method << ',' << format_double(cdf.values[i]) << ','
                << format_double(cdf.cumulative[i]) << '\n';
        }
    }
}

}  // namespace simwt
