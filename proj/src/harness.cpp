#include "simwt/harness.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "parallel_for.hpp"
#include "simwt/errors.hpp"
#include "simwt/glm.hpp"
#include "simwt/rng.hpp"
#include "simwt/stats.hpp"

namespace simwt {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void validate_grid(const GridSpec& spec) {
    if (spec.kinds.empty()) throw ValueError("GridSpec: empty kinds");
    if (spec.similarities.empty()) throw ValueError("GridSpec: empty similarities");
    if (spec.external_counts.empty()) throw ValueError("GridSpec: empty external_counts");
    if (spec.external_sizes.empty()) throw ValueError("GridSpec: empty external_sizes");
    if (spec.target_sizes.empty()) throw ValueError("GridSpec: empty target_sizes");
    if (spec.replicates < 1) throw ValueError("GridSpec: replicates must be positive");
    if (spec.n_test < 1) throw ValueError("GridSpec: n_test must be positive");
    for (int v : spec.external_counts)
        if (v < 1) throw ValueError("GridSpec: external counts must be positive");
    for (int v : spec.external_sizes)
        if (v < 1) throw ValueError("GridSpec: external sizes must be positive");
    for (int v : spec.target_sizes)
        if (v < 1) throw ValueError("GridSpec: target sizes must be positive");
}

std::vector<CellCoords> enumerate_cells(const GridSpec& spec) {
    std::vector<CellCoords> cells;
    std::size_t index = 0;
    for (ScenarioKind kind : spec.kinds)
        for (Similarity sim : spec.similarities)
            for (int count : spec.external_counts)
                for (int esize : spec.external_sizes)
                    for (int tsize : spec.target_sizes) {
                        CellCoords c;
                        c.kind = kind;
                        c.similarity = sim;
                        c.external_count = count;
                        c.external_size = esize;
                        c.target_size = tsize;
                        c.cell_index = index++;
                        cells.push_back(c);
                    }
    return cells;
}

double evaluate(const LinearFit& fit, const Dataset& test) {
    return rmse(predict_linear(fit, test.covariates), test.outcome);
}

}  // namespace

CellResult run_cell(const GridSpec& spec, const CellCoords& coords) {
    CellResult res;
    res.coords = coords;
    res.rmse_weighted = res.rmse_p_only = res.rmse_local = res.rmse_global = kNaN;
    res.ess_weighted = res.ess_p_only = kNaN;

    auto note = [&res](const char* who, const std::exception& e) {
        if (!res.note.empty()) res.note += "; ";
        res.note += who;
        res.note += ": ";
        res.note += e.what();
    };

    try {
        ScenarioSpec sspec;
        sspec.kind = coords.kind;
        sspec.shift_vector = make_shift_vector(coords.external_count, coords.similarity);
        sspec.subgroup_sizes.assign(static_cast<std::size_t>(coords.external_count) + 1,
                                    coords.external_size);
        sspec.subgroup_sizes[0] = coords.target_size;
        sspec.k = spec.k;
        sspec.c = spec.c;
        sspec.seed = RandomStream::derive_key(
            spec.master_seed, {coords.cell_index, static_cast<std::uint64_t>(coords.replicate)});

        const SimulatedData sim = simulate(sspec);
        const Dataset test = simulate_target_test(sspec, spec.n_test);
        auto [target, externals] = split_by_target(sim.data, "0");

        try {
            const LinearFit local = fit_weighted_linear(
                target.covariates, target.outcome, Eigen::VectorXd::Ones(target.n_rows()));
            res.rmse_local = evaluate(local, test);
        } catch (const Error& e) {
            note("local", e);
        }
        try {
            const LinearFit global = fit_weighted_linear(
                sim.data.covariates, sim.data.outcome, Eigen::VectorXd::Ones(sim.data.n_rows()));
            res.rmse_global = evaluate(global, test);
        } catch (const Error& e) {
            note("global", e);
        }
        try {
            WeightOptions opt;
            opt.truncation_percentile = spec.truncation_percentile;
            opt.auc_adjustment = true;
            const WeightedSample ws = build_weighted_sample(target, externals, opt);
            res.ess_weighted = ws.ess;
            res.ess_ratio_rounded = static_cast<int>(std::lround(ws.ess_ratio));
            const LinearFit fit =
                fit_weighted_linear(ws.data.covariates, ws.data.outcome, ws.weights);
            res.rmse_weighted = evaluate(fit, test);
        } catch (const Error& e) {
            note("weighted", e);
        }
        try {
            WeightOptions opt;
            opt.truncation_percentile = spec.truncation_percentile;
            opt.auc_adjustment = false;
            const WeightedSample ps = build_weighted_sample(target, externals, opt);
            res.ess_p_only = ps.ess;
            const LinearFit fit =
                fit_weighted_linear(ps.data.covariates, ps.data.outcome, ps.weights);
            res.rmse_p_only = evaluate(fit, test);
        } catch (const Error& e) {
            note("p_only", e);
        }
    } catch (const std::exception& e) {
        note("cell", e);
    }
    return res;
}

GridResults run_grid(const GridSpec& spec) {
    validate_grid(spec);
    const std::vector<CellCoords> cells = enumerate_cells(spec);
    const auto reps = static_cast<std::size_t>(spec.replicates);

    GridResults out;
    out.cells.resize(cells.size() * reps);
    detail::parallel_for(out.cells.size(), spec.jobs, [&](std::size_t j) {
        CellCoords coords = cells[j / reps];
        coords.replicate = static_cast<int>(j % reps);
        out.cells[j] = run_cell(spec, coords);
    });
    out.summary = summarize_results(out.cells);
    return out;
}

GridSummary summarize_results(const std::vector<CellResult>& cells) {
    GridSummary s;
    s.total_cells = cells.size();
    double sw = 0, sp = 0, sl = 0, sg = 0, serw = 0, serp = 0;
    std::size_t nw = 0, np = 0, nl = 0, ng = 0, nerw = 0, nerp = 0;
    for (const CellResult& c : cells) {
        if (std::isfinite(c.rmse_weighted)) { sw += c.rmse_weighted; ++nw; } else ++s.failed_weighted;
        if (std::isfinite(c.rmse_p_only)) { sp += c.rmse_p_only; ++np; } else ++s.failed_p_only;
        if (std::isfinite(c.rmse_local)) { sl += c.rmse_local; ++nl; } else ++s.failed_local;
        if (std::isfinite(c.rmse_global)) { sg += c.rmse_global; ++ng; } else ++s.failed_global;
        if (std::isfinite(c.ess_weighted)) {
            serw += c.ess_weighted / c.coords.target_size;
            ++nerw;
        }
        if (std::isfinite(c.ess_p_only)) {
            serp += c.ess_p_only / c.coords.target_size;
            ++nerp;
        }
    }
    s.averages.rmse_weighted = nw ? sw / static_cast<double>(nw) : kNaN;
    s.averages.rmse_p_only = np ? sp / static_cast<double>(np) : kNaN;
    s.averages.rmse_local = nl ? sl / static_cast<double>(nl) : kNaN;
    s.averages.rmse_global = ng ? sg / static_cast<double>(ng) : kNaN;
    s.averages.ess_ratio_weighted = nerw ? serw / static_cast<double>(nerw) : kNaN;
    s.averages.ess_ratio_p_only = nerp ? serp / static_cast<double>(nerp) : kNaN;
    s.strata = summarize_by_ess_ratio(cells);
    return s;
}

std::vector<RmseStratum> summarize_by_ess_ratio(const std::vector<CellResult>& cells) {
    if (cells.empty()) throw ValueError("summarize_by_ess_ratio: no results");
    static const char* kSamples[] = {"weighted", "p_only", "local", "global"};
    using Key = std::tuple<int, int, int, int>;  // ratio, similarity, kind, sample
    std::map<Key, std::vector<double>> groups;
    for (const CellResult& c : cells) {
        const double values[] = {c.rmse_weighted, c.rmse_p_only, c.rmse_local, c.rmse_global};
        for (int s = 0; s < 4; ++s) {
            if (!std::isfinite(values[s])) continue;
            groups[{c.ess_ratio_rounded, static_cast<int>(c.coords.similarity),
                    static_cast<int>(c.coords.kind), s}]
                .push_back(values[s]);
        }
    }
    std::vector<RmseStratum> out;
    out.reserve(groups.size());
    for (auto& [key, values] : groups) {
        RmseStratum st;
        st.ess_ratio_rounded = std::get<0>(key);
        st.similarity = static_cast<Similarity>(std::get<1>(key));
        st.kind = static_cast<ScenarioKind>(std::get<2>(key));
        st.sample = kSamples[std::get<3>(key)];
        st.count = values.size();
        st.mean = mean_of(values);
        st.q1 = percentile_type7(values, 25.0);
        st.median = percentile_type7(values, 50.0);
        st.q3 = percentile_type7(values, 75.0);
        out.push_back(std::move(st));
    }
    return out;
}

}  // namespace simwt
