#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "simwt/scm.hpp"
#include "simwt/weights.hpp"

namespace simwt {

// Full factorial simulation grid: scenario kinds x similarity levels x
// external subgroup counts x subgroup sizes x target sizes, each cell
// replicated. Defaults follow the simulation design; the target-size set is
// deliberately configurable.
struct GridSpec {
    std::vector<ScenarioKind> kinds{ScenarioKind::Covariate, ScenarioKind::Outcome,
                                    ScenarioKind::CovariateOutcome};
    std::vector<Similarity> similarities{Similarity::Similar, Similarity::Medium,
                                         Similarity::Dissimilar};
    std::vector<int> external_counts{1, 3, 5, 7};
    std::vector<int> external_sizes{10, 20, 30, 40, 50};
    std::vector<int> target_sizes{10, 15, 20};
    int k = 3;
    int c = 1;
    int replicates = 100;
    int n_test = 100;
    std::uint64_t master_seed = 1;
    std::optional<double> truncation_percentile;  // applied to weighted and p-only alike
    int jobs = 0;                                 // worker threads; 0 = hardware concurrency
};

struct CellCoords {
    ScenarioKind kind = ScenarioKind::Covariate;
    Similarity similarity = Similarity::Similar;
    int external_count = 1;
    int external_size = 10;
    int target_size = 10;
    int replicate = 0;
    std::size_t cell_index = 0;  // position in the grid enumeration; part of the seed path
};

// One simulation run: RMSE of the four training samples on a shared test
// draw, plus ESS bookkeeping. A comparator whose fit failed carries NaN.
struct CellResult {
    CellCoords coords;
    double rmse_weighted = 0.0;
    double rmse_p_only = 0.0;
    double rmse_local = 0.0;
    double rmse_global = 0.0;
    double ess_weighted = 0.0;
    double ess_p_only = 0.0;
    int ess_ratio_rounded = 0;  // round(ess_weighted / target_size)
    std::string note;           // failure description, empty when clean
};

struct SampleAverages {
    double rmse_weighted = 0.0;
    double rmse_p_only = 0.0;
    double rmse_local = 0.0;
    double rmse_global = 0.0;
    double ess_ratio_weighted = 0.0;
    double ess_ratio_p_only = 0.0;
};

// One box of the RMSE-by-ESS-ratio stratification: cells grouped by rounded
// ESS ratio, similarity and kind, one entry per sample type.
struct RmseStratum {
    int ess_ratio_rounded = 0;
    Similarity similarity = Similarity::Similar;
    ScenarioKind kind = ScenarioKind::Covariate;
    std::string sample;  // weighted | p_only | local | global
    std::size_t count = 0;
    double mean = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

struct GridSummary {
    std::size_t total_cells = 0;
    std::size_t failed_weighted = 0;
    std::size_t failed_p_only = 0;
    std::size_t failed_local = 0;
    std::size_t failed_global = 0;
    SampleAverages averages;  // over cells with a finite value
    std::vector<RmseStratum> strata;
};

struct GridResults {
    std::vector<CellResult> cells;
    GridSummary summary;
};

// Simulates one cell and evaluates the four comparators (local, global,
// weighted, p-only) on the same test draw. Seeded from
// (master_seed, cell_index, replicate); never throws, failures land in note.
CellResult run_cell(const GridSpec& spec, const CellCoords& coords);

// Enumerates the cross product x replicates, executing cells on a bounded
// worker pool. Results are in enumeration order and bit-identical for any
// worker count.
GridResults run_grid(const GridSpec& spec);

GridSummary summarize_results(const std::vector<CellResult>& cells);

// Groups finite RMSE values by (rounded ESS ratio, similarity, kind, sample)
// and reports count, mean and quartiles. Empty strata are omitted.
std::vector<RmseStratum> summarize_by_ess_ratio(const std::vector<CellResult>& cells);

}  // namespace simwt
