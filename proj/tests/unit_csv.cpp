#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "simwt/csv.hpp"
#include "simwt/errors.hpp"
#include "simwt/rng.hpp"
#include "simwt/scm.hpp"
#include "simwt/weights.hpp"

using namespace simwt;

namespace {

Dataset sample_data() {
    ScenarioSpec spec;
    spec.kind = ScenarioKind::Covariate;
    spec.shift_vector = {0.0, 1.0};
    spec.subgroup_sizes = {8, 12};
    spec.seed = 12;
    return simulate(spec).data;
}

}  // namespace

TEST_SUITE_BEGIN("csv");

TEST_CASE("format_double round-trips") {
    RandomStream rs(1);
    for (int i = 0; i < 200; ++i) {
        const double v = (rs.next_double() - 0.5) * std::pow(10.0, double(rs.next_below(12)) - 6);
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(format_double(1.0) == "1");
}

TEST_CASE("dataset csv round-trip is lossless") {
    const Dataset d = sample_data();
    std::ostringstream out;
    write_dataset_csv(out, d);
    std::istringstream in(out.str());
    const Dataset back = read_dataset_csv(in, "mem");
    CHECK(back.feature_names == d.feature_names);
    CHECK(back.subgroup == d.subgroup);
    CHECK((back.covariates.array() == d.covariates.array()).all());
    CHECK((back.outcome.array() == d.outcome.array()).all());
}

TEST_CASE("csv schema violations point at the offending cell") {
    SUBCASE("bad header") {
        std::istringstream in("a,b,c\n");
        CHECK_THROWS_WITH_AS(read_dataset_csv(in, "f.csv"),
                             doctest::Contains("f.csv:1"), DataError);
    }
    SUBCASE("missing value names the column") {
        std::istringstream in("subgroup,y,x1\nA,1.0,2.0\nB,,2.0\n");
        CHECK_THROWS_WITH_AS(read_dataset_csv(in, "f.csv"),
                             doctest::Contains("f.csv:3: missing value in column 'y'"), DataError);
    }
    SUBCASE("non-numeric value names the column") {
        std::istringstream in("subgroup,y,x1\nA,1.0,zz\n");
        CHECK_THROWS_WITH_AS(read_dataset_csv(in, "f.csv"),
                             doctest::Contains("f.csv:2: invalid number 'zz' in column 'x1'"),
                             DataError);
    }
    SUBCASE("field count mismatch reports the line") {
        std::istringstream in("subgroup,y,x1\nA,1.0\n");
        CHECK_THROWS_WITH_AS(read_dataset_csv(in, "f.csv"),
                             doctest::Contains("f.csv:2: expected 3 fields, got 2"), DataError);
    }
    SUBCASE("no data rows") {
        std::istringstream in("subgroup,y,x1\n");
        CHECK_THROWS_AS(read_dataset_csv(in, "f.csv"), DataError);
    }
}

TEST_CASE("unknown target label lists the available subgroups") {
    const Dataset d = sample_data();
    CHECK_THROWS_WITH_AS(split_by_target(d, "9"), doctest::Contains("available: '0' '1'"),
                         DataError);
}

TEST_CASE("weights csv carries one row per observation") {
    const Dataset d = sample_data();
    auto [target, externals] = split_by_target(d, "0");
    const WeightedSample ws = build_weighted_sample(target, externals);
    std::ostringstream out;
    write_weights_csv(out, ws);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "subgroup,weight,y,x_s1,x_s2,x_s3,x_g1");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == d.n_rows());
}

TEST_CASE("diagnostics json reports externals and failures") {
    const Dataset d = sample_data();
    auto [target, externals] = split_by_target(d, "0");
    Dataset empty = target;
    empty.covariates.resize(0, empty.n_features());
    empty.outcome.resize(0);
    empty.subgroup.clear();
    externals.push_back(empty);
    const WeightedSample ws = build_weighted_sample(target, externals);
    const auto j = weigh_diagnostics_json(ws);
    CHECK(j["n_target"] == 8);
    CHECK(j["externals"].size() == 1);
    CHECK(j["failures"].size() == 1);
    CHECK(j["externals"][0]["label"] == "1");
    CHECK(j["ess"].get<double>() == ws.ess);
}

TEST_SUITE_END();
