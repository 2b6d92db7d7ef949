#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "spvcap/capacity.hpp"
#include "spvcap/csv.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

using namespace spvcap;
namespace fs = std::filesystem;

namespace {

GBTModel constant_model(double share) {
    GBTModel model;
    model.base_score = share;
    return model;
}

/// base 25, one stump on "g": g < 0.5 -> 25 - 10 = 15, else 25 + 15 = 40.
GBTModel stump_model() {
    GBTModel model;
    model.base_score = 25.0;
    model.feature_names = {"g"};
    Tree tree;
    tree.nodes.push_back({0, 0.5, true, 1, 2, 0.0, 4.0});
    tree.nodes.push_back({-1, 0.0, true, -1, -1, -10.0, 2.0});
    tree.nodes.push_back({-1, 0.0, true, -1, -1, 15.0, 2.0});
    model.trees.push_back(std::move(tree));
    return model;
}

/// MW dataset, one year: capacities {10, 20, 30, missing}, g = {0, 0, 1, 1},
/// national 100 -> allocated regional total 60, unallocated 40.
PanelDataset mw_panel() {
    std::vector<FeatureSpec> specs{FeatureSpec{"g", FeatureKind::other, Normalization::none}};
    std::vector<RegionYearRecord> records{
        {RegionCode("UKH13"), 2015, {{"g", 1.0}}, 30.0},  // shuffled on purpose
        {RegionCode("UKH11"), 2015, {{"g", 0.0}}, 10.0},
        {RegionCode("UKH14"), 2015, {{"g", 1.0}}, std::nullopt},
        {RegionCode("UKH12"), 2015, {{"g", 0.0}}, 20.0},
    };
    return PanelDataset(std::move(records), std::move(specs), {{2015, 100.0}},
                        CapacityUnit::megawatts);
}

RegionalEstimate estimate(const std::string& region, int year, double predicted_mw) {
    return {RegionCode(region), year, predicted_mw, predicted_mw, std::nullopt};
}

}  // namespace

TEST_CASE("a constant model predicts identical shares, ordered by year then region") {
    std::vector<FeatureSpec> specs{FeatureSpec{"g", FeatureKind::other, Normalization::none}};
    std::vector<RegionYearRecord> records{
        {RegionCode("UKH12"), 2016, {{"g", 1.0}}, 20.0},
        {RegionCode("UKH11"), 2016, {{"g", 0.0}}, 80.0},
        {RegionCode("UKH12"), 2015, {{"g", 1.0}}, 40.0},
        {RegionCode("UKH11"), 2015, {{"g", 0.0}}, 60.0},
    };
    const PanelDataset ds(std::move(records), std::move(specs),
                          {{2015, 200.0}, {2016, 400.0}}, CapacityUnit::share_pct);

    const auto estimates = predict_unscaled(constant_model(25.0), ds, {2015, 2016});
    REQUIRE(estimates.size() == 4);
    CHECK(estimates[0].region.code() == "UKH11");
    CHECK(estimates[0].year == 2015);
    CHECK(estimates[1].region.code() == "UKH12");
    CHECK(estimates[2].year == 2016);
    for (const auto& est : estimates) {
        CHECK(est.predicted_share_pct == 25.0);
        CHECK_FALSE(est.scaled_mw.has_value());
    }
    CHECK(estimates[0].predicted_mw == 50.0);   // 25% of 200
    CHECK(estimates[2].predicted_mw == 100.0);  // 25% of 400

    const auto single = predict_unscaled(constant_model(25.0), ds, {2016});
    CHECK(single.size() == 2);
    CHECK(single[0].year == 2016);

    CHECK_THROWS_AS(predict_unscaled(constant_model(25.0), ds, {}), std::invalid_argument);
    CHECK_THROWS_WITH_AS(predict_unscaled(constant_model(25.0), ds, {2017}),
                         doctest::Contains("2017"), std::invalid_argument);
}

TEST_CASE("scaling makes each year sum to the national total exactly") {
    std::vector<RegionalEstimate> estimates{estimate("UKH11", 2015, 1.0),
                                            estimate("UKH12", 2015, 2.0),
                                            estimate("UKH13", 2015, 3.0)};
    const auto scaled = scale_to_national(estimates, {{2015, 12.0}});
    REQUIRE(scaled.size() == 3);
    CHECK(*scaled[0].scaled_mw == 2.0);
    CHECK(*scaled[1].scaled_mw == 4.0);
    CHECK(*scaled[2].scaled_mw == 6.0);
    double sum = 0.0;
    for (const auto& est : scaled) sum += *est.scaled_mw;
    CHECK(sum == 12.0);

    SUBCASE("already-consistent predictions are unchanged") {
        const auto same = scale_to_national({estimate("UKH11", 2015, 4.0),
                                             estimate("UKH12", 2015, 8.0)},
                                            {{2015, 12.0}});
        CHECK(*same[0].scaled_mw == 4.0);
        CHECK(*same[1].scaled_mw == 8.0);
    }

    SUBCASE("years scale independently") {
        const auto multi = scale_to_national({estimate("UKH11", 2015, 1.0),
                                              estimate("UKH11", 2016, 1.0),
                                              estimate("UKH12", 2016, 3.0)},
                                             {{2015, 10.0}, {2016, 8.0}});
        CHECK(*multi[0].scaled_mw == 10.0);
        CHECK(*multi[1].scaled_mw == 2.0);
        CHECK(*multi[2].scaled_mw == 6.0);
    }

    SUBCASE("zero predicted total cannot be scaled") {
        CHECK_THROWS_WITH_AS(scale_to_national({estimate("UKH11", 2015, 0.0),
                                                estimate("UKH12", 2015, 0.0)},
                                               {{2015, 12.0}}),
                             doctest::Contains("positive total"), std::invalid_argument);
    }
    SUBCASE("missing national year is an error") {
        CHECK_THROWS_WITH_AS(scale_to_national({estimate("UKH11", 2017, 1.0)}, {{2015, 12.0}}),
                             doctest::Contains("2017"), std::invalid_argument);
    }
}

TEST_CASE("scaling conserves the national total on random predictions") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mw(0.1, 50.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<RegionalEstimate> estimates;
        const int n = 3 + int(trial % 7);
        for (int i = 0; i < n; ++i) {
            estimates.push_back(estimate("UKH" + std::to_string(10 + i), 2015, mw(rng)));
        }
        const double national = mw(rng) * 20.0;
        const auto scaled = scale_to_national(estimates, {{2015, national}});
        double sum = 0.0;
        for (const auto& est : scaled) {
            sum += *est.scaled_mw;
            CHECK(*est.scaled_mw >= 0.0);
        }
        CHECK(std::abs(sum - national) <= 1e-9 * national);
    }
}

TEST_CASE("additive allocation tops regions up by predicted share") {
    const PanelDataset ds = mw_panel();

    SUBCASE("constant shares split the residual evenly") {
        const auto result =
            allocate_unallocated(ds, constant_model(25.0), 2015, AllocationPolicy::additive);
        CHECK(result.year == 2015);
        CHECK(result.policy == AllocationPolicy::additive);
        CHECK(result.unallocated_input_mw == 40.0);
        REQUIRE(result.regions.size() == 4);
        CHECK(result.regions[0].code() == "UKH11");
        CHECK(result.known_mw == std::vector<double>{10.0, 20.0, 30.0, 0.0});
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(result.allocated_mw[i] == doctest::Approx(result.known_mw[i] + 10.0).epsilon(1e-12));
        }
    }

    SUBCASE("stump shares 15/15/40/40 split 40 MW as 60/11 and 160/11") {
        const auto result =
            allocate_unallocated(ds, stump_model(), 2015, AllocationPolicy::additive);
        REQUIRE(result.allocated_mw.size() == 4);
        CHECK(result.allocated_mw[0] == doctest::Approx(10.0 + 60.0 / 11.0).epsilon(1e-12));
        CHECK(result.allocated_mw[1] == doctest::Approx(20.0 + 60.0 / 11.0).epsilon(1e-12));
        CHECK(result.allocated_mw[2] == doctest::Approx(30.0 + 160.0 / 11.0).epsilon(1e-12));
        CHECK(result.allocated_mw[3] == doctest::Approx(160.0 / 11.0).epsilon(1e-12));
        double sum = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(result.allocated_mw[i] >= result.known_mw[i]);  // additive never reduces
            sum += result.allocated_mw[i];
        }
        CHECK(std::abs(sum - 100.0) <= 1e-9 * 100.0);  // conserves the national total
    }

    SUBCASE("zero unallocated leaves recorded values untouched") {
        std::vector<RegionYearRecord> records = ds.records();
        records[2].capacity_mw = 40.0;  // UKH14: total now 100 == national
        const PanelDataset full(std::move(records), ds.feature_specs(),
                                ds.national_capacity_mw(), CapacityUnit::megawatts);
        const auto result =
            allocate_unallocated(full, stump_model(), 2015, AllocationPolicy::additive);
        CHECK(result.unallocated_input_mw == 0.0);
        CHECK(result.allocated_mw == result.known_mw);
    }
}

TEST_CASE("full_rescale allocation replaces totals with scaled predictions") {
    const auto result =
        allocate_unallocated(mw_panel(), constant_model(25.0), 2015, AllocationPolicy::full_rescale);
    REQUIRE(result.allocated_mw.size() == 4);
    for (double mw : result.allocated_mw) CHECK(mw == doctest::Approx(25.0).epsilon(1e-12));

    // stump shares 15/15/40/40 scale to 100 * share/110
    const auto uneven =
        allocate_unallocated(mw_panel(), stump_model(), 2015, AllocationPolicy::full_rescale);
    CHECK(uneven.allocated_mw[0] == doctest::Approx(1500.0 / 110.0).epsilon(1e-12));
    CHECK(uneven.allocated_mw[2] == doctest::Approx(4000.0 / 110.0).epsilon(1e-12));
    double sum = 0.0;
    for (double mw : uneven.allocated_mw) sum += mw;
    CHECK(std::abs(sum - 100.0) <= 1e-9 * 100.0);
}

TEST_CASE("allocation rejects inconsistent or wrong-kind inputs") {
    SUBCASE("normalized datasets are refused") {
        const PanelDataset normalized = normalize_dataset(mw_panel());
        CHECK_THROWS_WITH_AS(
            allocate_unallocated(normalized, constant_model(25.0), 2015, AllocationPolicy::additive),
            doctest::Contains("MW dataset"), std::invalid_argument);
    }
    SUBCASE("regional capacity above the national total is inconsistent") {
        // the dataset constructor itself already refuses such data
        std::vector<FeatureSpec> specs{FeatureSpec{"g", FeatureKind::other, Normalization::none}};
        std::vector<RegionYearRecord> records{
            {RegionCode("UKH11"), 2015, {{"g", 0.0}}, 80.0},
            {RegionCode("UKH12"), 2015, {{"g", 1.0}}, 40.0},
        };
        CHECK_THROWS_WITH_AS(PanelDataset(std::move(records), std::move(specs), {{2015, 100.0}},
                                          CapacityUnit::megawatts),
                             doctest::Contains("exceeds national total"), std::invalid_argument);
    }
    SUBCASE("unknown year") {
        CHECK_THROWS_WITH_AS(
            allocate_unallocated(mw_panel(), constant_model(25.0), 2016, AllocationPolicy::additive),
            doctest::Contains("2016"), std::invalid_argument);
    }
    SUBCASE("policy names round-trip and reject typos") {
        CHECK(allocation_policy_from_string("additive") == AllocationPolicy::additive);
        CHECK(allocation_policy_from_string("full_rescale") == AllocationPolicy::full_rescale);
        CHECK(to_string(AllocationPolicy::additive) == "additive");
        CHECK(to_string(AllocationPolicy::full_rescale) == "full_rescale");
        CHECK_THROWS_WITH_AS(allocation_policy_from_string("rescale"),
                             doctest::Contains("rescale"), std::invalid_argument);
    }
}

TEST_CASE("the deployment index accumulates actual minus predicted") {
    std::map<std::pair<RegionCode, int>, double> actual, predicted;
    const RegionCode a("UKH11"), b("UKH12"), c("UKH13");
    for (int t = 2015; t <= 2017; ++t) {
        predicted[{a, t}] = 10.0 + t - 2015;
        predicted[{b, t}] = 20.0;
        predicted[{c, t}] = 5.0;
        actual[{a, t}] = predicted[{a, t}] + 2.0;  // over-deploys by 2/year
        actual[{b, t}] = predicted[{b, t}] - 1.0;  // under-deploys by 1/year
        actual[{c, t}] = predicted[{c, t}];        // exactly as expected
    }
    const SpvdiReport report = spvdi(actual, predicted, 2015, 2017);
    CHECK(report.t1 == 2015);
    CHECK(report.t2 == 2017);
    REQUIRE(report.rows.size() == 3);
    CHECK(report.rows[0].region.code() == "UKH11");
    CHECK(report.rows[0].index_mw == 6.0);
    CHECK(report.rows[0].rank == 1);
    CHECK(report.rows[1].region.code() == "UKH13");
    CHECK(report.rows[1].index_mw == 0.0);
    CHECK(report.rows[2].region.code() == "UKH12");
    CHECK(report.rows[2].index_mw == -3.0);
    CHECK(report.rows[2].rank == 3);

    SUBCASE("a sub-window uses only those years") {
        const SpvdiReport narrow = spvdi(actual, predicted, 2016, 2016);
        CHECK(narrow.rows[0].index_mw == 2.0);
    }
    SUBCASE("perfect predictions give all-zero indices with code-ordered ranks") {
        const SpvdiReport zero = spvdi(predicted, predicted, 2015, 2017);
        for (std::size_t i = 0; i < zero.rows.size(); ++i) {
            CHECK(zero.rows[i].index_mw == 0.0);
            CHECK(zero.rows[i].rank == int(i + 1));
        }
        CHECK(zero.rows[0].region.code() == "UKH11");
        CHECK(zero.rows[2].region.code() == "UKH13");
    }
}

TEST_CASE("the deployment index demands full coverage") {
    std::map<std::pair<RegionCode, int>, double> actual, predicted;
    const RegionCode a("UKH11"), b("UKH12");
    for (int t = 2015; t <= 2016; ++t) {
        actual[{a, t}] = 1.0;
        actual[{b, t}] = 1.0;
        predicted[{a, t}] = 1.0;
        predicted[{b, t}] = 1.0;
    }
    predicted.erase({b, 2016});
    CHECK_THROWS_WITH_AS(spvdi(actual, predicted, 2015, 2016),
                         doctest::Contains("predicted(UKH12,2016)"), std::invalid_argument);

    SUBCASE("long gap lists are truncated with a count") {
        std::map<std::pair<RegionCode, int>, double> wide_actual;
        for (int t = 2000; t <= 2009; ++t) {
            wide_actual[{a, t}] = 1.0;
            wide_actual[{b, t}] = 1.0;
            wide_actual[{RegionCode("UKH13"), t}] = 1.0;
        }
        CHECK_THROWS_WITH_AS(spvdi(wide_actual, {}, 2000, 2009),
                             doctest::Contains("(18 more)"), std::invalid_argument);
    }
    SUBCASE("window and emptiness validation") {
        CHECK_THROWS_AS(spvdi(actual, predicted, 2016, 2015), std::invalid_argument);
        CHECK_THROWS_AS(spvdi({}, {}, 2015, 2016), std::invalid_argument);
    }
}

TEST_CASE("the national report compares yearly sums to the national series") {
    std::vector<RegionalEstimate> estimates{
        estimate("UKH11", 2015, 40.0), estimate("UKH12", 2015, 50.0),   // 2015 sum 90
        estimate("UKH11", 2016, 160.0), estimate("UKH12", 2016, 50.0),  // 2016 sum 210
    };
    const std::map<int, double> national{{2015, 100.0}, {2016, 200.0}};

    const MetricReport raw = national_report(estimates, national, EstimateColumn::predicted);
    CHECK(raw.mae == 10.0);
    CHECK(raw.mse == 100.0);
    CHECK(raw.rmse == 10.0);
    CHECK(raw.r2 == doctest::Approx(0.96).epsilon(1e-12));
    REQUIRE(raw.mape.has_value());
    CHECK(*raw.mape == doctest::Approx(7.5).epsilon(1e-12));  // (10% + 5%) / 2

    SUBCASE("after scaling, national error vanishes") {
        const auto scaled = scale_to_national(estimates, national);
        const MetricReport perfect = national_report(scaled, national, EstimateColumn::scaled);
        CHECK(perfect.mae == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(perfect.rmse == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(*perfect.mape == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(perfect.r2 == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("asking for the scaled column before scaling is an error") {
        CHECK_THROWS_WITH_AS(national_report(estimates, national, EstimateColumn::scaled),
                             doctest::Contains("scale_to_national"), std::invalid_argument);
    }
    SUBCASE("missing national year and empty input are errors") {
        CHECK_THROWS_AS(national_report(estimates, {{2015, 100.0}}), std::invalid_argument);
        CHECK_THROWS_AS(national_report({}, national), std::invalid_argument);
    }
}

TEST_CASE("capacity csv writers are faithful") {
    const auto dir = fs::temp_directory_path() / "spvcap-capacity-test";
    fs::create_directories(dir);

    auto estimates = scale_to_national({estimate("UKH11", 2015, 1.0), estimate("UKH12", 2015, 2.0)},
                                       {{2015, 12.0}});
    estimates.push_back(estimate("UKH11", 2016, 3.5));  // unscaled row
    const std::string est_path = (dir / "estimates.csv").string();
    write_estimates_csv(estimates, est_path);
    const auto est_table = csv::read_file(est_path);
    CHECK(est_table.header == std::vector<std::string>{"region", "year", "predicted_share_pct",
                                                       "predicted_mw", "scaled_mw"});
    REQUIRE(est_table.rows.size() == 3);
    CHECK(est_table.rows[0][0] == "UKH11");
    CHECK(est_table.rows[0][4] == "4");   // scaled 1 * 12 / 3
    CHECK(est_table.rows[2][4] == "");    // never scaled
    CHECK(csv::parse_double(est_table.rows[2][3], 4, "predicted_mw") == 3.5);

    std::map<std::pair<RegionCode, int>, double> actual{{{RegionCode("UKH11"), 2015}, 5.0},
                                                        {{RegionCode("UKH12"), 2015}, 1.0}};
    std::map<std::pair<RegionCode, int>, double> predicted{{{RegionCode("UKH11"), 2015}, 2.0},
                                                           {{RegionCode("UKH12"), 2015}, 2.0}};
    const std::string spvdi_path = (dir / "spvdi.csv").string();
    write_spvdi_csv(spvdi(actual, predicted, 2015, 2015), spvdi_path);
    const auto spvdi_table = csv::read_file(spvdi_path);
    CHECK(spvdi_table.header == std::vector<std::string>{"rank", "region", "spvdi_mw"});
    REQUIRE(spvdi_table.rows.size() == 2);
    CHECK(spvdi_table.rows[0] == std::vector<std::string>{"1", "UKH11", "3"});
    CHECK(spvdi_table.rows[1] == std::vector<std::string>{"2", "UKH12", "-1"});

    const auto allocation =
        allocate_unallocated(mw_panel(), constant_model(25.0), 2015, AllocationPolicy::additive);
    const std::string alloc_path = (dir / "allocation.csv").string();
    write_allocation_csv(allocation, alloc_path);
    const auto alloc_table = csv::read_file(alloc_path);
    CHECK(alloc_table.header == std::vector<std::string>{"region", "year", "known_mw", "allocated_mw"});
    REQUIRE(alloc_table.rows.size() == 4);
    CHECK(alloc_table.rows[0] == std::vector<std::string>{"UKH11", "2015", "10", "20"});
    CHECK(alloc_table.rows[3] == std::vector<std::string>{"UKH14", "2015", "0", "10"});
    fs::remove_all(dir);
}
