#pragma once

#include "spvcap/gbtree.hpp"
#include "spvcap/panel.hpp"
#include "spvcap/stats.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace spvcap {

/// One region-year model estimate. predicted_mw converts the predicted share
/// with the same year's actual national capacity; scaled_mw (when present)
/// rescales the year's predictions so their sum matches the national actual.
struct RegionalEstimate {
    RegionCode region;
    int year = 0;
    double predicted_share_pct = 0.0;
    double predicted_mw = 0.0;
    std::optional<double> scaled_mw;
};

/// Raw per-region share predictions in MW for the requested years, ordered by
/// (year, region). Shares need not sum to 100: this is the unscaled model.
/// Every requested year must have a national capacity value.
std::vector<RegionalEstimate> predict_unscaled(const GBTModel& model, const PanelDataset& ds,
                                               const std::set<int>& years);

/// Fills scaled_mw = predicted_mw x national(year) / sum predicted_mw(year),
/// so each year's scaled values sum to the national actual exactly. A year
/// whose predictions sum to zero (or that lacks a national value) is an error.
std::vector<RegionalEstimate> scale_to_national(std::vector<RegionalEstimate> estimates,
                                                const std::map<int, double>& national);

enum class AllocationPolicy { additive, full_rescale };

AllocationPolicy allocation_policy_from_string(const std::string& text);
std::string to_string(AllocationPolicy policy);

/// How one year's unallocated capacity (national minus the regional sum) was
/// spread over regions. Both policies conserve the national total.
struct AllocationResult {
    int year = 0;
    AllocationPolicy policy = AllocationPolicy::additive;
    double unallocated_input_mw = 0.0;
    std::vector<RegionCode> regions;
    std::vector<double> known_mw;      // recorded regional capacity (missing -> 0)
    std::vector<double> allocated_mw;  // final per-region capacity
};

/// Distributes the year's unallocated capacity over regions using the model's
/// predicted shares. additive tops regions up in proportion to predicted
/// share, never reducing a recorded value; full_rescale replaces regional
/// totals with the scaled predictions. The dataset must be in MW (not yet
/// normalized); features are normalized internally before predicting.
AllocationResult allocate_unallocated(const PanelDataset& ds, const GBTModel& model, int year,
                                      AllocationPolicy policy);

/// Cumulative actual-minus-predicted capacity per region over [t1, t2],
/// ranked descending (rank 1 = strongest over-deployment relative to the
/// model's expectation).
struct SpvdiReport {
    int t1 = 0;
    int t2 = 0;
    struct Row {
        RegionCode region;
        double index_mw = 0.0;
        int rank = 0;
    };
    std::vector<Row> rows;  // sorted by index descending, ties by region code
};

/// Both maps must cover every (region, year) for each region in either map
/// and every year in [t1, t2]; gaps are an error listing the missing pairs.
SpvdiReport spvdi(const std::map<std::pair<RegionCode, int>, double>& actual,
                  const std::map<std::pair<RegionCode, int>, double>& predicted, int t1, int t2);

enum class EstimateColumn { predicted, scaled };

/// National-level evaluation: for each year, compares the national actual
/// against the sum of the chosen per-region estimate column. MAPE is included
/// (this is the national series, the one place percentage error is used).
MetricReport national_report(const std::vector<RegionalEstimate>& estimates,
                             const std::map<int, double>& national,
                             EstimateColumn column = EstimateColumn::predicted);

void write_estimates_csv(const std::vector<RegionalEstimate>& estimates, const std::string& path);
void write_spvdi_csv(const SpvdiReport& report, const std::string& path);
void write_allocation_csv(const AllocationResult& result, const std::string& path);

}  // namespace spvcap
