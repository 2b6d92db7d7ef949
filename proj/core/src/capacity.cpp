#include "spvcap/capacity.hpp"

#include "spvcap/csv.hpp"
#include "spvcap/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spvcap {

std::vector<RegionalEstimate> predict_unscaled(const GBTModel& model, const PanelDataset& ds,
                                               const std::set<int>& years) {
    if (years.empty()) throw std::invalid_argument("predict_unscaled: no years requested");
    for (int year : years) {
        if (!ds.national_capacity_mw().count(year)) {
            throw std::invalid_argument("no national capacity for year " + std::to_string(year));
        }
    }

    std::vector<const RegionYearRecord*> selected;
    for (const auto& rec : ds.records()) {
        if (years.count(rec.year)) selected.push_back(&rec);
    }
    std::sort(selected.begin(), selected.end(), [](const RegionYearRecord* a, const RegionYearRecord* b) {
        if (a->year != b->year) return a->year < b->year;
        return a->region < b->region;
    });

    std::vector<std::map<std::string, std::optional<double>>> rows;
    rows.reserve(selected.size());
    for (const auto* rec : selected) {
        std::map<std::string, std::optional<double>> row;
        for (const auto& name : model.feature_names) {
            const auto it = rec->features.find(name);
            row[name] = it == rec->features.end() ? std::nullopt : it->second;
        }
        rows.push_back(std::move(row));
    }
    const std::vector<double> shares = model.predict(rows);

    std::vector<RegionalEstimate> out;
    out.reserve(selected.size());
    for (std::size_t i = 0; i < selected.size(); ++i) {
        const int year = selected[i]->year;
        out.push_back({selected[i]->region, year, shares[i],
                       shares[i] / 100.0 * ds.national_capacity_mw().at(year), std::nullopt});
    }
    return out;
}

std::vector<RegionalEstimate> scale_to_national(std::vector<RegionalEstimate> estimates,
                                                const std::map<int, double>& national) {
    std::map<int, double> predicted_sum;
    for (const auto& est : estimates) predicted_sum[est.year] += est.predicted_mw;
    for (const auto& [year, sum] : predicted_sum) {
        if (!national.count(year)) {
            throw std::invalid_argument("no national capacity for year " + std::to_string(year));
        }
        if (sum <= 0.0) {
            throw std::invalid_argument("predicted capacity for year " + std::to_string(year) +
                                        " sums to " + csv::format_double(sum) +
                                        "; scaling needs a positive total");
        }
    }
    for (auto& est : estimates) {
        est.scaled_mw = est.predicted_mw * national.at(est.year) / predicted_sum.at(est.year);
    }
    return estimates;
}

AllocationPolicy allocation_policy_from_string(const std::string& text) {
    if (text == "additive") return AllocationPolicy::additive;
    if (text == "full_rescale") return AllocationPolicy::full_rescale;
    throw std::invalid_argument("unknown allocation policy '" + text +
                                "' (expected additive or full_rescale)");
}

std::string to_string(AllocationPolicy policy) {
    return policy == AllocationPolicy::additive ? "additive" : "full_rescale";
}

AllocationResult allocate_unallocated(const PanelDataset& ds, const GBTModel& model, int year,
                                      AllocationPolicy policy) {
    if (ds.capacity_unit() != CapacityUnit::megawatts) {
        throw std::invalid_argument(
            "allocate_unallocated needs the MW dataset (recorded capacities), not a normalized one");
    }
    if (!ds.national_capacity_mw().count(year)) {
        throw std::invalid_argument("no national capacity for year " + std::to_string(year));
    }
    const double national = ds.national_capacity_mw().at(year);
    const double allocated = ds.allocated_capacity().count(year) ? ds.allocated_capacity().at(year) : 0.0;
    const double unallocated = national - allocated;
    if (unallocated < 0.0) {
        throw std::invalid_argument("regional capacity in " + std::to_string(year) + " (" +
                                    csv::format_double(allocated) + " MW) exceeds the national total (" +
                                    csv::format_double(national) + " MW): inconsistent data");
    }

    const PanelDataset normalized = normalize_dataset(ds);
    const std::vector<RegionalEstimate> estimates =
        predict_unscaled(model, normalized, std::set<int>{year});
    if (estimates.empty()) {
        throw std::invalid_argument("no records for year " + std::to_string(year));
    }

    AllocationResult result;
    result.year = year;
    result.policy = policy;
    result.unallocated_input_mw = unallocated;

    std::map<RegionCode, double> known;
    for (const auto& rec : ds.records()) {
        if (rec.year == year) known[rec.region] = rec.capacity_mw.value_or(0.0);
    }

    double share_sum = 0.0;
    for (const auto& est : estimates) share_sum += est.predicted_share_pct;

    if (policy == AllocationPolicy::additive) {
        if (share_sum <= 0.0) {
            throw std::invalid_argument("predicted shares for year " + std::to_string(year) +
                                        " sum to " + csv::format_double(share_sum) +
                                        "; the additive split needs a positive total");
        }
        for (const auto& est : estimates) {
            result.regions.push_back(est.region);
            result.known_mw.push_back(known.at(est.region));
            result.allocated_mw.push_back(known.at(est.region) +
                                          unallocated * est.predicted_share_pct / share_sum);
        }
    } else {
        const std::vector<RegionalEstimate> scaled =
            scale_to_national(estimates, ds.national_capacity_mw());
        for (const auto& est : scaled) {
            result.regions.push_back(est.region);
            result.known_mw.push_back(known.at(est.region));
            result.allocated_mw.push_back(*est.scaled_mw);
        }
    }
    return result;
}

SpvdiReport spvdi(const std::map<std::pair<RegionCode, int>, double>& actual,
                  const std::map<std::pair<RegionCode, int>, double>& predicted, int t1, int t2) {
    if (t1 > t2) throw std::invalid_argument("spvdi: t1 must be <= t2");
    std::set<RegionCode> regions;
    for (const auto& [key, _] : actual) regions.insert(key.first);
    for (const auto& [key, _] : predicted) regions.insert(key.first);
    if (regions.empty()) throw std::invalid_argument("spvdi: no regions supplied");

    std::vector<std::string> gaps;
    for (const auto& region : regions) {
        for (int t = t1; t <= t2; ++t) {
            const std::pair<RegionCode, int> key{region, t};
            if (!actual.count(key)) gaps.push_back("actual(" + region.code() + "," + std::to_string(t) + ")");
            if (!predicted.count(key)) gaps.push_back("predicted(" + region.code() + "," + std::to_string(t) + ")");
        }
    }
    if (!gaps.empty()) {
        std::string listed;
        const std::size_t shown = std::min<std::size_t>(gaps.size(), 12);
        for (std::size_t i = 0; i < shown; ++i) {
            if (i) listed += ", ";
            listed += gaps[i];
        }
        if (gaps.size() > shown) listed += ", ... (" + std::to_string(gaps.size() - shown) + " more)";
        throw std::invalid_argument("spvdi: missing region-year values: " + listed);
    }

    SpvdiReport report;
    report.t1 = t1;
    report.t2 = t2;
    for (const auto& region : regions) {
        double index = 0.0;
        for (int t = t1; t <= t2; ++t) {
            const std::pair<RegionCode, int> key{region, t};
            index += actual.at(key) - predicted.at(key);
        }
        report.rows.push_back({region, index, 0});
    }
    std::sort(report.rows.begin(), report.rows.end(), [](const SpvdiReport::Row& a, const SpvdiReport::Row& b) {
        if (a.index_mw != b.index_mw) return a.index_mw > b.index_mw;
        return a.region < b.region;
    });
    for (std::size_t i = 0; i < report.rows.size(); ++i) report.rows[i].rank = static_cast<int>(i + 1);
    return report;
}

MetricReport national_report(const std::vector<RegionalEstimate>& estimates,
                             const std::map<int, double>& national, EstimateColumn column) {
    if (estimates.empty()) throw std::invalid_argument("national_report: no estimates");
    std::map<int, double> predicted_sum;
    for (const auto& est : estimates) {
        double value = est.predicted_mw;
        if (column == EstimateColumn::scaled) {
            if (!est.scaled_mw) {
                throw std::invalid_argument("national_report: estimate for (" + est.region.code() +
                                            ", " + std::to_string(est.year) +
                                            ") has no scaled value; run scale_to_national first");
            }
            value = *est.scaled_mw;
        }
        predicted_sum[est.year] += value;
    }
    std::vector<double> actual, predicted;
    for (const auto& [year, sum] : predicted_sum) {
        if (!national.count(year)) {
            throw std::invalid_argument("no national capacity for year " + std::to_string(year));
        }
        actual.push_back(national.at(year));
        predicted.push_back(sum);
    }
    return error_metrics(actual, predicted, /*include_mape=*/true);
}

void write_estimates_csv(const std::vector<RegionalEstimate>& estimates, const std::string& path) {
    csv::Table table;
    table.header = {"region", "year", "predicted_share_pct", "predicted_mw", "scaled_mw"};
    for (const auto& est : estimates) {
        table.rows.push_back({est.region.code(), std::to_string(est.year),
                              csv::format_double(est.predicted_share_pct),
                              csv::format_double(est.predicted_mw),
                              est.scaled_mw ? csv::format_double(*est.scaled_mw) : ""});
    }
    csv::write_file(path, table);
}

void write_spvdi_csv(const SpvdiReport& report, const std::string& path) {
    csv::Table table;
    table.header = {"rank", "region", "spvdi_mw"};
    for (const auto& row : report.rows) {
        table.rows.push_back({std::to_string(row.rank), row.region.code(),
                              csv::format_double(row.index_mw)});
    }
    csv::write_file(path, table);
}

void write_allocation_csv(const AllocationResult& result, const std::string& path) {
    csv::Table table;
    table.header = {"region", "year", "known_mw", "allocated_mw"};
    for (std::size_t i = 0; i < result.regions.size(); ++i) {
        table.rows.push_back({result.regions[i].code(), std::to_string(result.year),
                              csv::format_double(result.known_mw[i]),
                              csv::format_double(result.allocated_mw[i])});
    }
    csv::write_file(path, table);
}

}  // namespace spvcap
