#pragma once

#include "spvcap/region.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace spvcap {

enum class FeatureKind { climate, economic, landuse, other };

enum class Normalization { national_total_share, national_average_relative, none };

/// Declares one feature column: what it is and how it is normalized.
/// Climate variables default to national-average-relative values, economic
/// and land-use variables to shares of the national total.
struct FeatureSpec {
    std::string name;
    FeatureKind kind = FeatureKind::other;
    Normalization normalization = Normalization::none;

    static Normalization default_normalization(FeatureKind kind);
    static FeatureSpec make(std::string name, FeatureKind kind);
};

std::string to_string(FeatureKind kind);
std::string to_string(Normalization norm);
FeatureKind feature_kind_from_string(const std::string& text);
Normalization normalization_from_string(const std::string& text);

/// Parses/serializes a feature-spec list as a JSON array of
/// {"name", "kind", "normalization"} objects ("normalization" optional,
/// defaulted by kind).
std::vector<FeatureSpec> feature_specs_from_json(const std::string& text);
std::string feature_specs_to_json(const std::vector<FeatureSpec>& specs);

/// One NUTS-3 region in one year. Absent map entries and empty CSV cells both
/// mean "missing"; nothing is ever imputed.
struct RegionYearRecord {
    RegionCode region;
    int year = 0;
    std::map<std::string, std::optional<double>> features;
    std::optional<double> capacity_mw;
};

enum class CapacityUnit { megawatts, share_pct };

/// The region x year panel. Immutable after construction and safe to share
/// across threads.
///
/// The national capacity series always stays in MW; `capacity_unit` tells
/// whether the per-record capacity column holds MW (as loaded) or percent of
/// the national total (after normalize_dataset).
class PanelDataset {
public:
    PanelDataset(std::vector<RegionYearRecord> records, std::vector<FeatureSpec> feature_specs,
                 std::map<int, double> national_capacity_mw,
                 CapacityUnit unit = CapacityUnit::megawatts);

    const std::vector<RegionYearRecord>& records() const { return records_; }
    const std::vector<FeatureSpec>& feature_specs() const { return feature_specs_; }
    const std::map<int, double>& national_capacity_mw() const { return national_capacity_mw_; }
    CapacityUnit capacity_unit() const { return capacity_unit_; }

    /// Per-year sum of the record capacity column, in the capacity unit of
    /// this dataset (MW before normalization, percent after). The slack
    /// national − allocated is the unallocated capacity.
    const std::map<int, double>& allocated_capacity() const { return allocated_capacity_; }

    bool has_feature(const std::string& name) const;
    std::vector<int> years() const;
    std::vector<RegionCode> regions() const;

    /// Copy with the national series replaced by the per-year regional sums.
    PanelDataset with_national_rederived() const;

private:
    std::vector<RegionYearRecord> records_;
    std::vector<FeatureSpec> feature_specs_;
    std::map<int, double> national_capacity_mw_;
    std::map<int, double> allocated_capacity_;
    CapacityUnit capacity_unit_;
};

/// Loads a panel CSV with columns region,year,capacity_mw,<feature...>.
/// Feature columns must match the declared specs exactly. Empty cells become
/// missing values. The national series comes from the companion CSV
/// (columns year,national_capacity_mw) when given, otherwise it is the
/// per-year regional sum.
PanelDataset load_panel_csv(const std::string& path, const std::vector<FeatureSpec>& specs,
                            const std::optional<std::string>& national_path = std::nullopt);

void write_panel_csv(const PanelDataset& ds, const std::string& path);
void write_national_csv(const PanelDataset& ds, const std::string& path);

std::map<int, double> load_national_csv(const std::string& path);

/// Applies the per-year normalization rules:
///   - national_total_share features become value / yearly sum x 100,
///   - national_average_relative features become value / yearly mean,
///   - capacity becomes percent of the national total for that year.
/// Missing values stay missing and are excluded from sums and means.
///
/// Share-normalized features are idempotent under repeated application (up
/// to rounding) because their divisor is re-derived from the column itself.
/// The capacity column is idempotent only when the national series is
/// re-derived from the records before each pass (with_national_rederived);
/// then shares sum to exactly 100 and a second pass divides by 100. With an
/// explicit national total exceeding the regional sum a second pass would
/// rescale by 100/national.
PanelDataset normalize_dataset(const PanelDataset& ds);

/// Partitions records by year. The two sets must be disjoint and must cover
/// every record year; the national series is shared by both sides.
std::pair<PanelDataset, PanelDataset> split_by_year(const PanelDataset& ds,
                                                    const std::set<int>& train_years,
                                                    const std::set<int>& test_years);

/// Non-missing fraction of a declared feature over all records.
double feature_availability(const PanelDataset& ds, const std::string& feature);

}  // namespace spvcap
