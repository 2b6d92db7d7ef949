#include "spvcap/panel.hpp"

#include "spvcap/csv.hpp"
#include "spvcap/errors.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace spvcap {

Normalization FeatureSpec::default_normalization(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::climate: return Normalization::national_average_relative;
        case FeatureKind::economic: return Normalization::national_total_share;
        case FeatureKind::landuse: return Normalization::national_total_share;
        case FeatureKind::other: return Normalization::none;
    }
    return Normalization::none;
}

FeatureSpec FeatureSpec::make(std::string name, FeatureKind kind) {
    return FeatureSpec{std::move(name), kind, default_normalization(kind)};
}

std::string to_string(FeatureKind kind) {
    switch (kind) {
        case FeatureKind::climate: return "climate";
        case FeatureKind::economic: return "economic";
        case FeatureKind::landuse: return "landuse";
        case FeatureKind::other: return "other";
    }
    return "other";
}

std::string to_string(Normalization norm) {
    switch (norm) {
        case Normalization::national_total_share: return "national_total_share";
        case Normalization::national_average_relative: return "national_average_relative";
        case Normalization::none: return "none";
    }
    return "none";
}

FeatureKind feature_kind_from_string(const std::string& text) {
    if (text == "climate") return FeatureKind::climate;
    if (text == "economic") return FeatureKind::economic;
    if (text == "landuse") return FeatureKind::landuse;
    if (text == "other") return FeatureKind::other;
    throw std::invalid_argument("unknown feature kind '" + text + "'");
}

Normalization normalization_from_string(const std::string& text) {
    if (text == "national_total_share") return Normalization::national_total_share;
    if (text == "national_average_relative") return Normalization::national_average_relative;
    if (text == "none") return Normalization::none;
    throw std::invalid_argument("unknown normalization '" + text + "'");
}

std::vector<FeatureSpec> feature_specs_from_json(const std::string& text) {
    const auto doc = nlohmann::json::parse(text);
    if (!doc.is_array()) throw std::invalid_argument("feature specs JSON must be an array");
    std::vector<FeatureSpec> specs;
    for (const auto& item : doc) {
        FeatureSpec spec;
        spec.name = item.at("name").get<std::string>();
        spec.kind = feature_kind_from_string(item.at("kind").get<std::string>());
        if (item.contains("normalization")) {
            spec.normalization = normalization_from_string(item["normalization"].get<std::string>());
        } else {
            spec.normalization = FeatureSpec::default_normalization(spec.kind);
        }
        specs.push_back(std::move(spec));
    }
    return specs;
}

std::string feature_specs_to_json(const std::vector<FeatureSpec>& specs) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& spec : specs) {
        doc.push_back({{"name", spec.name},
                       {"kind", to_string(spec.kind)},
                       {"normalization", to_string(spec.normalization)}});
    }
    return doc.dump(2) + "\n";
}

namespace {

void validate_feature_name(const std::string& name) {
    if (name.empty()) throw std::invalid_argument("feature name must not be empty");
    if (name.find(',') != std::string::npos || name.find('\n') != std::string::npos) {
        throw std::invalid_argument("feature name '" + name + "' contains a separator character");
    }
    if (name == "region" || name == "year" || name == "capacity_mw") {
        throw std::invalid_argument("feature name '" + name + "' collides with a reserved column");
    }
}

}  // namespace

PanelDataset::PanelDataset(std::vector<RegionYearRecord> records,
                           std::vector<FeatureSpec> feature_specs,
                           std::map<int, double> national_capacity_mw, CapacityUnit unit)
    : records_(std::move(records)),
      feature_specs_(std::move(feature_specs)),
      national_capacity_mw_(std::move(national_capacity_mw)),
      capacity_unit_(unit) {
    std::set<std::string> declared;
    for (const auto& spec : feature_specs_) {
        validate_feature_name(spec.name);
        if (!declared.insert(spec.name).second) {
            throw std::invalid_argument("duplicate feature spec '" + spec.name + "'");
        }
    }

    std::set<std::pair<std::string, int>> seen;
    for (const auto& rec : records_) {
        if (rec.region.level() != 3) {
            throw std::invalid_argument("record region '" + rec.region.code() +
                                        "' is not a NUTS-3 code");
        }
        if (rec.year < 1900 || rec.year > 2200) {
            throw std::invalid_argument("record year " + std::to_string(rec.year) +
                                        " outside supported range");
        }
        if (!seen.emplace(rec.region.code(), rec.year).second) {
            throw std::invalid_argument("duplicate record for (" + rec.region.code() + ", " +
                                        std::to_string(rec.year) + ")");
        }
        if (rec.capacity_mw && *rec.capacity_mw < 0) {
            throw std::invalid_argument("negative capacity for (" + rec.region.code() + ", " +
                                        std::to_string(rec.year) + ")");
        }
        for (const auto& [name, value] : rec.features) {
            if (!declared.count(name)) {
                throw std::invalid_argument("record (" + rec.region.code() + ", " +
                                            std::to_string(rec.year) + ") carries undeclared feature '" +
                                            name + "'");
            }
        }
        if (rec.capacity_mw) allocated_capacity_[rec.year] += *rec.capacity_mw;
        else allocated_capacity_.try_emplace(rec.year, 0.0);
    }

    for (const auto& [year, total] : national_capacity_mw_) {
        if (total < 0) {
            throw std::invalid_argument("negative national capacity for year " + std::to_string(year));
        }
    }
    if (capacity_unit_ == CapacityUnit::megawatts) {
        for (const auto& [year, allocated] : allocated_capacity_) {
            const auto it = national_capacity_mw_.find(year);
            if (it == national_capacity_mw_.end()) {
                throw MissingInputError("no national capacity for year " + std::to_string(year));
            }
            // tiny relative slack for sums assembled in a different order
            if (allocated > it->second * (1.0 + 1e-9) + 1e-9) {
                throw std::invalid_argument("allocated regional capacity " +
                                            csv::format_double(allocated) + " exceeds national total " +
                                            csv::format_double(it->second) + " in year " +
                                            std::to_string(year));
            }
        }
    }
}

bool PanelDataset::has_feature(const std::string& name) const {
    return std::any_of(feature_specs_.begin(), feature_specs_.end(),
                       [&](const FeatureSpec& s) { return s.name == name; });
}

std::vector<int> PanelDataset::years() const {
    std::set<int> uniq;
    for (const auto& rec : records_) uniq.insert(rec.year);
    return {uniq.begin(), uniq.end()};
}

std::vector<RegionCode> PanelDataset::regions() const {
    std::set<RegionCode> uniq;
    for (const auto& rec : records_) uniq.insert(rec.region);
    return {uniq.begin(), uniq.end()};
}

PanelDataset PanelDataset::with_national_rederived() const {
    std::map<int, double> national = allocated_capacity_;
    return PanelDataset(records_, feature_specs_, std::move(national), capacity_unit_);
}

namespace {

std::optional<double> parse_cell(const std::string& cell, std::size_t line_no,
                                 const std::string& column) {
    if (cell.empty()) return std::nullopt;
    return csv::parse_double(cell, line_no, column);
}

}  // namespace

std::map<int, double> load_national_csv(const std::string& path) {
    const auto table = csv::read_file(path);
    const auto year_col = table.column("year");
    const auto cap_col = table.column("national_capacity_mw");
    if (!year_col || !cap_col) {
        throw std::runtime_error(path + ": national CSV needs columns year,national_capacity_mw");
    }
    std::map<int, double> national;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const std::size_t line_no = i + 2;
        const int year = static_cast<int>(csv::parse_long(table.rows[i][*year_col], line_no, "year"));
        const double mw = csv::parse_double(table.rows[i][*cap_col], line_no, "national_capacity_mw");
        if (!national.emplace(year, mw).second) {
            throw std::runtime_error(path + ": duplicate national entry for year " + std::to_string(year));
        }
    }
    return national;
}

PanelDataset load_panel_csv(const std::string& path, const std::vector<FeatureSpec>& specs,
                            const std::optional<std::string>& national_path) {
    const auto table = csv::read_file(path);

    const auto region_col = table.column("region");
    const auto year_col = table.column("year");
    const auto cap_col = table.column("capacity_mw");
    if (!region_col || !year_col || !cap_col) {
        throw std::runtime_error(path + ": header must contain region, year and capacity_mw");
    }

    std::map<std::string, std::size_t> feature_cols;
    for (const auto& spec : specs) {
        const auto col = table.column(spec.name);
        if (!col) throw std::runtime_error(path + ": declared feature column '" + spec.name + "' missing");
        feature_cols[spec.name] = *col;
    }
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i == *region_col || i == *year_col || i == *cap_col) continue;
        if (!std::any_of(specs.begin(), specs.end(),
                         [&](const FeatureSpec& s) { return s.name == table.header[i]; })) {
            throw std::runtime_error(path + ": column '" + table.header[i] + "' is not declared");
        }
    }

    std::vector<RegionYearRecord> records;
    records.reserve(table.rows.size());
    std::set<std::pair<std::string, int>> seen;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const std::size_t line_no = i + 2;
        RegionYearRecord rec{RegionCode(row[*region_col]),
                             static_cast<int>(csv::parse_long(row[*year_col], line_no, "year")),
                             {},
                             parse_cell(row[*cap_col], line_no, "capacity_mw")};
        if (rec.capacity_mw && *rec.capacity_mw < 0) {
            throw std::runtime_error(path + ": line " + std::to_string(line_no) +
                                     ": negative capacity " + row[*cap_col]);
        }
        if (!seen.emplace(rec.region.code(), rec.year).second) {
            throw std::runtime_error(path + ": duplicate rows for (" + rec.region.code() + ", " +
                                     std::to_string(rec.year) + ")");
        }
        for (const auto& [name, col] : feature_cols) {
            rec.features[name] = parse_cell(row[col], line_no, name);
        }
        records.push_back(std::move(rec));
    }

    std::map<int, double> national;
    if (national_path) {
        national = load_national_csv(*national_path);
        for (const auto& rec : records) {
            if (!national.count(rec.year)) {
                throw MissingInputError(*national_path + ": no national capacity for year " +
                                        std::to_string(rec.year));
            }
        }
    } else {
        for (const auto& rec : records) {
            auto [it, inserted] = national.try_emplace(rec.year, 0.0);
            if (rec.capacity_mw) it->second += *rec.capacity_mw;
        }
    }
    return PanelDataset(std::move(records), specs, std::move(national));
}

void write_panel_csv(const PanelDataset& ds, const std::string& path) {
    csv::Table table;
    table.header = {"region", "year", "capacity_mw"};
    for (const auto& spec : ds.feature_specs()) table.header.push_back(spec.name);
    for (const auto& rec : ds.records()) {
        std::vector<std::string> row{rec.region.code(), std::to_string(rec.year),
                                     rec.capacity_mw ? csv::format_double(*rec.capacity_mw) : ""};
        for (const auto& spec : ds.feature_specs()) {
            const auto it = rec.features.find(spec.name);
            const bool present = it != rec.features.end() && it->second.has_value();
            row.push_back(present ? csv::format_double(*it->second) : "");
        }
        table.rows.push_back(std::move(row));
    }
    csv::write_file(path, table);
}

void write_national_csv(const PanelDataset& ds, const std::string& path) {
    csv::Table table;
    table.header = {"year", "national_capacity_mw"};
    for (const auto& [year, mw] : ds.national_capacity_mw()) {
        table.rows.push_back({std::to_string(year), csv::format_double(mw)});
    }
    csv::write_file(path, table);
}

PanelDataset normalize_dataset(const PanelDataset& ds) {
    // Per-year sums and non-missing counts per feature.
    struct Agg {
        double sum = 0.0;
        std::size_t count = 0;
    };
    std::map<std::string, std::map<int, Agg>> aggregates;
    for (const auto& rec : ds.records()) {
        for (const auto& [name, value] : rec.features) {
            if (!value) continue;
            auto& agg = aggregates[name][rec.year];
            agg.sum += *value;
            agg.count += 1;
        }
    }

    std::vector<RegionYearRecord> records = ds.records();
    for (auto& rec : records) {
        for (const auto& spec : ds.feature_specs()) {
            const auto it = rec.features.find(spec.name);
            if (it == rec.features.end() || !it->second) continue;
            if (spec.normalization == Normalization::none) continue;
            const Agg agg = aggregates[spec.name][rec.year];
            if (spec.normalization == Normalization::national_total_share) {
                if (agg.sum == 0.0) {
                    throw std::runtime_error("normalize: yearly total of feature '" + spec.name +
                                             "' is zero in year " + std::to_string(rec.year));
                }
                it->second = *it->second / agg.sum * 100.0;
            } else {
                const double mean = agg.sum / static_cast<double>(agg.count);
                if (mean == 0.0) {
                    throw std::runtime_error("normalize: yearly mean of feature '" + spec.name +
                                             "' is zero in year " + std::to_string(rec.year));
                }
                it->second = *it->second / mean;
            }
        }
        if (rec.capacity_mw) {
            const auto nat = ds.national_capacity_mw().find(rec.year);
            if (nat == ds.national_capacity_mw().end()) {
                throw MissingInputError("normalize: no national capacity for year " +
                                        std::to_string(rec.year));
            }
            if (nat->second == 0.0) {
                throw std::runtime_error("normalize: national capacity is zero in year " +
                                         std::to_string(rec.year));
            }
            rec.capacity_mw = *rec.capacity_mw / nat->second * 100.0;
        }
    }
    return PanelDataset(std::move(records), ds.feature_specs(), ds.national_capacity_mw(),
                        CapacityUnit::share_pct);
}

std::pair<PanelDataset, PanelDataset> split_by_year(const PanelDataset& ds,
                                                    const std::set<int>& train_years,
                                                    const std::set<int>& test_years) {
    for (int year : train_years) {
        if (test_years.count(year)) {
            throw std::invalid_argument("split: year " + std::to_string(year) +
                                        " appears in both train and test sets");
        }
    }
    std::string uncovered;
    for (int year : ds.years()) {
        if (!train_years.count(year) && !test_years.count(year)) {
            if (!uncovered.empty()) uncovered += ", ";
            uncovered += std::to_string(year);
        }
    }
    if (!uncovered.empty()) {
        throw std::invalid_argument("split: record year(s) " + uncovered +
                                    " covered by neither train nor test set");
    }

    std::vector<RegionYearRecord> train, test;
    for (const auto& rec : ds.records()) {
        (train_years.count(rec.year) ? train : test).push_back(rec);
    }
    return {PanelDataset(std::move(train), ds.feature_specs(), ds.national_capacity_mw(),
                         ds.capacity_unit()),
            PanelDataset(std::move(test), ds.feature_specs(), ds.national_capacity_mw(),
                         ds.capacity_unit())};
}

double feature_availability(const PanelDataset& ds, const std::string& feature) {
    if (!ds.has_feature(feature)) {
        throw std::invalid_argument("unknown feature '" + feature + "'");
    }
    if (ds.records().empty()) return 0.0;
    std::size_t present = 0;
    for (const auto& rec : ds.records()) {
        const auto it = rec.features.find(feature);
        if (it != rec.features.end() && it->second) ++present;
    }
    return static_cast<double>(present) / static_cast<double>(ds.records().size());
}

}  // namespace spvcap
