#include "spvcap/ranking.hpp"

#include "spvcap/csv.hpp"
#include "spvcap/stats.hpp"
#include "spvcap/threading.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace spvcap {

namespace {

double ranking_key(const RankingRow& row, bool absolute) {
    return absolute ? std::abs(row.avg_corr) : row.avg_corr;
}

}  // namespace

FeatureRanking rank_features(const PanelDataset& ds, bool absolute) {
    if (ds.capacity_unit() != CapacityUnit::share_pct) {
        throw std::invalid_argument(
            "rank_features expects a normalized dataset (capacity in percent of national)");
    }
    FeatureRanking ranking;
    ranking.ranked_by_absolute = absolute;
    for (const auto& spec : ds.feature_specs()) {
        std::vector<std::optional<double>> xs, ys;
        xs.reserve(ds.records().size());
        ys.reserve(ds.records().size());
        for (const auto& rec : ds.records()) {
            const auto it = rec.features.find(spec.name);
            xs.push_back(it == rec.features.end() ? std::nullopt : it->second);
            ys.push_back(rec.capacity_mw);
        }
        const PairedSeries pairs = PairedSeries::from_complete_pairs(xs, ys);
        if (pairs.x.size() < 3) {
            ranking.excluded.push_back({spec.name, "only " + std::to_string(pairs.x.size()) +
                                                       " complete pairs (need at least 3)"});
            continue;
        }
        RankingRow row;
        row.feature = spec.name;
        row.availability = feature_availability(ds, spec.name);
        try {
            row.pearson = pearson(pairs);
            row.spearman = spearman(pairs);
            row.linfit_r2 = linfit_r2(pairs);
            row.avg_corr = avg_correlation(pairs);
        } catch (const std::invalid_argument& e) {
            ranking.excluded.push_back({spec.name, e.what()});
            continue;
        }
        ranking.rows.push_back(std::move(row));
    }
    std::sort(ranking.rows.begin(), ranking.rows.end(), [&](const RankingRow& a, const RankingRow& b) {
        const double ka = ranking_key(a, absolute), kb = ranking_key(b, absolute);
        if (ka != kb) return ka > kb;
        return a.feature < b.feature;
    });
    return ranking;
}

std::vector<std::string> select_features(const FeatureRanking& ranking, double corr_threshold,
                                         double availability_threshold) {
    if (corr_threshold < 0.0 || corr_threshold > 1.0) {
        throw std::invalid_argument("correlation threshold must be in [0,1]");
    }
    if (availability_threshold < 0.0 || availability_threshold > 1.0) {
        throw std::invalid_argument("availability threshold must be in [0,1]");
    }
    std::vector<std::string> selected;
    for (const auto& row : ranking.rows) {
        if (ranking_key(row, ranking.ranked_by_absolute) >= corr_threshold &&
            row.availability >= availability_threshold) {
            selected.push_back(row.feature);
        }
    }
    if (selected.empty()) {
        throw std::invalid_argument(
            "no feature passes corr_threshold=" + csv::format_double(corr_threshold) +
            ", availability_threshold=" + csv::format_double(availability_threshold) +
            "; try a lower threshold");
    }
    return selected;
}

SweepResult sweep_thresholds(const PanelDataset& ds, const std::vector<double>& grid,
                             const CvEvaluator& evaluator, double availability_threshold,
                             bool absolute, unsigned threads) {
    if (grid.empty()) throw std::invalid_argument("threshold grid is empty");
    const FeatureRanking ranking = rank_features(ds, absolute);

    SweepResult sweep;
    sweep.rows.resize(grid.size());
    // Identical feature sets share one evaluation (and therefore one score).
    std::map<std::vector<std::string>, std::vector<std::size_t>> rows_of_set;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        SweepRow& row = sweep.rows[i];
        row.threshold = grid[i];
        try {
            row.features = select_features(ranking, grid[i], availability_threshold);
        } catch (const std::invalid_argument&) {
            row.empty_selection = true;
            continue;
        }
        rows_of_set[row.features].push_back(i);
    }
    if (rows_of_set.empty()) {
        throw std::invalid_argument("every threshold in the sweep grid selects zero features");
    }

    std::vector<const std::vector<std::string>*> unique_sets;
    unique_sets.reserve(rows_of_set.size());
    for (const auto& [features, _] : rows_of_set) unique_sets.push_back(&features);
    std::vector<double> scores(unique_sets.size());
    parallel_for(unique_sets.size(), threads,
                 [&](std::size_t i) { scores[i] = evaluator(*unique_sets[i]); });
    for (std::size_t i = 0; i < unique_sets.size(); ++i) {
        for (std::size_t row_index : rows_of_set.at(*unique_sets[i])) {
            sweep.rows[row_index].cv_rmse = scores[i];
        }
    }

    const SweepRow* best = nullptr;
    for (const auto& row : sweep.rows) {
        if (row.empty_selection) continue;
        if (!best || row.cv_rmse < best->cv_rmse) best = &row;
    }
    sweep.best_threshold = best->threshold;
    return sweep;
}

void write_ranking_csv(const FeatureRanking& ranking, const std::string& path) {
    csv::Table table;
    table.header = {"feature", "pearson", "spearman", "linfit_r2", "avg_corr", "availability"};
    for (const auto& row : ranking.rows) {
        table.rows.push_back({row.feature, csv::format_double(row.pearson),
                              csv::format_double(row.spearman), csv::format_double(row.linfit_r2),
                              csv::format_double(row.avg_corr),
                              csv::format_double(row.availability)});
    }
    csv::write_file(path, table);
}

void write_sweep_csv(const SweepResult& sweep, const std::string& path) {
    csv::Table table;
    table.header = {"threshold", "n_features", "features", "cv_rmse", "best"};
    for (const auto& row : sweep.rows) {
        std::string joined;
        for (const auto& f : row.features) {
            if (!joined.empty()) joined += ';';
            joined += f;
        }
        table.rows.push_back({csv::format_double(row.threshold),
                              std::to_string(row.features.size()), joined,
                              row.empty_selection ? "" : csv::format_double(row.cv_rmse),
                              (!row.empty_selection && row.threshold == sweep.best_threshold) ? "1"
                                                                                              : "0"});
    }
    csv::write_file(path, table);
}

}  // namespace spvcap
