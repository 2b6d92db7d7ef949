#pragma once

#include "spvcap/panel.hpp"

#include <functional>
#include <string>
#include <vector>

namespace spvcap {

/// One feature's association with the capacity-share target.
struct RankingRow {
    std::string feature;
    double pearson = 0.0;
    double spearman = 0.0;
    double linfit_r2 = 0.0;
    double avg_corr = 0.0;        // (pearson + spearman) / 2, signed
    double availability = 0.0;    // non-missing fraction in [0,1]
};

/// A feature that could not be ranked, with the reason (too few complete
/// pairs, or a degenerate constant column). Reported, never silently dropped.
struct ExcludedFeature {
    std::string feature;
    std::string reason;
};

/// Features sorted by the ranking key, best first. The key is the signed
/// avg_corr by default, or |avg_corr| when ranked with absolute=true
/// (recorded here so that selection uses the same key). Ties are broken
/// lexicographically by feature name, so the order is strict.
struct FeatureRanking {
    std::vector<RankingRow> rows;
    std::vector<ExcludedFeature> excluded;
    bool ranked_by_absolute = false;
};

/// Ranks every declared feature by its averaged Pearson/Spearman correlation
/// with the capacity share, over all records where both the feature and the
/// capacity are present (pairs deleted listwise). The dataset must already be
/// normalized (capacity in percent of national).
FeatureRanking rank_features(const PanelDataset& ds, bool absolute = false);

/// Features whose ranking key is >= corr_threshold and whose availability is
/// >= availability_threshold, in rank order. Raising either threshold never
/// adds a feature. Empty selection is an error suggesting a lower threshold.
std::vector<std::string> select_features(const FeatureRanking& ranking, double corr_threshold,
                                         double availability_threshold);

/// Evaluates one candidate feature set, returning its mean cross-validated
/// RMSE. Must be pure and thread-safe; typically wraps kfold_grid_search.
using CvEvaluator = std::function<double(const std::vector<std::string>& features)>;

struct SweepRow {
    double threshold = 0.0;
    std::vector<std::string> features;
    double cv_rmse = 0.0;
    bool empty_selection = false;  // threshold excluded every feature
};

struct SweepResult {
    double best_threshold = 0.0;
    std::vector<SweepRow> rows;  // grid order
};

/// Tries every correlation threshold in the grid, scoring each selected
/// feature set with the evaluator, and returns the threshold with the lowest
/// mean CV RMSE (first in grid order on ties). Identical feature sets are
/// evaluated once and share the score. Thresholds that select nothing are
/// recorded but skipped; if all of them select nothing, that is an error.
SweepResult sweep_thresholds(const PanelDataset& ds, const std::vector<double>& grid,
                             const CvEvaluator& evaluator, double availability_threshold = 0.9,
                             bool absolute = false, unsigned threads = 1);

/// CSV export: feature,pearson,spearman,linfit_r2,avg_corr,availability.
void write_ranking_csv(const FeatureRanking& ranking, const std::string& path);

void write_sweep_csv(const SweepResult& sweep, const std::string& path);

}  // namespace spvcap
