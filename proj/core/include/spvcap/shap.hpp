#pragma once

#include "spvcap/gbtree.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace spvcap {

/// Additive attribution of one prediction: base_value plus the per-feature
/// contributions equals the prediction (within 1e-9).
struct ShapExplanation {
    double base_value = 0.0;
    std::map<std::string, double> contributions;
    double prediction = 0.0;
};

/// Per-feature percentage of the total mean |SHAP| over a dataset. Shares are
/// nonnegative and sum to 100; rows are sorted by share descending (ties by
/// feature name).
struct ImportanceReport {
    struct Row {
        std::string feature;
        double share_pct = 0.0;
        double mean_abs_shap = 0.0;
    };
    std::vector<Row> rows;
};

/// Per-node expected coverage of a tree under a background dataset: the
/// number of background rows routed through each node (missing values follow
/// the node's default direction). Index-aligned with tree.nodes. A reachable
/// node that no background row visits is an error, because the attribution
/// weights would be undefined; the training matrix always covers every node.
std::vector<double> background_covers(const Tree& tree, const TrainingMatrix& background);

/// Cover-weighted mean prediction of one tree (its value under the background
/// distribution).
double expected_value(const Tree& tree, const std::vector<double>& covers);

/// Exact per-feature Shapley attribution of one prediction via the
/// polynomial-time path algorithm, with conditional expectations taken over
/// the background dataset (path-dependent variant). Summed across trees;
/// base_value is base_score plus each tree's expected value.
ShapExplanation tree_shap(const GBTModel& model,
                          const std::map<std::string, std::optional<double>>& row,
                          const TrainingMatrix& background);

/// tree_shap for every row of `data` (rows are independent; computed in
/// parallel when threads > 1, with identical results for any thread count).
std::vector<ShapExplanation> tree_shap_all(const GBTModel& model, const TrainingMatrix& data,
                                           const TrainingMatrix& background, unsigned threads = 1);

/// share_f = mean over rows of |shap_f| / sum_g mean|shap_g| x 100, with the
/// data itself as the background. A constant model (all attributions zero)
/// is an error: there is nothing to apportion.
ImportanceReport importance_shares(const GBTModel& model, const TrainingMatrix& data,
                                   unsigned threads = 1);

/// Sums importance shares by group label. Every feature in the report must be
/// mapped; the output sums to 100 like the input.
std::map<std::string, double> group_shares(const ImportanceReport& report,
                                           const std::map<std::string, std::string>& groups);

void write_importance_csv(const ImportanceReport& report, const std::string& path);

/// CSV of one explanation: feature,value,contribution rows plus base_value
/// and prediction footer rows (the waterfall chart's data).
void write_explanation_csv(const ShapExplanation& explanation,
                           const std::map<std::string, std::optional<double>>& row,
                           const std::string& path);

}  // namespace spvcap
