#include "spvcap/shap.hpp"

#include "spvcap/csv.hpp"
#include "spvcap/errors.hpp"
#include "spvcap/threading.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spvcap {

std::vector<double> background_covers(const Tree& tree, const TrainingMatrix& background) {
    if (background.rows() == 0) throw std::invalid_argument("background dataset is empty");
    std::vector<double> covers(tree.nodes.size(), 0.0);
    for (std::size_t r = 0; r < background.rows(); ++r) {
        const double* values = background.row_values(r);
        const char* missing = background.row_missing(r);
        int node = 0;
        covers[node] += 1.0;
        while (!tree.nodes[node].is_leaf()) {
            const TreeNode& n = tree.nodes[node];
            if (missing[n.feature]) {
                node = n.default_left ? n.left : n.right;
            } else {
                node = values[n.feature] < n.threshold ? n.left : n.right;
            }
            covers[node] += 1.0;
        }
    }
    for (std::size_t i = 0; i < covers.size(); ++i) {
        if (covers[i] == 0.0) {
            throw std::invalid_argument(
                "background dataset routes no row through tree node " + std::to_string(i) +
                "; attribution weights need every node covered (the training data always is)");
        }
    }
    return covers;
}

double expected_value(const Tree& tree, const std::vector<double>& covers) {
    double sum = 0.0;
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        if (tree.nodes[i].is_leaf()) sum += covers[i] * tree.nodes[i].weight;
    }
    return sum / covers[0];
}

namespace {

// The path algorithm tracks, for each feature on the path from the root, the
// fraction of background rows that flow through when the feature is excluded
// (zero_fraction) or included (one_fraction), plus the permutation weight.
struct PathElement {
    int feature = -1;
    double zero_fraction = 0.0;
    double one_fraction = 0.0;
    double pweight = 0.0;
};

void extend_path(PathElement* path, int depth, double zero_fraction, double one_fraction,
                 int feature) {
    path[depth].feature = feature;
    path[depth].zero_fraction = zero_fraction;
    path[depth].one_fraction = one_fraction;
    path[depth].pweight = depth == 0 ? 1.0 : 0.0;
    for (int i = depth - 1; i >= 0; --i) {
        path[i + 1].pweight += one_fraction * path[i].pweight * (i + 1) / double(depth + 1);
        path[i].pweight = zero_fraction * path[i].pweight * (depth - i) / double(depth + 1);
    }
}

void unwind_path(PathElement* path, int depth, int index) {
    const double one_fraction = path[index].one_fraction;
    const double zero_fraction = path[index].zero_fraction;
    double next_one_portion = path[depth].pweight;
    for (int i = depth - 1; i >= 0; --i) {
        if (one_fraction != 0.0) {
            const double tmp = path[i].pweight;
            path[i].pweight = next_one_portion * (depth + 1) / double((i + 1) * one_fraction);
            next_one_portion = tmp - path[i].pweight * zero_fraction * (depth - i) / double(depth + 1);
        } else {
            path[i].pweight = path[i].pweight * (depth + 1) / (zero_fraction * double(depth - i));
        }
    }
    for (int i = index; i < depth; ++i) {
        path[i].feature = path[i + 1].feature;
        path[i].zero_fraction = path[i + 1].zero_fraction;
        path[i].one_fraction = path[i + 1].one_fraction;
    }
}

double unwound_path_sum(const PathElement* path, int depth, int index) {
    const double one_fraction = path[index].one_fraction;
    const double zero_fraction = path[index].zero_fraction;
    double next_one_portion = path[depth].pweight;
    double total = 0.0;
    for (int i = depth - 1; i >= 0; --i) {
        if (one_fraction != 0.0) {
            const double tmp = next_one_portion * (depth + 1) / double((i + 1) * one_fraction);
            total += tmp;
            next_one_portion = path[i].pweight - tmp * zero_fraction * (depth - i) / double(depth + 1);
        } else {
            total += path[i].pweight / zero_fraction * (depth + 1) / double(depth - i);
        }
    }
    return total;
}

void shap_recurse(const Tree& tree, const std::vector<double>& covers, const double* values,
                  const char* missing, double* phi, int node_index, int depth,
                  PathElement* parent_path, double parent_zero_fraction,
                  double parent_one_fraction, int parent_feature) {
    PathElement* path = parent_path + depth + 1;
    std::copy(parent_path, parent_path + depth, path);
    extend_path(path, depth, parent_zero_fraction, parent_one_fraction, parent_feature);

    const TreeNode& node = tree.nodes[node_index];
    if (node.is_leaf()) {
        for (int i = 1; i <= depth; ++i) {
            const double w = unwound_path_sum(path, depth, i);
            phi[path[i].feature] += w * (path[i].one_fraction - path[i].zero_fraction) * node.weight;
        }
        return;
    }

    const int hot = missing[node.feature] ? (node.default_left ? node.left : node.right)
                                          : (values[node.feature] < node.threshold ? node.left
                                                                                   : node.right);
    const int cold = hot == node.left ? node.right : node.left;
    const double hot_zero_fraction = covers[hot] / covers[node_index];
    const double cold_zero_fraction = covers[cold] / covers[node_index];

    // A feature met again deeper down is unwound first so each feature appears
    // once on the path, carrying its combined flow-through fractions.
    double incoming_zero_fraction = 1.0;
    double incoming_one_fraction = 1.0;
    int found = -1;
    for (int i = 0; i <= depth; ++i) {
        if (path[i].feature == node.feature) {
            found = i;
            break;
        }
    }
    if (found >= 0) {
        incoming_zero_fraction = path[found].zero_fraction;
        incoming_one_fraction = path[found].one_fraction;
        unwind_path(path, depth, found);
        depth -= 1;
    }

    shap_recurse(tree, covers, values, missing, phi, hot, depth + 1, path,
                 hot_zero_fraction * incoming_zero_fraction, incoming_one_fraction, node.feature);
    shap_recurse(tree, covers, values, missing, phi, cold, depth + 1, path,
                 cold_zero_fraction * incoming_zero_fraction, 0.0, node.feature);
}

void tree_shap_single(const Tree& tree, const std::vector<double>& covers, const double* values,
                      const char* missing, double* phi) {
    if (tree.nodes.size() == 1) return;  // single leaf: nothing to attribute
    const int max_depth = tree.depth() + 2;
    std::vector<PathElement> path_storage(std::size_t(max_depth) * (max_depth + 1) / 2);
    shap_recurse(tree, covers, values, missing, phi, 0, 0, path_storage.data(), 1.0, 1.0, -1);
}

struct PreparedBackground {
    std::vector<std::vector<double>> covers;  // per tree
    double base_value = 0.0;
};

PreparedBackground prepare_background(const GBTModel& model, const TrainingMatrix& background) {
    if (background.feature_names() != model.feature_names) {
        throw SchemaMismatchError("background columns must match model features exactly");
    }
    PreparedBackground prepared;
    prepared.base_value = model.base_score;
    prepared.covers.reserve(model.trees.size());
    for (const auto& tree : model.trees) {
        prepared.covers.push_back(background_covers(tree, background));
        prepared.base_value += expected_value(tree, prepared.covers.back());
    }
    return prepared;
}

ShapExplanation explain_row(const GBTModel& model, const PreparedBackground& prepared,
                            const double* values, const char* missing) {
    std::vector<double> phi(model.feature_names.size(), 0.0);
    double prediction = model.base_score;
    for (std::size_t t = 0; t < model.trees.size(); ++t) {
        tree_shap_single(model.trees[t], prepared.covers[t], values, missing, phi.data());
        prediction += model.trees[t].value_for(values, missing);
    }
    ShapExplanation out;
    out.base_value = prepared.base_value;
    out.prediction = prediction;
    for (std::size_t f = 0; f < model.feature_names.size(); ++f) {
        out.contributions[model.feature_names[f]] = phi[f];
    }
    // The per-tree attributions each sum to f_t(x) - E[f_t], so the total
    // contribution closes the gap between base_value and the prediction.
    return out;
}

}  // namespace

ShapExplanation tree_shap(const GBTModel& model,
                          const std::map<std::string, std::optional<double>>& row,
                          const TrainingMatrix& background) {
    std::vector<double> values(model.feature_names.size(), 0.0);
    std::vector<char> missing(model.feature_names.size(), 1);
    for (std::size_t f = 0; f < model.feature_names.size(); ++f) {
        const auto it = row.find(model.feature_names[f]);
        if (it == row.end()) {
            throw SchemaMismatchError("row lacks model feature '" + model.feature_names[f] +
                                      "' (a missing value must still be keyed)");
        }
        if (it->second) {
            values[f] = *it->second;
            missing[f] = 0;
        }
    }
    const PreparedBackground prepared = prepare_background(model, background);
    return explain_row(model, prepared, values.data(), missing.data());
}

std::vector<ShapExplanation> tree_shap_all(const GBTModel& model, const TrainingMatrix& data,
                                           const TrainingMatrix& background, unsigned threads) {
    if (data.feature_names() != model.feature_names) {
        throw SchemaMismatchError("data columns must match model features exactly");
    }
    const PreparedBackground prepared = prepare_background(model, background);
    std::vector<ShapExplanation> out(data.rows());
    parallel_for(data.rows(), threads, [&](std::size_t r) {
        out[r] = explain_row(model, prepared, data.row_values(r), data.row_missing(r));
    });
    return out;
}

ImportanceReport importance_shares(const GBTModel& model, const TrainingMatrix& data,
                                   unsigned threads) {
    const std::vector<ShapExplanation> explanations = tree_shap_all(model, data, data, threads);
    std::vector<double> mean_abs(model.feature_names.size(), 0.0);
    for (const auto& e : explanations) {
        for (std::size_t f = 0; f < model.feature_names.size(); ++f) {
            mean_abs[f] += std::abs(e.contributions.at(model.feature_names[f]));
        }
    }
    double total = 0.0;
    for (double& m : mean_abs) {
        m /= double(data.rows());
        total += m;
    }
    if (total == 0.0) {
        throw std::invalid_argument(
            "all attributions are zero (constant model); importance shares are undefined");
    }
    ImportanceReport report;
    for (std::size_t f = 0; f < model.feature_names.size(); ++f) {
        report.rows.push_back({model.feature_names[f], mean_abs[f] / total * 100.0, mean_abs[f]});
    }
    std::sort(report.rows.begin(), report.rows.end(),
              [](const ImportanceReport::Row& a, const ImportanceReport::Row& b) {
                  if (a.share_pct != b.share_pct) return a.share_pct > b.share_pct;
                  return a.feature < b.feature;
              });
    return report;
}

std::map<std::string, double> group_shares(const ImportanceReport& report,
                                           const std::map<std::string, std::string>& groups) {
    std::map<std::string, double> out;
    for (const auto& row : report.rows) {
        const auto it = groups.find(row.feature);
        if (it == groups.end()) {
            throw std::invalid_argument("feature '" + row.feature + "' has no group label");
        }
        out[it->second] += row.share_pct;
    }
    return out;
}

void write_importance_csv(const ImportanceReport& report, const std::string& path) {
    csv::Table table;
    table.header = {"feature", "share_pct", "mean_abs_shap"};
    for (const auto& row : report.rows) {
        table.rows.push_back({row.feature, csv::format_double(row.share_pct),
                              csv::format_double(row.mean_abs_shap)});
    }
    csv::write_file(path, table);
}

void write_explanation_csv(const ShapExplanation& explanation,
                           const std::map<std::string, std::optional<double>>& row,
                           const std::string& path) {
    csv::Table table;
    table.header = {"item", "feature_value", "contribution"};
    table.rows.push_back({"base_value", "", csv::format_double(explanation.base_value)});
    // Largest movers first, matching the waterfall reading order.
    std::vector<std::pair<std::string, double>> ordered(explanation.contributions.begin(),
                                                        explanation.contributions.end());
    std::sort(ordered.begin(), ordered.end(), [](const auto& a, const auto& b) {
        if (std::abs(a.second) != std::abs(b.second)) return std::abs(a.second) > std::abs(b.second);
        return a.first < b.first;
    });
    for (const auto& [feature, value] : ordered) {
        std::string feature_value;
        const auto it = row.find(feature);
        if (it != row.end() && it->second) feature_value = csv::format_double(*it->second);
        table.rows.push_back({feature, feature_value, csv::format_double(value)});
    }
    table.rows.push_back({"prediction", "", csv::format_double(explanation.prediction)});
    csv::write_file(path, table);
}

}  // namespace spvcap
