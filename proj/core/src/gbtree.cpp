#include "spvcap/gbtree.hpp"

#include "spvcap/csv.hpp"
#include "spvcap/errors.hpp"
#include "spvcap/threading.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace spvcap {

void Hyperparams::validate() const {
    if (n_rounds < 0) throw std::invalid_argument("n_rounds must be >= 0");
    if (learning_rate <= 0 || learning_rate > 1) throw std::invalid_argument("learning_rate must be in (0,1]");
    if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
    if (min_child_weight < 0) throw std::invalid_argument("min_child_weight must be >= 0");
    if (reg_lambda < 0) throw std::invalid_argument("reg_lambda must be >= 0");
    if (gamma < 0) throw std::invalid_argument("gamma must be >= 0");
    if (subsample <= 0 || subsample > 1) throw std::invalid_argument("subsample must be in (0,1]");
}

int Tree::leaf_for(const double* values, const char* missing) const {
    int node = 0;
    while (!nodes[node].is_leaf()) {
        const TreeNode& n = nodes[node];
        if (missing[n.feature]) {
            node = n.default_left ? n.left : n.right;
        } else {
            node = values[n.feature] < n.threshold ? n.left : n.right;
        }
    }
    return node;
}

double Tree::value_for(const double* values, const char* missing) const {
    return nodes[leaf_for(values, missing)].weight;
}

int Tree::depth() const {
    // iterative depth over the index-linked nodes
    int max_depth = 0;
    std::vector<std::pair<int, int>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [node, depth] = stack.back();
        stack.pop_back();
        max_depth = std::max(max_depth, depth);
        if (!nodes[node].is_leaf()) {
            stack.push_back({nodes[node].left, depth + 1});
            stack.push_back({nodes[node].right, depth + 1});
        }
    }
    return max_depth;
}

TrainingMatrix::TrainingMatrix(std::vector<std::string> feature_names, std::size_t rows)
    : feature_names_(std::move(feature_names)),
      values_(rows * feature_names_.size(), 0.0),
      missing_(rows * feature_names_.size(), 1),
      rows_(rows) {
    target.assign(rows, 0.0);
}

void TrainingMatrix::set(std::size_t row, std::size_t col, std::optional<double> value) {
    values_[row * cols() + col] = value.value_or(0.0);
    missing_[row * cols() + col] = value ? 0 : 1;
}

TrainingMatrix TrainingMatrix::subset(const std::vector<std::size_t>& row_indices) const {
    TrainingMatrix out(feature_names_, row_indices.size());
    for (std::size_t i = 0; i < row_indices.size(); ++i) {
        const std::size_t r = row_indices[i];
        for (std::size_t c = 0; c < cols(); ++c) {
            out.set(i, c, is_missing(r, c) ? std::nullopt : std::optional<double>(value(r, c)));
        }
        out.target[i] = target[r];
        if (!regions.empty()) {
            if (out.regions.empty()) out.regions.resize(row_indices.size());
            out.regions[i] = regions[r];
        }
        if (!years.empty()) {
            if (out.years.empty()) out.years.resize(row_indices.size());
            out.years[i] = years[r];
        }
    }
    return out;
}

TrainingMatrix build_training_matrix(const PanelDataset& ds, const std::vector<std::string>& features,
                                     bool require_target) {
    for (const auto& name : features) {
        if (!ds.has_feature(name)) {
            throw SchemaMismatchError("feature '" + name + "' not present in the dataset");
        }
    }
    std::vector<const RegionYearRecord*> rows;
    for (const auto& rec : ds.records()) {
        if (require_target && !rec.capacity_mw) continue;
        rows.push_back(&rec);
    }
    TrainingMatrix matrix(features, rows.size());
    matrix.regions.resize(rows.size());
    matrix.years.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& rec = *rows[i];
        for (std::size_t c = 0; c < features.size(); ++c) {
            const auto it = rec.features.find(features[c]);
            matrix.set(i, c, it == rec.features.end() ? std::nullopt : it->second);
        }
        if (require_target) {
            const double share = *rec.capacity_mw;
            if (share < 0.0 || share > 100.0 + 1e-9) {
                throw std::invalid_argument("capacity share " + csv::format_double(share) + " for (" +
                                            rec.region.code() + ", " + std::to_string(rec.year) +
                                            ") outside [0,100]; is the dataset normalized?");
            }
            matrix.target[i] = share;
        }
        matrix.regions[i] = rec.region.code();
        matrix.years[i] = rec.year;
    }
    return matrix;
}

namespace {

struct SplitDecision {
    double gain = 0.0;
    int feature = -1;
    double threshold = 0.0;
    bool default_left = true;
    bool found() const { return feature >= 0; }
};

double leaf_objective(double g, double h, double reg_lambda) {
    return g * g / (h + reg_lambda);
}

/// Exact greedy split search over the rows of one node.
SplitDecision best_split(const std::vector<double>& grad, const std::vector<double>& hess,
                         const TrainingMatrix& matrix, const std::vector<std::size_t>& rows,
                         double g_total, double h_total, const Hyperparams& p) {
    SplitDecision best;
    const double parent_score = leaf_objective(g_total, h_total, p.reg_lambda);

    std::vector<std::pair<double, std::size_t>> sorted;
    sorted.reserve(rows.size());
    for (std::size_t f = 0; f < matrix.cols(); ++f) {
        sorted.clear();
        double g_missing = 0.0, h_missing = 0.0;
        for (std::size_t r : rows) {
            if (matrix.is_missing(r, f)) {
                g_missing += grad[r];
                h_missing += hess[r];
            } else {
                sorted.emplace_back(matrix.value(r, f), r);
            }
        }
        if (sorted.size() < 2) continue;  // nothing to separate (or all missing)
        std::sort(sorted.begin(), sorted.end());

        double g_left = 0.0, h_left = 0.0;
        for (std::size_t j = 0; j + 1 < sorted.size(); ++j) {
            g_left += grad[sorted[j].second];
            h_left += hess[sorted[j].second];
            if (sorted[j].first == sorted[j + 1].first) continue;
            const double threshold = sorted[j].first + (sorted[j + 1].first - sorted[j].first) / 2.0;

            const bool has_missing = h_missing > 0.0 || g_missing != 0.0;
            for (const bool missing_left : {true, false}) {
                if (!missing_left && !has_missing) break;  // identical to missing_left
                const double gl = g_left + (missing_left ? g_missing : 0.0);
                const double hl = h_left + (missing_left ? h_missing : 0.0);
                const double gr = g_total - gl;
                const double hr = h_total - hl;
                if (hl < p.min_child_weight || hr < p.min_child_weight) continue;
                const double gain =
                    0.5 * (leaf_objective(gl, hl, p.reg_lambda) + leaf_objective(gr, hr, p.reg_lambda) -
                           parent_score) -
                    p.gamma;
                if (gain > best.gain) {
                    best = {gain, static_cast<int>(f), threshold, missing_left};
                }
            }
        }
    }
    return best;
}

int build_node(Tree& tree, const std::vector<double>& grad, const std::vector<double>& hess,
               const TrainingMatrix& matrix, std::vector<std::size_t> rows, int depth,
               const Hyperparams& p) {
    double g_total = 0.0, h_total = 0.0;
    for (std::size_t r : rows) {
        g_total += grad[r];
        h_total += hess[r];
    }

    const int index = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[index].cover = h_total;

    SplitDecision split;
    if (depth < p.max_depth && rows.size() >= 2) {
        split = best_split(grad, hess, matrix, rows, g_total, h_total, p);
    }
    if (!split.found() || split.gain <= 0.0) {
        tree.nodes[index].weight = -g_total / (h_total + p.reg_lambda);
        return index;
    }

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rows) {
        const bool go_left = matrix.is_missing(r, split.feature)
                                 ? split.default_left
                                 : matrix.value(r, split.feature) < split.threshold;
        (go_left ? left_rows : right_rows).push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    const int left = build_node(tree, grad, hess, matrix, std::move(left_rows), depth + 1, p);
    const int right = build_node(tree, grad, hess, matrix, std::move(right_rows), depth + 1, p);
    TreeNode& node = tree.nodes[index];
    node.feature = split.feature;
    node.threshold = split.threshold;
    node.default_left = split.default_left;
    node.left = left;
    node.right = right;
    return index;
}

void check_finite(const TrainingMatrix& matrix) {
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        for (std::size_t c = 0; c < matrix.cols(); ++c) {
            if (!matrix.is_missing(r, c) && !std::isfinite(matrix.value(r, c))) {
                throw std::invalid_argument("non-finite value in feature '" +
                                            matrix.feature_names()[c] + "', row " + std::to_string(r) +
                                            " (use a missing cell, not NaN)");
            }
        }
    }
    for (std::size_t r = 0; r < matrix.target.size(); ++r) {
        if (!std::isfinite(matrix.target[r])) {
            throw std::invalid_argument("non-finite target in row " + std::to_string(r));
        }
    }
}

}  // namespace

Tree fit_tree(const std::vector<double>& grad, const std::vector<double>& hess,
              const TrainingMatrix& matrix, const Hyperparams& params) {
    params.validate();
    if (matrix.rows() == 0) throw std::invalid_argument("fit_tree: empty matrix");
    if (grad.size() != matrix.rows() || hess.size() != matrix.rows()) {
        throw std::invalid_argument("fit_tree: grad/hess length must equal row count");
    }
    for (double h : hess) {
        if (h < 0) throw std::invalid_argument("fit_tree: negative hessian entry");
    }
    Tree tree;
    std::vector<std::size_t> rows(matrix.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    build_node(tree, grad, hess, matrix, std::move(rows), 0, params);
    return tree;
}

GBTModel train(const TrainingMatrix& matrix, const Hyperparams& params) {
    params.validate();
    if (matrix.rows() == 0) throw std::invalid_argument("train: empty matrix");
    check_finite(matrix);

    GBTModel model;
    model.feature_names = matrix.feature_names();
    model.hyperparams = params;
    const auto [tmin, tmax] = std::minmax_element(matrix.target.begin(), matrix.target.end());
    // A constant target must be reproduced bit-exactly; the accumulated mean can
    // pick up rounding from the repeated additions, so short-circuit that case.
    model.base_score =
        (*tmin == *tmax)
            ? *tmin
            : std::accumulate(matrix.target.begin(), matrix.target.end(), 0.0) / matrix.rows();
    if (!matrix.years.empty()) {
        std::set<int> uniq(matrix.years.begin(), matrix.years.end());
        model.training_meta.train_years.assign(uniq.begin(), uniq.end());
    }

    const std::size_t n = matrix.rows();
    std::vector<double> predictions(n, model.base_score);
    std::mt19937_64 rng(params.seed);
    std::vector<std::size_t> all_rows(n);
    std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});

    model.trees.reserve(params.n_rounds);
    for (int round = 0; round < params.n_rounds; ++round) {
        std::vector<std::size_t> rows = all_rows;
        if (params.subsample < 1.0) {
            std::shuffle(rows.begin(), rows.end(), rng);
            const auto keep = static_cast<std::size_t>(
                std::max<double>(1.0, std::ceil(params.subsample * static_cast<double>(n))));
            rows.resize(keep);
            std::sort(rows.begin(), rows.end());
        }

        TrainingMatrix sample = matrix.subset(rows);
        std::vector<double> grad(rows.size()), hess(rows.size(), 1.0);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            grad[i] = predictions[rows[i]] - matrix.target[rows[i]];
        }

        Tree tree = fit_tree(grad, hess, sample, params);
        for (auto& node : tree.nodes) {
            if (node.is_leaf()) node.weight *= params.learning_rate;
        }
        for (std::size_t i = 0; i < n; ++i) {
            predictions[i] += tree.value_for(matrix.row_values(i), matrix.row_missing(i));
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

std::vector<double> GBTModel::predict(const TrainingMatrix& matrix) const {
    // map model features onto matrix columns
    std::vector<std::size_t> col_of(feature_names.size());
    for (std::size_t f = 0; f < feature_names.size(); ++f) {
        const auto& names = matrix.feature_names();
        const auto it = std::find(names.begin(), names.end(), feature_names[f]);
        if (it == names.end()) {
            throw SchemaMismatchError("matrix lacks model feature '" + feature_names[f] + "'");
        }
        col_of[f] = static_cast<std::size_t>(it - names.begin());
    }

    std::vector<double> values(feature_names.size());
    std::vector<char> missing(feature_names.size());
    std::vector<double> out(matrix.rows(), base_score);
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        for (std::size_t f = 0; f < feature_names.size(); ++f) {
            values[f] = matrix.value(r, col_of[f]);
            missing[f] = matrix.is_missing(r, col_of[f]) ? 1 : 0;
        }
        for (const auto& tree : trees) out[r] += tree.value_for(values.data(), missing.data());
    }
    return out;
}

std::vector<double> GBTModel::predict(
    const std::vector<std::map<std::string, std::optional<double>>>& rows) const {
    TrainingMatrix matrix(feature_names, rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t f = 0; f < feature_names.size(); ++f) {
            const auto it = rows[r].find(feature_names[f]);
            if (it == rows[r].end()) {
                throw SchemaMismatchError("row " + std::to_string(r) + " lacks model feature '" +
                                          feature_names[f] + "' (a missing value must still be keyed)");
            }
            matrix.set(r, f, it->second);
        }
    }
    return predict(matrix);
}

namespace {

std::vector<int> assign_folds(const TrainingMatrix& matrix, int k, std::uint64_t seed,
                              const std::vector<int>& groups) {
    const std::size_t n = matrix.rows();
    std::mt19937_64 rng(seed);
    std::vector<int> fold_of(n);
    if (groups.empty()) {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t i = 0; i < n; ++i) fold_of[order[i]] = static_cast<int>(i % k);
    } else {
        if (groups.size() != n) throw std::invalid_argument("cv: group labels must cover every row");
        std::vector<int> distinct(groups.begin(), groups.end());
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        if (static_cast<int>(distinct.size()) < k) {
            throw std::invalid_argument("cv: fewer distinct groups (" +
                                        std::to_string(distinct.size()) + ") than folds (" +
                                        std::to_string(k) + ")");
        }
        std::shuffle(distinct.begin(), distinct.end(), rng);
        std::map<int, int> fold_of_group;
        for (std::size_t i = 0; i < distinct.size(); ++i) {
            fold_of_group[distinct[i]] = static_cast<int>(i % k);
        }
        for (std::size_t i = 0; i < n; ++i) fold_of[i] = fold_of_group[groups[i]];
    }
    return fold_of;
}

}  // namespace

GridSearchResult kfold_grid_search(const TrainingMatrix& matrix, const std::vector<Hyperparams>& grid,
                                   int k, std::uint64_t seed, const std::vector<int>& groups,
                                   unsigned threads) {
    if (grid.empty()) throw std::invalid_argument("cv: empty hyperparameter grid");
    if (k < 2) throw std::invalid_argument("cv: k must be >= 2");
    if (matrix.rows() < static_cast<std::size_t>(k)) {
        throw std::invalid_argument("cv: k (" + std::to_string(k) + ") exceeds row count (" +
                                    std::to_string(matrix.rows()) + ")");
    }
    for (const auto& p : grid) p.validate();

    const std::vector<int> fold_of = assign_folds(matrix, k, seed, groups);
    std::vector<std::vector<std::size_t>> fold_rows(k), rest_rows(k);
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        for (int f = 0; f < k; ++f) {
            (fold_of[r] == f ? fold_rows[f] : rest_rows[f]).push_back(r);
        }
    }

    GridSearchResult out;
    out.results.resize(grid.size());
    parallel_for(grid.size(), threads, [&](std::size_t gi) {
        CvResult result;
        result.params = grid[gi];
        result.fold_rmse.resize(k);
        for (int f = 0; f < k; ++f) {
            Hyperparams fold_params = grid[gi];
            fold_params.seed = grid[gi].seed + static_cast<std::uint64_t>(f) * 0x9E3779B97F4A7C15ull;
            const GBTModel model = train(matrix.subset(rest_rows[f]), fold_params);
            const TrainingMatrix held_out = matrix.subset(fold_rows[f]);
            const std::vector<double> pred = model.predict(held_out);
            double sq_sum = 0.0;
            for (std::size_t i = 0; i < pred.size(); ++i) {
                const double err = pred[i] - held_out.target[i];
                sq_sum += err * err;
            }
            result.fold_rmse[f] = std::sqrt(sq_sum / static_cast<double>(pred.size()));
        }
        result.mean_rmse = std::accumulate(result.fold_rmse.begin(), result.fold_rmse.end(), 0.0) /
                           static_cast<double>(k);
        double var = 0.0;
        for (double v : result.fold_rmse) var += (v - result.mean_rmse) * (v - result.mean_rmse);
        result.std_rmse = std::sqrt(var / static_cast<double>(k));
        out.results[gi] = std::move(result);
    });

    std::size_t best = 0;
    for (std::size_t i = 1; i < out.results.size(); ++i) {
        const auto& cand = out.results[i];
        const auto& incumbent = out.results[best];
        if (cand.mean_rmse < incumbent.mean_rmse) {
            best = i;
        } else if (cand.mean_rmse == incumbent.mean_rmse) {
            const auto key = [](const CvResult& r) {
                return std::make_pair(r.params.n_rounds, r.params.max_depth);
            };
            if (key(cand) < key(incumbent)) best = i;
        }
    }
    out.best = out.results[best].params;
    return out;
}

std::vector<Hyperparams> expand_grid(const std::vector<int>& n_rounds,
                                     const std::vector<double>& learning_rate,
                                     const std::vector<int>& max_depth,
                                     const std::vector<double>& min_child_weight,
                                     const std::vector<double>& subsample, double reg_lambda,
                                     double gamma, std::uint64_t seed) {
    std::vector<Hyperparams> grid;
    for (int rounds : n_rounds)
        for (double lr : learning_rate)
            for (int depth : max_depth)
                for (double mcw : min_child_weight)
                    for (double sub : subsample) {
                        Hyperparams p;
                        p.n_rounds = rounds;
                        p.learning_rate = lr;
                        p.max_depth = depth;
                        p.min_child_weight = mcw;
                        p.subsample = sub;
                        p.reg_lambda = reg_lambda;
                        p.gamma = gamma;
                        p.seed = seed;
                        grid.push_back(p);
                    }
    return grid;
}

std::vector<Hyperparams> default_grid(std::uint64_t seed) {
    return expand_grid({100, 300}, {0.05, 0.1, 0.3}, {3, 4, 6}, {1.0, 5.0}, {0.8, 1.0}, 1.0, 0.0,
                       seed);
}

namespace {

constexpr int kModelFormatVersion = 1;

nlohmann::json node_to_json(const TreeNode& node) {
    if (node.is_leaf()) {
        return {{"weight", node.weight}, {"cover", node.cover}};
    }
    return {{"feature", node.feature}, {"threshold", node.threshold},
            {"default_left", node.default_left}, {"left", node.left},
            {"right", node.right},     {"cover", node.cover}};
}

TreeNode node_from_json(const nlohmann::json& j) {
    TreeNode node;
    node.cover = j.at("cover").get<double>();
    if (j.contains("feature")) {
        node.feature = j.at("feature").get<int>();
        node.threshold = j.at("threshold").get<double>();
        node.default_left = j.at("default_left").get<bool>();
        node.left = j.at("left").get<int>();
        node.right = j.at("right").get<int>();
    } else {
        node.weight = j.at("weight").get<double>();
    }
    return node;
}

nlohmann::json hyperparams_to_json(const Hyperparams& p) {
    return {{"n_rounds", p.n_rounds},
            {"learning_rate", p.learning_rate},
            {"max_depth", p.max_depth},
            {"min_child_weight", p.min_child_weight},
            {"reg_lambda", p.reg_lambda},
            {"gamma", p.gamma},
            {"subsample", p.subsample},
            {"seed", p.seed}};
}

Hyperparams hyperparams_from_json(const nlohmann::json& j) {
    Hyperparams p;
    p.n_rounds = j.at("n_rounds").get<int>();
    p.learning_rate = j.at("learning_rate").get<double>();
    p.max_depth = j.at("max_depth").get<int>();
    p.min_child_weight = j.at("min_child_weight").get<double>();
    p.reg_lambda = j.at("reg_lambda").get<double>();
    p.gamma = j.at("gamma").get<double>();
    p.subsample = j.at("subsample").get<double>();
    p.seed = j.at("seed").get<std::uint64_t>();
    return p;
}

}  // namespace

std::string model_to_json(const GBTModel& model) {
    nlohmann::json doc;
    doc["format"] = "spvcap-gbt";
    doc["version"] = kModelFormatVersion;
    doc["base_score"] = model.base_score;
    doc["feature_names"] = model.feature_names;
    doc["hyperparams"] = hyperparams_to_json(model.hyperparams);
    doc["training_meta"] = {{"train_years", model.training_meta.train_years},
                            {"cv_scores", model.training_meta.cv_scores}};
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& tree : model.trees) {
        nlohmann::json nodes = nlohmann::json::array();
        for (const auto& node : tree.nodes) nodes.push_back(node_to_json(node));
        trees.push_back({{"nodes", std::move(nodes)}});
    }
    doc["trees"] = std::move(trees);
    return doc.dump(2) + "\n";
}

GBTModel model_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error(std::string("model JSON parse error: ") + e.what());
    }
    if (doc.value("format", std::string{}) != "spvcap-gbt") {
        throw SchemaMismatchError("not a spvcap-gbt model file");
    }
    if (doc.at("version").get<int>() != kModelFormatVersion) {
        throw SchemaMismatchError("unsupported model format version " +
                                  std::to_string(doc.at("version").get<int>()) + " (expected " +
                                  std::to_string(kModelFormatVersion) + ")");
    }
    GBTModel model;
    model.base_score = doc.at("base_score").get<double>();
    model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    model.hyperparams = hyperparams_from_json(doc.at("hyperparams"));
    if (doc.contains("training_meta")) {
        model.training_meta.train_years =
            doc["training_meta"].value("train_years", std::vector<int>{});
        model.training_meta.cv_scores =
            doc["training_meta"].value("cv_scores", std::vector<double>{});
    }
    for (const auto& tree_json : doc.at("trees")) {
        Tree tree;
        for (const auto& node_json : tree_json.at("nodes")) {
            tree.nodes.push_back(node_from_json(node_json));
        }
        const int n = static_cast<int>(tree.nodes.size());
        for (const auto& node : tree.nodes) {
            if (!node.is_leaf()) {
                if (node.left < 0 || node.left >= n || node.right < 0 || node.right >= n ||
                    node.feature >= static_cast<int>(model.feature_names.size())) {
                    throw SchemaMismatchError("model file has an out-of-range node link");
                }
            }
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

void save_model(const GBTModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << model_to_json(model);
}

GBTModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingInputError("cannot open model file " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json(buf.str());
}

void write_cv_report_csv(const std::vector<CvResult>& results, const std::string& path) {
    csv::Table table;
    table.header = {"n_rounds",   "learning_rate", "max_depth", "min_child_weight",
                    "reg_lambda", "gamma",         "subsample", "mean_rmse",
                    "std_rmse"};
    const std::size_t k = results.empty() ? 0 : results.front().fold_rmse.size();
    for (std::size_t f = 0; f < k; ++f) table.header.push_back("fold_" + std::to_string(f + 1));
    for (const auto& r : results) {
        std::vector<std::string> row{std::to_string(r.params.n_rounds),
                                     csv::format_double(r.params.learning_rate),
                                     std::to_string(r.params.max_depth),
                                     csv::format_double(r.params.min_child_weight),
                                     csv::format_double(r.params.reg_lambda),
                                     csv::format_double(r.params.gamma),
                                     csv::format_double(r.params.subsample),
                                     csv::format_double(r.mean_rmse),
                                     csv::format_double(r.std_rmse)};
        for (double v : r.fold_rmse) row.push_back(csv::format_double(v));
        table.rows.push_back(std::move(row));
    }
    csv::write_file(path, table);
}

}  // namespace spvcap
