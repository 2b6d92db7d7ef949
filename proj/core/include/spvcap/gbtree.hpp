#pragma once

#include "spvcap/panel.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace spvcap {

struct Hyperparams {
    int n_rounds = 100;
    double learning_rate = 0.1;
    int max_depth = 4;
    double min_child_weight = 1.0;
    double reg_lambda = 1.0;
    double gamma = 0.0;
    double subsample = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const Hyperparams&) const = default;
};

/// One node of a regression tree, linked by index into Tree::nodes.
/// feature < 0 marks a leaf. Rows with a missing split value follow
/// default_left; otherwise value < threshold goes left.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    bool default_left = true;
    int left = -1;
    int right = -1;
    double weight = 0.0;  // leaf value
    double cover = 0.0;   // hessian sum of the training rows routed here

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    /// Leaf index for a dense feature row with a missing mask.
    int leaf_for(const double* values, const char* missing) const;
    double value_for(const double* values, const char* missing) const;
    int depth() const;
};

/// Dense row-major design matrix with an explicit missing mask and the
/// capacity-share target. Region/year labels are carried along when rows
/// come from a panel so estimates can be mapped back.
class TrainingMatrix {
public:
    TrainingMatrix() = default;
    TrainingMatrix(std::vector<std::string> feature_names, std::size_t rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return feature_names_.size(); }
    const std::vector<std::string>& feature_names() const { return feature_names_; }

    double value(std::size_t row, std::size_t col) const { return values_[row * cols() + col]; }
    bool is_missing(std::size_t row, std::size_t col) const { return missing_[row * cols() + col] != 0; }
    void set(std::size_t row, std::size_t col, std::optional<double> value);

    const double* row_values(std::size_t row) const { return values_.data() + row * cols(); }
    const char* row_missing(std::size_t row) const { return missing_.data() + row * cols(); }

    std::vector<double> target;
    std::vector<std::string> regions;  // empty or size rows()
    std::vector<int> years;            // empty or size rows()

    /// Row subset (target and labels included).
    TrainingMatrix subset(const std::vector<std::size_t>& row_indices) const;

private:
    std::vector<std::string> feature_names_;
    std::vector<double> values_;
    std::vector<char> missing_;
    std::size_t rows_ = 0;
};

/// Builds the design matrix for the given features from a normalized panel.
/// With require_target, records lacking a capacity value are skipped and the
/// target (capacity share, percent) is validated to lie in [0, 100].
TrainingMatrix build_training_matrix(const PanelDataset& ds, const std::vector<std::string>& features,
                                     bool require_target);

struct TrainingMeta {
    std::vector<int> train_years;
    std::vector<double> cv_scores;
};

/// Additive ensemble of regression trees: prediction = base_score + sum of
/// leaf weights (stored post-shrinkage).
struct GBTModel {
    double base_score = 0.0;
    std::vector<Tree> trees;
    std::vector<std::string> feature_names;
    Hyperparams hyperparams;
    TrainingMeta training_meta;

    std::vector<double> predict(const TrainingMatrix& matrix) const;
    /// Every model feature must appear as a key in each row map; a nullopt
    /// value is a missing value, an absent key is a schema error.
    std::vector<double> predict(
        const std::vector<std::map<std::string, std::optional<double>>>& rows) const;
};

/// Fits one tree by exact greedy splitting on the second-order gain
///   gain = 1/2 [ GL^2/(HL+l) + GR^2/(HR+l) - (GL+GR)^2/(HL+HR+l) ] - gamma
/// with leaf weight -G/(H+l). Missing values follow the candidate direction
/// with the higher gain. Splits are rejected when the best gain is <= 0 or a
/// child's hessian sum falls below min_child_weight. Leaf weights are NOT
/// shrunk here; train() applies the learning rate.
Tree fit_tree(const std::vector<double>& grad, const std::vector<double>& hess,
              const TrainingMatrix& matrix, const Hyperparams& params);

/// Squared-error boosting: base_score = mean(target), then n_rounds trees on
/// the running gradients (g = prediction - target, h = 1), each fitted on a
/// seeded subsample of rows and applied with shrinkage. Deterministic for a
/// fixed seed.
GBTModel train(const TrainingMatrix& matrix, const Hyperparams& params);

struct CvResult {
    Hyperparams params;
    std::vector<double> fold_rmse;
    double mean_rmse = 0.0;
    double std_rmse = 0.0;
};

struct GridSearchResult {
    Hyperparams best;
    std::vector<CvResult> results;  // grid order
};

/// Grid search over hyperparameter combinations with k-fold CV. The seeded
/// fold assignment is fixed once and shared by every grid point. Groups,
/// when given (one label per row, e.g. the year), are kept whole within
/// folds. Ties on mean RMSE prefer fewer rounds, then shallower trees, then
/// grid order.
GridSearchResult kfold_grid_search(const TrainingMatrix& matrix, const std::vector<Hyperparams>& grid,
                                   int k = 10, std::uint64_t seed = 0,
                                   const std::vector<int>& groups = {}, unsigned threads = 1);

/// Expands per-parameter value lists into the full grid (row-major, in the
/// declaration order of Hyperparams fields).
std::vector<Hyperparams> expand_grid(const std::vector<int>& n_rounds,
                                     const std::vector<double>& learning_rate,
                                     const std::vector<int>& max_depth,
                                     const std::vector<double>& min_child_weight,
                                     const std::vector<double>& subsample, double reg_lambda,
                                     double gamma, std::uint64_t seed);

/// The default search grid: depth {3,4,6} x learning rate {0.05,0.1,0.3} x
/// rounds {100,300} x min_child_weight {1,5} x subsample {0.8,1.0}, lambda 1,
/// gamma 0.
std::vector<Hyperparams> default_grid(std::uint64_t seed);

/// Versioned JSON serialization; predictions round-trip bit-exactly.
void save_model(const GBTModel& model, const std::string& path);
GBTModel load_model(const std::string& path);
std::string model_to_json(const GBTModel& model);
GBTModel model_from_json(const std::string& text);

void write_cv_report_csv(const std::vector<CvResult>& results, const std::string& path);

}  // namespace spvcap
