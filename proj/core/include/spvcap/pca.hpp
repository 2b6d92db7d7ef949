#pragma once

#include "spvcap/gbtree.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace spvcap {

/// Principal components of standardized feature columns.
///
/// Columns are standardized to zero mean and unit sample variance, so the
/// decomposition is of the feature correlation matrix (kept here because the
/// cluster-representative computation reuses it). loadings[c][f] is feature
/// f's weight in component c; the component vectors are orthonormal and the
/// explained-variance ratios sum to 1. Sign convention: each component's
/// largest-magnitude loading is positive.
struct PcaResult {
    std::vector<std::string> feature_names;
    std::vector<std::vector<double>> loadings;        // components x features
    std::vector<double> explained_variance;           // eigenvalues, descending
    std::vector<double> explained_variance_ratio;
    std::vector<double> means;                        // per feature
    std::vector<double> scales;                       // per-feature sample std
    std::vector<std::vector<double>> correlation;     // features x features
    std::size_t n_rows = 0;
};

/// rows: complete observations, one vector of feature values per row.
/// Requires >= 2 features, at least as many rows as features, and no
/// zero-variance column (named in the error).
PcaResult pca(const std::vector<std::vector<double>>& rows,
              const std::vector<std::string>& feature_names);

/// pca() over the matrix's rows; rows with any missing value are dropped
/// (the decomposition needs complete observations).
PcaResult pca_from_matrix(const TrainingMatrix& matrix);

/// Standardized row -> component scores, and back. transform of a raw
/// feature row projects (row - mean)/scale onto all components;
/// inverse_transform(transform(row)) reproduces the standardized row.
std::vector<double> pca_transform(const PcaResult& p, const std::vector<double>& row);
std::vector<double> pca_inverse_transform(const PcaResult& p, const std::vector<double>& scores);

struct FeatureCluster {
    std::vector<std::string> members;  // sorted by name
    std::string representative;
    double explained_fraction = 0.0;  // squared correlation with the cluster's own first PC
};

/// k-means clusters over the features' top-2 loading vectors. Clusters are
/// ordered by their lexicographically smallest member.
struct FeatureClustering {
    std::vector<FeatureCluster> clusters;
    std::map<std::string, int> assignment;  // feature -> cluster index
};

/// Clusters features by their coordinates in the top-2 component subspace
/// (seeded k-means, `restarts` random initializations, best inertia kept;
/// deterministic given the seed). Each cluster's representative is the member
/// with the highest squared correlation to the first principal component of
/// the cluster's own correlation submatrix; that squared correlation is the
/// explained-variation fraction (1.0 for singletons).
FeatureClustering cluster_features(const PcaResult& p, int k = 2, std::uint64_t seed = 0,
                                   int restarts = 50);

std::string clustering_to_json(const PcaResult& p, const FeatureClustering& clustering);

}  // namespace spvcap
