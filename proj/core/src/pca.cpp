#include "spvcap/pca.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace spvcap {

PcaResult pca(const std::vector<std::vector<double>>& rows,
              const std::vector<std::string>& feature_names) {
    const std::size_t p = feature_names.size();
    const std::size_t n = rows.size();
    if (p < 2) throw std::invalid_argument("pca needs at least 2 features");
    if (n < p) {
        throw std::invalid_argument("pca needs at least as many complete rows (" +
                                    std::to_string(n) + ") as features (" + std::to_string(p) +
                                    ")");
    }
    for (const auto& row : rows) {
        if (row.size() != p) throw std::invalid_argument("pca row width does not match features");
        for (double v : row) {
            if (!std::isfinite(v)) throw std::invalid_argument("pca input contains a non-finite value");
        }
    }

    PcaResult out;
    out.feature_names = feature_names;
    out.n_rows = n;
    out.means.assign(p, 0.0);
    out.scales.assign(p, 0.0);

    Eigen::MatrixXd z(n, p);
    for (std::size_t j = 0; j < p; ++j) {
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean += rows[i][j];
        mean /= double(n);
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) ss += (rows[i][j] - mean) * (rows[i][j] - mean);
        const double scale = std::sqrt(ss / double(n - 1));
        if (scale == 0.0) {
            throw std::invalid_argument("feature '" + feature_names[j] +
                                        "' has zero variance; it cannot be standardized");
        }
        out.means[j] = mean;
        out.scales[j] = scale;
        for (std::size_t i = 0; i < n; ++i) z(i, j) = (rows[i][j] - mean) / scale;
    }

    const Eigen::MatrixXd corr = (z.transpose() * z) / double(n - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(corr);
    if (solver.info() != Eigen::Success) throw std::runtime_error("pca eigendecomposition failed");

    out.correlation.assign(p, std::vector<double>(p));
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = 0; b < p; ++b) out.correlation[a][b] = corr(a, b);

    // eigenvalues come back ascending; emit components by variance descending
    out.loadings.assign(p, std::vector<double>(p));
    out.explained_variance.assign(p, 0.0);
    double total = 0.0;
    for (std::size_t c = 0; c < p; ++c) {
        const auto src = p - 1 - c;
        out.explained_variance[c] = std::max(0.0, solver.eigenvalues()(src));
        total += out.explained_variance[c];
        Eigen::VectorXd v = solver.eigenvectors().col(src);
        std::size_t pivot = 0;
        for (std::size_t j = 1; j < p; ++j) {
            if (std::abs(v(j)) > std::abs(v(pivot))) pivot = j;
        }
        if (v(pivot) < 0) v = -v;
        for (std::size_t j = 0; j < p; ++j) out.loadings[c][j] = v(j);
    }
    out.explained_variance_ratio.resize(p);
    for (std::size_t c = 0; c < p; ++c) out.explained_variance_ratio[c] = out.explained_variance[c] / total;
    return out;
}

PcaResult pca_from_matrix(const TrainingMatrix& matrix) {
    std::vector<std::vector<double>> rows;
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
        bool complete = true;
        for (std::size_t c = 0; c < matrix.cols(); ++c) {
            if (matrix.is_missing(r, c)) {
                complete = false;
                break;
            }
        }
        if (!complete) continue;
        std::vector<double> row(matrix.cols());
        for (std::size_t c = 0; c < matrix.cols(); ++c) row[c] = matrix.value(r, c);
        rows.push_back(std::move(row));
    }
    return pca(rows, matrix.feature_names());
}

std::vector<double> pca_transform(const PcaResult& p, const std::vector<double>& row) {
    if (row.size() != p.feature_names.size()) {
        throw std::invalid_argument("pca_transform row width does not match features");
    }
    std::vector<double> scores(p.loadings.size(), 0.0);
    for (std::size_t c = 0; c < p.loadings.size(); ++c) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            scores[c] += p.loadings[c][j] * (row[j] - p.means[j]) / p.scales[j];
        }
    }
    return scores;
}

std::vector<double> pca_inverse_transform(const PcaResult& p, const std::vector<double>& scores) {
    if (scores.size() != p.loadings.size()) {
        throw std::invalid_argument("pca_inverse_transform score width does not match components");
    }
    std::vector<double> z(p.feature_names.size(), 0.0);
    for (std::size_t c = 0; c < p.loadings.size(); ++c) {
        for (std::size_t j = 0; j < z.size(); ++j) z[j] += scores[c] * p.loadings[c][j];
    }
    return z;
}

namespace {

struct KmeansRun {
    std::vector<int> assignment;
    double inertia = std::numeric_limits<double>::infinity();
};

double sq_dist(const std::pair<double, double>& a, const std::pair<double, double>& b) {
    const double dx = a.first - b.first, dy = a.second - b.second;
    return dx * dx + dy * dy;
}

KmeansRun lloyd(const std::vector<std::pair<double, double>>& points, int k,
                std::vector<std::pair<double, double>> centroids) {
    const std::size_t n = points.size();
    std::vector<int> assignment(n, -1);
    for (int iter = 0; iter < 100; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sq_dist(points[i], centroids[0]);
            for (int c = 1; c < k; ++c) {
                const double d = sq_dist(points[i], centroids[c]);
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (assignment[i] != best) {
                assignment[i] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;

        std::vector<std::pair<double, double>> sums(k, {0.0, 0.0});
        std::vector<int> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            sums[assignment[i]].first += points[i].first;
            sums[assignment[i]].second += points[i].second;
            counts[assignment[i]] += 1;
        }
        for (int c = 0; c < k; ++c) {
            if (counts[c] > 0) {
                centroids[c] = {sums[c].first / counts[c], sums[c].second / counts[c]};
            } else {
                // revive an empty cluster at the point farthest from its centroid
                std::size_t farthest = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = sq_dist(points[i], centroids[assignment[i]]);
                    if (d > far_d) {
                        far_d = d;
                        farthest = i;
                    }
                }
                centroids[c] = points[farthest];
            }
        }
    }
    KmeansRun run;
    run.assignment = assignment;
    run.inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) run.inertia += sq_dist(points[i], centroids[assignment[i]]);
    return run;
}

}  // namespace

FeatureClustering cluster_features(const PcaResult& p, int k, std::uint64_t seed, int restarts) {
    const std::size_t n = p.feature_names.size();
    if (k < 1) throw std::invalid_argument("k must be >= 1");
    if (static_cast<std::size_t>(k) > n) {
        throw std::invalid_argument("k (" + std::to_string(k) + ") exceeds the feature count (" +
                                    std::to_string(n) + ")");
    }
    if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");

    std::vector<std::pair<double, double>> points(n);
    for (std::size_t j = 0; j < n; ++j) points[j] = {p.loadings[0][j], p.loadings[1][j]};

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    KmeansRun best;
    for (int r = 0; r < restarts; ++r) {
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<std::pair<double, double>> centroids(k);
        for (int c = 0; c < k; ++c) centroids[c] = points[order[c]];
        KmeansRun run = lloyd(points, k, centroids);
        if (run.inertia < best.inertia) best = std::move(run);
    }

    // order clusters by their lexicographically smallest member
    std::vector<std::vector<std::size_t>> members_of(k);
    for (std::size_t j = 0; j < n; ++j) members_of[best.assignment[j]].push_back(j);
    std::vector<int> cluster_order;
    for (int c = 0; c < k; ++c) {
        if (!members_of[c].empty()) cluster_order.push_back(c);
    }
    const auto smallest_name = [&](int c) {
        std::string smallest = p.feature_names[members_of[c][0]];
        for (std::size_t j : members_of[c]) smallest = std::min(smallest, p.feature_names[j]);
        return smallest;
    };
    std::sort(cluster_order.begin(), cluster_order.end(),
              [&](int a, int b) { return smallest_name(a) < smallest_name(b); });

    FeatureClustering out;
    for (int c : cluster_order) {
        FeatureCluster cluster;
        std::vector<std::size_t> idx = members_of[c];
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return p.feature_names[a] < p.feature_names[b];
        });
        for (std::size_t j : idx) cluster.members.push_back(p.feature_names[j]);

        // representative: highest squared correlation with the cluster's own
        // first PC; for standardized features that is lambda1 * loading^2
        const std::size_t m = idx.size();
        Eigen::MatrixXd sub(m, m);
        for (std::size_t a = 0; a < m; ++a)
            for (std::size_t b = 0; b < m; ++b) sub(a, b) = p.correlation[idx[a]][idx[b]];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sub);
        if (solver.info() != Eigen::Success) {
            throw std::runtime_error("cluster eigendecomposition failed");
        }
        const double lambda1 = solver.eigenvalues()(m - 1);
        const Eigen::VectorXd w = solver.eigenvectors().col(m - 1);
        std::size_t rep = 0;
        double rep_corr2 = -1.0;
        for (std::size_t a = 0; a < m; ++a) {
            const double corr2 = lambda1 * w(a) * w(a);
            if (corr2 > rep_corr2 + 1e-15) {
                rep_corr2 = corr2;
                rep = a;
            }
        }
        cluster.representative = p.feature_names[idx[rep]];
        cluster.explained_fraction = std::min(1.0, rep_corr2);

        const int cluster_index = static_cast<int>(out.clusters.size());
        for (std::size_t j : idx) out.assignment[p.feature_names[j]] = cluster_index;
        out.clusters.push_back(std::move(cluster));
    }
    return out;
}

std::string clustering_to_json(const PcaResult& p, const FeatureClustering& clustering) {
    nlohmann::json doc;
    doc["explained_variance_ratio"] = p.explained_variance_ratio;
    nlohmann::json loadings = nlohmann::json::object();
    for (std::size_t j = 0; j < p.feature_names.size(); ++j) {
        loadings[p.feature_names[j]] = {p.loadings[0][j], p.loadings[1][j]};
    }
    doc["top2_loadings"] = std::move(loadings);
    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& cluster : clustering.clusters) {
        clusters.push_back({{"members", cluster.members},
                            {"representative", cluster.representative},
                            {"explained_fraction", cluster.explained_fraction}});
    }
    doc["clusters"] = std::move(clusters);
    return doc.dump(2) + "\n";
}

}  // namespace spvcap
