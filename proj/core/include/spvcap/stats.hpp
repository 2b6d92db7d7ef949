#pragma once

#include <optional>
#include <vector>

namespace spvcap {

/// Two aligned series. Pairs with a missing element are dropped listwise at
/// construction; at least 3 complete pairs must remain.
struct PairedSeries {
    std::vector<double> x;
    std::vector<double> y;

    static PairedSeries from_complete_pairs(const std::vector<std::optional<double>>& x,
                                            const std::vector<std::optional<double>>& y);
    void validate() const;
};

/// Product-moment correlation. Degenerate (zero-variance) input is an error,
/// never a NaN.
double pearson(const PairedSeries& s);

/// Pearson on average ranks; ties receive the mean of their rank block.
double spearman(const PairedSeries& s);

/// Coefficient of determination of the least-squares line y ~ x. Equals
/// pearson squared for this simple regression.
double linfit_r2(const PairedSeries& s);

/// (pearson + spearman) / 2 — captures linear and monotone association.
double avg_correlation(const PairedSeries& s);

/// Average ranks of a series (1-based, ties get their block mean).
std::vector<double> average_ranks(const std::vector<double>& values);

struct MetricReport {
    double r2 = 0.0;
    double mae = 0.0;
    double mse = 0.0;
    double rmse = 0.0;
    std::optional<double> mape;  // percent; national-level evaluation only
};

/// Standard error metrics. MAPE = 100 * mean(|a-p| / |a|) and requires every
/// actual value nonzero; callers only request it for national-level series.
MetricReport error_metrics(const std::vector<double>& actual, const std::vector<double>& predicted,
                           bool include_mape = false);

}  // namespace spvcap
