#include "spvcap/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace spvcap {

PairedSeries PairedSeries::from_complete_pairs(const std::vector<std::optional<double>>& x,
                                               const std::vector<std::optional<double>>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("paired series length mismatch");
    PairedSeries s;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] && y[i]) {
            s.x.push_back(*x[i]);
            s.y.push_back(*y[i]);
        }
    }
    return s;
}

void PairedSeries::validate() const {
    if (x.size() != y.size()) throw std::invalid_argument("paired series length mismatch");
    if (x.size() < 3) {
        throw std::invalid_argument("need at least 3 complete pairs, have " +
                                    std::to_string(x.size()));
    }
}

namespace {

double mean(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

struct Moments {
    double sxx, syy, sxy, mx, my;
};

Moments centered_moments(const PairedSeries& s) {
    const double mx = mean(s.x);
    const double my = mean(s.y);
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double dx = s.x[i] - mx;
        const double dy = s.y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    return {sxx, syy, sxy, mx, my};
}

}  // namespace

double pearson(const PairedSeries& s) {
    s.validate();
    const auto m = centered_moments(s);
    if (m.sxx == 0.0) throw std::invalid_argument("pearson: x series has zero variance");
    if (m.syy == 0.0) throw std::invalid_argument("pearson: y series has zero variance");
    return m.sxy / std::sqrt(m.sxx * m.syy);
}

std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // block [i, j] ties: mean of 1-based ranks i+1 .. j+1
        const double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

double spearman(const PairedSeries& s) {
    s.validate();
    PairedSeries ranked{average_ranks(s.x), average_ranks(s.y)};
    return pearson(ranked);
}

double linfit_r2(const PairedSeries& s) {
    s.validate();
    const auto m = centered_moments(s);
    if (m.sxx == 0.0) throw std::invalid_argument("linfit_r2: x series has zero variance");
    if (m.syy == 0.0) throw std::invalid_argument("linfit_r2: y series has zero variance");
    const double slope = m.sxy / m.sxx;
    const double intercept = m.my - slope * m.mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        const double resid = s.y[i] - (intercept + slope * s.x[i]);
        ss_res += resid * resid;
    }
    return 1.0 - ss_res / m.syy;
}

double avg_correlation(const PairedSeries& s) {
    return (pearson(s) + spearman(s)) / 2.0;
}

MetricReport error_metrics(const std::vector<double>& actual, const std::vector<double>& predicted,
                           bool include_mape) {
    if (actual.empty()) throw std::invalid_argument("error_metrics: empty input");
    if (actual.size() != predicted.size()) {
        throw std::invalid_argument("error_metrics: length mismatch");
    }
    const double n = static_cast<double>(actual.size());
    const double actual_mean = mean(actual);

    double abs_sum = 0, sq_sum = 0, ss_tot = 0, ape_sum = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double err = actual[i] - predicted[i];
        abs_sum += std::abs(err);
        sq_sum += err * err;
        const double dev = actual[i] - actual_mean;
        ss_tot += dev * dev;
        if (include_mape) {
            if (actual[i] == 0.0) {
                throw std::invalid_argument("error_metrics: MAPE undefined for zero actual value");
            }
            ape_sum += std::abs(err / actual[i]);
        }
    }

    MetricReport report;
    report.mae = abs_sum / n;
    report.mse = sq_sum / n;
    report.rmse = std::sqrt(report.mse);
    // With a constant actual series, r2 is 1 for a perfect fit and 0 otherwise.
    report.r2 = ss_tot == 0.0 ? (sq_sum == 0.0 ? 1.0 : 0.0) : 1.0 - sq_sum / ss_tot;
    if (include_mape) report.mape = ape_sum / n * 100.0;
    return report;
}

}  // namespace spvcap
