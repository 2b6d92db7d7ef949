#pragma once

#include "spvcap/panel.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace spvcap {

/// How one signal feature enters the generator: linear or square-root term
/// inside the exponential weight.
enum class SignalTransform { linear, sqrt };

struct SynthSignal {
    std::string name;
    FeatureKind kind = FeatureKind::economic;
    double coef = 1.0;
    SignalTransform transform = SignalTransform::linear;
};

struct SynthNoiseFeature {
    std::string name;
    FeatureKind kind = FeatureKind::other;
};

/// Configuration of the synthetic region x year panel used for desk-scale
/// verification. The capacity share of region r in year t is
///
///     w_rt   = exp( sum_s coef_s * T_s(x_srt) )        T_s: identity or sqrt
///     share  = w_rt / sum_r w_rt * 100                 (+ Gaussian noise,
///                                                       clamped at 0 and
///                                                       renormalized to 100)
///
/// where x_srt are the stored signal-feature values. Noise features are
/// drawn independently of capacity. Deterministic for a fixed seed.
struct SynthConfig {
    int n_regions = 168;
    int first_year = 2010;
    int n_years = 14;
    std::vector<SynthSignal> signal;
    std::vector<SynthNoiseFeature> noise_features;
    double noise_scale = 0.05;        // stddev of the share noise, percent points
    double national_mw_start = 1000.0;
    double national_growth = 0.25;    // yearly growth factor of the national total
    double unallocated_mw = 0.0;      // national capacity left out of the regional records
    std::map<std::string, int> missing_cells;  // feature -> number of cells to blank

    /// 2 signal + 6 noise features with domain-flavoured names.
    static SynthConfig defaults();

    static SynthConfig from_json(const std::string& text);
    std::string to_json() const;
};

PanelDataset generate_synthetic(const SynthConfig& config, std::uint64_t seed);

/// Ground-truth JSON (signal features, coefficients, seed) written next to
/// generated datasets so test harnesses can check recovery.
std::string synthetic_truth_json(const SynthConfig& config, std::uint64_t seed);

/// Deterministic synthetic NUTS-3 code for a region index (4 children per
/// level-2 parent).
RegionCode synthetic_region_code(int index);

}  // namespace spvcap
