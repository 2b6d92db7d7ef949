#include "spvcap/synthetic.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

namespace spvcap {

namespace {

std::string to_string(SignalTransform t) {
    return t == SignalTransform::linear ? "linear" : "sqrt";
}

SignalTransform transform_from_string(const std::string& text) {
    if (text == "linear") return SignalTransform::linear;
    if (text == "sqrt") return SignalTransform::sqrt;
    throw std::invalid_argument("unknown signal transform '" + text + "'");
}

void validate(const SynthConfig& config) {
    if (config.n_regions < 10) throw std::invalid_argument("synth: need at least 10 regions");
    if (config.n_years < 3) throw std::invalid_argument("synth: need at least 3 years");
    if (config.signal.size() < 2) throw std::invalid_argument("synth: need at least 2 signal features");
    if (config.noise_features.empty()) throw std::invalid_argument("synth: need at least 1 noise feature");
    if (config.noise_scale < 0) throw std::invalid_argument("synth: negative noise scale");
    if (config.national_mw_start <= 0) throw std::invalid_argument("synth: national capacity must be positive");
    if (config.unallocated_mw < 0) throw std::invalid_argument("synth: negative unallocated capacity");

    std::set<std::string> names;
    for (const auto& s : config.signal) {
        if (!names.insert(s.name).second) throw std::invalid_argument("synth: duplicate feature '" + s.name + "'");
    }
    for (const auto& f : config.noise_features) {
        if (!names.insert(f.name).second) throw std::invalid_argument("synth: duplicate feature '" + f.name + "'");
    }
    const int cells = config.n_regions * config.n_years;
    for (const auto& [name, count] : config.missing_cells) {
        if (!names.count(name)) throw std::invalid_argument("synth: missing_cells names unknown feature '" + name + "'");
        if (count < 0 || count > cells) {
            throw std::invalid_argument("synth: missing cell count for '" + name + "' out of range");
        }
    }
}

}  // namespace

SynthConfig SynthConfig::defaults() {
    SynthConfig config;
    config.signal = {{"gva_veterinary", FeatureKind::economic, 2.4, SignalTransform::linear},
                     {"arable_share", FeatureKind::landuse, 2.0, SignalTransform::sqrt}};
    config.noise_features = {{"ghi_rel", FeatureKind::climate},
                             {"temperature_rel", FeatureKind::climate},
                             {"precipitation_rel", FeatureKind::climate},
                             {"wind_speed_rel", FeatureKind::climate},
                             {"urban_share", FeatureKind::landuse},
                             {"gva_retail", FeatureKind::economic}};
    return config;
}

SynthConfig SynthConfig::from_json(const std::string& text) {
    const auto doc = nlohmann::json::parse(text);
    SynthConfig config = SynthConfig::defaults();
    if (doc.contains("regions")) config.n_regions = doc["regions"].get<int>();
    if (doc.contains("first_year")) config.first_year = doc["first_year"].get<int>();
    if (doc.contains("years")) config.n_years = doc["years"].get<int>();
    if (doc.contains("noise_scale")) config.noise_scale = doc["noise_scale"].get<double>();
    if (doc.contains("national_mw_start")) config.national_mw_start = doc["national_mw_start"].get<double>();
    if (doc.contains("national_growth")) config.national_growth = doc["national_growth"].get<double>();
    if (doc.contains("unallocated_mw")) config.unallocated_mw = doc["unallocated_mw"].get<double>();
    if (doc.contains("signal")) {
        config.signal.clear();
        for (const auto& item : doc["signal"]) {
            SynthSignal s;
            s.name = item.at("name").get<std::string>();
            s.kind = feature_kind_from_string(item.value("kind", std::string("economic")));
            s.coef = item.value("coef", 1.0);
            s.transform = transform_from_string(item.value("transform", std::string("linear")));
            config.signal.push_back(std::move(s));
        }
    }
    if (doc.contains("noise_features")) {
        config.noise_features.clear();
        for (const auto& item : doc["noise_features"]) {
            SynthNoiseFeature f;
            f.name = item.at("name").get<std::string>();
            f.kind = feature_kind_from_string(item.value("kind", std::string("other")));
            config.noise_features.push_back(std::move(f));
        }
    }
    if (doc.contains("missing_cells")) {
        config.missing_cells.clear();
        for (const auto& [name, count] : doc["missing_cells"].items()) {
            config.missing_cells[name] = count.get<int>();
        }
    }
    return config;
}

std::string SynthConfig::to_json() const {
    nlohmann::json doc;
    doc["regions"] = n_regions;
    doc["first_year"] = first_year;
    doc["years"] = n_years;
    doc["noise_scale"] = noise_scale;
    doc["national_mw_start"] = national_mw_start;
    doc["national_growth"] = national_growth;
    doc["unallocated_mw"] = unallocated_mw;
    doc["signal"] = nlohmann::json::array();
    for (const auto& s : signal) {
        doc["signal"].push_back({{"name", s.name},
                                 {"kind", spvcap::to_string(s.kind)},
                                 {"coef", s.coef},
                                 {"transform", to_string(s.transform)}});
    }
    doc["noise_features"] = nlohmann::json::array();
    for (const auto& f : noise_features) {
        doc["noise_features"].push_back({{"name", f.name}, {"kind", spvcap::to_string(f.kind)}});
    }
    doc["missing_cells"] = nlohmann::json::object();
    for (const auto& [name, count] : missing_cells) doc["missing_cells"][name] = count;
    return doc.dump(2) + "\n";
}

RegionCode synthetic_region_code(int index) {
    const int parent = index / 4;
    const char letter = static_cast<char>('A' + parent / 9);
    const char parent_digit = static_cast<char>('1' + parent % 9);
    const char child_digit = static_cast<char>('1' + index % 4);
    return RegionCode(std::string("UK") + letter + parent_digit + child_digit);
}

PanelDataset generate_synthetic(const SynthConfig& config, std::uint64_t seed) {
    validate(config);

    const int n_regions = config.n_regions;
    const int n_years = config.n_years;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> base_dist(0.05, 1.0);
    std::normal_distribution<double> drift_dist(0.0, 0.02);
    std::uniform_real_distribution<double> noise_feature_dist(0.1, 1.0);
    std::normal_distribution<double> share_noise_dist(0.0, 1.0);

    // Per-region signal baselines; yearly values drift slightly around them.
    std::vector<std::vector<double>> signal_base(config.signal.size(),
                                                 std::vector<double>(n_regions));
    for (std::size_t s = 0; s < config.signal.size(); ++s) {
        for (int r = 0; r < n_regions; ++r) signal_base[s][r] = base_dist(rng);
    }

    std::vector<FeatureSpec> specs;
    for (const auto& s : config.signal) specs.push_back(FeatureSpec::make(s.name, s.kind));
    for (const auto& f : config.noise_features) specs.push_back(FeatureSpec::make(f.name, f.kind));

    std::vector<RegionYearRecord> records;
    records.reserve(static_cast<std::size_t>(n_regions) * n_years);
    std::map<int, double> national;

    for (int t = 0; t < n_years; ++t) {
        const int year = config.first_year + t;
        const double national_mw = config.national_mw_start * std::pow(1.0 + config.national_growth, t);
        const double allocated_mw = national_mw - config.unallocated_mw;
        if (allocated_mw <= 0) {
            throw std::invalid_argument("synth: unallocated capacity exceeds the national total in year " +
                                        std::to_string(year));
        }
        national[year] = national_mw;

        std::vector<std::vector<double>> signal_values(config.signal.size(),
                                                       std::vector<double>(n_regions));
        std::vector<double> weights(n_regions);
        for (int r = 0; r < n_regions; ++r) {
            double exponent = 0.0;
            for (std::size_t s = 0; s < config.signal.size(); ++s) {
                const double value =
                    std::clamp(signal_base[s][r] + drift_dist(rng), 0.01, 2.0);
                signal_values[s][r] = value;
                const double term = config.signal[s].transform == SignalTransform::sqrt
                                        ? std::sqrt(value)
                                        : value;
                exponent += config.signal[s].coef * term;
            }
            weights[r] = std::exp(exponent);
        }

        double weight_sum = 0.0;
        for (double w : weights) weight_sum += w;
        std::vector<double> shares(n_regions);
        for (int r = 0; r < n_regions; ++r) shares[r] = weights[r] / weight_sum * 100.0;

        if (config.noise_scale > 0.0) {
            double share_sum = 0.0;
            for (int r = 0; r < n_regions; ++r) {
                shares[r] = std::max(0.0, shares[r] + config.noise_scale * share_noise_dist(rng));
                share_sum += shares[r];
            }
            if (share_sum <= 0) throw std::runtime_error("synth: noise wiped out all capacity");
            for (int r = 0; r < n_regions; ++r) shares[r] = shares[r] / share_sum * 100.0;
        }

        for (int r = 0; r < n_regions; ++r) {
            RegionYearRecord rec{synthetic_region_code(r), year, {}, shares[r] / 100.0 * allocated_mw};
            for (std::size_t s = 0; s < config.signal.size(); ++s) {
                rec.features[config.signal[s].name] = signal_values[s][r];
            }
            for (const auto& f : config.noise_features) {
                rec.features[f.name] = noise_feature_dist(rng);
            }
            records.push_back(std::move(rec));
        }
    }

    // Blank the requested number of cells per feature at seeded positions.
    for (const auto& [name, count] : config.missing_cells) {
        if (count == 0) continue;
        std::vector<std::size_t> cells(records.size());
        for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = i;
        std::shuffle(cells.begin(), cells.end(), rng);
        for (int i = 0; i < count; ++i) records[cells[i]].features[name] = std::nullopt;
    }

    return PanelDataset(std::move(records), std::move(specs), std::move(national));
}

std::string synthetic_truth_json(const SynthConfig& config, std::uint64_t seed) {
    nlohmann::json doc;
    doc["seed"] = seed;
    doc["noise_scale"] = config.noise_scale;
    doc["signal"] = nlohmann::json::array();
    for (const auto& s : config.signal) {
        doc["signal"].push_back({{"name", s.name},
                                 {"coef", s.coef},
                                 {"transform", to_string(s.transform)}});
    }
    nlohmann::json noise = nlohmann::json::array();
    for (const auto& f : config.noise_features) noise.push_back(f.name);
    doc["noise_features"] = noise;
    return doc.dump(2) + "\n";
}

}  // namespace spvcap
