// spvcap — regional solar-PV capacity modeling pipeline.
//
// Subcommands cover the full flow: generate a synthetic panel, rank features
// by correlation with capacity share, train a gradient-boosted model with
// grid search + k-fold CV, predict regional capacity (unscaled and scaled to
// the national total), disaggregate unallocated national capacity, benchmark
// regions with the deployment index, and explain predictions with exact
// Shapley attributions plus PCA feature clusters.
//
// Contract: stdout carries exactly one summary line per command; all data
// goes to files under --out-dir (or $SPVCAP_OUT_DIR, or the working
// directory). Errors print a machine-readable JSON object to stderr.
// Exit codes: 0 success, 2 model/data schema mismatch, 3 missing input,
// 1 any other failure.

#include "spvcap/capacity.hpp"
#include "spvcap/csv.hpp"
#include "spvcap/errors.hpp"
#include "spvcap/gbtree.hpp"
#include "spvcap/panel.hpp"
#include "spvcap/pca.hpp"
#include "spvcap/ranking.hpp"
#include "spvcap/shap.hpp"
#include "spvcap/stats.hpp"
#include "spvcap/svg.hpp"
#include "spvcap/synthetic.hpp"

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// config file support: a flat JSON object per subcommand, e.g.
//   {"train": {"seed": 7, "corr-threshold": 0.3}, "synth": {"seed": 7}}
// CLI flags always override config values, which override defaults.
class JsonConfig : public CLI::Config {
public:
    std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}\n"; }

    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        json doc;
        try {
            input >> doc;
        } catch (const json::parse_error& e) {
            throw CLI::FileError(std::string("config JSON parse error: ") + e.what());
        }
        return items_from(doc, {});
    }

private:
    static std::vector<CLI::ConfigItem> items_from(const json& doc, std::vector<std::string> parents) {
        std::vector<CLI::ConfigItem> out;
        for (auto it = doc.begin(); it != doc.end(); ++it) {
            if (it->is_object()) {
                auto sub = parents;
                sub.push_back(it.key());
                auto child = items_from(*it, sub);
                out.insert(out.end(), child.begin(), child.end());
                continue;
            }
            CLI::ConfigItem item;
            item.parents = parents;
            item.name = it.key();
            if (it->is_array()) {
                for (const auto& v : *it) {
                    item.inputs.push_back(v.is_string() ? v.get<std::string>() : v.dump());
                }
            } else if (it->is_string()) {
                item.inputs.push_back(it->get<std::string>());
            } else if (it->is_boolean()) {
                item.inputs.push_back(it->get<bool>() ? "true" : "false");
            } else {
                item.inputs.push_back(it->dump());
            }
            out.push_back(std::move(item));
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// small shared helpers

std::string resolve_out_dir(const std::string& flag_value) {
    std::string dir = flag_value;
    if (dir.empty()) {
        if (const char* env = std::getenv("SPVCAP_OUT_DIR")) dir = env;
    }
    if (dir.empty()) dir = ".";
    fs::create_directories(dir);
    return dir;
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw spvcap::MissingInputError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Whole-token integer parse; rejects trailing garbage ("20x1" is an error, not 20).
int parse_year_token(const std::string& token) {
    int value = 0;
    const char* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(token.data(), end, value);
    if (ec != std::errc{} || ptr != end) throw std::invalid_argument("bad year '" + token + "'");
    return value;
}

/// "2010-2020,2022" -> {2010..2020, 2022}
std::set<int> parse_year_set(const std::string& text) {
    std::set<int> years;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        const std::string part = text.substr(pos, comma - pos);
        const std::size_t dash = part.find('-');
        try {
            if (dash == std::string::npos) {
                years.insert(parse_year_token(part));
            } else {
                const int from = parse_year_token(part.substr(0, dash));
                const int to = parse_year_token(part.substr(dash + 1));
                if (from > to) throw std::invalid_argument("descending range");
                for (int y = from; y <= to; ++y) years.insert(y);
            }
        } catch (const std::exception&) {
            throw CLI::ValidationError("years", "cannot parse year set '" + text + "'");
        }
        pos = comma + 1;
    }
    if (years.empty()) throw CLI::ValidationError("years", "empty year set");
    return years;
}

/// CLI11 parse-time check so malformed year sets fail before any file I/O.
const CLI::Validator year_set_check(
    [](std::string& input) -> std::string {
        try {
            parse_year_set(input);
        } catch (const CLI::ValidationError& e) {
            return e.what();
        }
        return {};
    },
    "YEARSET");

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        std::string part = text.substr(pos, comma - pos);
        if (!part.empty()) out.push_back(std::move(part));
        pos = comma + 1;
    }
    return out;
}

json metric_json(const spvcap::MetricReport& m) {
    json j{{"r2", m.r2}, {"mae", m.mae}, {"mse", m.mse}, {"rmse", m.rmse}};
    if (m.mape) j["mape_pct"] = *m.mape;
    return j;
}

struct LoadedPanel {
    spvcap::PanelDataset raw;         // as loaded, capacity in MW
    spvcap::PanelDataset normalized;  // shares + normalized features
};

LoadedPanel load_and_normalize(const std::string& panel_path, const std::string& national_path,
                               const std::string& features_path) {
    const auto specs = spvcap::feature_specs_from_json(read_text_file(features_path));
    std::optional<std::string> national;
    if (!national_path.empty()) national = national_path;
    spvcap::PanelDataset raw = spvcap::load_panel_csv(panel_path, specs, national);
    spvcap::PanelDataset normalized = spvcap::normalize_dataset(raw);
    return {std::move(raw), std::move(normalized)};
}

spvcap::GBTModel load_model_checked(const std::string& path) { return spvcap::load_model(path); }

// ---------------------------------------------------------------------------
// per-command option bags

struct CommonOpts {
    std::string out_dir;
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

struct SynthOpts {
    std::uint64_t seed = 0;
    std::string generator_config;  // optional JSON file with a full SynthConfig
    int regions = 0;               // 0 = keep config/default
    int years = 0;
    int first_year = 0;
    double noise = -1.0;
    double unallocated = -1.0;
};

struct RankOpts {
    std::string panel, national, features;
    bool absolute = false;
};

struct TrainOpts {
    std::string panel, national, features;
    std::string train_years, test_years;
    std::uint64_t seed = 0;
    double corr_threshold = 0.2;
    double availability_threshold = 0.9;
    std::vector<double> sweep;
    std::string select;  // explicit comma-separated feature list
    bool absolute = false;
    bool grouped_folds = false;
    int folds = 10;
    std::vector<int> rounds{100, 300};
    std::vector<double> learning_rate{0.05, 0.1, 0.3};
    std::vector<int> depth{3, 4, 6};
    std::vector<double> min_child_weight{1.0, 5.0};
    std::vector<double> subsample{0.8, 1.0};
    double reg_lambda = 1.0;
    double gamma = 0.0;
};

struct PredictOpts {
    std::string model, panel, national, features;
    std::string years;
    bool no_scale = false;
};

struct DisaggregateOpts {
    std::string model, panel, national, features;
    int year = 0;
    std::string policy = "additive";
};

struct BenchmarkOpts {
    std::string model, panel, national, features, estimates;
    int from_year = 0, to_year = 0;
};

struct ExplainOpts {
    std::string model, panel, national, features;
    int year = 0;
    std::string regions;
    int clusters = 2;
    std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// command implementations (each prints its single summary line and returns)

void run_synth(const CommonOpts& common, const SynthOpts& opt) {
    spvcap::SynthConfig config = opt.generator_config.empty()
                                     ? spvcap::SynthConfig::defaults()
                                     : spvcap::SynthConfig::from_json(read_text_file(opt.generator_config));
    if (opt.regions > 0) config.n_regions = opt.regions;
    if (opt.years > 0) config.n_years = opt.years;
    if (opt.first_year > 0) config.first_year = opt.first_year;
    if (opt.noise >= 0.0) config.noise_scale = opt.noise;
    if (opt.unallocated >= 0.0) config.unallocated_mw = opt.unallocated;

    const spvcap::PanelDataset ds = spvcap::generate_synthetic(config, opt.seed);
    const std::string dir = resolve_out_dir(common.out_dir);
    spvcap::write_panel_csv(ds, join_path(dir, "panel.csv"));
    spvcap::write_national_csv(ds, join_path(dir, "national.csv"));
    write_text_file(join_path(dir, "features.json"),
                    spvcap::feature_specs_to_json(ds.feature_specs()));
    write_text_file(join_path(dir, "truth.json"), spvcap::synthetic_truth_json(config, opt.seed));

    std::cout << "synth: wrote panel.csv, national.csv, features.json, truth.json in " << dir
              << " (" << config.n_regions << " regions x " << config.n_years << " years, seed "
              << opt.seed << ")\n";
}

void run_rank(const CommonOpts& common, const RankOpts& opt) {
    const LoadedPanel panel = load_and_normalize(opt.panel, opt.national, opt.features);
    const spvcap::FeatureRanking ranking = spvcap::rank_features(panel.normalized, opt.absolute);
    const std::string dir = resolve_out_dir(common.out_dir);
    spvcap::write_ranking_csv(ranking, join_path(dir, "ranking.csv"));
    if (!ranking.excluded.empty()) {
        spvcap::csv::Table table;
        table.header = {"feature", "reason"};
        for (const auto& ex : ranking.excluded) table.rows.push_back({ex.feature, ex.reason});
        spvcap::csv::write_file(join_path(dir, "excluded.csv"), table);
    }
    std::cout << "rank: " << ranking.rows.size() << " features ranked, "
              << ranking.excluded.size() << " excluded; top = " << ranking.rows.front().feature
              << " (avg_corr " << spvcap::csv::format_double(ranking.rows.front().avg_corr)
              << "); wrote ranking.csv in " << dir << "\n";
}

void run_train(const CommonOpts& common, const TrainOpts& opt) {
    const LoadedPanel panel = load_and_normalize(opt.panel, opt.national, opt.features);

    // figure out the train/test year split
    std::set<int> all_years;
    for (int y : panel.normalized.years()) all_years.insert(y);
    std::set<int> test_years = opt.test_years.empty() ? std::set<int>{} : parse_year_set(opt.test_years);
    std::set<int> train_years;
    if (!opt.train_years.empty()) {
        train_years = parse_year_set(opt.train_years);
    } else {
        for (int y : all_years) {
            if (!test_years.count(y)) train_years.insert(y);
        }
    }
    spvcap::PanelDataset train_ds = panel.normalized;
    std::optional<spvcap::PanelDataset> test_ds;
    if (!test_years.empty()) {
        auto [tr, te] = spvcap::split_by_year(panel.normalized, train_years, test_years);
        train_ds = std::move(tr);
        test_ds = std::move(te);
    }

    const std::string dir = resolve_out_dir(common.out_dir);

    // hyperparameter grid (flags override single dimensions of the default grid)
    const std::vector<spvcap::Hyperparams> grid =
        spvcap::expand_grid(opt.rounds, opt.learning_rate, opt.depth, opt.min_child_weight,
                            opt.subsample, opt.reg_lambda, opt.gamma, opt.seed);

    // feature selection: explicit list, threshold sweep, or fixed threshold
    std::vector<std::string> features;
    double used_threshold = opt.corr_threshold;
    if (!opt.select.empty()) {
        features = split_list(opt.select);
        for (const auto& f : features) {
            if (!train_ds.has_feature(f)) {
                throw spvcap::SchemaMismatchError("--select feature '" + f + "' not in the panel");
            }
        }
    } else {
        const auto make_matrix = [&](const std::vector<std::string>& feats) {
            return spvcap::build_training_matrix(train_ds, feats, /*require_target=*/true);
        };
        if (!opt.sweep.empty()) {
            const spvcap::CvEvaluator evaluator = [&](const std::vector<std::string>& feats) {
                const spvcap::TrainingMatrix matrix = make_matrix(feats);
                std::vector<int> groups;
                if (opt.grouped_folds) groups = matrix.years;
                return spvcap::kfold_grid_search(matrix, grid, opt.folds, opt.seed, groups, 1)
                    .results.front()
                    .mean_rmse;
            };
            // with a multi-point grid, score sweeps on the grid's first point;
            // the full grid search runs afterwards on the chosen feature set
            const spvcap::SweepResult sweep = spvcap::sweep_thresholds(
                train_ds, opt.sweep, evaluator, opt.availability_threshold, opt.absolute,
                common.threads);
            spvcap::write_sweep_csv(sweep, join_path(dir, "sweep.csv"));
            used_threshold = sweep.best_threshold;
        }
        const spvcap::FeatureRanking ranking = spvcap::rank_features(train_ds, opt.absolute);
        features = spvcap::select_features(ranking, used_threshold, opt.availability_threshold);
    }

    // grid search + final fit
    const spvcap::TrainingMatrix train_matrix =
        spvcap::build_training_matrix(train_ds, features, /*require_target=*/true);
    std::vector<int> groups;
    if (opt.grouped_folds) groups = train_matrix.years;
    const spvcap::GridSearchResult search =
        spvcap::kfold_grid_search(train_matrix, grid, opt.folds, opt.seed, groups, common.threads);
    spvcap::write_cv_report_csv(search.results, join_path(dir, "cv_report.csv"));

    spvcap::GBTModel model = spvcap::train(train_matrix, search.best);
    for (const auto& result : search.results) {
        if (result.params == search.best) {
            model.training_meta.cv_scores = result.fold_rmse;
            break;
        }
    }
    spvcap::save_model(model, join_path(dir, "model.json"));

    json metrics;
    metrics["selected_features"] = features;
    metrics["corr_threshold"] = used_threshold;
    metrics["availability_threshold"] = opt.availability_threshold;
    double best_cv = 0.0;
    for (const auto& result : search.results) {
        if (result.params == search.best) best_cv = result.mean_rmse;
    }
    metrics["cv_rmse"] = best_cv;
    const std::vector<double> train_pred = model.predict(train_matrix);
    metrics["train"] = metric_json(spvcap::error_metrics(train_matrix.target, train_pred));
    double test_r2 = 0.0;
    if (test_ds) {
        const spvcap::TrainingMatrix test_matrix =
            spvcap::build_training_matrix(*test_ds, features, /*require_target=*/true);
        const std::vector<double> test_pred = model.predict(test_matrix);
        const spvcap::MetricReport report = spvcap::error_metrics(test_matrix.target, test_pred);
        metrics["test"] = metric_json(report);
        test_r2 = report.r2;
    }
    write_text_file(join_path(dir, "metrics.json"), metrics.dump(2) + "\n");

    std::cout << "train: " << features.size() << " features, best(depth="
              << search.best.max_depth << ", lr=" << spvcap::csv::format_double(search.best.learning_rate)
              << ", rounds=" << search.best.n_rounds << ") cv_rmse="
              << spvcap::csv::format_double(best_cv);
    if (test_ds) std::cout << ", test_r2=" << spvcap::csv::format_double(test_r2);
    std::cout << "; wrote model.json, cv_report.csv, metrics.json in " << dir << "\n";
}

void run_predict(const CommonOpts& common, const PredictOpts& opt) {
    const spvcap::GBTModel model = load_model_checked(opt.model);
    const LoadedPanel panel = load_and_normalize(opt.panel, opt.national, opt.features);
    std::set<int> years;
    if (opt.years.empty()) {
        for (int y : panel.normalized.years()) years.insert(y);
    } else {
        years = parse_year_set(opt.years);
    }

    std::vector<spvcap::RegionalEstimate> estimates =
        spvcap::predict_unscaled(model, panel.normalized, years);
    if (!opt.no_scale) {
        estimates = spvcap::scale_to_national(std::move(estimates),
                                              panel.normalized.national_capacity_mw());
    }

    const std::string dir = resolve_out_dir(common.out_dir);
    spvcap::write_estimates_csv(estimates, join_path(dir, "estimates.csv"));

    json metrics;
    metrics["unscaled"] = metric_json(spvcap::national_report(
        estimates, panel.normalized.national_capacity_mw(), spvcap::EstimateColumn::predicted));
    if (!opt.no_scale) {
        metrics["scaled"] = metric_json(spvcap::national_report(
            estimates, panel.normalized.national_capacity_mw(), spvcap::EstimateColumn::scaled));
    }
    write_text_file(join_path(dir, "national_metrics.json"), metrics.dump(2) + "\n");

    std::cout << "predict: " << estimates.size() << " region-year estimates over " << years.size()
              << " years" << (opt.no_scale ? " (unscaled only)" : " (scaled to national)")
              << "; wrote estimates.csv, national_metrics.json in " << dir << "\n";
}

void run_disaggregate(const CommonOpts& common, const DisaggregateOpts& opt) {
    const spvcap::GBTModel model = load_model_checked(opt.model);
    const LoadedPanel panel = load_and_normalize(opt.panel, opt.national, opt.features);
    const spvcap::AllocationResult result = spvcap::allocate_unallocated(
        panel.raw, model, opt.year, spvcap::allocation_policy_from_string(opt.policy));

    const std::string dir = resolve_out_dir(common.out_dir);
    spvcap::write_allocation_csv(result, join_path(dir, "allocation.csv"));

    std::cout << "disaggregate: spread " << spvcap::csv::format_double(result.unallocated_input_mw)
              << " MW unallocated capacity over " << result.regions.size() << " regions ("
              << spvcap::to_string(result.policy) << ", year " << opt.year
              << "); wrote allocation.csv in " << dir << "\n";
}

void run_benchmark(const CommonOpts& common, const BenchmarkOpts& opt) {
    if (opt.model.empty() == opt.estimates.empty()) {
        throw CLI::ValidationError("benchmark", "pass exactly one of --model or --estimates");
    }
    const LoadedPanel panel = load_and_normalize(opt.panel, opt.national, opt.features);

    int from = opt.from_year, to = opt.to_year;
    const std::vector<int> panel_years = panel.raw.years();
    if (from == 0) from = panel_years.front();
    if (to == 0) to = panel_years.back();

    std::map<std::pair<spvcap::RegionCode, int>, double> actual;
    for (const auto& rec : panel.raw.records()) {
        if (rec.year >= from && rec.year <= to && rec.capacity_mw) {
            actual[{rec.region, rec.year}] = *rec.capacity_mw;
        }
    }

    std::map<std::pair<spvcap::RegionCode, int>, double> predicted;
    if (!opt.model.empty()) {
        const spvcap::GBTModel model = load_model_checked(opt.model);
        std::set<int> years;
        for (int y = from; y <= to; ++y) {
            if (panel.raw.national_capacity_mw().count(y)) years.insert(y);
        }
        for (const auto& est : spvcap::predict_unscaled(model, panel.normalized, years)) {
            predicted[{est.region, est.year}] = est.predicted_mw;
        }
    } else {
        const spvcap::csv::Table table = spvcap::csv::read_file(opt.estimates);
        const auto region_col = table.column("region");
        const auto year_col = table.column("year");
        const auto mw_col = table.column("predicted_mw");
        if (!region_col || !year_col || !mw_col) {
            throw spvcap::SchemaMismatchError(
                opt.estimates + ": need region, year, predicted_mw columns");
        }
        for (std::size_t i = 0; i < table.rows.size(); ++i) {
            const auto& row = table.rows[i];
            predicted[{spvcap::RegionCode(row[*region_col]),
                       static_cast<int>(spvcap::csv::parse_long(row[*year_col], i + 2, "year"))}] =
                spvcap::csv::parse_double(row[*mw_col], i + 2, "predicted_mw");
        }
    }

    const spvcap::SpvdiReport report = spvcap::spvdi(actual, predicted, from, to);
    const std::string dir = resolve_out_dir(common.out_dir);
    spvcap::write_spvdi_csv(report, join_path(dir, "spvdi.csv"));

    const auto& top = report.rows.front();
    const auto& bottom = report.rows.back();
    std::cout << "benchmark: SPVDI " << from << "-" << to << " over " << report.rows.size()
              << " regions; top " << top.region.code() << " ("
              << spvcap::csv::format_double(top.index_mw) << " MW), bottom "
              << bottom.region.code() << " (" << spvcap::csv::format_double(bottom.index_mw)
              << " MW); wrote spvdi.csv in " << dir << "\n";
}

void run_explain(const CommonOpts& common, const ExplainOpts& opt) {
    const spvcap::GBTModel model = load_model_checked(opt.model);
    const LoadedPanel panel = load_and_normalize(opt.panel, opt.national, opt.features);
    const spvcap::TrainingMatrix matrix =
        spvcap::build_training_matrix(panel.normalized, model.feature_names, /*require_target=*/false);

    const std::string dir = resolve_out_dir(common.out_dir);

    // aggregate importance
    const spvcap::ImportanceReport importance =
        spvcap::importance_shares(model, matrix, common.threads);
    spvcap::write_importance_csv(importance, join_path(dir, "importance.csv"));
    std::vector<std::pair<std::string, double>> bars;
    for (const auto& row : importance.rows) bars.emplace_back(row.feature, row.share_pct);
    write_text_file(join_path(dir, "importance_bar.svg"),
                    spvcap::svg::bar_chart("Feature importance (% of total mean |SHAP|)", bars, "%"));

    // PCA clusters over the model's features
    const spvcap::PcaResult components = spvcap::pca_from_matrix(matrix);
    const spvcap::FeatureClustering clustering =
        spvcap::cluster_features(components, opt.clusters, opt.seed);
    write_text_file(join_path(dir, "clusters.json"),
                    spvcap::clustering_to_json(components, clustering));

    // per-region waterfalls
    int year = opt.year;
    if (year == 0) year = panel.normalized.years().back();
    std::vector<std::string> regions = split_list(opt.regions);
    for (const auto& code : regions) {
        const spvcap::RegionYearRecord* found = nullptr;
        for (const auto& rec : panel.normalized.records()) {
            if (rec.region.code() == code && rec.year == year) {
                found = &rec;
                break;
            }
        }
        if (!found) {
            throw spvcap::MissingInputError("no record for region " + code + " in year " +
                                            std::to_string(year));
        }
        std::map<std::string, std::optional<double>> row;
        for (const auto& name : model.feature_names) {
            const auto it = found->features.find(name);
            row[name] = it == found->features.end() ? std::nullopt : it->second;
        }
        const spvcap::ShapExplanation explanation = spvcap::tree_shap(model, row, matrix);
        const std::string stem = "waterfall_" + code + "_" + std::to_string(year);
        spvcap::write_explanation_csv(explanation, row, join_path(dir, stem + ".csv"));

        std::vector<std::pair<std::string, double>> steps(explanation.contributions.begin(),
                                                          explanation.contributions.end());
        std::sort(steps.begin(), steps.end(), [](const auto& a, const auto& b) {
            if (std::abs(a.second) != std::abs(b.second))
                return std::abs(a.second) > std::abs(b.second);
            return a.first < b.first;
        });
        write_text_file(join_path(dir, stem + ".svg"),
                        spvcap::svg::waterfall("Capacity share attribution, " + code + " " +
                                                   std::to_string(year) + " (%)",
                                               explanation.base_value, steps,
                                               explanation.prediction));
    }

    std::cout << "explain: importance over " << importance.rows.size() << " features (top "
              << importance.rows.front().feature << " "
              << spvcap::csv::format_double(importance.rows.front().share_pct) << "%), "
              << clustering.clusters.size() << " clusters, " << regions.size()
              << " waterfalls; wrote importance.csv, importance_bar.svg, clusters.json in " << dir
              << "\n";
}

int error_exit(const std::string& type, const std::string& message, int code) {
    json err;
    err["error"] = {{"type", type}, {"message", message}, {"exit_code", code}};
    std::cerr << err.dump() << "\n";
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spvcap: regional solar-PV capacity modeling pipeline"};
    app.require_subcommand(1);
    app.fallthrough();  // --out-dir/--threads/--config may follow the subcommand
    app.config_formatter(std::make_shared<JsonConfig>());
    app.set_config("--config", "", "JSON config file (flags override config values)");

    CommonOpts common;
    app.add_option("--out-dir", common.out_dir,
                   "output directory (default: $SPVCAP_OUT_DIR or the working directory)")
        ->envname("SPVCAP_OUT_DIR");
    app.add_option("--threads", common.threads, "worker threads (results are thread-count independent)");

    SynthOpts synth_opt;
    CLI::App* synth = app.add_subcommand("synth", "generate a synthetic region x year panel");
    synth->add_option("--seed", synth_opt.seed, "generator seed")->required();
    synth->add_option("--generator-config", synth_opt.generator_config, "JSON generator config file");
    synth->add_option("--regions", synth_opt.regions, "number of regions");
    synth->add_option("--years", synth_opt.years, "number of years");
    synth->add_option("--first-year", synth_opt.first_year, "first panel year");
    synth->add_option("--noise", synth_opt.noise, "share noise stddev (percent points)");
    synth->add_option("--unallocated", synth_opt.unallocated, "national MW left out of regional records");

    RankOpts rank_opt;
    CLI::App* rank = app.add_subcommand("rank", "rank features by correlation with capacity share");
    rank->add_option("--panel", rank_opt.panel, "panel CSV")->required();
    rank->add_option("--national", rank_opt.national, "national capacity CSV");
    rank->add_option("--features", rank_opt.features, "feature spec JSON")->required();
    rank->add_flag("--absolute", rank_opt.absolute, "rank by |avg_corr| instead of signed value");

    TrainOpts train_opt;
    CLI::App* train = app.add_subcommand("train", "grid-search, cross-validate and fit the model");
    train->add_option("--panel", train_opt.panel, "panel CSV")->required();
    train->add_option("--national", train_opt.national, "national capacity CSV");
    train->add_option("--features", train_opt.features, "feature spec JSON")->required();
    train->add_option("--train-years", train_opt.train_years, "e.g. 2010-2020 (default: all non-test years)")
        ->check(year_set_check);
    train->add_option("--test-years", train_opt.test_years, "held-out years, e.g. 2021-2023")
        ->check(year_set_check);
    train->add_option("--seed", train_opt.seed, "seed for folds and subsampling")->required();
    train->add_option("--corr-threshold", train_opt.corr_threshold, "avg_corr selection threshold");
    train->add_option("--availability-threshold", train_opt.availability_threshold,
                      "minimum non-missing fraction");
    train->add_option("--sweep", train_opt.sweep, "correlation thresholds to sweep (picks best by CV RMSE)");
    train->add_option("--select", train_opt.select, "skip selection, use this comma-separated feature list");
    train->add_flag("--absolute", train_opt.absolute, "rank by |avg_corr|");
    train->add_flag("--grouped-folds", train_opt.grouped_folds, "keep each year whole within a CV fold");
    train->add_option("--folds", train_opt.folds, "cross-validation folds");
    train->add_option("--rounds", train_opt.rounds, "boosting round counts to search");
    train->add_option("--learning-rate", train_opt.learning_rate, "learning rates to search");
    train->add_option("--depth", train_opt.depth, "max tree depths to search");
    train->add_option("--min-child-weight", train_opt.min_child_weight, "min child hessian sums to search");
    train->add_option("--subsample", train_opt.subsample, "row subsample fractions to search");
    train->add_option("--reg-lambda", train_opt.reg_lambda, "L2 leaf regularization");
    train->add_option("--gamma", train_opt.gamma, "minimum split gain");

    PredictOpts predict_opt;
    CLI::App* predict = app.add_subcommand("predict", "predict regional capacity and scale to national");
    predict->add_option("--model", predict_opt.model, "model JSON")->required();
    predict->add_option("--panel", predict_opt.panel, "panel CSV")->required();
    predict->add_option("--national", predict_opt.national, "national capacity CSV");
    predict->add_option("--features", predict_opt.features, "feature spec JSON")->required();
    predict->add_option("--years", predict_opt.years, "years to predict (default: all panel years)")
        ->check(year_set_check);
    predict->add_flag("--no-scale", predict_opt.no_scale, "skip scaling to the national total");

    DisaggregateOpts disagg_opt;
    CLI::App* disagg = app.add_subcommand("disaggregate", "allocate unallocated national capacity");
    disagg->add_option("--model", disagg_opt.model, "model JSON")->required();
    disagg->add_option("--panel", disagg_opt.panel, "panel CSV")->required();
    disagg->add_option("--national", disagg_opt.national, "national capacity CSV");
    disagg->add_option("--features", disagg_opt.features, "feature spec JSON")->required();
    disagg->add_option("--year", disagg_opt.year, "year to allocate")->required();
    disagg->add_option("--policy", disagg_opt.policy, "additive (top-up) or full_rescale");

    BenchmarkOpts bench_opt;
    CLI::App* bench = app.add_subcommand("benchmark", "rank regions by the deployment index");
    bench->add_option("--panel", bench_opt.panel, "panel CSV")->required();
    bench->add_option("--national", bench_opt.national, "national capacity CSV");
    bench->add_option("--features", bench_opt.features, "feature spec JSON")->required();
    bench->add_option("--model", bench_opt.model, "model JSON (predictions computed here)");
    bench->add_option("--estimates", bench_opt.estimates, "estimates CSV (precomputed predictions)");
    bench->add_option("--from", bench_opt.from_year, "first year (default: first panel year)");
    bench->add_option("--to", bench_opt.to_year, "last year (default: last panel year)");

    ExplainOpts explain_opt;
    CLI::App* explain = app.add_subcommand("explain", "Shapley attributions, importance, PCA clusters");
    explain->add_option("--model", explain_opt.model, "model JSON")->required();
    explain->add_option("--panel", explain_opt.panel, "panel CSV")->required();
    explain->add_option("--national", explain_opt.national, "national capacity CSV");
    explain->add_option("--features", explain_opt.features, "feature spec JSON")->required();
    explain->add_option("--year", explain_opt.year, "year for waterfalls (default: latest)");
    explain->add_option("--regions", explain_opt.regions, "comma-separated region codes for waterfalls");
    explain->add_option("--clusters", explain_opt.clusters, "number of feature clusters");
    explain->add_option("--seed", explain_opt.seed, "clustering seed");

    try {
        app.parse(argc, argv);
        if (synth->parsed()) run_synth(common, synth_opt);
        if (rank->parsed()) run_rank(common, rank_opt);
        if (train->parsed()) run_train(common, train_opt);
        if (predict->parsed()) run_predict(common, predict_opt);
        if (disagg->parsed()) run_disaggregate(common, disagg_opt);
        if (bench->parsed()) run_benchmark(common, bench_opt);
        if (explain->parsed()) run_explain(common, explain_opt);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() != 0) {
            json err;
            err["error"] = {{"type", "usage"}, {"message", e.what()}, {"exit_code", 1}};
            std::cerr << err.dump() << "\n";
            std::cout << app.help();
            return 1;
        }
        return app.exit(e);  // --help and friends
    } catch (const spvcap::SchemaMismatchError& e) {
        return error_exit("schema_mismatch", e.what(), 2);
    } catch (const spvcap::MissingInputError& e) {
        return error_exit("missing_input", e.what(), 3);
    } catch (const std::exception& e) {
        return error_exit("failure", e.what(), 1);
    }
    return 0;
}
