#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "spvcap/csv.hpp"
#include "spvcap/errors.hpp"
#include "spvcap/gbtree.hpp"
#include "spvcap/shap.hpp"

#include "support/oracle.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <vector>

using namespace spvcap;
namespace fs = std::filesystem;

namespace {

TrainingMatrix column_matrix(const std::string& name, const std::vector<double>& values) {
    TrainingMatrix m({name}, values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m.set(i, 0, values[i]);
    return m;
}

std::map<std::string, std::optional<double>> row_of(const GBTModel& model,
                                                    const TrainingMatrix& m, std::size_t r) {
    std::map<std::string, std::optional<double>> row;
    for (std::size_t f = 0; f < model.feature_names.size(); ++f) {
        row[model.feature_names[f]] =
            m.is_missing(r, f) ? std::nullopt : std::optional<double>(m.value(r, f));
    }
    return row;
}

void check_against_oracle(const GBTModel& model, const TrainingMatrix& background,
                          const std::vector<double>& values, const std::vector<char>& missing) {
    std::map<std::string, std::optional<double>> row;
    for (std::size_t f = 0; f < model.feature_names.size(); ++f) {
        row[model.feature_names[f]] =
            missing[f] ? std::nullopt : std::optional<double>(values[f]);
    }
    const ShapExplanation got = tree_shap(model, row, background);
    const oracle::BruteShap want =
        oracle::brute_force_shap(model, values.data(), missing.data(), background);

    CHECK(got.base_value == doctest::Approx(want.base_value).epsilon(1e-9));
    for (std::size_t f = 0; f < model.feature_names.size(); ++f) {
        CHECK(got.contributions.at(model.feature_names[f]) ==
              doctest::Approx(want.phi[f]).scale(1.0).epsilon(1e-9));
    }
    double total = got.base_value;
    for (const auto& [name, phi] : got.contributions) total += phi;
    CHECK(total == doctest::Approx(got.prediction).scale(1.0).epsilon(1e-9));
}

}  // namespace

TEST_CASE("a model without splits attributes nothing") {
    TrainingMatrix m = column_matrix("f0", {1.0, 2.0, 3.0, 4.0});
    m.target = {5.0, 5.0, 5.0, 5.0};
    Hyperparams p;
    p.n_rounds = 3;
    const GBTModel model = train(m, p);  // every tree is a single zero leaf

    const ShapExplanation e = tree_shap(model, row_of(model, m, 0), m);
    CHECK(e.base_value == 5.0);
    CHECK(e.prediction == 5.0);
    CHECK(e.contributions.at("f0") == 0.0);
}

TEST_CASE("depth-1 attribution equals prediction minus the background mean") {
    GBTModel model;
    model.base_score = 2.0;
    model.feature_names = {"f0"};
    Tree tree;
    tree.nodes.resize(3);
    tree.nodes[0] = {0, 0.5, true, 1, 2, 0.0, 0.0};
    tree.nodes[1] = {-1, 0.0, true, -1, -1, 10.0, 0.0};
    tree.nodes[2] = {-1, 0.0, true, -1, -1, -4.0, 0.0};
    model.trees.push_back(tree);

    // background: three rows go left, one right -> E[tree] = (3*10 - 4)/4 = 6.5
    const TrainingMatrix background = column_matrix("f0", {0.0, 0.1, 0.2, 1.0});
    const auto covers = background_covers(model.trees[0], background);
    CHECK(covers == std::vector<double>{4.0, 3.0, 1.0});
    CHECK(expected_value(model.trees[0], covers) == doctest::Approx(6.5).epsilon(1e-15));

    const ShapExplanation right = tree_shap(model, {{"f0", 1.0}}, background);
    CHECK(right.base_value == doctest::Approx(8.5).epsilon(1e-15));
    CHECK(right.prediction == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(right.contributions.at("f0") == doctest::Approx(-10.5).epsilon(1e-12));

    // a missing value follows the default (left) branch
    const ShapExplanation absent = tree_shap(model, {{"f0", std::nullopt}}, background);
    CHECK(absent.prediction == doctest::Approx(12.0).epsilon(1e-15));
    CHECK(absent.contributions.at("f0") == doctest::Approx(3.5).epsilon(1e-12));
}

TEST_CASE("a feature appearing twice on one path is attributed once") {
    GBTModel model;
    model.base_score = 0.0;
    model.feature_names = {"f0"};
    Tree tree;
    tree.nodes.resize(5);
    tree.nodes[0] = {0, 0.5, true, 1, 4, 0.0, 0.0};
    tree.nodes[1] = {0, -0.5, true, 2, 3, 0.0, 0.0};
    tree.nodes[2] = {-1, 0.0, true, -1, -1, 1.0, 0.0};
    tree.nodes[3] = {-1, 0.0, true, -1, -1, 5.0, 0.0};
    tree.nodes[4] = {-1, 0.0, true, -1, -1, 9.0, 0.0};
    model.trees.push_back(tree);

    const TrainingMatrix background = column_matrix("f0", {-1.0, 0.0, 1.0, 2.0});
    // single-feature model: phi must close the whole gap to the expectation
    // E[tree] = (1 + 5 + 2*9)/4 = 6
    const ShapExplanation e = tree_shap(model, {{"f0", 0.0}}, background);
    CHECK(e.prediction == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(e.base_value == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(e.contributions.at("f0") == doctest::Approx(-1.0).epsilon(1e-12));

    check_against_oracle(model, background, {0.0}, {0});
    check_against_oracle(model, background, {-2.0}, {0});
    check_against_oracle(model, background, {0.0}, {1});
}

TEST_CASE("attributions match brute-force Shapley enumeration") {
    std::mt19937_64 rng(424242);
    for (int trial = 0; trial < 6; ++trial) {
        const std::size_t cols = 2 + trial % 3;  // 2..4 features
        TrainingMatrix m = oracle::random_matrix(rng, 60, cols, trial % 2 == 0 ? 0.0 : 0.15);
        Hyperparams p;
        p.n_rounds = 30;
        p.max_depth = 3;
        p.seed = static_cast<std::uint64_t>(trial);
        const GBTModel model = train(m, p);

        // training rows, a fresh dense row, and an all-missing row
        for (std::size_t r = 0; r < 5; ++r) {
            std::vector<double> values(cols);
            std::vector<char> missing(cols);
            for (std::size_t c = 0; c < cols; ++c) {
                values[c] = m.value(r, c);
                missing[c] = m.is_missing(r, c) ? 1 : 0;
            }
            check_against_oracle(model, m, values, missing);
        }
        std::uniform_real_distribution<double> fresh(-4.0, 4.0);
        std::vector<double> values(cols);
        for (auto& v : values) v = fresh(rng);
        check_against_oracle(model, m, values, std::vector<char>(cols, 0));
        check_against_oracle(model, m, std::vector<double>(cols, 0.0),
                             std::vector<char>(cols, 1));
    }
}

TEST_CASE("a feature the trees never use gets exactly zero") {
    std::mt19937_64 rng(10);
    TrainingMatrix m({"signal", "inert"}, 50);
    std::uniform_real_distribution<double> uniform(-2.0, 2.0);
    for (std::size_t i = 0; i < 50; ++i) {
        const double v = uniform(rng);
        m.set(i, 0, v);
        m.set(i, 1, 3.25);  // constant: no split can use it
        m.target[i] = 2.0 * v * v;
    }
    Hyperparams p;
    p.n_rounds = 40;
    p.max_depth = 3;
    const GBTModel model = train(m, p);

    for (std::size_t r = 0; r < 10; ++r) {
        const ShapExplanation e = tree_shap(model, row_of(model, m, r), m);
        CHECK(e.contributions.at("inert") == 0.0);
    }
}

TEST_CASE("covers recomputed from the training data equal the stored covers") {
    std::mt19937_64 rng(88);
    const TrainingMatrix m = oracle::random_matrix(rng, 40, 3, 0.1);
    Hyperparams p;
    p.n_rounds = 12;
    p.max_depth = 4;
    const GBTModel model = train(m, p);  // subsample 1: every tree saw all rows
    for (const auto& tree : model.trees) {
        const auto covers = background_covers(tree, m);
        REQUIRE(covers.size() == tree.nodes.size());
        for (std::size_t i = 0; i < covers.size(); ++i) {
            CHECK(covers[i] == tree.nodes[i].cover);
        }
    }
}

TEST_CASE("a background that misses a node is rejected") {
    GBTModel model;
    model.base_score = 0.0;
    model.feature_names = {"f0"};
    Tree tree;
    tree.nodes.resize(3);
    tree.nodes[0] = {0, 0.5, true, 1, 2, 0.0, 0.0};
    tree.nodes[1] = {-1, 0.0, true, -1, -1, 1.0, 0.0};
    tree.nodes[2] = {-1, 0.0, true, -1, -1, 2.0, 0.0};
    model.trees.push_back(tree);

    const TrainingMatrix all_right = column_matrix("f0", {1.0, 2.0});
    CHECK_THROWS_WITH_AS(background_covers(model.trees[0], all_right),
                         doctest::Contains("no row"), std::invalid_argument);
    CHECK_THROWS_AS(tree_shap(model, {{"f0", 0.0}}, all_right), std::invalid_argument);
    CHECK_THROWS_AS(background_covers(model.trees[0], TrainingMatrix({"f0"}, 0)),
                    std::invalid_argument);
}

TEST_CASE("schema mismatches are reported as such") {
    TrainingMatrix m({"a", "b"}, 8);
    for (int i = 0; i < 8; ++i) {
        m.set(i, 0, static_cast<double>(i));
        m.set(i, 1, static_cast<double>(i % 3));
        m.target[i] = static_cast<double>(i);
    }
    Hyperparams p;
    p.n_rounds = 5;
    const GBTModel model = train(m, p);

    TrainingMatrix reordered({"b", "a"}, 8);
    for (int i = 0; i < 8; ++i) {
        reordered.set(i, 0, static_cast<double>(i % 3));
        reordered.set(i, 1, static_cast<double>(i));
    }
    CHECK_THROWS_AS(tree_shap(model, {{"a", 1.0}, {"b", 1.0}}, reordered), SchemaMismatchError);
    CHECK_THROWS_AS(tree_shap_all(model, reordered, m), SchemaMismatchError);
    CHECK_THROWS_AS(tree_shap(model, {{"a", 1.0}}, m), SchemaMismatchError);
    CHECK_NOTHROW(tree_shap(model, {{"a", 1.0}, {"b", std::nullopt}}, m));
}

TEST_CASE("importance shares apportion the mean absolute attribution") {
    std::mt19937_64 rng(5);
    TrainingMatrix m({"strong", "weak"}, 80);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    for (std::size_t i = 0; i < 80; ++i) {
        const double a = uniform(rng), b = uniform(rng);
        m.set(i, 0, a);
        m.set(i, 1, b);
        m.target[i] = 10.0 * a + 0.5 * b;
    }
    Hyperparams p;
    p.n_rounds = 60;
    p.max_depth = 3;
    const GBTModel model = train(m, p);

    const ImportanceReport report = importance_shares(model, m);
    REQUIRE(report.rows.size() == 2);
    CHECK(report.rows[0].feature == "strong");  // sorted by share descending
    CHECK(report.rows[0].share_pct > report.rows[1].share_pct);
    double total = 0.0;
    for (const auto& row : report.rows) {
        CHECK(row.share_pct >= 0.0);
        CHECK(row.mean_abs_shap >= 0.0);
        total += row.share_pct;
    }
    CHECK(total == doctest::Approx(100.0).epsilon(1e-9));

    // single informative feature takes the full 100 percent
    TrainingMatrix solo = column_matrix("only", {0.0, 1.0, 2.0, 3.0, 4.0, 5.0});
    solo.target = {0.0, 2.0, 4.0, 6.0, 8.0, 10.0};
    Hyperparams sp;
    sp.n_rounds = 10;
    const ImportanceReport solo_report = importance_shares(train(solo, sp), solo);
    REQUIRE(solo_report.rows.size() == 1);
    CHECK(solo_report.rows[0].share_pct == doctest::Approx(100.0).epsilon(1e-12));

    // constant model: nothing to apportion
    Hyperparams zero;
    zero.n_rounds = 0;
    CHECK_THROWS_AS(importance_shares(train(m, zero), m), std::invalid_argument);
}

TEST_CASE("group shares sum the per-feature shares by label") {
    ImportanceReport report;
    report.rows = {{"a", 60.0, 0.6}, {"b", 30.0, 0.3}, {"c", 10.0, 0.1}};

    const auto identity = group_shares(report, {{"a", "a"}, {"b", "b"}, {"c", "c"}});
    CHECK(identity.at("a") == 60.0);
    CHECK(identity.at("c") == 10.0);

    const auto merged = group_shares(report, {{"a", "eco"}, {"b", "eco"}, {"c", "climate"}});
    CHECK(merged.at("eco") == doctest::Approx(90.0).epsilon(1e-12));
    CHECK(merged.at("climate") == doctest::Approx(10.0).epsilon(1e-12));
    double total = 0.0;
    for (const auto& [name, share] : merged) total += share;
    CHECK(total == doctest::Approx(100.0).epsilon(1e-12));

    CHECK_THROWS_WITH_AS(group_shares(report, {{"a", "eco"}, {"b", "eco"}}),
                         doctest::Contains("'c'"), std::invalid_argument);
}

TEST_CASE("thread count does not change attributions at all") {
    std::mt19937_64 rng(7070);
    const TrainingMatrix m = oracle::random_matrix(rng, 120, 5, 0.1);
    Hyperparams p;
    p.n_rounds = 25;
    p.max_depth = 4;
    const GBTModel model = train(m, p);

    const auto solo = tree_shap_all(model, m, m, 1);
    const auto many = tree_shap_all(model, m, m, 4);
    REQUIRE(solo.size() == many.size());
    for (std::size_t r = 0; r < solo.size(); ++r) {
        CHECK(solo[r].base_value == many[r].base_value);
        CHECK(solo[r].prediction == many[r].prediction);
        for (const auto& [name, phi] : solo[r].contributions) {
            CHECK(phi == many[r].contributions.at(name));  // bit-identical
        }
    }

    const ImportanceReport a = importance_shares(model, m, 1);
    const ImportanceReport b = importance_shares(model, m, 4);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].feature == b.rows[i].feature);
        CHECK(a.rows[i].share_pct == b.rows[i].share_pct);
    }
}

TEST_CASE("explanation and importance csv files carry the full picture") {
    std::mt19937_64 rng(3131);
    const TrainingMatrix m = oracle::random_matrix(rng, 30, 3, 0.0);
    Hyperparams p;
    p.n_rounds = 15;
    const GBTModel model = train(m, p);

    const auto row = row_of(model, m, 4);
    const ShapExplanation e = tree_shap(model, row, m);

    const auto dir = fs::temp_directory_path() / "spvcap-shap-test";
    fs::create_directories(dir);

    const std::string wf_path = (dir / "waterfall.csv").string();
    write_explanation_csv(e, row, wf_path);
    const auto wf = csv::read_file(wf_path);
    REQUIRE(wf.rows.size() == 2 + e.contributions.size());
    CHECK(wf.rows.front()[0] == "base_value");
    CHECK(wf.rows.back()[0] == "prediction");
    CHECK(csv::parse_double(wf.rows.front()[2], 2, "contribution") == e.base_value);
    // middle rows sorted by |contribution| descending
    double last = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < wf.rows.size(); ++i) {
        const double c = std::abs(csv::parse_double(wf.rows[i][2], i + 2, "contribution"));
        CHECK(c <= last + 1e-15);
        last = c;
    }

    const std::string imp_path = (dir / "importance.csv").string();
    write_importance_csv(importance_shares(model, m), imp_path);
    const auto imp = csv::read_file(imp_path);
    CHECK(imp.header == std::vector<std::string>{"feature", "share_pct", "mean_abs_shap"});
    CHECK(imp.rows.size() == 3);
    fs::remove_all(dir);
}
