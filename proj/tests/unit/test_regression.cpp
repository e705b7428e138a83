#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "credigraph/errors.hpp"
#include "credigraph/regression.hpp"
#include "oracles.hpp"

using namespace credigraph;

TEST(MeanPredictor, Arithmetic) {
    const std::vector<double> train{0.0, 0.5, 1.0};
    const auto m = mean_predictor(train);
    EXPECT_DOUBLE_EQ(m.mean, 0.5);
    const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(train.data(), 3);
    EXPECT_NEAR(evaluate_mae(m.predict(Eigen::MatrixXd::Zero(3, 2)), y), 1.0 / 3.0, 1e-15);
    EXPECT_DOUBLE_EQ(mean_predictor(std::vector<double>{0.7}).mean, 0.7);
    EXPECT_THROW(mean_predictor(std::vector<double>{}), ParameterError);
}

TEST(Mae, Examples) {
    Eigen::VectorXd labels(2);
    labels << 0.2, 0.4;
    EXPECT_NEAR(evaluate_mae(Eigen::VectorXd::Zero(2), labels), 0.3, 1e-15);
    EXPECT_EQ(evaluate_mae(labels, labels), 0.0);
    EXPECT_THROW(evaluate_mae(Eigen::VectorXd(0), Eigen::VectorXd(0)), DataError);
    EXPECT_THROW(evaluate_mae(Eigen::VectorXd::Zero(3), labels), DataError);
}

TEST(Mae, RandomMatchesLoop) {
    oracle::SplitMix64 rng(5);
    Eigen::VectorXd p(100), y(100);
    double sum = 0;
    for (int i = 0; i < 100; ++i) {
        p[i] = rng.uniform() * 1.4 - 0.2;
        y[i] = rng.uniform();
        sum += std::abs(std::min(1.0, std::max(0.0, p[i])) - y[i]);
    }
    EXPECT_NEAR(evaluate_mae(p, y), sum / 100, 1e-12);
}

namespace {

RegressionSplit split_of(const SyntheticTask& task, std::uint64_t seed) {
    return stratified_split(task.labels, Target::kPc1, seed);
}

}  // namespace

// Unit-norm 128-d rows, the shape the embed step produces.
TEST(Mlp, ConstantTarget) {
    auto task = synthetic_task(2000, 2, 1, false);
    EmbeddingMatrix features(128, "pseudo");
    for (auto& l : task.labels) {
        l.pc1 = 0.5;
        features.add_row(l.node.str(), pseudo_embed(l.node.str(), 128, 3));
    }
    MlpConfig cfg;
    cfg.seed = 1;
    const auto run = run_regression(features, task.labels, split_of(task, 1), cfg);
    EXPECT_LE(run.report.mae_test, 0.02);
}

TEST(Mlp, SignalBeatsBaseline) {
    const auto task = synthetic_task(2000, 32, 3, true);
    MlpConfig cfg;
    cfg.seed = 3;
    const auto run = run_regression(task.features, task.labels, split_of(task, 3), cfg);
    EXPECT_LT(run.report.mae_test, 0.6 * run.report.baseline_mae_test);
    EXPECT_GT(run.report.iterations, 0u);
    EXPECT_EQ(run.report.n_train + run.report.n_val + run.report.n_test, 2000u);
}

TEST(Mlp, BitForBitDeterminism) {
    const auto task = synthetic_task(400, 16, 8, true);
    MlpConfig cfg;
    cfg.seed = 2;
    cfg.max_iterations = 50;
    const auto a = run_regression(task.features, task.labels, split_of(task, 2), cfg);
    const auto b = run_regression(task.features, task.labels, split_of(task, 2), cfg);
    EXPECT_EQ(a.report.to_json().dump(), b.report.to_json().dump());
    for (std::size_t l = 0; l < a.model.layers().size(); ++l) {
        EXPECT_EQ(a.model.layers()[l].w, b.model.layers()[l].w);
        EXPECT_EQ(a.model.layers()[l].b, b.model.layers()[l].b);
    }
}

TEST(Mlp, EarlyStoppingRestoresBest) {
    const auto task = synthetic_task(200, 8, 4, false);
    MlpConfig cfg;
    cfg.seed = 4;
    cfg.patience = 3;
    cfg.max_iterations = 500;
    const auto run = run_regression(task.features, task.labels, split_of(task, 4), cfg);
    EXPECT_LE(run.report.iterations, run.report.best_iteration + 3);
    const auto val = make_dataset(task.features, task.labels, Target::kPc1, split_of(task, 4).val);
    EXPECT_NEAR(evaluate_mae(run.model.predict(val.x), val.y), run.report.mae_val, 1e-12);
}

TEST(Mlp, MisalignmentIsDataError) {
    const auto task = synthetic_task(50, 4, 1, true);
    EXPECT_THROW(make_dataset(task.features, task.labels, Target::kPc1, {"org.nothing.here"}), DataError);
}

TEST(Mlp, SaveLoad) {
    oracle::TempDir dir;
    Mlp m(6, {5, 3}, 9);
    m.save(dir / "m.cgmlp");
    const auto back = Mlp::load(dir / "m.cgmlp");
    Eigen::MatrixXd x = Eigen::MatrixXd::Random(4, 6);
    EXPECT_EQ(back.predict(x), m.predict(x));
    std::ofstream(dir / "bad.cgmlp") << "garbage";
    EXPECT_THROW(Mlp::load(dir / "bad.cgmlp"), FormatError);
}

TEST(Mlp, InitRange) {
    const Mlp m(16, {8}, 1);
    ASSERT_EQ(m.layers().size(), 2u);
    EXPECT_EQ(m.layers()[0].w.rows(), 8);
    EXPECT_LE(m.layers()[0].w.cwiseAbs().maxCoeff(), 0.25);
    EXPECT_LE(m.layers()[1].w.cwiseAbs().maxCoeff(), 1.0 / std::sqrt(8.0));
}

TEST(Histogram, PerfectAndMeanModels) {
    oracle::SplitMix64 rng(2);
    Eigen::VectorXd y(500);
    for (int i = 0; i < 500; ++i) y[i] = rng.uniform();
    y[0] = 1.0;
    const auto perfect = score_histogram(y, y);
    ASSERT_EQ(perfect.size(), kHistogramBins);
    for (const auto& b : perfect) EXPECT_EQ(b.count_true, b.count_pred);

    const auto mean = score_histogram(y, Eigen::VectorXd::Constant(500, 0.42));
    std::size_t nonzero = 0;
    for (const auto& b : mean) nonzero += b.count_pred > 0;
    EXPECT_EQ(nonzero, 1u);
    EXPECT_EQ(mean[8].count_pred, 500u);
}

TEST(Histogram, MatchesCountingOracle) {
    oracle::SplitMix64 rng(3);
    Eigen::VectorXd y(300), p(300);
    std::array<std::uint64_t, 20> ct{}, cp{};
    const auto bin = [](double v) {
        v = std::min(1.0, std::max(0.0, v));
        return v >= 1.0 ? std::size_t{19} : static_cast<std::size_t>(v * 20.0);
    };
    for (int i = 0; i < 300; ++i) {
        y[i] = rng.uniform();
        p[i] = rng.uniform() * 1.5 - 0.25;
        ++ct[bin(y[i])];
        ++cp[bin(p[i])];
    }
    const auto h = score_histogram(y, p);
    for (std::size_t b = 0; b < 20; ++b) {
        EXPECT_EQ(h[b].count_true, ct[b]);
        EXPECT_EQ(h[b].count_pred, cp[b]);
        EXPECT_NEAR(h[b].low, b / 20.0, 1e-12);
    }
}

TEST(Export, ScatterOnDiagonal) {
    oracle::TempDir dir;
    Eigen::VectorXd y(3);
    y << 0.1, 0.5, 0.9;
    export_plot_data(y, y, dir / "s.csv", dir / "h.csv");
    std::ifstream in(dir / "s.csv");
    std::string header, line;
    std::getline(in, header);
    EXPECT_EQ(header, "true,predicted");
    int rows = 0;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        EXPECT_EQ(line.substr(0, comma), line.substr(comma + 1));
        ++rows;
    }
    EXPECT_EQ(rows, 3);
}

TEST(Summary, MeanAndStd) {
    RegressionReport a, b;
    a.mae_test = 0.1;
    b.mae_test = 0.3;
    a.seed = 1;
    b.seed = 2;
    const auto row = summary_row("m", {a, b});
    EXPECT_NEAR(row["pc1_mae"].get<double>(), 0.2, 1e-12);
    EXPECT_NEAR(row["std"]["pc1"].get<double>(), 0.1, 1e-12);
    EXPECT_TRUE(row["mbfc_mae"].is_null());
}
