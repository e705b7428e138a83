#pragma once

// Credibility regression from domain embeddings: the mean baseline, a small
// ReLU MLP trained full-batch with Adam, MAE evaluation and plot data.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "credigraph/embedding.hpp"
#include "credigraph/labels.hpp"

namespace credigraph {

struct MlpConfig {
    std::vector<std::size_t> hidden{128, 64};
    double learning_rate = 0.001;
    std::size_t max_iterations = 200;
    std::size_t patience = 20;  // validation MAE checks without improvement
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 0;

    [[nodiscard]] nlohmann::json to_json() const;
    static MlpConfig from_json(const nlohmann::json& j);
};

// Features row-major, one row per example.
struct Dataset {
    std::vector<std::string> keys;
    Eigen::MatrixXd x;
    Eigen::VectorXd y;

    [[nodiscard]] std::size_t size() const noexcept { return keys.size(); }
};

// Rows for `keys` in order. Throws DataError if a key has no embedding row
// or no score for `target`.
Dataset make_dataset(const EmbeddingMatrix& features, const std::vector<CredibilityLabel>& labels, Target target,
                     const std::vector<std::string>& keys);

struct MeanModel {
    double mean = 0.0;
    [[nodiscard]] Eigen::VectorXd predict(const Eigen::MatrixXd& x) const {
        return Eigen::VectorXd::Constant(x.rows(), mean);
    }
};

// Throws ParameterError on an empty training set.
MeanModel mean_predictor(std::span<const double> train_labels);
MeanModel mean_predictor(const Eigen::VectorXd& train_labels);

inline constexpr io::Magic kModelMagic = io::make_magic("CGMLP1");

class Mlp {
   public:
    struct Layer {
        Eigen::MatrixXd w;  // out x in
        Eigen::VectorXd b;
    };

    Mlp() = default;
    // Weights and biases ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)).
    Mlp(std::size_t input_dim, const std::vector<std::size_t>& hidden, std::uint64_t seed);

    // Raw (unclamped) outputs.
    [[nodiscard]] Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;
    [[nodiscard]] std::size_t input_dim() const noexcept { return layers_.empty() ? 0 : layers_.front().w.cols(); }
    [[nodiscard]] const std::vector<Layer>& layers() const noexcept { return layers_; }
    std::vector<Layer>& layers() noexcept { return layers_; }

    void save(const std::filesystem::path& path) const;
    static Mlp load(const std::filesystem::path& path);

   private:
    std::vector<Layer> layers_;
};

struct TrainResult {
    Mlp model;
    std::size_t iterations = 0;      // optimizer steps taken
    std::size_t best_iteration = 0;  // 0 means the initial weights won
    double best_val_mae = 0.0;
};

// MSE loss, full-batch Adam. With a non-empty validation set, stops after
// `patience` steps without a new best validation MAE and restores the best
// weights. Throws DataError on mismatched shapes or empty training data.
TrainResult train_mlp(const Dataset& train, const Dataset& val, const MlpConfig& config);

// Mean |clamp(pred, 0, 1) - label|. Throws DataError on empty or mismatched
// inputs.
double evaluate_mae(const Eigen::VectorXd& predictions, const Eigen::VectorXd& labels);

struct RegressionReport {
    Target target = Target::kPc1;
    std::uint64_t seed = 0;
    double mae_test = 0.0;
    double mae_val = 0.0;
    double baseline_mae_test = 0.0;
    double baseline_mae_val = 0.0;
    std::size_t iterations = 0;
    std::size_t best_iteration = 0;
    std::size_t n_train = 0;
    std::size_t n_val = 0;
    std::size_t n_test = 0;
    MlpConfig config;

    [[nodiscard]] nlohmann::json to_json() const;
    static RegressionReport from_json(const nlohmann::json& j);
};

struct RegressionRun {
    RegressionReport report;
    Mlp model;
    MeanModel baseline;
};

// Trains on split.train, early-stops on split.val, reports on split.test.
RegressionRun run_regression(const EmbeddingMatrix& features, const std::vector<CredibilityLabel>& labels,
                             const RegressionSplit& split, const MlpConfig& config);

// Results-table row: {method, pc1_mae, mbfc_mae, std: {pc1, mbfc}, seeds}.
// Means and population standard deviations over the reports per target;
// a target with no reports gets null.
nlohmann::json summary_row(const std::string& method, const std::vector<RegressionReport>& reports,
                           bool baseline = false);

inline constexpr std::size_t kHistogramBins = 20;

struct HistogramBin {
    double low = 0.0;
    double high = 0.0;
    std::uint64_t count_true = 0;
    std::uint64_t count_pred = 0;
};

// Twenty equal bins over [0, 1] (1.0 lands in the last); predictions are
// clamped first.
std::vector<HistogramBin> score_histogram(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted);

// `<prefix>_scatter.csv` (true,predicted) and `<prefix>_hist.csv`.
void export_plot_data(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted,
                      const std::filesystem::path& scatter_csv, const std::filesystem::path& histogram_csv);

// Synthetic task: x ~ N(0, I_dim); with signal, label = clamp(sigmoid(w.x) +
// N(0, noise), 0, 1) for a hidden w ~ N(0, I) * (w_scale / sqrt(dim));
// without signal, label ~ U(0, 1) independent of x.
struct SyntheticTask {
    EmbeddingMatrix features;
    std::vector<CredibilityLabel> labels;  // pc1 and mbfc carry the same score
    std::vector<double> w;
};

SyntheticTask synthetic_task(std::size_t n, std::size_t dim, std::uint64_t seed, bool signal, double w_scale = 2.0,
                             double noise = 0.05);

}  // namespace credigraph
