#include "credigraph/regression.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>

#include "credigraph/errors.hpp"
#include "credigraph/rng.hpp"

namespace credigraph {

nlohmann::json MlpConfig::to_json() const {
    return nlohmann::json{{"hidden", hidden},
                          {"activation", "relu"},
                          {"optimizer", "adam"},
                          {"learning_rate", learning_rate},
                          {"max_iterations", max_iterations},
                          {"patience", patience},
                          {"beta1", beta1},
                          {"beta2", beta2},
                          {"epsilon", epsilon},
                          {"seed", seed}};
}

MlpConfig MlpConfig::from_json(const nlohmann::json& j) {
    MlpConfig c;
    c.hidden = j.value("hidden", c.hidden);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.max_iterations = j.value("max_iterations", c.max_iterations);
    c.patience = j.value("patience", c.patience);
    c.beta1 = j.value("beta1", c.beta1);
    c.beta2 = j.value("beta2", c.beta2);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.seed = j.value("seed", c.seed);
    return c;
}

Dataset make_dataset(const EmbeddingMatrix& features, const std::vector<CredibilityLabel>& labels, Target target,
                     const std::vector<std::string>& keys) {
    std::map<std::string_view, double> scores;
    for (const auto& l : labels) {
        if (auto s = l.score(target)) {
            scores[l.node.str()] = *s;
        }
    }
    Dataset d;
    d.keys = keys;
    d.x.resize(static_cast<Eigen::Index>(keys.size()), static_cast<Eigen::Index>(features.dim()));
    d.y.resize(static_cast<Eigen::Index>(keys.size()));
    for (std::size_t i = 0; i < keys.size(); ++i) {
        const auto row = features.find(keys[i]);
        if (!row) {
            throw DataError("no embedding row for `" + keys[i] + "`");
        }
        const auto it = scores.find(keys[i]);
        if (it == scores.end()) {
            throw DataError("no " + std::string(to_string(target)) + " label for `" + keys[i] + "`");
        }
        const auto values = features.row(*row);
        for (std::size_t c = 0; c < values.size(); ++c) {
            d.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = values[c];
        }
        d.y(static_cast<Eigen::Index>(i)) = it->second;
    }
    return d;
}

MeanModel mean_predictor(std::span<const double> train_labels) {
    if (train_labels.empty()) {
        throw ParameterError("mean predictor needs at least one training label");
    }
    double sum = 0.0;
    for (double v : train_labels) {
        sum += v;
    }
    return MeanModel{sum / static_cast<double>(train_labels.size())};
}

MeanModel mean_predictor(const Eigen::VectorXd& train_labels) {
    return mean_predictor(std::span<const double>(train_labels.data(), static_cast<std::size_t>(train_labels.size())));
}

Mlp::Mlp(std::size_t input_dim, const std::vector<std::size_t>& hidden, std::uint64_t seed) {
    if (input_dim == 0) {
        throw ParameterError("MLP input dimension must be positive");
    }
    SplitMix64 rng(seed);
    std::size_t fan_in = input_dim;
    auto dims = hidden;
    dims.push_back(1);
    for (std::size_t out : dims) {
        if (out == 0) {
            throw ParameterError("MLP layer width must be positive");
        }
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        Layer layer{Eigen::MatrixXd(out, fan_in), Eigen::VectorXd(out)};
        for (Eigen::Index r = 0; r < layer.w.rows(); ++r) {
            for (Eigen::Index c = 0; c < layer.w.cols(); ++c) {
                layer.w(r, c) = (2.0 * rng.uniform() - 1.0) * bound;
            }
        }
        for (Eigen::Index r = 0; r < layer.b.size(); ++r) {
            layer.b(r) = (2.0 * rng.uniform() - 1.0) * bound;
        }
        layers_.push_back(std::move(layer));
        fan_in = out;
    }
}

Eigen::VectorXd Mlp::predict(const Eigen::MatrixXd& x) const {
    if (static_cast<std::size_t>(x.cols()) != input_dim()) {
        throw DataError("feature width " + std::to_string(x.cols()) + " does not match model input " +
                        std::to_string(input_dim()));
    }
    Eigen::MatrixXd a = x.transpose();  // features x examples
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        Eigen::MatrixXd z = (layers_[l].w * a).colwise() + layers_[l].b;
        a = l + 1 < layers_.size() ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z;
    }
    return a.row(0).transpose();
}

void Mlp::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot create `" + path.string() + "`");
    }
    io::write_magic(out, kModelMagic);
    io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(layers_.size()));
    for (const auto& l : layers_) {
        io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(l.w.rows()));
        io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(l.w.cols()));
        for (Eigen::Index r = 0; r < l.w.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.w.cols(); ++c) {
                io::write_le<double>(out, l.w(r, c));
            }
        }
        for (Eigen::Index r = 0; r < l.b.size(); ++r) {
            io::write_le<double>(out, l.b(r));
        }
    }
    if (!out) {
        throw IoError("failed writing `" + path.string() + "`");
    }
}

Mlp Mlp::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open `" + path.string() + "`");
    }
    const auto file = path.string();
    io::expect_magic(in, kModelMagic, file);
    Mlp m;
    const auto n = io::read_le<std::uint32_t>(in, file);
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto rows = io::read_le<std::uint32_t>(in, file);
        const auto cols = io::read_le<std::uint32_t>(in, file);
        if (!m.layers_.empty() && static_cast<std::uint32_t>(m.layers_.back().w.rows()) != cols) {
            throw FormatError("`" + file + "` has inconsistent layer shapes");
        }
        Layer l{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
        for (Eigen::Index r = 0; r < l.w.rows(); ++r) {
            for (Eigen::Index c = 0; c < l.w.cols(); ++c) {
                l.w(r, c) = io::read_le<double>(in, file);
            }
        }
        for (Eigen::Index r = 0; r < l.b.size(); ++r) {
            l.b(r) = io::read_le<double>(in, file);
        }
        m.layers_.push_back(std::move(l));
    }
    if (m.layers_.empty() || m.layers_.back().w.rows() != 1) {
        throw FormatError("`" + file + "` does not describe a single-output model");
    }
    return m;
}

double evaluate_mae(const Eigen::VectorXd& predictions, const Eigen::VectorXd& labels) {
    if (predictions.size() == 0) {
        throw DataError("MAE of an empty node list is undefined");
    }
    if (predictions.size() != labels.size()) {
        throw DataError("prediction and label counts differ");
    }
    return (predictions.cwiseMax(0.0).cwiseMin(1.0) - labels).cwiseAbs().mean();
}

namespace {

struct AdamState {
    std::vector<Mlp::Layer> m;
    std::vector<Mlp::Layer> v;
};

Mlp::Layer zeros_like(const Mlp::Layer& l) {
    return {Eigen::MatrixXd::Zero(l.w.rows(), l.w.cols()), Eigen::VectorXd::Zero(l.b.size())};
}

// Backpropagated gradients of the mean squared error.
std::vector<Mlp::Layer> gradients(const Mlp& model, const Eigen::MatrixXd& xt, const Eigen::VectorXd& y) {
    const auto& layers = model.layers();
    std::vector<Eigen::MatrixXd> acts{xt};
    for (std::size_t l = 0; l < layers.size(); ++l) {
        Eigen::MatrixXd z = (layers[l].w * acts.back()).colwise() + layers[l].b;
        acts.push_back(l + 1 < layers.size() ? Eigen::MatrixXd(z.cwiseMax(0.0)) : z);
    }
    const double n = static_cast<double>(y.size());
    Eigen::MatrixXd delta = (acts.back() - y.transpose()) * (2.0 / n);
    std::vector<Mlp::Layer> grads(layers.size());
    for (std::size_t l = layers.size(); l-- > 0;) {
        grads[l].w = delta * acts[l].transpose();
        grads[l].b = delta.rowwise().sum();
        if (l > 0) {
            Eigen::MatrixXd back = layers[l].w.transpose() * delta;
            delta = back.cwiseProduct((acts[l].array() > 0.0).cast<double>().matrix());
        }
    }
    return grads;
}

}  // namespace

TrainResult train_mlp(const Dataset& train, const Dataset& val, const MlpConfig& config) {
    if (train.size() == 0) {
        throw DataError("training set is empty");
    }
    if (train.x.rows() != train.y.size() || val.x.rows() != val.y.size() ||
        (val.size() > 0 && val.x.cols() != train.x.cols())) {
        throw DataError("feature and label rows are misaligned");
    }
    TrainResult result;
    result.model = Mlp(static_cast<std::size_t>(train.x.cols()), config.hidden, config.seed);
    const Eigen::MatrixXd xt = train.x.transpose();
    const bool early = val.size() > 0;

    auto& layers = result.model.layers();
    AdamState adam;
    for (const auto& l : layers) {
        adam.m.push_back(zeros_like(l));
        adam.v.push_back(zeros_like(l));
    }

    Mlp best = result.model;
    double best_mae = early ? evaluate_mae(result.model.predict(val.x), val.y) : 0.0;
    std::size_t since_best = 0;
    double b1t = 1.0;
    double b2t = 1.0;
    for (std::size_t it = 1; it <= config.max_iterations; ++it) {
        const auto grads = gradients(result.model, xt, train.y);
        b1t *= config.beta1;
        b2t *= config.beta2;
        const double step = config.learning_rate * std::sqrt(1.0 - b2t) / (1.0 - b1t);
        for (std::size_t l = 0; l < layers.size(); ++l) {
            adam.m[l].w = config.beta1 * adam.m[l].w + (1.0 - config.beta1) * grads[l].w;
            adam.m[l].b = config.beta1 * adam.m[l].b + (1.0 - config.beta1) * grads[l].b;
            adam.v[l].w = config.beta2 * adam.v[l].w + (1.0 - config.beta2) * grads[l].w.cwiseAbs2();
            adam.v[l].b = config.beta2 * adam.v[l].b + (1.0 - config.beta2) * grads[l].b.cwiseAbs2();
            layers[l].w.array() -= step * adam.m[l].w.array() / (adam.v[l].w.array().sqrt() + config.epsilon);
            layers[l].b.array() -= step * adam.m[l].b.array() / (adam.v[l].b.array().sqrt() + config.epsilon);
        }
        result.iterations = it;
        if (!early) {
            continue;
        }
        const double mae = evaluate_mae(result.model.predict(val.x), val.y);
        if (mae < best_mae) {
            best_mae = mae;
            best = result.model;
            result.best_iteration = it;
            since_best = 0;
        } else if (++since_best >= config.patience) {
            break;
        }
    }
    if (early) {
        result.model = std::move(best);
        result.best_val_mae = best_mae;
    } else {
        result.best_iteration = result.iterations;
    }
    return result;
}

nlohmann::json RegressionReport::to_json() const {
    return nlohmann::json{{"target", to_string(target)},
                          {"seed", seed},
                          {"mae_test", mae_test},
                          {"mae_val", mae_val},
                          {"baseline_mae_test", baseline_mae_test},
                          {"baseline_mae_val", baseline_mae_val},
                          {"iterations", iterations},
                          {"best_iteration", best_iteration},
                          {"n_train", n_train},
                          {"n_val", n_val},
                          {"n_test", n_test},
                          {"config", config.to_json()}};
}

RegressionReport RegressionReport::from_json(const nlohmann::json& j) {
    RegressionReport r;
    r.target = parse_target(j.at("target").get<std::string>());
    r.seed = j.at("seed").get<std::uint64_t>();
    r.mae_test = j.at("mae_test").get<double>();
    r.mae_val = j.at("mae_val").get<double>();
    r.baseline_mae_test = j.at("baseline_mae_test").get<double>();
    r.baseline_mae_val = j.at("baseline_mae_val").get<double>();
    r.iterations = j.value("iterations", std::size_t{0});
    r.best_iteration = j.value("best_iteration", std::size_t{0});
    r.n_train = j.value("n_train", std::size_t{0});
    r.n_val = j.value("n_val", std::size_t{0});
    r.n_test = j.value("n_test", std::size_t{0});
    if (j.contains("config")) {
        r.config = MlpConfig::from_json(j.at("config"));
    }
    return r;
}

RegressionRun run_regression(const EmbeddingMatrix& features, const std::vector<CredibilityLabel>& labels,
                             const RegressionSplit& split, const MlpConfig& config) {
    const auto train = make_dataset(features, labels, split.target, split.train);
    const auto val = make_dataset(features, labels, split.target, split.val);
    const auto test = make_dataset(features, labels, split.target, split.test);
    if (test.size() == 0) {
        throw DataError("test split is empty");
    }
    RegressionRun run;
    run.baseline = mean_predictor(train.y);
    auto trained = train_mlp(train, val, config);
    run.model = std::move(trained.model);

    auto& r = run.report;
    r.target = split.target;
    r.seed = config.seed;
    r.config = config;
    r.iterations = trained.iterations;
    r.best_iteration = trained.best_iteration;
    r.n_train = train.size();
    r.n_val = val.size();
    r.n_test = test.size();
    r.mae_test = evaluate_mae(run.model.predict(test.x), test.y);
    r.baseline_mae_test = evaluate_mae(run.baseline.predict(test.x), test.y);
    if (val.size() > 0) {
        r.mae_val = evaluate_mae(run.model.predict(val.x), val.y);
        r.baseline_mae_val = evaluate_mae(run.baseline.predict(val.x), val.y);
    }
    return run;
}

nlohmann::json summary_row(const std::string& method, const std::vector<RegressionReport>& reports, bool baseline) {
    nlohmann::json row{{"method", method}};
    nlohmann::json stds = nlohmann::json::object();
    std::vector<std::uint64_t> seeds;
    for (Target t : {Target::kPc1, Target::kMbfc}) {
        std::vector<double> v;
        for (const auto& r : reports) {
            if (r.target == t) {
                v.push_back(baseline ? r.baseline_mae_test : r.mae_test);
                if (std::find(seeds.begin(), seeds.end(), r.seed) == seeds.end()) {
                    seeds.push_back(r.seed);
                }
            }
        }
        const std::string name = std::string(to_string(t));
        if (v.empty()) {
            row[name + "_mae"] = nullptr;
            stds[name] = nullptr;
            continue;
        }
        double mean = 0.0;
        for (double x : v) {
            mean += x;
        }
        mean /= static_cast<double>(v.size());
        double var = 0.0;
        for (double x : v) {
            var += (x - mean) * (x - mean);
        }
        row[name + "_mae"] = mean;
        stds[name] = std::sqrt(var / static_cast<double>(v.size()));
    }
    std::sort(seeds.begin(), seeds.end());
    row["std"] = stds;
    row["seeds"] = seeds;
    return row;
}

std::vector<HistogramBin> score_histogram(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted) {
    std::vector<HistogramBin> bins(kHistogramBins);
    for (std::size_t i = 0; i < kHistogramBins; ++i) {
        bins[i].low = static_cast<double>(i) / kHistogramBins;
        bins[i].high = static_cast<double>(i + 1) / kHistogramBins;
    }
    const auto bin = [](double v) {
        v = std::clamp(v, 0.0, 1.0);
        return std::min<std::size_t>(kHistogramBins - 1, static_cast<std::size_t>(v * kHistogramBins));
    };
    for (Eigen::Index i = 0; i < truth.size(); ++i) {
        ++bins[bin(truth(i))].count_true;
    }
    for (Eigen::Index i = 0; i < predicted.size(); ++i) {
        ++bins[bin(predicted(i))].count_pred;
    }
    return bins;
}

void export_plot_data(const Eigen::VectorXd& truth, const Eigen::VectorXd& predicted,
                      const std::filesystem::path& scatter_csv, const std::filesystem::path& histogram_csv) {
    if (truth.size() != predicted.size()) {
        throw DataError("prediction and label counts differ");
    }
    std::ofstream scatter(scatter_csv, std::ios::trunc);
    std::ofstream hist(histogram_csv, std::ios::trunc);
    if (!scatter || !hist) {
        throw IoError("cannot create plot data files");
    }
    char buf[64];
    scatter << "true,predicted\n";
    for (Eigen::Index i = 0; i < truth.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", truth(i), std::clamp(predicted(i), 0.0, 1.0));
        scatter << buf;
    }
    hist << "bin_low,bin_high,count_true,count_pred\n";
    for (const auto& b : score_histogram(truth, predicted)) {
        std::snprintf(buf, sizeof buf, "%.2f,%.2f,", b.low, b.high);
        hist << buf << b.count_true << ',' << b.count_pred << '\n';
    }
}

SyntheticTask synthetic_task(std::size_t n, std::size_t dim, std::uint64_t seed, bool signal, double w_scale,
                             double noise) {
    SyntheticTask task{EmbeddingMatrix(dim, signal ? "synthetic/signal" : "synthetic/noise"), {}, {}};
    SplitMix64 wrng(mix_seed(seed, 1));
    SplitMix64 xrng(mix_seed(seed, 2));
    SplitMix64 yrng(mix_seed(seed, 3));
    const double scale = w_scale / std::sqrt(static_cast<double>(dim));
    task.w.resize(dim);
    for (auto& w : task.w) {
        w = wrng.normal() * scale;
    }
    std::vector<float> row(dim);
    char key[48];
    for (std::size_t i = 0; i < n; ++i) {
        double dot = 0.0;
        for (std::size_t c = 0; c < dim; ++c) {
            const double x = xrng.normal();
            row[c] = static_cast<float>(x);
            dot += task.w[c] * static_cast<double>(row[c]);
        }
        double y = signal ? 1.0 / (1.0 + std::exp(-dot)) + noise * yrng.normal() : yrng.uniform();
        y = std::clamp(y, 0.0, 1.0);
        std::snprintf(key, sizeof key, "org.synthetic.d%06zu", i);
        task.features.add_row(key, row);
        task.labels.push_back(CredibilityLabel{*NodeKey::from_reversed(key), y, y});
    }
    return task;
}

}  // namespace credigraph
