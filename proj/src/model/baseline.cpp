#include <cmath>
#include <iostream>

#include "crynet/model.hpp"

namespace crynet::model {

std::vector<double> event_features(const audio::AudioSignal& signal) {
    const dsp::FeatureMatrix m = dsp::mfcc(signal);
    const dsp::FeatureMatrix l = dsp::lpcc(signal);
    std::vector<double> out;
    out.reserve(size_t(kEventFeatureDim));
    auto pool = [&](const dsp::FeatureMatrix& fm) {
        for (int c = 0; c < fm.coeffs; ++c) {
            double mean = 0.0;
            for (int f = 0; f < fm.frames; ++f) mean += fm.at(f, c);
            mean /= fm.frames;
            double var = 0.0;
            for (int f = 0; f < fm.frames; ++f) {
                const double d = fm.at(f, c) - mean;
                var += d * d;
            }
            var /= fm.frames;
            out.push_back(mean);
            out.push_back(std::sqrt(var));
        }
    };
    pool(m);
    pool(l);
    return out;
}

double LinearModel::decision(const std::vector<double>& features) const {
    if (features.size() != weights.size()) {
        throw DimensionError("baseline: feature size " + std::to_string(features.size()) +
                             " does not match model (" + std::to_string(weights.size()) + ")");
    }
    double acc = bias;
    for (size_t i = 0; i < weights.size(); ++i) {
        const double z = (features[i] - feat_mean[i]) / feat_std[i];
        acc += weights[i] * z;
    }
    return acc;
}

double LinearModel::probability(const std::vector<double>& features) const {
    return nnet::sigmoid(decision(features));
}

BaselineTrainResult train_baseline(const std::vector<std::vector<double>>& features,
                                   const std::vector<int>& labels, const BaselineConfig& config) {
    const size_t n = features.size();
    if (n != labels.size() || n == 0) {
        throw ValidationError("train_baseline: features/labels size mismatch or empty");
    }
    int n_pos = 0;
    for (int y : labels) n_pos += y ? 1 : 0;
    if (n_pos < 2 || int(n) - n_pos < 2) {
        throw ValidationError("train_baseline: need at least 2 events per class");
    }
    const size_t dim = features[0].size();
    for (const auto& f : features) {
        if (f.size() != dim) throw ValidationError("train_baseline: ragged feature rows");
    }
    if (!(config.lambda > 0.0)) throw ValidationError("train_baseline: lambda must be positive");

    LinearModel model;
    model.feat_mean.assign(dim, 0.0);
    model.feat_std.assign(dim, 1.0);
    for (size_t j = 0; j < dim; ++j) {
        double mean = 0.0;
        for (const auto& f : features) mean += f[j];
        mean /= double(n);
        double var = 0.0;
        for (const auto& f : features) {
            const double d = f[j] - mean;
            var += d * d;
        }
        var /= double(n);
        model.feat_mean[j] = mean;
        if (var < 1e-16) {
            model.dropped_features.push_back(int(j));
            model.feat_std[j] = 1.0;  // standardized value becomes ~0
        } else {
            model.feat_std[j] = std::sqrt(var);
        }
    }
    if (!model.dropped_features.empty()) {
        std::cerr << "train_baseline: dropping zero-variance feature columns:";
        for (int j : model.dropped_features) std::cerr << " " << j;
        std::cerr << "\n";
    }

    // standardized copies; dropped columns standardize to exactly 0
    std::vector<std::vector<double>> z(n, std::vector<double>(dim));
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < dim; ++j) {
            z[i][j] = (features[i][j] - model.feat_mean[j]) / model.feat_std[j];
        }
        for (int j : model.dropped_features) z[i][size_t(j)] = 0.0;
    }
    std::vector<double> y(n);
    for (size_t i = 0; i < n; ++i) y[i] = labels[i] ? 1.0 : -1.0;

    // full-batch subgradient descent on lambda*||w||^2 + mean hinge, with the
    // running average of iterates as the reported model
    std::vector<double> w(dim, 0.0), w_avg(dim, 0.0), grad(dim);
    double b = 0.0, b_avg = 0.0;

    auto objective = [&](const std::vector<double>& wv, double bv) {
        double hinge = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double m = 0.0;
            for (size_t j = 0; j < dim; ++j) m += wv[j] * z[i][j];
            hinge += std::max(0.0, 1.0 - y[i] * (m + bv));
        }
        double reg = 0.0;
        for (double v : wv) reg += v * v;
        return config.lambda * reg + hinge / double(n);
    };

    BaselineTrainResult result;
    result.objective_history.reserve(size_t(config.epochs));
    for (int t = 0; t < config.epochs; ++t) {
        for (size_t j = 0; j < dim; ++j) grad[j] = 2.0 * config.lambda * w[j];
        double gb = 0.0;
        for (size_t i = 0; i < n; ++i) {
            double m = b;
            for (size_t j = 0; j < dim; ++j) m += w[j] * z[i][j];
            if (y[i] * m < 1.0) {
                const double c = -y[i] / double(n);
                for (size_t j = 0; j < dim; ++j) grad[j] += c * z[i][j];
                gb += c;
            }
        }
        const double step = config.learning_rate / (1.0 + 0.05 * t);
        for (size_t j = 0; j < dim; ++j) w[j] -= step * grad[j];
        b -= step * gb;

        const double k = 1.0 / double(t + 1);
        for (size_t j = 0; j < dim; ++j) w_avg[j] += k * (w[j] - w_avg[j]);
        b_avg += k * (b - b_avg);
        result.objective_history.push_back(objective(w_avg, b_avg));
    }

    model.weights = w_avg;
    model.bias = b_avg;
    result.model = std::move(model);
    return result;
}

}  // namespace crynet::model
