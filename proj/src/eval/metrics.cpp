#include <algorithm>
#include <numeric>
#include <sstream>

#include "crynet/error.hpp"
#include "crynet/eval.hpp"

#include "json.hpp"

namespace crynet::eval {

double accuracy(const std::vector<double>& predictions, const std::vector<int>& labels,
                double threshold) {
    if (predictions.size() != labels.size()) {
        throw ValidationError("accuracy: " + std::to_string(predictions.size()) +
                              " predictions vs " + std::to_string(labels.size()) + " labels");
    }
    if (predictions.empty()) throw ValidationError("accuracy: empty input");
    size_t correct = 0;
    for (size_t i = 0; i < predictions.size(); ++i) {
        correct += ((predictions[i] > threshold) == (labels[i] != 0)) ? 1 : 0;
    }
    return double(correct) / double(predictions.size());
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size() || scores.empty()) {
        throw ValidationError("auc: size mismatch or empty input");
    }
    size_t n_pos = 0;
    for (int y : labels) n_pos += y ? 1 : 0;
    const size_t n_neg = scores.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) {
        throw ValidationError("auc: undefined for single-class input (" + std::to_string(n_pos) +
                              " positives of " + std::to_string(scores.size()) + ")");
    }

    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), size_t(0));
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return scores[a] < scores[b]; });

    // average ranks over tie groups, 1-based
    std::vector<double> rank(scores.size());
    size_t i = 0;
    while (i < order.size()) {
        size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg = (double(i) + double(j)) / 2.0 + 1.0;
        for (size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }
    double pos_rank_sum = 0.0;
    for (size_t idx = 0; idx < scores.size(); ++idx) {
        if (labels[idx]) pos_rank_sum += rank[idx];
    }
    return (pos_rank_sum - double(n_pos) * (double(n_pos) + 1.0) / 2.0) /
           (double(n_pos) * double(n_neg));
}

Confusion confusion_counts(const std::vector<double>& predictions, const std::vector<int>& labels,
                           double threshold) {
    if (predictions.size() != labels.size()) {
        throw ValidationError("confusion_counts: size mismatch");
    }
    Confusion c;
    for (size_t i = 0; i < predictions.size(); ++i) {
        const bool hat = predictions[i] > threshold;
        const bool truth = labels[i] != 0;
        if (hat && truth) ++c.tp;
        else if (hat && !truth) ++c.fp;
        else if (!hat && !truth) ++c.tn;
        else ++c.fn;
    }
    return c;
}

namespace {

nlohmann::json confusion_json(const Confusion& c) {
    return {{"tp", c.tp}, {"fp", c.fp}, {"tn", c.tn}, {"fn", c.fn}};
}

}  // namespace

std::string MetricsReport::to_json() const {
    nlohmann::ordered_json j;
    j["protocol"] = protocol;
    j["pipeline"] = pipeline;
    j["config_hash"] = config_hash;
    j["folds"] = nlohmann::ordered_json::array();
    for (const auto& f : folds) {
        nlohmann::ordered_json fj;
        fj["fold"] = f.index;
        fj["test_subjects"] = f.test_subjects;
        fj["n_test"] = f.n_test;
        fj["accuracy"] = f.accuracy;
        if (f.auc) fj["auc"] = *f.auc;
        else fj["auc"] = nullptr;
        fj["confusion"] = confusion_json(f.confusion);
        j["folds"].push_back(fj);
    }
    j["skipped_folds"] = skipped_folds;
    j["pooled"] = {{"accuracy", pooled_accuracy},
                   {"auc", pooled_auc ? nlohmann::json(*pooled_auc) : nlohmann::json(nullptr)},
                   {"confusion", confusion_json(pooled_confusion)}};
    return j.dump(2) + "\n";
}

std::string MetricsReport::to_table(size_t param_count) const {
    std::ostringstream ss;
    char acc[32], aucs[32];
    std::snprintf(acc, sizeof(acc), "%.2f", pooled_accuracy * 100.0);
    if (pooled_auc) std::snprintf(aucs, sizeof(aucs), "%.2f", *pooled_auc);
    else std::snprintf(aucs, sizeof(aucs), "-");
    ss << "Approach                  | Total parameters | Accuracy (%) | AUC\n";
    ss << "--------------------------+------------------+--------------+------\n";
    std::string name = pipeline == "ncnn" ? "Spectrogram + N-CNN" : "LPCC/MFCC + linear";
    name += " (" + protocol + ")";
    ss << name;
    for (size_t i = name.size(); i < 26; ++i) ss << ' ';
    ss << "| ";
    std::string params = param_count ? std::to_string(param_count) : "-";
    ss << params;
    for (size_t i = params.size(); i < 17; ++i) ss << ' ';
    ss << "| " << acc;
    for (size_t i = std::string(acc).size(); i < 13; ++i) ss << ' ';
    ss << "| " << aucs << "\n";
    return ss.str();
}

}  // namespace crynet::eval
