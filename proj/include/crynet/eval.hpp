#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crynet/augment.hpp"
#include "crynet/data.hpp"
#include "crynet/dsp.hpp"
#include "crynet/model.hpp"

namespace crynet::eval {

enum class Protocol { Loso, KFold };

struct Fold {
    std::vector<std::string> train_subjects;
    std::vector<std::string> test_subjects;
};

struct FoldPlan {
    Protocol protocol = Protocol::Loso;
    int k = 0;  // KFold only
    uint64_t seed = 0;
    std::vector<Fold> folds;
};

// One fold per subject; all of a subject's events (and their augmentations)
// leave the training side together.
FoldPlan loso_folds(const data::DatasetManifest& manifest);

// Subjects shuffled by seed and dealt round-robin into k folds.
FoldPlan kfold_subject(const data::DatasetManifest& manifest, int k, uint64_t seed);

// Event selection for a fold: train = every row (original or augmented) of a
// training subject; test = original rows of test subjects only.
struct FoldEvents {
    std::vector<std::string> train_ids;
    std::vector<std::string> test_ids;
};
FoldEvents fold_events(const data::DatasetManifest& manifest, const Fold& fold);

// Throws if any training id is an augmented descendant of a test-subject event.
void check_no_leakage(const data::DatasetManifest& manifest, const Fold& fold,
                      const std::vector<std::string>& train_ids);

// mean over ((score > threshold) == label)
double accuracy(const std::vector<double>& predictions, const std::vector<int>& labels,
                double threshold = 0.5);

// Rank-sum AUC with half credit for ties; throws on single-class input.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

struct Confusion {
    long tp = 0, fp = 0, tn = 0, fn = 0;
    long total() const { return tp + fp + tn + fn; }
};
Confusion confusion_counts(const std::vector<double>& predictions, const std::vector<int>& labels,
                           double threshold = 0.5);

struct FoldMetrics {
    int index = 0;
    std::vector<std::string> test_subjects;
    int n_test = 0;
    double accuracy = 0.0;
    std::optional<double> auc;  // absent when the test side is single-class
    Confusion confusion;
};

struct MetricsReport {
    std::string protocol;
    std::string pipeline;
    std::string config_hash;
    std::vector<FoldMetrics> folds;
    std::vector<int> skipped_folds;  // single-class training side
    double pooled_accuracy = 0.0;
    std::optional<double> pooled_auc;
    Confusion pooled_confusion;
    double wall_clock_s = 0.0;  // reported separately; not part of the canonical body

    // Deterministic JSON body (excludes wall clock).
    std::string to_json() const;
    // Plain-text table: approach, parameter count, accuracy %, AUC.
    std::string to_table(size_t param_count) const;
};

struct PipelineConfig {
    enum class Kind { Ncnn, Baseline };
    Kind kind = Kind::Ncnn;
    dsp::SpectrogramConfig spectrogram;
    model::NcnnConfig ncnn;
    model::TrainConfig train;
    model::BaselineConfig baseline;
    bool augment_in_loop = false;  // expand the training side of each fold
    aug::AugmentationSpec augmentation;
    int threads = 0;

    std::string kind_name() const { return kind == Kind::Ncnn ? "ncnn" : "baseline"; }
    std::string canonical_string() const;
    std::string hash() const;
};

// Events with their audio in memory; wav_path resolution happens at load time.
std::vector<data::SynthEvent> load_events(const data::DatasetManifest& manifest,
                                          const std::string& base_dir);

// Per fold: select events, optionally expand augmentation on the training side,
// train a fresh model, evaluate on the test originals. Pooled metrics come from
// the concatenated test predictions. `fold_model_sink`, when set, receives each
// trained fold graph (N-CNN pipeline only).
MetricsReport run_cross_validation(
    const std::vector<data::SynthEvent>& events, const FoldPlan& plan, const PipelineConfig& config,
    const std::function<void(int, const nnet::Graph&)>& fold_model_sink = {});

}  // namespace crynet::eval
