#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "crynet/error.hpp"
#include "crynet/eval.hpp"
#include "crynet/rng.hpp"

namespace crynet::eval {

FoldPlan loso_folds(const data::DatasetManifest& manifest) {
    const auto subjects = manifest.subject_ids();
    if (subjects.size() < 2) {
        throw ValidationError("loso_folds: need at least 2 subjects, got " +
                              std::to_string(subjects.size()));
    }
    FoldPlan plan;
    plan.protocol = Protocol::Loso;
    plan.folds.reserve(subjects.size());
    for (const auto& s : subjects) {
        Fold f;
        f.test_subjects = {s};
        for (const auto& other : subjects) {
            if (other != s) f.train_subjects.push_back(other);
        }
        plan.folds.push_back(std::move(f));
    }
    return plan;
}

FoldPlan kfold_subject(const data::DatasetManifest& manifest, int k, uint64_t seed) {
    const auto subjects = manifest.subject_ids();
    if (k < 2) throw ValidationError("kfold_subject: k must be >= 2");
    if (int(subjects.size()) < k) {
        throw ValidationError("kfold_subject: only " + std::to_string(subjects.size()) +
                              " subjects for k=" + std::to_string(k) + "; consider LOSO");
    }
    std::vector<std::string> shuffled = subjects;
    Rng rng(seed);
    rng.shuffle(shuffled);

    FoldPlan plan;
    plan.protocol = Protocol::KFold;
    plan.k = k;
    plan.seed = seed;
    plan.folds.assign(size_t(k), {});
    for (size_t i = 0; i < shuffled.size(); ++i) {
        plan.folds[i % size_t(k)].test_subjects.push_back(shuffled[i]);
    }
    for (auto& f : plan.folds) {
        std::sort(f.test_subjects.begin(), f.test_subjects.end());
        std::unordered_set<std::string> test_set(f.test_subjects.begin(), f.test_subjects.end());
        for (const auto& s : subjects) {
            if (!test_set.count(s)) f.train_subjects.push_back(s);
        }
    }
    return plan;
}

FoldEvents fold_events(const data::DatasetManifest& manifest, const Fold& fold) {
    std::unordered_set<std::string> train_subjects(fold.train_subjects.begin(),
                                                   fold.train_subjects.end());
    std::unordered_set<std::string> test_subjects(fold.test_subjects.begin(),
                                                  fold.test_subjects.end());
    FoldEvents out;
    for (const auto& r : manifest.rows) {
        if (train_subjects.count(r.subject_id)) {
            out.train_ids.push_back(r.event_id);
        } else if (test_subjects.count(r.subject_id) && !r.augmented) {
            out.test_ids.push_back(r.event_id);
        }
    }
    return out;
}

void check_no_leakage(const data::DatasetManifest& manifest, const Fold& fold,
                      const std::vector<std::string>& train_ids) {
    std::unordered_set<std::string> test_subjects(fold.test_subjects.begin(),
                                                  fold.test_subjects.end());
    std::unordered_map<std::string, const data::ManifestRow*> by_id;
    for (const auto& r : manifest.rows) by_id.emplace(r.event_id, &r);
    for (const auto& id : train_ids) {
        auto it = by_id.find(id);
        if (it == by_id.end()) {
            throw ValidationError("leakage check: unknown training id '" + id + "'");
        }
        const auto* r = it->second;
        if (test_subjects.count(r->subject_id)) {
            throw ValidationError("leakage: training id '" + id + "' belongs to test subject '" +
                                  r->subject_id + "'");
        }
        if (r->augmented) {
            auto pit = by_id.find(r->parent_id);
            if (pit != by_id.end() && test_subjects.count(pit->second->subject_id)) {
                throw ValidationError("leakage: training id '" + id +
                                      "' is an augmentation of test-subject event '" +
                                      r->parent_id + "'");
            }
        }
    }
}

}  // namespace crynet::eval
