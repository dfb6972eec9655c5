#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "crynet/audio.hpp"

namespace crynet::data {

enum class Label { NoPain = 0, Pain = 1 };

const char* label_name(Label l);
Label label_from_string(const std::string& s);

// score in [0, 7]; > threshold is pain.
Label label_from_nips(int score, int threshold = 3);

struct ManifestRow {
    std::string event_id;
    std::string subject_id;
    std::string wav_path;
    Label label = Label::NoPain;
    std::optional<int> nips_score;
    bool augmented = false;
    std::string parent_id;  // augmented rows only
    std::string transform;  // augmented rows only
};

// CSV-backed event registry. Header:
//   event_id,subject_id,wav_path,label,nips_score,provenance,parent_id,transform
struct DatasetManifest {
    std::vector<ManifestRow> rows;

    std::vector<std::string> subject_ids() const;  // unique, sorted
    size_t original_count() const;
    const ManifestRow* find(const std::string& event_id) const;
    void validate() const;  // uniqueness, parent links, label consistency
};

DatasetManifest load_manifest(const std::string& path);
void save_manifest(const std::string& path, const DatasetManifest& manifest);

// Synthetic cry-like corpus standing in for the private recordings: separable
// classes, per-subject timbre so cross-subject generalization is non-trivial.
struct SynthConfig {
    int n_subjects = 31;
    int events_per_subject = 6;  // split evenly between classes
    int sample_rate = 8000;
    double duration_s = 2.0;
    uint64_t seed = 7;
    // class timbres
    double pain_f0_lo = 400.0, pain_f0_hi = 600.0;
    double pain_am_lo = 4.0, pain_am_hi = 8.0;
    double nopain_f0_lo = 150.0, nopain_f0_hi = 300.0;

    void validate() const;
};

struct SynthEvent {
    ManifestRow row;
    audio::AudioSignal signal;
};

// Deterministic in config.seed. Event signals are generated in manifest order.
std::vector<SynthEvent> generate_synthetic(const SynthConfig& config);

// Generate, write WAVs under out_dir and the manifest CSV at out_dir/manifest.csv.
DatasetManifest write_synthetic(const SynthConfig& config, const std::string& out_dir);

}  // namespace crynet::data
