#include <algorithm>
#include <cmath>
#include <filesystem>

#include "crynet/data.hpp"
#include "crynet/error.hpp"
#include "crynet/rng.hpp"

namespace crynet::data {

namespace {

std::string two_digits(int n) { return (n < 10 ? "0" : "") + std::to_string(n); }

// Pain-like cry: mid-frequency fundamental with a harmonic stack and a slow
// amplitude-modulated burst train.
void synth_pain(std::vector<double>& x, int sr, double f0, double am_rate, double decay,
                Rng& rng) {
    const size_t n = x.size();
    const double phase0 = rng.uniform(0.0, 2.0 * M_PI);
    const double am_phase = rng.uniform(0.0, 2.0 * M_PI);
    const double vibrato = rng.uniform(0.0, 0.01);
    for (size_t i = 0; i < n; ++i) {
        const double t = double(i) / sr;
        const double f = f0 * (1.0 + vibrato * std::sin(2.0 * M_PI * 3.0 * t));
        double v = 0.0;
        double amp = 1.0;
        for (int h = 1; h <= 5; ++h) {
            v += amp * std::sin(2.0 * M_PI * h * f * t + phase0 * h);
            amp *= decay;
        }
        // squared raised sine gives distinct burst packets
        const double env = std::pow(0.5 * (1.0 + std::sin(2.0 * M_PI * am_rate * t + am_phase)), 2.0);
        x[i] = v * (0.15 + 0.85 * env);
    }
}

// No-pain ambience: low hum plus gentle low-passed background noise.
void synth_nopain(std::vector<double>& x, int sr, double f0, double noise_level, Rng& rng) {
    const size_t n = x.size();
    const double phase0 = rng.uniform(0.0, 2.0 * M_PI);
    double lp = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double t = double(i) / sr;
        double v = std::sin(2.0 * M_PI * f0 * t + phase0);
        v += 0.35 * std::sin(2.0 * M_PI * 2.0 * f0 * t + 1.7 * phase0);
        lp = 0.92 * lp + 0.08 * rng.gaussian();
        x[i] = 0.5 * v + noise_level * 8.0 * lp + noise_level * rng.gaussian();
    }
}

}  // namespace

void SynthConfig::validate() const {
    if (n_subjects < 2) throw ValidationError("synth: need at least 2 subjects");
    if (events_per_subject < 2) throw ValidationError("synth: need at least 2 events per subject");
    if (sample_rate < 2000) throw ValidationError("synth: sample rate too low");
    if (!(duration_s > 0.1)) throw ValidationError("synth: duration too short");
}

std::vector<SynthEvent> generate_synthetic(const SynthConfig& config) {
    config.validate();
    std::vector<SynthEvent> events;
    events.reserve(size_t(config.n_subjects) * config.events_per_subject);
    const auto n_samples = size_t(std::lround(config.duration_s * config.sample_rate));

    for (int s = 0; s < config.n_subjects; ++s) {
        Rng subject_rng(Rng::derive(config.seed, "subject", uint64_t(s)));
        const double pain_f0 = subject_rng.uniform(config.pain_f0_lo, config.pain_f0_hi);
        const double nopain_f0 = subject_rng.uniform(config.nopain_f0_lo, config.nopain_f0_hi);
        const double harmonic_decay = subject_rng.uniform(0.5, 0.8);
        const double gain = subject_rng.uniform(0.25, 1.0);
        const double noise_floor = subject_rng.uniform(0.01, 0.04);
        const std::string subject_id = "s" + two_digits(s);

        for (int e = 0; e < config.events_per_subject; ++e) {
            Rng rng(Rng::derive(config.seed, "event", uint64_t(s) * 1000 + uint64_t(e)));
            const bool pain = (e % 2 == 0);
            SynthEvent ev;
            ev.signal.sample_rate = config.sample_rate;
            ev.signal.samples.assign(n_samples, 0.0);
            if (pain) {
                const double f0 = pain_f0 * (1.0 + rng.uniform(-0.05, 0.05));
                const double am = rng.uniform(config.pain_am_lo, config.pain_am_hi);
                synth_pain(ev.signal.samples, config.sample_rate, f0, am, harmonic_decay, rng);
            } else {
                const double f0 = nopain_f0 * (1.0 + rng.uniform(-0.05, 0.05));
                synth_nopain(ev.signal.samples, config.sample_rate, f0, noise_floor, rng);
            }
            double peak = 0.0;
            for (double v : ev.signal.samples) peak = std::max(peak, std::fabs(v));
            const double scale = peak > 0.0 ? gain / peak : 0.0;
            for (double& v : ev.signal.samples) v = std::clamp(v * scale, -1.0, 1.0);

            ev.row.event_id = subject_id + "_e" + two_digits(e);
            ev.row.subject_id = subject_id;
            ev.row.label = pain ? Label::Pain : Label::NoPain;
            ev.row.nips_score = pain ? int(4 + rng.uniform_int(4)) : int(rng.uniform_int(4));
            ev.row.augmented = false;
            ev.signal.source_id = ev.row.event_id;
            events.push_back(std::move(ev));
        }
    }
    return events;
}

DatasetManifest write_synthetic(const SynthConfig& config, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(fs::path(out_dir) / "wavs", ec);
    if (ec) throw IoError("cannot create output directory: " + out_dir);

    auto events = generate_synthetic(config);
    DatasetManifest manifest;
    manifest.rows.reserve(events.size());
    for (auto& ev : events) {
        const std::string rel = "wavs/" + ev.row.event_id + ".wav";
        audio::write_wav((fs::path(out_dir) / rel).string(), ev.signal);
        ev.row.wav_path = rel;
        manifest.rows.push_back(ev.row);
    }
    save_manifest((fs::path(out_dir) / "manifest.csv").string(), manifest);
    return manifest;
}

}  // namespace crynet::data
