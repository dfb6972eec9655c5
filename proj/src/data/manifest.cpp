#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "crynet/data.hpp"
#include "crynet/error.hpp"

namespace crynet::data {

namespace {

const char* kHeader = "event_id,subject_id,wav_path,label,nips_score,provenance,parent_id,transform";

// RFC-4180-ish: quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_csv_line(const std::string& line, int line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"' && cur.empty()) {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (quoted) {
        throw ParseError("manifest line " + std::to_string(line_no) + ": unterminated quote");
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

}  // namespace

const char* label_name(Label l) { return l == Label::Pain ? "pain" : "no_pain"; }

Label label_from_string(const std::string& s) {
    if (s == "pain") return Label::Pain;
    if (s == "no_pain") return Label::NoPain;
    throw ValidationError("unknown label '" + s + "' (expected pain|no_pain)");
}

Label label_from_nips(int score, int threshold) {
    if (score < 0 || score > 7) {
        throw ValidationError("NIPS score " + std::to_string(score) + " out of range [0,7]");
    }
    return score > threshold ? Label::Pain : Label::NoPain;
}

std::vector<std::string> DatasetManifest::subject_ids() const {
    std::set<std::string> s;
    for (const auto& r : rows) s.insert(r.subject_id);
    return {s.begin(), s.end()};
}

size_t DatasetManifest::original_count() const {
    size_t n = 0;
    for (const auto& r : rows) n += r.augmented ? 0 : 1;
    return n;
}

const ManifestRow* DatasetManifest::find(const std::string& event_id) const {
    for (const auto& r : rows) {
        if (r.event_id == event_id) return &r;
    }
    return nullptr;
}

void DatasetManifest::validate() const {
    std::unordered_map<std::string, const ManifestRow*> by_id;
    by_id.reserve(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.event_id.empty()) {
            throw ValidationError("manifest row " + std::to_string(i + 2) + ": empty event_id");
        }
        if (r.subject_id.empty()) {
            throw ValidationError("manifest row " + std::to_string(i + 2) + ": empty subject_id");
        }
        if (!by_id.emplace(r.event_id, &r).second) {
            throw ValidationError("manifest row " + std::to_string(i + 2) +
                                  ": duplicate event_id '" + r.event_id + "'");
        }
    }
    for (size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (!r.augmented) continue;
        auto it = by_id.find(r.parent_id);
        if (it == by_id.end()) {
            throw ValidationError("manifest row " + std::to_string(i + 2) + ": augmented event '" +
                                  r.event_id + "' references missing parent '" + r.parent_id + "'");
        }
        const ManifestRow* parent = it->second;
        if (parent->label != r.label || parent->subject_id != r.subject_id) {
            throw ValidationError("manifest row " + std::to_string(i + 2) + ": augmented event '" +
                                  r.event_id + "' changes label or subject relative to parent");
        }
    }
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open manifest: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ParseError(path + ": empty manifest");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) {
        throw ParseError(path + ": line 1: header mismatch, expected '" + std::string(kHeader) +
                         "'");
    }
    DatasetManifest m;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split_csv_line(line, line_no);
        if (f.size() != 8) {
            throw ParseError(path + ": line " + std::to_string(line_no) + ": expected 8 fields, got " +
                             std::to_string(f.size()));
        }
        ManifestRow r;
        r.event_id = f[0];
        r.subject_id = f[1];
        r.wav_path = f[2];
        try {
            r.label = label_from_string(f[3]);
        } catch (const Error& e) {
            throw ParseError(path + ": line " + std::to_string(line_no) + ": field label: " +
                             e.what());
        }
        if (!f[4].empty()) {
            try {
                size_t pos = 0;
                int score = std::stoi(f[4], &pos);
                if (pos != f[4].size()) throw std::invalid_argument("trailing");
                if (score < 0 || score > 7) throw std::out_of_range("range");
                r.nips_score = score;
            } catch (const std::exception&) {
                throw ParseError(path + ": line " + std::to_string(line_no) +
                                 ": field nips_score: '" + f[4] + "' is not an integer in [0,7]");
            }
        }
        if (f[5] == "original") {
            r.augmented = false;
        } else if (f[5] == "augmented") {
            r.augmented = true;
        } else {
            throw ParseError(path + ": line " + std::to_string(line_no) +
                             ": field provenance: '" + f[5] + "' (expected original|augmented)");
        }
        r.parent_id = f[6];
        r.transform = f[7];
        if (r.augmented && r.parent_id.empty()) {
            throw ParseError(path + ": line " + std::to_string(line_no) +
                             ": augmented row missing parent_id");
        }
        m.rows.push_back(std::move(r));
    }
    try {
        m.validate();
    } catch (const Error& e) {
        throw ValidationError(path + ": " + e.what());
    }
    return m;
}

void save_manifest(const std::string& path, const DatasetManifest& manifest) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open manifest for writing: " + path);
    out << kHeader << "\n";
    for (const auto& r : manifest.rows) {
        out << csv_escape(r.event_id) << "," << csv_escape(r.subject_id) << ","
            << csv_escape(r.wav_path) << "," << label_name(r.label) << ",";
        if (r.nips_score) out << *r.nips_score;
        out << "," << (r.augmented ? "augmented" : "original") << "," << csv_escape(r.parent_id)
            << "," << csv_escape(r.transform) << "\n";
    }
    if (!out) throw IoError("manifest write failed: " + path);
}

}  // namespace crynet::data
