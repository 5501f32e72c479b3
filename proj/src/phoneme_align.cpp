#include "paap/phoneme_align.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "paap/error.hpp"

namespace paap {

using nlohmann::json;

PhonemeVocab PhonemeVocab::default_vocab() {
    // ARPAbet-style inventory; AX fills the 40th slot, SIL is index 40.
    return PhonemeVocab{{
        "AA", "AE", "AH", "AO", "AW", "AX", "AY", "B",  "CH", "D",
        "DH", "EH", "ER", "EY", "F",  "G",  "HH", "IH", "IY", "JH",
        "K",  "L",  "M",  "N",  "NG", "OW", "OY", "P",  "R",  "S",
        "SH", "T",  "TH", "UH", "UW", "V",  "W",  "Y",  "Z",  "ZH",
        "SIL"}};
}

int PhonemeVocab::index_of(const std::string& label) const {
    const auto it = std::find(labels.begin(), labels.end(), label);
    return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
}

void PhonemeVocab::validate() const {
    if (labels.size() != kNumPhonemeClasses)
        throw ArgumentError("vocabulary must have exactly 41 entries, got " +
                            std::to_string(labels.size()));
    std::set<std::string> seen(labels.begin(), labels.end());
    if (seen.size() != labels.size())
        throw ArgumentError("vocabulary contains duplicate labels");
    if (index_of("SIL") < 0) throw ArgumentError("vocabulary must contain SIL");
}

double AlignmentDoc::duration_s() const {
    if (has_logits)
        return static_cast<double>(logits.rows()) * logits_hop / sample_rate_hz;
    return intervals.empty() ? 0.0 : intervals.back().end_s;
}

AlignmentDoc parse_alignment_json(const std::string& json_text,
                                  const PhonemeVocab& default_vocab) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("alignment JSON parse error: ") + e.what());
    }

    AlignmentDoc out;
    out.vocab = default_vocab;
    if (doc.contains("vocab")) {
        out.vocab.labels = doc["vocab"].get<std::vector<std::string>>();
    }
    out.vocab.validate();
    if (doc.contains("sample_rate"))
        out.sample_rate_hz = doc["sample_rate"].get<int>();
    if (out.sample_rate_hz <= 0)
        throw FormatError("alignment: sample_rate must be positive");

    if (doc.contains("logits")) {
        const auto& rows = doc["logits"];
        if (!rows.is_array() || rows.empty())
            throw FormatError("alignment: logits must be a non-empty array");
        out.has_logits = true;
        out.logits_hop = doc.value("hop", 160);
        if (out.logits_hop <= 0)
            throw FormatError("alignment: hop must be positive");
        out.logits.resize(static_cast<int>(rows.size()), kNumPhonemeClasses);
        for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
            const auto& row = rows[i];
            if (!row.is_array() || row.size() != kNumPhonemeClasses)
                throw FormatError("alignment: logits row " + std::to_string(i) +
                                  " must have 41 entries");
            for (int j = 0; j < kNumPhonemeClasses; ++j) {
                const double v = row[j].get<double>();
                if (!std::isfinite(v))
                    throw FormatError("alignment: non-finite logit at row " +
                                      std::to_string(i));
                out.logits(i, j) = v;
            }
        }
        return out;
    }

    if (!doc.contains("intervals"))
        throw FormatError("alignment: need either \"intervals\" or \"logits\"");

    std::vector<PhonemeInterval> raw;
    for (const auto& item : doc["intervals"]) {
        PhonemeInterval iv;
        iv.label = item.at("phoneme").get<std::string>();
        iv.start_s = item.at("start_s").get<double>();
        iv.end_s = item.at("end_s").get<double>();
        if (out.vocab.index_of(iv.label) < 0)
            throw FormatError("alignment: label not in vocabulary: " + iv.label);
        if (iv.start_s < 0.0 || iv.end_s < iv.start_s)
            throw FormatError("alignment: invalid interval bounds for " +
                              iv.label);
        raw.push_back(iv);
    }
    std::stable_sort(raw.begin(), raw.end(),
                     [](const PhonemeInterval& a, const PhonemeInterval& b) {
                         return a.start_s < b.start_s;
                     });
    for (std::size_t i = 1; i < raw.size(); ++i) {
        if (raw[i].start_s < raw[i - 1].end_s - 1e-12) {
            std::ostringstream msg;
            msg << "alignment: intervals " << i - 1 << " and " << i
                << " overlap";
            throw FormatError(msg.str());
        }
    }

    // Gaps become explicit SIL intervals.
    double cursor = 0.0;
    for (const auto& iv : raw) {
        if (iv.start_s > cursor + 1e-12)
            out.intervals.push_back({"SIL", cursor, iv.start_s});
        out.intervals.push_back(iv);
        cursor = iv.end_s;
    }
    return out;
}

AlignmentDoc parse_alignment(const std::string& path,
                             const PhonemeVocab& vocab) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open alignment file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_alignment_json(ss.str(), vocab);
}

PhonemeLogits to_frame_logits(const AlignmentDoc& doc, int n_frames,
                              const FrameSpec& spec, int sample_rate_hz) {
    if (n_frames <= 0)
        throw ArgumentError("to_frame_logits: n_frames must be positive");

    PhonemeLogits out;
    out.vocab = doc.vocab;
    out.frame_spec = spec;
    out.values = Eigen::MatrixXd::Zero(n_frames, kNumPhonemeClasses);
    const int sil = doc.vocab.index_of("SIL");

    if (doc.has_logits) {
        for (int i = 0; i < n_frames; ++i) {
            const double center_s =
                static_cast<double>(i) * spec.hop / sample_rate_hz;
            long src = std::lround(center_s * doc.sample_rate_hz /
                                   doc.logits_hop);
            src = std::clamp<long>(src, 0, doc.logits.rows() - 1);
            out.values.row(i) = doc.logits.row(static_cast<int>(src));
        }
        return out;
    }

    for (int i = 0; i < n_frames; ++i) {
        const double center_s =
            static_cast<double>(i) * spec.hop / sample_rate_hz;
        int idx = sil;
        for (const auto& iv : doc.intervals) {
            if (center_s >= iv.start_s && center_s < iv.end_s) {
                idx = doc.vocab.index_of(iv.label);
                break;
            }
        }
        out.values(i, idx) = 1.0;
    }
    return out;
}

std::vector<int> argmax_phonemes(const PhonemeLogits& p) {
    std::vector<int> out(p.n_frames());
    for (int i = 0; i < p.n_frames(); ++i) {
        int best = 0;
        for (int j = 1; j < kNumPhonemeClasses; ++j)
            if (p.values(i, j) > p.values(i, best)) best = j;
        out[i] = best;
    }
    return out;
}

}  // namespace paap
