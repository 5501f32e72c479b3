#ifndef PAAP_PHONEME_ALIGN_HPP
#define PAAP_PHONEME_ALIGN_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "paap/dsp_core.hpp"

namespace paap {

constexpr int kNumPhonemeClasses = 41;  // 40 phonemes + SIL
constexpr int kSilenceIndex = 40;

struct PhonemeVocab {
    std::vector<std::string> labels;  // exactly 41, SIL last by default

    static PhonemeVocab default_vocab();
    int index_of(const std::string& label) const;  // -1 if absent
    void validate() const;
};

struct PhonemeLogits {
    Eigen::MatrixXd values;  // n_frames x 41
    PhonemeVocab vocab;
    FrameSpec frame_spec;

    int n_frames() const { return static_cast<int>(values.rows()); }
};

struct PhonemeInterval {
    std::string label;
    double start_s = 0.0;
    double end_s = 0.0;
};

// Ingested aligner output: either labeled intervals or a frame-level
// logits matrix.
struct AlignmentDoc {
    PhonemeVocab vocab;
    int sample_rate_hz = kCanonicalSampleRate;

    bool has_logits = false;
    std::vector<PhonemeInterval> intervals;  // sorted, non-overlapping
    Eigen::MatrixXd logits;                  // rows x 41 when has_logits
    int logits_hop = 0;                      // hop of the source logits

    double duration_s() const;
};

// Parses the alignment JSON schema; gaps between intervals read as SIL.
AlignmentDoc parse_alignment(const std::string& path,
                             const PhonemeVocab& vocab);
AlignmentDoc parse_alignment_json(const std::string& json_text,
                                  const PhonemeVocab& vocab);

// Maps a document onto n_frames STFT frames. Interval docs produce
// one-hot rows from the label covering each frame center; logits docs are
// resampled by nearest frame-center lookup.
PhonemeLogits to_frame_logits(const AlignmentDoc& doc, int n_frames,
                              const FrameSpec& spec, int sample_rate_hz);

// Per-frame argmax; ties break toward the lowest index.
std::vector<int> argmax_phonemes(const PhonemeLogits& p);

}  // namespace paap

#endif
