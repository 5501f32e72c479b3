#include "doctest.h"

#include "paap/error.hpp"
#include "paap/feature_io.hpp"
#include "paap/phoneme_align.hpp"
#include "test_util.hpp"

using namespace paap;
using namespace paap::testutil;

namespace {
const PhonemeVocab kVocab = PhonemeVocab::default_vocab();
}

TEST_CASE("default vocabulary has 41 unique labels with SIL last") {
    kVocab.validate();
    CHECK(kVocab.labels.size() == 41);
    CHECK(kVocab.labels[kSilenceIndex] == "SIL");
    CHECK(kVocab.index_of("AA") == 0);
    CHECK(kVocab.index_of("ZZ") == -1);
}

TEST_CASE("parse_alignment: well-formed interval document") {
    const std::string text = R"({
        "sample_rate": 16000,
        "intervals": [
            {"phoneme": "SIL", "start_s": 0.0, "end_s": 0.1},
            {"phoneme": "AA", "start_s": 0.1, "end_s": 0.2}
        ]})";
    const AlignmentDoc doc = parse_alignment_json(text, kVocab);
    CHECK_FALSE(doc.has_logits);
    CHECK(doc.intervals.size() == 2);
    CHECK(doc.duration_s() == doctest::Approx(0.2));
}

TEST_CASE("parse_alignment: unknown label is named in the error") {
    const std::string text =
        R"({"intervals": [{"phoneme": "ZZ", "start_s": 0, "end_s": 1}]})";
    try {
        parse_alignment_json(text, kVocab);
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        CHECK(std::string(e.what()).find("ZZ") != std::string::npos);
    }
}

TEST_CASE("parse_alignment: overlapping intervals rejected with indices") {
    const std::string text = R"({"intervals": [
        {"phoneme": "AA", "start_s": 0.0, "end_s": 0.15},
        {"phoneme": "IY", "start_s": 0.1, "end_s": 0.2}]})";
    CHECK_THROWS_AS(parse_alignment_json(text, kVocab), FormatError);
}

TEST_CASE("parse_alignment: gaps become SIL") {
    const std::string text = R"({"intervals": [
        {"phoneme": "AA", "start_s": 0.0, "end_s": 0.1},
        {"phoneme": "IY", "start_s": 0.15, "end_s": 0.2}]})";
    const AlignmentDoc doc = parse_alignment_json(text, kVocab);
    REQUIRE(doc.intervals.size() == 3);
    CHECK(doc.intervals[1].label == "SIL");
    CHECK(doc.intervals[1].start_s == doctest::Approx(0.1));
    CHECK(doc.intervals[1].end_s == doctest::Approx(0.15));
}

TEST_CASE("to_frame_logits: 10 ms frames against interval bounds") {
    const std::string text = R"({"intervals": [
        {"phoneme": "SIL", "start_s": 0.0, "end_s": 0.1},
        {"phoneme": "AA", "start_s": 0.1, "end_s": 0.2}]})";
    const AlignmentDoc doc = parse_alignment_json(text, kVocab);
    const PhonemeLogits p = to_frame_logits(doc, 21, FrameSpec{}, 16000);
    const std::vector<int> idx = argmax_phonemes(p);
    const int aa = kVocab.index_of("AA");
    for (int f = 0; f <= 9; ++f) CHECK(idx[f] == kSilenceIndex);
    for (int f = 10; f <= 19; ++f) CHECK(idx[f] == aa);
    CHECK(idx[20] == kSilenceIndex);  // past the last interval
}

TEST_CASE("to_frame_logits: single interval covers everything") {
    const std::string text =
        R"({"intervals": [{"phoneme": "IY", "start_s": 0.0, "end_s": 10.0}]})";
    const AlignmentDoc doc = parse_alignment_json(text, kVocab);
    const PhonemeLogits p = to_frame_logits(doc, 50, FrameSpec{}, 16000);
    const int iy = kVocab.index_of("IY");
    for (int f = 0; f < 50; ++f) {
        CHECK(p.values(f, iy) == 1.0);
        CHECK(p.values.row(f).sum() == 1.0);
    }
}

TEST_CASE("to_frame_logits: one-hot rows sum to 1") {
    const std::string text = R"({"intervals": [
        {"phoneme": "B", "start_s": 0.0, "end_s": 0.07},
        {"phoneme": "AA", "start_s": 0.07, "end_s": 0.21}]})";
    const AlignmentDoc doc = parse_alignment_json(text, kVocab);
    const PhonemeLogits p = to_frame_logits(doc, 30, FrameSpec{}, 16000);
    for (int f = 0; f < 30; ++f) CHECK(p.values.row(f).sum() == 1.0);
}

TEST_CASE("to_frame_logits: logits document resampled by frame center") {
    std::string text = R"({"sample_rate": 16000, "hop": 320, "logits": [)";
    for (int r = 0; r < 5; ++r) {
        text += "[";
        for (int j = 0; j < 41; ++j)
            text += std::to_string(r * 41 + j) + (j < 40 ? "," : "");
        text += r < 4 ? "]," : "]";
    }
    text += "]}";
    const AlignmentDoc doc = parse_alignment_json(text, kVocab);
    CHECK(doc.has_logits);
    // hop 160 frames against hop 320 logits: frame i maps to row i/2.
    const PhonemeLogits p = to_frame_logits(doc, 8, FrameSpec{}, 16000);
    CHECK(p.values(0, 0) == 0.0);
    CHECK(p.values(2, 0) == 41.0);
    CHECK(p.values(4, 3) == 2 * 41.0 + 3.0);
    CHECK(p.values(7, 0) == 4 * 41.0);  // clamped past the end
}

TEST_CASE("to_frame_logits: invalid frame count") {
    const std::string text =
        R"({"intervals": [{"phoneme": "AA", "start_s": 0, "end_s": 1}]})";
    const AlignmentDoc doc = parse_alignment_json(text, kVocab);
    CHECK_THROWS_AS(to_frame_logits(doc, 0, FrameSpec{}, 16000),
                    ArgumentError);
}

TEST_CASE("argmax_phonemes: tie-break and shift invariance") {
    PhonemeLogits p;
    p.vocab = kVocab;
    p.values = Eigen::MatrixXd::Zero(3, 41);
    p.values(0, 7) = 1.0;
    // row 1 all equal -> index 0
    p.values.row(2).setConstant(2.0);
    p.values(2, 13) = 5.0;

    std::vector<int> idx = argmax_phonemes(p);
    CHECK(idx[0] == 7);
    CHECK(idx[1] == 0);
    CHECK(idx[2] == 13);

    p.values.row(2).array() += 100.0;
    CHECK(argmax_phonemes(p)[2] == 13);
}

TEST_CASE("interval round-trip through frame logits") {
    const std::string text = R"({"intervals": [
        {"phoneme": "SH", "start_s": 0.0, "end_s": 0.055},
        {"phoneme": "UW", "start_s": 0.055, "end_s": 0.13},
        {"phoneme": "SIL", "start_s": 0.13, "end_s": 0.3}]})";
    const AlignmentDoc doc = parse_alignment_json(text, kVocab);
    const int n = 31;
    const PhonemeLogits p = to_frame_logits(doc, n, FrameSpec{}, 16000);
    const std::vector<int> idx = argmax_phonemes(p);
    for (int f = 0; f < n; ++f) {
        const double center = f * 160.0 / 16000.0;
        int expected = kSilenceIndex;
        for (const auto& iv : doc.intervals)
            if (center >= iv.start_s && center < iv.end_s)
                expected = kVocab.index_of(iv.label);
        CHECK(idx[f] == expected);
    }
}

TEST_CASE("logits binary round-trip") {
    TempDir tmp("logits_bin");
    PhonemeLogits p;
    p.vocab = kVocab;
    p.values = Eigen::MatrixXd::Random(17, 41);
    write_logits_bin(tmp.file("l.bin"), p);
    const PhonemeLogits back = read_logits_bin(tmp.file("l.bin"), kVocab);
    REQUIRE(back.n_frames() == 17);
    // float32 storage
    CHECK((back.values - p.values).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("vocab validation failures") {
    PhonemeVocab bad;
    bad.labels.assign(41, "X");
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
    bad = kVocab;
    bad.labels.pop_back();
    CHECK_THROWS_AS(bad.validate(), ArgumentError);
}
