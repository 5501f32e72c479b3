#include "doctest.h"

#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "paap/analysis.hpp"
#include "paap/error.hpp"
#include "test_util.hpp"

using namespace paap;
using namespace paap::testutil;

namespace {

const PhonemeVocab kVocab = PhonemeVocab::default_vocab();

Eigen::MatrixXd random_matrix(long n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    Eigen::MatrixXd m(n, kNumParams);
    for (long i = 0; i < n; ++i)
        for (int k = 0; k < kNumParams; ++k) m(i, k) = dist(rng);
    return m;
}

std::vector<int> random_indices(long n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> pick(0, kNumPhonemeClasses - 1);
    std::vector<int> idx(n);
    for (long i = 0; i < n; ++i) idx[i] = pick(rng);
    return idx;
}

}  // namespace

TEST_CASE("mae_per_param: matches the double-loop oracle") {
    const long n = 137;
    const Eigen::MatrixXd e = random_matrix(n, 1);
    const Eigen::MatrixXd c = random_matrix(n, 2);
    const Eigen::VectorXd got = mae_per_param(e, c);
    for (int k = 0; k < kNumParams; ++k) {
        double acc = 0.0;
        for (long i = 0; i < n; ++i) acc += std::abs(e(i, k) - c(i, k));
        CHECK(std::abs(got(k) - acc / n) < 1e-12);
    }
}

TEST_CASE("mae_per_param: shape and emptiness errors") {
    const Eigen::MatrixXd a = random_matrix(10, 3);
    CHECK_THROWS_AS(mae_per_param(a, random_matrix(9, 4)), ArgumentError);
    Eigen::MatrixXd empty(0, kNumParams);
    CHECK_THROWS_AS(mae_per_param(empty, empty), ArgumentError);
}

TEST_CASE("improvement_percent: endpoint values") {
    CHECK(*improvement_percent(0.0, 2.0) == 100.0);
    CHECK(*improvement_percent(2.0, 2.0) == 0.0);
    CHECK(*improvement_percent(1.0, 2.0) == 50.0);
    CHECK_FALSE(improvement_percent(1.0, 0.0).has_value());
    // Enhanced worse than baseline reads negative.
    CHECK(*improvement_percent(3.0, 2.0) < 0.0);
}

TEST_CASE("improvement_percent: monotone in the enhanced error") {
    double prev = 1e9;
    for (double mae_e : {0.0, 0.5, 1.0, 1.5, 2.0, 4.0}) {
        const double v = *improvement_percent(mae_e, 2.0);
        CHECK(v < prev);
        prev = v;
    }
}

TEST_CASE("per-phoneme frame-weighted decomposition recovers the global MAE") {
    const long n = 211;
    const Eigen::MatrixXd e = random_matrix(n, 11);
    const Eigen::MatrixXd c = random_matrix(n, 12);
    const std::vector<int> idx = random_indices(n, 13);
    const Eigen::VectorXd global = mae_per_param(e, c);

    for (int k = 0; k < kNumParams; ++k) {
        // Per-phoneme means, then frame-count-weighted recombination.
        std::vector<double> sum(kNumPhonemeClasses, 0.0);
        std::vector<long> cnt(kNumPhonemeClasses, 0);
        for (long i = 0; i < n; ++i) {
            sum[idx[i]] += std::abs(e(i, k) - c(i, k));
            ++cnt[idx[i]];
        }
        double recombined = 0.0;
        for (int j = 0; j < kNumPhonemeClasses; ++j)
            if (cnt[j] > 0) recombined += (sum[j] / cnt[j]) * cnt[j];
        CHECK(std::abs(recombined / n - global(k)) < 1e-9);
    }
}

TEST_CASE("build_report: hand-built two-phoneme fixture") {
    // 4 frames: two of AA (index 0), two of B (index 7).
    const long n = 4;
    Eigen::MatrixXd clean = Eigen::MatrixXd::Zero(n, kNumParams);
    Eigen::MatrixXd base = clean;
    Eigen::MatrixXd enh = clean;
    // Param 0: baseline off by 2 everywhere, enhanced off by 1 on AA
    // frames and off by 2 on B frames.
    base.col(0).setConstant(2.0);
    enh(0, 0) = 1.0;
    enh(1, 0) = 1.0;
    enh(2, 0) = 2.0;
    enh(3, 0) = 2.0;
    const std::vector<int> idx = {0, 0, 7, 7};

    const PaapReport r = build_report(enh, base, clean, idx, kVocab);
    CHECK(r.mae_baseline(0) == 2.0);
    CHECK(r.mae_enhanced(0) == 1.5);
    CHECK(*r.improvement_percent[0] == 25.0);
    CHECK(*r.per_phoneme_improvement[0][0] == 50.0);
    CHECK(*r.per_phoneme_improvement[7][0] == 0.0);
    CHECK(r.frames_per_phoneme[0] == 2);
    CHECK(r.frames_per_phoneme[7] == 2);
    CHECK(r.frames_per_phoneme[kSilenceIndex] == 0);
    // Zero baseline error in the remaining params.
    CHECK_FALSE(r.improvement_percent[1].has_value());
    // Unoccupied phoneme rows carry no improvement.
    CHECK_FALSE(r.per_phoneme_improvement[kSilenceIndex][0].has_value());
}

TEST_CASE("build_report: per-phoneme cells match independent recomputation") {
    const long n = 300;
    const Eigen::MatrixXd e = random_matrix(n, 21);
    const Eigen::MatrixXd b = random_matrix(n, 22);
    const Eigen::MatrixXd c = random_matrix(n, 23);
    const std::vector<int> idx = random_indices(n, 24);
    const PaapReport r = build_report(e, b, c, idx, kVocab);

    for (int j = 0; j < kNumPhonemeClasses; ++j) {
        long cnt = 0;
        for (int v : idx) cnt += v == j;
        CHECK(r.frames_per_phoneme[j] == cnt);
        if (cnt == 0) continue;
        for (int k = 0; k < kNumParams; ++k) {
            double se = 0.0, sb = 0.0, sc = 0.0;
            for (long i = 0; i < n; ++i) {
                if (idx[i] != j) continue;
                se += std::abs(e(i, k) - c(i, k));
                sb += std::abs(b(i, k) - c(i, k));
                sc += std::abs(c(i, k));
            }
            const double want = (sb / cnt - se / cnt) / (sb / cnt) * 100.0;
            CHECK(*r.per_phoneme_improvement[j][k] ==
                  doctest::Approx(want).epsilon(1e-9));
            CHECK(r.per_phoneme_mean_abs(j, k) ==
                  doctest::Approx(sc / cnt).epsilon(1e-12));
        }
    }
}

TEST_CASE("build_report: argument errors") {
    const Eigen::MatrixXd a = random_matrix(10, 31);
    CHECK_THROWS_AS(
        build_report(a, a, random_matrix(9, 32), random_indices(10, 33), kVocab),
        ArgumentError);
    std::vector<int> bad = random_indices(10, 34);
    bad[3] = 99;
    CHECK_THROWS_AS(build_report(a, a, a, bad, kVocab), ArgumentError);
}

TEST_CASE("phoneme categories") {
    CHECK(phoneme_category("AA") == PhonemeCategory::Vowel);
    CHECK(phoneme_category("AX") == PhonemeCategory::Vowel);
    CHECK(phoneme_category("B") == PhonemeCategory::Labial);
    CHECK(phoneme_category("S") == PhonemeCategory::Coronal);
    CHECK(phoneme_category("K") == PhonemeCategory::Dorsal);
    CHECK(phoneme_category("HH") == PhonemeCategory::Laryngeal);
    CHECK(phoneme_category("SIL") == PhonemeCategory::Silence);
    CHECK(category_name(PhonemeCategory::Laryngeal) == "laryngeal");
    // Every vocabulary entry maps to some category.
    for (const auto& label : kVocab.labels)
        CHECK_FALSE(category_name(phoneme_category(label)).empty());
}

TEST_CASE("report serialization is deterministic and complete") {
    const long n = 120;
    const PaapReport r =
        build_report(random_matrix(n, 41), random_matrix(n, 42),
                     random_matrix(n, 43), random_indices(n, 44), kVocab);

    const std::string csv1 = report_to_csv(r, "deadbeef");
    const std::string csv2 = report_to_csv(r, "deadbeef");
    CHECK(csv1 == csv2);
    CHECK(csv1.find("# config=deadbeef") == 0);
    // Header + 3 summary rows + 41 phoneme rows + digest line.
    CHECK(std::count(csv1.begin(), csv1.end(), '\n') == 46);

    const std::string js = report_to_json(r, "deadbeef");
    CHECK(js == report_to_json(r, "deadbeef"));
    const auto doc = nlohmann::json::parse(js);
    CHECK(doc.at("config_digest") == "deadbeef");
    CHECK(doc.at("per_phoneme").size() == kNumPhonemeClasses);
    CHECK(doc.at("mae_enhanced").size() == kNumParams);
    for (int k = 0; k < kNumParams; ++k)
        CHECK(doc.at("mae_enhanced")[k].get<double>() ==
              doctest::Approx(r.mae_enhanced(k)).epsilon(1e-12));
}

TEST_CASE("emit_report writes byte-identical files on repeat") {
    TempDir tmp("report_emit");
    const long n = 60;
    const PaapReport r =
        build_report(random_matrix(n, 51), random_matrix(n, 52),
                     random_matrix(n, 53), random_indices(n, 54), kVocab);
    emit_report(r, tmp.file("a.csv"), ReportFormat::Csv, "cafe");
    emit_report(r, tmp.file("b.csv"), ReportFormat::Csv, "cafe");
    CHECK(read_file(tmp.file("a.csv")) == read_file(tmp.file("b.csv")));
    emit_report(r, tmp.file("a.json"), ReportFormat::Json);
    emit_report(r, tmp.file("b.json"), ReportFormat::Json);
    const std::string a = read_file(tmp.file("a.json"));
    CHECK_FALSE(a.empty());
    CHECK(a == read_file(tmp.file("b.json")));
}

TEST_CASE("plot series") {
    const long n = 90;
    std::vector<int> idx = random_indices(n, 64);
    idx[0] = 0;  // ensure AA occupied
    const PaapReport r =
        build_report(random_matrix(n, 61), random_matrix(n, 62),
                     random_matrix(n, 63), idx, kVocab);

    const std::string bars = plot_bar_csv(r);
    CHECK(std::count(bars.begin(), bars.end(), '\n') == kNumParams + 1);
    CHECK(bars.find("F0semitone,") != std::string::npos);

    const std::string scatter = plot_scatter_csv(r, "loudness");
    CHECK(scatter.find("phoneme,category,") == 0);
    long occupied = 0;
    for (long c : r.frames_per_phoneme) occupied += c > 0;
    CHECK(std::count(scatter.begin(), scatter.end(), '\n') == occupied + 1);
    CHECK_THROWS_AS(plot_scatter_csv(r, "nope"), ArgumentError);
}
