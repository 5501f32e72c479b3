#include "paap/analysis.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "paap/error.hpp"

namespace paap {

using nlohmann::json;

PhonemeCategory phoneme_category(const std::string& label) {
    static const std::map<std::string, PhonemeCategory> table = {
        // vowels
        {"AA", PhonemeCategory::Vowel},   {"AE", PhonemeCategory::Vowel},
        {"AH", PhonemeCategory::Vowel},   {"AO", PhonemeCategory::Vowel},
        {"AW", PhonemeCategory::Vowel},   {"AX", PhonemeCategory::Vowel},
        {"AY", PhonemeCategory::Vowel},   {"EH", PhonemeCategory::Vowel},
        {"ER", PhonemeCategory::Vowel},   {"EY", PhonemeCategory::Vowel},
        {"IH", PhonemeCategory::Vowel},   {"IY", PhonemeCategory::Vowel},
        {"OW", PhonemeCategory::Vowel},   {"OY", PhonemeCategory::Vowel},
        {"UH", PhonemeCategory::Vowel},   {"UW", PhonemeCategory::Vowel},
        // labials (lips)
        {"B", PhonemeCategory::Labial},   {"P", PhonemeCategory::Labial},
        {"M", PhonemeCategory::Labial},   {"F", PhonemeCategory::Labial},
        {"V", PhonemeCategory::Labial},   {"W", PhonemeCategory::Labial},
        // coronals (tongue front)
        {"D", PhonemeCategory::Coronal},  {"T", PhonemeCategory::Coronal},
        {"S", PhonemeCategory::Coronal},  {"Z", PhonemeCategory::Coronal},
        {"N", PhonemeCategory::Coronal},  {"L", PhonemeCategory::Coronal},
        {"R", PhonemeCategory::Coronal},  {"SH", PhonemeCategory::Coronal},
        {"ZH", PhonemeCategory::Coronal}, {"CH", PhonemeCategory::Coronal},
        {"JH", PhonemeCategory::Coronal}, {"TH", PhonemeCategory::Coronal},
        {"DH", PhonemeCategory::Coronal},
        // dorsals (tongue dorsum)
        {"K", PhonemeCategory::Dorsal},   {"G", PhonemeCategory::Dorsal},
        {"NG", PhonemeCategory::Dorsal},  {"Y", PhonemeCategory::Dorsal},
        // /HH/ is articulated in the larynx
        {"HH", PhonemeCategory::Laryngeal},
        {"SIL", PhonemeCategory::Silence},
    };
    const auto it = table.find(label);
    return it == table.end() ? PhonemeCategory::Coronal : it->second;
}

std::string category_name(PhonemeCategory c) {
    switch (c) {
        case PhonemeCategory::Vowel: return "vowel";
        case PhonemeCategory::Dorsal: return "dorsal";
        case PhonemeCategory::Labial: return "labial";
        case PhonemeCategory::Coronal: return "coronal";
        case PhonemeCategory::Laryngeal: return "laryngeal";
        case PhonemeCategory::Silence: return "silence";
    }
    return "unknown";
}

Eigen::VectorXd mae_per_param(const Eigen::MatrixXd& d_enhanced,
                              const Eigen::MatrixXd& d_clean) {
    if (d_enhanced.rows() != d_clean.rows() ||
        d_enhanced.cols() != d_clean.cols())
        throw ArgumentError("mae_per_param: shape mismatch");
    if (d_clean.rows() == 0) throw ArgumentError("mae_per_param: empty input");
    return (d_enhanced - d_clean).cwiseAbs().colwise().mean().transpose();
}

std::optional<double> improvement_percent(double mae_enhanced,
                                          double mae_baseline) {
    if (mae_baseline == 0.0) return std::nullopt;
    return (mae_baseline - mae_enhanced) / mae_baseline * 100.0;
}

PaapReport build_report(const Eigen::MatrixXd& d_enhanced,
                        const Eigen::MatrixXd& d_baseline,
                        const Eigen::MatrixXd& d_clean,
                        const std::vector<int>& phoneme_idx,
                        const PhonemeVocab& vocab) {
    const long n = d_clean.rows();
    if (d_enhanced.rows() != n || d_baseline.rows() != n ||
        static_cast<long>(phoneme_idx.size()) != n)
        throw ArgumentError("build_report: row counts differ");
    if (d_clean.cols() != kNumParams)
        throw ArgumentError("build_report: expected 25 parameter columns");

    PaapReport r;
    r.vocab = vocab;
    r.params.assign(param_names().begin(), param_names().end());
    r.mae_enhanced = mae_per_param(d_enhanced, d_clean);
    r.mae_baseline = mae_per_param(d_baseline, d_clean);
    for (int k = 0; k < kNumParams; ++k)
        r.improvement_percent.push_back(
            improvement_percent(r.mae_enhanced(k), r.mae_baseline(k)));

    r.frames_per_phoneme.assign(kNumPhonemeClasses, 0);
    Eigen::MatrixXd sum_e = Eigen::MatrixXd::Zero(kNumPhonemeClasses, kNumParams);
    Eigen::MatrixXd sum_b = Eigen::MatrixXd::Zero(kNumPhonemeClasses, kNumParams);
    Eigen::MatrixXd sum_abs_c =
        Eigen::MatrixXd::Zero(kNumPhonemeClasses, kNumParams);
    for (long i = 0; i < n; ++i) {
        const int j = phoneme_idx[i];
        if (j < 0 || j >= kNumPhonemeClasses)
            throw ArgumentError("build_report: phoneme index out of range at frame " +
                                std::to_string(i));
        ++r.frames_per_phoneme[j];
        sum_e.row(j) += (d_enhanced.row(i) - d_clean.row(i)).cwiseAbs();
        sum_b.row(j) += (d_baseline.row(i) - d_clean.row(i)).cwiseAbs();
        sum_abs_c.row(j) += d_clean.row(i).cwiseAbs();
    }

    r.per_phoneme_mean_abs =
        Eigen::MatrixXd::Zero(kNumPhonemeClasses, kNumParams);
    r.per_phoneme_improvement.assign(
        kNumPhonemeClasses,
        std::vector<std::optional<double>>(kNumParams, std::nullopt));
    for (int j = 0; j < kNumPhonemeClasses; ++j) {
        const long cnt = r.frames_per_phoneme[j];
        if (cnt == 0) continue;
        for (int k = 0; k < kNumParams; ++k) {
            const double mae_e = sum_e(j, k) / cnt;
            const double mae_b = sum_b(j, k) / cnt;
            r.per_phoneme_mean_abs(j, k) = sum_abs_c(j, k) / cnt;
            r.per_phoneme_improvement[j][k] = improvement_percent(mae_e, mae_b);
        }
    }
    return r;
}

namespace {

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(12);
    ss << v;
    return ss.str();
}

}  // namespace

std::string report_to_csv(const PaapReport& r,
                          const std::string& config_digest) {
    std::ostringstream out;
    if (!config_digest.empty()) out << "# config=" << config_digest << "\n";

    out << "section,phoneme,category,frames";
    for (const auto& p : r.params) out << "," << p;
    out << "\n";

    out << "mae_enhanced,,,";
    for (int k = 0; k < kNumParams; ++k) out << "," << fmt(r.mae_enhanced(k));
    out << "\n";
    out << "mae_baseline,,,";
    for (int k = 0; k < kNumParams; ++k) out << "," << fmt(r.mae_baseline(k));
    out << "\n";
    out << "improvement_percent,,,";
    for (int k = 0; k < kNumParams; ++k) {
        out << ",";
        if (r.improvement_percent[k]) out << fmt(*r.improvement_percent[k]);
    }
    out << "\n";

    for (int j = 0; j < kNumPhonemeClasses; ++j) {
        const std::string& label = r.vocab.labels[j];
        out << "per_phoneme_improvement," << label << ","
            << category_name(phoneme_category(label)) << ","
            << r.frames_per_phoneme[j];
        for (int k = 0; k < kNumParams; ++k) {
            out << ",";
            if (r.per_phoneme_improvement[j][k])
                out << fmt(*r.per_phoneme_improvement[j][k]);
        }
        out << "\n";
    }
    return out.str();
}

std::string report_to_json(const PaapReport& r,
                           const std::string& config_digest) {
    json doc;
    if (!config_digest.empty()) doc["config_digest"] = config_digest;
    doc["params"] = r.params;
    doc["vocab"] = r.vocab.labels;

    auto opt_json = [](const std::optional<double>& v) {
        return v ? json(*v) : json(nullptr);
    };

    json mae_e = json::array(), mae_b = json::array(), imp = json::array();
    for (int k = 0; k < kNumParams; ++k) {
        mae_e.push_back(r.mae_enhanced(k));
        mae_b.push_back(r.mae_baseline(k));
        imp.push_back(opt_json(r.improvement_percent[k]));
    }
    doc["mae_enhanced"] = mae_e;
    doc["mae_baseline"] = mae_b;
    doc["improvement_percent"] = imp;

    json per_ph = json::array();
    for (int j = 0; j < kNumPhonemeClasses; ++j) {
        json entry;
        entry["phoneme"] = r.vocab.labels[j];
        entry["category"] = category_name(phoneme_category(r.vocab.labels[j]));
        entry["frames"] = r.frames_per_phoneme[j];
        json imp_row = json::array(), mean_row = json::array();
        for (int k = 0; k < kNumParams; ++k) {
            imp_row.push_back(opt_json(r.per_phoneme_improvement[j][k]));
            mean_row.push_back(r.per_phoneme_mean_abs(j, k));
        }
        entry["improvement_percent"] = imp_row;
        entry["mean_abs_clean"] = mean_row;
        per_ph.push_back(entry);
    }
    doc["per_phoneme"] = per_ph;
    return doc.dump(2) + "\n";
}

void emit_report(const PaapReport& report, const std::string& path,
                 ReportFormat format, const std::string& config_digest) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open report file for writing: " + path);
    out << (format == ReportFormat::Csv ? report_to_csv(report, config_digest)
                                        : report_to_json(report, config_digest));
    if (!out) throw IoError("write failed: " + path);
}

std::string plot_bar_csv(const PaapReport& r) {
    std::ostringstream out;
    out << "param,improvement_percent\n";
    for (int k = 0; k < kNumParams; ++k) {
        out << r.params[k] << ",";
        if (r.improvement_percent[k]) out << fmt(*r.improvement_percent[k]);
        out << "\n";
    }
    return out.str();
}

std::string plot_scatter_csv(const PaapReport& r,
                             const std::string& param_name) {
    int k = -1;
    for (int i = 0; i < kNumParams; ++i)
        if (r.params[i] == param_name) k = i;
    if (k < 0)
        throw ArgumentError("plot_scatter_csv: unknown parameter " + param_name);

    std::ostringstream out;
    out << "phoneme,category,mean_abs_clean,improvement_percent,frames\n";
    for (int j = 0; j < kNumPhonemeClasses; ++j) {
        if (r.frames_per_phoneme[j] == 0) continue;
        const std::string& label = r.vocab.labels[j];
        out << label << "," << category_name(phoneme_category(label)) << ","
            << fmt(r.per_phoneme_mean_abs(j, k)) << ",";
        if (r.per_phoneme_improvement[j][k])
            out << fmt(*r.per_phoneme_improvement[j][k]);
        out << "," << r.frames_per_phoneme[j] << "\n";
    }
    return out.str();
}

}  // namespace paap
