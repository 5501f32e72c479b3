#ifndef PAAP_ANALYSIS_HPP
#define PAAP_ANALYSIS_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "paap/lld_extractor.hpp"
#include "paap/phoneme_align.hpp"

namespace paap {

// Articulatory category of a phoneme label (place of articulation for
// consonants; vowels, /HH/, and silence kept separate for plotting).
enum class PhonemeCategory { Vowel, Dorsal, Labial, Coronal, Laryngeal, Silence };

PhonemeCategory phoneme_category(const std::string& label);
std::string category_name(PhonemeCategory c);

struct PaapReport {
    PhonemeVocab vocab;
    std::vector<std::string> params;

    Eigen::VectorXd mae_enhanced;  // 25
    Eigen::VectorXd mae_baseline;  // 25
    // Percent reduction in MAE; nullopt where the baseline MAE is zero.
    std::vector<std::optional<double>> improvement_percent;  // 25

    // 41 x 25; nullopt where a phoneme has no frames or zero baseline MAE.
    std::vector<std::vector<std::optional<double>>> per_phoneme_improvement;
    Eigen::MatrixXd per_phoneme_mean_abs;  // 41 x 25, mean |clean| value
    std::vector<long> frames_per_phoneme;  // 41
};

// Column-wise mean absolute error.
Eigen::VectorXd mae_per_param(const Eigen::MatrixXd& d_enhanced,
                              const Eigen::MatrixXd& d_clean);

// (mae_baseline - mae_enhanced) / mae_baseline * 100; positive means the
// enhanced signal is closer to clean. nullopt when mae_baseline is 0.
std::optional<double> improvement_percent(double mae_enhanced,
                                          double mae_baseline);

// Builds the full report from stacked corpus matrices (rows across all
// utterances, concatenated in order).
PaapReport build_report(const Eigen::MatrixXd& d_enhanced,
                        const Eigen::MatrixXd& d_baseline,
                        const Eigen::MatrixXd& d_clean,
                        const std::vector<int>& phoneme_idx,
                        const PhonemeVocab& vocab);

enum class ReportFormat { Csv, Json };

void emit_report(const PaapReport& report, const std::string& path,
                 ReportFormat format, const std::string& config_digest = "");
std::string report_to_json(const PaapReport& report,
                           const std::string& config_digest = "");
std::string report_to_csv(const PaapReport& report,
                          const std::string& config_digest = "");

// Plot data series: improvement bars per parameter, and a per-phoneme
// scatter (mean clean value vs improvement, tagged with articulatory
// category) for the named parameter.
std::string plot_bar_csv(const PaapReport& report);
std::string plot_scatter_csv(const PaapReport& report,
                             const std::string& param_name);

}  // namespace paap

#endif
