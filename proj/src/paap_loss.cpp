#include "paap/paap_loss.hpp"

#include <cmath>
#include <string>

#include "paap/error.hpp"

namespace paap {

double paap_loss(const AcousticParamMatrix& d_enhanced,
                 const AcousticParamMatrix& d_clean,
                 const std::vector<int>& phoneme_idx, const APWeights& w,
                 const PaapLossConfig& cfg) {
    const int n = d_clean.n_frames();
    if (n < 1) throw ArgumentError("paap_loss: empty input");
    if (d_enhanced.n_frames() != n ||
        static_cast<int>(phoneme_idx.size()) != n)
        throw ArgumentError("paap_loss: frame counts differ (enhanced " +
                            std::to_string(d_enhanced.n_frames()) + ", clean " +
                            std::to_string(n) + ", indices " +
                            std::to_string(phoneme_idx.size()) + ")");
    if (cfg.aux_scale < 0.0)
        throw ArgumentError("paap_loss: aux_scale must be >= 0");

    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const int j = phoneme_idx[i];
        if (j < 0 || j >= kNumPhonemeClasses)
            throw ArgumentError("paap_loss: phoneme index out of range at frame " +
                                std::to_string(i));
        // Bias component of the augmented difference is identically zero,
        // so only the 25 parameter rows of w_j enter.
        double frame_acc = 0.0;
        for (int k = 0; k < kNumParams; ++k) {
            const double diff = d_enhanced.values(i, k) - d_clean.values(i, k);
            const double wk = (cfg.weight_mode == WeightMode::Absolute)
                                  ? std::abs(w.values(k, j))
                                  : w.values(k, j);
            frame_acc += diff * diff * wk;
        }
        acc += frame_acc;
    }
    return acc / n;
}

LossBatchResult paap_loss_batch(const std::vector<LossBatchItem>& items,
                                const APWeights& w, const PaapLossConfig& cfg) {
    LossBatchResult res;
    double total_sum = 0.0;
    long total_frames = 0;
    for (std::size_t u = 0; u < items.size(); ++u) {
        const auto& it = items[u];
        double loss;
        try {
            loss = paap_loss(*it.d_enhanced, *it.d_clean, *it.phoneme_idx, w,
                             cfg);
        } catch (const ArgumentError& e) {
            throw ArgumentError("utterance " + std::to_string(u) + ": " +
                                e.what());
        }
        const long n = it.d_clean->n_frames();
        res.per_utterance.push_back(loss);
        total_sum += loss * n;
        total_frames += n;
    }
    res.corpus_mean = (total_frames > 0) ? total_sum / total_frames : 0.0;
    return res;
}

}  // namespace paap
