#ifndef PAAP_PAAP_LOSS_HPP
#define PAAP_PAAP_LOSS_HPP

#include <vector>

#include "paap/ap_weights.hpp"

namespace paap {

enum class WeightMode {
    Literal,   // weights applied as fitted; loss may be negative
    Absolute,  // elementwise |w|; loss is non-negative
};

struct PaapLossConfig {
    WeightMode weight_mode = WeightMode::Literal;
    double aux_scale = 0.1;  // factor applied when added to a primary loss
};

// Frame-averaged phoneme-weighted squared descriptor difference. The bias
// row of w never contributes (the augmented difference column is zero).
double paap_loss(const AcousticParamMatrix& d_enhanced,
                 const AcousticParamMatrix& d_clean,
                 const std::vector<int>& phoneme_idx, const APWeights& w,
                 const PaapLossConfig& cfg = {});

struct LossBatchItem {
    const AcousticParamMatrix* d_enhanced;
    const AcousticParamMatrix* d_clean;
    const std::vector<int>* phoneme_idx;
};

struct LossBatchResult {
    std::vector<double> per_utterance;
    double corpus_mean = 0.0;  // frame-count-weighted
};

LossBatchResult paap_loss_batch(const std::vector<LossBatchItem>& items,
                                const APWeights& w,
                                const PaapLossConfig& cfg = {});

}  // namespace paap

#endif
