#ifndef PAAP_AP_WEIGHTS_HPP
#define PAAP_AP_WEIGHTS_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "paap/lld_extractor.hpp"
#include "paap/phoneme_align.hpp"

namespace paap {

constexpr double kDefaultRidgeLambda = 1e-4;

// Closed-form acoustic-phonetic weights: 25 parameter rows + 1 bias row,
// one column per phoneme class.
struct APWeights {
    Eigen::MatrixXd values;  // 26 x 41
    PhonemeVocab vocab;
    std::vector<std::string> params;
    double ridge_lambda = kDefaultRidgeLambda;
};

// Appends a constant-1 bias column.
Eigen::MatrixXd augment_bias(const Eigen::MatrixXd& d);

// Solves (X'X + lambda*I~) w = X'Y over the row-stacked utterances,
// with the bias row unpenalized. lambda = 0 requires full rank.
APWeights fit_weights(const std::vector<AcousticParamMatrix>& d_list,
                      const std::vector<PhonemeLogits>& p_list,
                      double ridge_lambda = kDefaultRidgeLambda);

void save_weights(const std::string& path, const APWeights& w);
APWeights load_weights_json(const std::string& path);

}  // namespace paap

#endif
