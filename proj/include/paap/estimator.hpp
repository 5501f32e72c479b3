#ifndef PAAP_ESTIMATOR_HPP
#define PAAP_ESTIMATOR_HPP

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "paap/lld_extractor.hpp"

namespace paap {

// One direction of one LSTM layer; gate rows ordered (input, forget,
// cell, output).
struct LstmLayerWeights {
    Eigen::MatrixXd w_ih;  // 4h x in
    Eigen::MatrixXd w_hh;  // 4h x h
    Eigen::VectorXd b_ih;  // 4h
    Eigen::VectorXd b_hh;  // 4h
};

struct EstimatorWeights {
    int hidden = 512;
    int input_dim = 257;  // fft_size/2 + 1
    int output_dim = kNumParams;
    // [layer][direction], direction 0 = forward, 1 = backward.
    std::vector<std::array<LstmLayerWeights, 2>> layers;
    Eigen::MatrixXd proj_w;  // out x 2h
    Eigen::VectorXd proj_b;  // out

    int n_layers() const { return static_cast<int>(layers.size()); }
    void validate() const;
};

EstimatorWeights load_estimator_weights(const std::string& path);
void save_estimator_weights(const std::string& path,
                            const EstimatorWeights& w);

// Single-direction LSTM over the rows of x (N x in), zero initial state.
// reversed = true processes the rows back to front and un-reverses the
// output.
Eigen::MatrixXd lstm_forward(const Eigen::MatrixXd& x,
                             const LstmLayerWeights& w, bool reversed = false);

// log(|STFT| + 1e-7) frames -> stacked bi-LSTM -> linear projection.
AcousticParamMatrix estimate_params(const Waveform& w,
                                    const EstimatorWeights& weights,
                                    const FrameSpec& spec = {});

constexpr double kLogCompressionEps = 1e-7;

}  // namespace paap

#endif
