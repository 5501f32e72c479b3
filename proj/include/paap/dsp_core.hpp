#ifndef PAAP_DSP_CORE_HPP
#define PAAP_DSP_CORE_HPP

#include <Eigen/Dense>
#include <vector>

#include "paap/audio_io.hpp"

namespace paap {

struct FrameSpec {
    int hop = 160;       // 10 ms at 16 kHz
    int win = 512;       // 32 ms analysis window
    int fft_size = 512;  // no zero padding by default

    int n_bins() const { return fft_size / 2 + 1; }
    // Frame count under center padding.
    int n_frames(std::size_t n_samples) const {
        return 1 + static_cast<int>(n_samples) / hop;
    }
    void validate() const;
};

struct Spectrogram {
    // n_frames x n_bins magnitudes.
    Eigen::MatrixXd frames;
    FrameSpec spec;
    int sample_rate_hz = kCanonicalSampleRate;

    int n_frames() const { return static_cast<int>(frames.rows()); }
    int n_bins() const { return static_cast<int>(frames.cols()); }
    double bin_hz(int bin) const {
        return static_cast<double>(bin) * sample_rate_hz / spec.fft_size;
    }
};

// Periodic Hann window of the given length.
std::vector<double> hann_window(int n);

// Reflect-padded frame of `win` samples centered at frame_index * hop.
std::vector<double> frame_at(const std::vector<double>& x,
                             const FrameSpec& spec, int frame_index);

// Magnitude STFT with reflect center padding; frame i is centered at
// sample i * hop.
Spectrogram stft(const Waveform& w, const FrameSpec& spec);

// Triangular mel filterbank, n_mels x (fft_size/2+1),
// mel(f) = 2595 * log10(1 + f/700).
Eigen::MatrixXd mel_filterbank(int n_mels, double fmin_hz, double fmax_hz,
                               const FrameSpec& spec, int sample_rate_hz);

struct LpcResult {
    std::vector<double> coeffs;  // a_1..a_p, prediction x[n] ~ sum a_k x[n-k]
    double gain = 0.0;           // residual energy
    int stable_order = 0;        // recursion truncated here if < requested p
};

// Levinson-Durbin recursion on autocorr[0..p]. Reflection coefficients
// with |k| >= 1 stop the recursion at the last stable order.
LpcResult levinson_durbin(const std::vector<double>& autocorr);

// Orthonormal DCT-II, first n_out coefficients.
std::vector<double> dct2(const std::vector<double>& x, int n_out);

}  // namespace paap

#endif
