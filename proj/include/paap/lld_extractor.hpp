#ifndef PAAP_LLD_EXTRACTOR_HPP
#define PAAP_LLD_EXTRACTOR_HPP

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

#include "paap/dsp_core.hpp"

namespace paap {

constexpr int kNumParams = 25;

// Canonical column order of the acoustic parameter matrix.
const std::array<std::string, kNumParams>& param_names();

struct AcousticParamMatrix {
    Eigen::MatrixXd values;  // n_frames x 25
    FrameSpec frame_spec;

    int n_frames() const { return static_cast<int>(values.rows()); }
};

struct VoicingTrack {
    std::vector<double> f0_hz;        // 0 when unvoiced
    std::vector<bool> voiced;
    std::vector<double> confidence;   // normalized ACF peak, [0, 1]

    int n_frames() const { return static_cast<int>(f0_hz.size()); }
};

// Pitch search range and voicing threshold (autocorrelation method).
constexpr double kF0MinHz = 55.0;
constexpr double kF0MaxHz = 600.0;
constexpr double kVoicingThreshold = 0.45;
constexpr double kSemitoneFloorHz = 27.5;
constexpr double kSpectralFloor = 1e-10;
constexpr int kNumMelBands = 26;
constexpr int kLpcOrder = 12;

double hz_to_semitone(double f0_hz);

VoicingTrack extract_f0(const Waveform& w, const FrameSpec& spec);

struct PerturbationTracks {
    std::vector<double> jitter;      // relative period perturbation
    std::vector<double> shimmer_db;  // peak amplitude perturbation, dB
};

PerturbationTracks extract_perturbation(const Waveform& w,
                                        const FrameSpec& spec,
                                        const VoicingTrack& v);

std::vector<double> extract_loudness(const Spectrogram& spect);

struct SpectralTracks {
    std::vector<double> alpha_ratio;
    std::vector<double> hammarberg_index;
    std::vector<double> slope_0_500;
    std::vector<double> slope_500_1500;
    std::vector<double> spectral_flux;
    std::vector<double> h1_h2;
    std::vector<double> h1_a3;
    std::vector<double> hnr_db;
};

SpectralTracks extract_spectral(const Spectrogram& spect,
                                const VoicingTrack& v);

// Rows: frames; columns: mfcc1..mfcc4 (coefficient 0 excluded).
Eigen::MatrixXd extract_mfcc(const Spectrogram& spect);

struct FormantTracks {
    // Each n_frames x 3 (F1..F3); zeros where a formant is missing.
    Eigen::MatrixXd freq_hz;
    Eigen::MatrixXd bandwidth_hz;
    Eigen::MatrixXd ampl_rel_f0_db;
};

FormantTracks extract_formants(const Waveform& w, const FrameSpec& spec,
                               const VoicingTrack& v);

// Assembles all 25 columns in canonical order.
AcousticParamMatrix extract_all(const Waveform& w, const FrameSpec& spec);

}  // namespace paap

#endif
