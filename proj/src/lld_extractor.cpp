#include "paap/lld_extractor.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "paap/error.hpp"

namespace paap {

namespace {

constexpr double kPi = std::numbers::pi;

double db_pow(double ratio) { return 10.0 * std::log10(ratio); }
double db_amp(double ratio) { return 20.0 * std::log10(ratio); }

struct PeakInterp {
    double pos;  // sub-sample offset relative to the integer peak
    double val;
};

// Parabolic refinement through (y0, y1, y2) around the center sample.
PeakInterp parabolic(double y0, double y1, double y2) {
    const double denom = y0 - 2.0 * y1 + y2;
    if (std::abs(denom) < 1e-30) return {0.0, y1};
    double d = 0.5 * (y0 - y2) / denom;
    d = std::clamp(d, -0.5, 0.5);
    return {d, y1 - 0.25 * (y0 - y2) * d};
}

// Band energy from squared magnitudes over [lo_hz, hi_hz).
double band_energy(const Spectrogram& s, int frame, double lo_hz,
                   double hi_hz) {
    double acc = 0.0;
    for (int b = 0; b < s.n_bins(); ++b) {
        const double f = s.bin_hz(b);
        if (f >= lo_hz && f < hi_hz) acc += s.frames(frame, b) * s.frames(frame, b);
    }
    return acc;
}

double band_max_mag(const Spectrogram& s, int frame, double lo_hz,
                    double hi_hz) {
    double best = 0.0;
    for (int b = 0; b < s.n_bins(); ++b) {
        const double f = s.bin_hz(b);
        if (f >= lo_hz && f < hi_hz) best = std::max(best, s.frames(frame, b));
    }
    return best;
}

// Least-squares slope of dB magnitude vs frequency over a band.
double spectral_slope(const Spectrogram& s, int frame, double lo_hz,
                      double hi_hz) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int b = 0; b < s.n_bins(); ++b) {
        const double f = s.bin_hz(b);
        if (f < lo_hz || f > hi_hz) continue;
        const double y = db_amp(s.frames(frame, b) + kSpectralFloor);
        sx += f;
        sy += y;
        sxx += f * f;
        sxy += f * y;
        ++n;
    }
    if (n < 2) return 0.0;
    const double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-30) return 0.0;
    return (n * sxy - sx * sy) / denom;
}

// Magnitude of harmonic k of f0, peak-picked with parabolic interpolation
// in dB around the expected bin.
double harmonic_magnitude(const Spectrogram& s, int frame, double f0_hz,
                          int harmonic) {
    const double target = f0_hz * harmonic;
    if (target >= s.sample_rate_hz / 2.0) return 0.0;
    const double bin_f = target * s.spec.fft_size / s.sample_rate_hz;
    const int b0 = std::max(1, static_cast<int>(std::lround(bin_f)) - 2);
    const int b1 =
        std::min(s.n_bins() - 2, static_cast<int>(std::lround(bin_f)) + 2);
    if (b0 > b1) return 0.0;
    int best = b0;
    for (int b = b0; b <= b1; ++b)
        if (s.frames(frame, b) > s.frames(frame, best)) best = b;
    const double y0 = db_amp(s.frames(frame, best - 1) + kSpectralFloor);
    const double y1 = db_amp(s.frames(frame, best) + kSpectralFloor);
    const double y2 = db_amp(s.frames(frame, best + 1) + kSpectralFloor);
    return std::pow(10.0, parabolic(y0, y1, y2).val / 20.0);
}

// Positive peaks above 0.6 of the frame maximum, separated by at least
// min_sep samples, refined by parabolic interpolation.
struct Peak {
    double pos;
    double amp;
};

std::vector<Peak> pick_period_peaks(const std::vector<double>& frame,
                                    double min_sep) {
    const int n = static_cast<int>(frame.size());
    double peak_max = 0.0;
    for (double v : frame) peak_max = std::max(peak_max, v);
    if (peak_max <= 0.0) return {};
    const double thresh = 0.6 * peak_max;

    std::vector<Peak> peaks;
    for (int i = 1; i + 1 < n; ++i) {
        if (frame[i] < thresh) continue;
        if (frame[i] < frame[i - 1] || frame[i] <= frame[i + 1]) continue;
        const PeakInterp pi = parabolic(frame[i - 1], frame[i], frame[i + 1]);
        const Peak p{i + pi.pos, pi.val};
        if (!peaks.empty() && p.pos - peaks.back().pos < min_sep) {
            if (p.amp > peaks.back().amp) peaks.back() = p;
        } else {
            peaks.push_back(p);
        }
    }
    return peaks;
}

}  // namespace

const std::array<std::string, kNumParams>& param_names() {
    static const std::array<std::string, kNumParams> names = {
        "F0semitone",     "jitterLocal",     "shimmerLocaldB",
        "loudness",       "HNRdBACF",        "alphaRatio",
        "hammarbergIndex", "slope0-500",     "slope500-1500",
        "spectralFlux",   "mfcc1",           "mfcc2",
        "mfcc3",          "mfcc4",           "F1freq",
        "F1bw",           "F1amplLogRelF0",  "F2freq",
        "F2bw",           "F2amplLogRelF0",  "F3freq",
        "F3bw",           "F3amplLogRelF0",  "logRelF0-H1-H2",
        "logRelF0-H1-A3"};
    return names;
}

double hz_to_semitone(double f0_hz) {
    return 12.0 * std::log2(f0_hz / kSemitoneFloorHz);
}

VoicingTrack extract_f0(const Waveform& w, const FrameSpec& spec) {
    spec.validate();
    if (w.samples.empty()) throw ArgumentError("extract_f0: empty waveform");

    const int sr = w.sample_rate_hz;
    const int n_frames = spec.n_frames(w.samples.size());
    const int lag_min = std::max(2, static_cast<int>(sr / kF0MaxHz));
    const int lag_max =
        std::min(spec.win - 2, static_cast<int>(std::ceil(sr / kF0MinHz)));

    VoicingTrack v;
    v.f0_hz.assign(n_frames, 0.0);
    v.voiced.assign(n_frames, false);
    v.confidence.assign(n_frames, 0.0);

    std::vector<double> r(lag_max + 2, 0.0);
    for (int fi = 0; fi < n_frames; ++fi) {
        std::vector<double> frame = frame_at(w.samples, spec, fi);
        const double mean =
            std::accumulate(frame.begin(), frame.end(), 0.0) / frame.size();
        for (double& s : frame) s -= mean;

        double energy = 0.0;
        for (double s : frame) energy += s * s;
        if (energy < 1e-12) continue;  // silence stays unvoiced

        // Normalized cross-correlation per lag.
        for (int lag = lag_min - 1; lag <= lag_max + 1; ++lag) {
            double num = 0.0, e0 = 0.0, e1 = 0.0;
            const int n = spec.win - lag;
            for (int i = 0; i < n; ++i) {
                num += frame[i] * frame[i + lag];
                e0 += frame[i] * frame[i];
                e1 += frame[i + lag] * frame[i + lag];
            }
            const double denom = std::sqrt(e0 * e1);
            r[lag] = (denom > 1e-20) ? num / denom : 0.0;
        }

        double r_max = 0.0;
        for (int lag = lag_min; lag <= lag_max; ++lag)
            r_max = std::max(r_max, r[lag]);
        if (r_max < kVoicingThreshold) {
            v.confidence[fi] = std::max(0.0, r_max);
            continue;
        }

        // First local maximum close to the global one avoids octave errors.
        int best = 0;
        for (int lag = lag_min; lag <= lag_max; ++lag) {
            if (r[lag] >= 0.85 * r_max && r[lag] >= r[lag - 1] &&
                r[lag] > r[lag + 1]) {
                best = lag;
                break;
            }
        }
        if (best == 0) continue;

        const PeakInterp pi = parabolic(r[best - 1], r[best], r[best + 1]);
        const double lag_refined = best + pi.pos;
        const double f0 = sr / lag_refined;
        if (f0 < kF0MinHz || f0 > kF0MaxHz) continue;

        v.f0_hz[fi] = f0;
        v.voiced[fi] = true;
        v.confidence[fi] = std::clamp(pi.val, 0.0, 1.0);
    }
    return v;
}

PerturbationTracks extract_perturbation(const Waveform& w,
                                        const FrameSpec& spec,
                                        const VoicingTrack& v) {
    const int n_frames = v.n_frames();
    PerturbationTracks out;
    out.jitter.assign(n_frames, 0.0);
    out.shimmer_db.assign(n_frames, 0.0);

    const double lag_min_global = w.sample_rate_hz / kF0MaxHz;
    for (int fi = 0; fi < n_frames; ++fi) {
        if (!v.voiced[fi]) continue;
        const double period = w.sample_rate_hz / v.f0_hz[fi];
        const double min_sep = std::max(lag_min_global, 0.4 * period);

        std::vector<double> frame = frame_at(w.samples, spec, fi);
        const std::vector<Peak> peaks = pick_period_peaks(frame, min_sep);
        if (peaks.size() < 4) continue;  // need at least 3 periods

        std::vector<double> periods;
        for (std::size_t i = 1; i < peaks.size(); ++i)
            periods.push_back(peaks[i].pos - peaks[i - 1].pos);

        double period_mean = 0.0;
        for (double t : periods) period_mean += t;
        period_mean /= periods.size();

        double jitter_acc = 0.0;
        for (std::size_t i = 1; i < periods.size(); ++i)
            jitter_acc += std::abs(periods[i] - periods[i - 1]);
        if (period_mean > 0.0 && periods.size() > 1)
            out.jitter[fi] = jitter_acc / (periods.size() - 1) / period_mean;

        double shimmer_acc = 0.0;
        int shimmer_n = 0;
        for (std::size_t i = 1; i < peaks.size(); ++i) {
            if (peaks[i].amp <= 0.0 || peaks[i - 1].amp <= 0.0) continue;
            shimmer_acc += std::abs(db_amp(peaks[i].amp / peaks[i - 1].amp));
            ++shimmer_n;
        }
        if (shimmer_n > 0) out.shimmer_db[fi] = shimmer_acc / shimmer_n;
    }
    return out;
}

std::vector<double> extract_loudness(const Spectrogram& spect) {
    const Eigen::MatrixXd fb =
        mel_filterbank(kNumMelBands, 20.0, spect.sample_rate_hz / 2.0,
                       spect.spec, spect.sample_rate_hz);
    std::vector<double> out(spect.n_frames(), 0.0);
    for (int fi = 0; fi < spect.n_frames(); ++fi) {
        const Eigen::VectorXd power =
            spect.frames.row(fi).array().square().matrix();
        const Eigen::VectorXd bands = fb * power;
        double acc = 0.0;
        for (int m = 0; m < kNumMelBands; ++m)
            acc += std::pow(std::max(bands(m), 0.0), 0.3);
        out[fi] = acc / kNumMelBands;
    }
    return out;
}

SpectralTracks extract_spectral(const Spectrogram& spect,
                                const VoicingTrack& v) {
    if (spect.n_frames() != v.n_frames())
        throw ArgumentError("extract_spectral: frame count mismatch");

    const int n_frames = spect.n_frames();
    SpectralTracks t;
    t.alpha_ratio.assign(n_frames, 0.0);
    t.hammarberg_index.assign(n_frames, 0.0);
    t.slope_0_500.assign(n_frames, 0.0);
    t.slope_500_1500.assign(n_frames, 0.0);
    t.spectral_flux.assign(n_frames, 0.0);
    t.h1_h2.assign(n_frames, 0.0);
    t.h1_a3.assign(n_frames, 0.0);
    t.hnr_db.assign(n_frames, 0.0);

    Eigen::VectorXd prev_norm;
    for (int fi = 0; fi < n_frames; ++fi) {
        const double e_lo = band_energy(spect, fi, 50.0, 1000.0) + kSpectralFloor;
        const double e_hi = band_energy(spect, fi, 1000.0, 5000.0) + kSpectralFloor;
        t.alpha_ratio[fi] = db_pow(e_lo / e_hi);

        const double m_lo = band_max_mag(spect, fi, 0.0, 2000.0) + kSpectralFloor;
        const double m_hi = band_max_mag(spect, fi, 2000.0, 5000.0) + kSpectralFloor;
        t.hammarberg_index[fi] = db_amp(m_lo / m_hi);

        t.slope_0_500[fi] = spectral_slope(spect, fi, 0.0, 500.0);
        t.slope_500_1500[fi] = spectral_slope(spect, fi, 500.0, 1500.0);

        const double total = spect.frames.row(fi).sum();
        Eigen::VectorXd norm = spect.frames.row(fi).transpose() /
                               (total > kSpectralFloor ? total : 1.0);
        if (fi > 0) t.spectral_flux[fi] = (norm - prev_norm).squaredNorm();
        prev_norm = std::move(norm);

        if (v.voiced[fi]) {
            const double f0 = v.f0_hz[fi];
            const double h1 = harmonic_magnitude(spect, fi, f0, 1);
            const double h2 = harmonic_magnitude(spect, fi, f0, 2);
            t.h1_h2[fi] = db_amp((h1 + kSpectralFloor) / (h2 + kSpectralFloor));

            // Strongest harmonic in the nominal F3 region.
            double a3 = 0.0;
            for (int k = 1; k * f0 < 4000.0; ++k) {
                if (k * f0 < 2500.0) continue;
                a3 = std::max(a3, harmonic_magnitude(spect, fi, f0, k));
            }
            t.h1_a3[fi] = db_amp((h1 + kSpectralFloor) / (a3 + kSpectralFloor));

            const double rho = std::clamp(v.confidence[fi], 0.0, 1.0 - 1e-12);
            t.hnr_db[fi] = std::clamp(db_pow(rho / (1.0 - rho)), -100.0, 100.0);
        }
    }
    return t;
}

Eigen::MatrixXd extract_mfcc(const Spectrogram& spect) {
    const Eigen::MatrixXd fb =
        mel_filterbank(kNumMelBands, 20.0, spect.sample_rate_hz / 2.0,
                       spect.spec, spect.sample_rate_hz);
    Eigen::MatrixXd out(spect.n_frames(), 4);
    std::vector<double> log_bands(kNumMelBands);
    for (int fi = 0; fi < spect.n_frames(); ++fi) {
        const Eigen::VectorXd power =
            spect.frames.row(fi).array().square().matrix();
        const Eigen::VectorXd bands = fb * power;
        for (int m = 0; m < kNumMelBands; ++m)
            log_bands[m] = std::log(std::max(bands(m), kSpectralFloor));
        const std::vector<double> c = dct2(log_bands, 5);
        for (int k = 0; k < 4; ++k) out(fi, k) = c[k + 1];
    }
    return out;
}

FormantTracks extract_formants(const Waveform& w, const FrameSpec& spec,
                               const VoicingTrack& v) {
    const int n_frames = v.n_frames();
    const int sr = w.sample_rate_hz;
    FormantTracks t;
    t.freq_hz = Eigen::MatrixXd::Zero(n_frames, 3);
    t.bandwidth_hz = Eigen::MatrixXd::Zero(n_frames, 3);
    t.ampl_rel_f0_db = Eigen::MatrixXd::Zero(n_frames, 3);

    const std::vector<double> window = hann_window(spec.win);

    for (int fi = 0; fi < n_frames; ++fi) {
        std::vector<double> frame = frame_at(w.samples, spec, fi);

        // Mild pre-emphasis then window. A stronger coefficient (0.97)
        // drags the lowest pole estimate 50-80 Hz upward at this order.
        constexpr double kPreEmphasis = 0.7;
        for (int i = spec.win - 1; i > 0; --i)
            frame[i] -= kPreEmphasis * frame[i - 1];
        frame[0] *= 1.0 - kPreEmphasis;
        for (int i = 0; i < spec.win; ++i) frame[i] *= window[i];

        std::vector<double> autocorr(kLpcOrder + 1, 0.0);
        for (int lag = 0; lag <= kLpcOrder; ++lag)
            for (int i = 0; i + lag < spec.win; ++i)
                autocorr[lag] += frame[i] * frame[i + lag];
        if (autocorr[0] <= 1e-12) continue;
        autocorr[0] *= 1.0 + 1e-6;  // keeps poles off the unit circle

        const LpcResult lpc = levinson_durbin(autocorr);
        const int order = lpc.stable_order;
        if (order < 2) continue;

        // Companion matrix of z^p - a_1 z^{p-1} - ... - a_p.
        Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(order, order);
        for (int i = 0; i < order; ++i) comp(0, i) = lpc.coeffs[i];
        for (int i = 1; i < order; ++i) comp(i, i - 1) = 1.0;
        const Eigen::EigenSolver<Eigen::MatrixXd> solver(comp);

        struct Candidate {
            double freq, bw;
        };
        std::vector<Candidate> cands;
        for (int i = 0; i < order; ++i) {
            const std::complex<double> r = solver.eigenvalues()(i);
            if (r.imag() <= 0.0) continue;
            const double mag = std::abs(r);
            if (mag <= 1e-12) continue;
            const double freq = std::atan2(r.imag(), r.real()) / (2.0 * kPi) * sr;
            const double bw = -(sr / kPi) * std::log(mag);
            if (freq < 90.0 || freq > 5500.0 || bw >= 600.0) continue;
            cands.push_back({freq, bw});
        }
        std::sort(cands.begin(), cands.end(),
                  [](const Candidate& a, const Candidate& b) {
                      return a.freq < b.freq;
                  });
        // Merge pole pairs closer than 150 Hz; a single strong resonance
        // can split across two model poles.
        for (std::size_t i = 1; i < cands.size();) {
            if (cands[i].freq - cands[i - 1].freq < 150.0) {
                if (cands[i].bw < cands[i - 1].bw) cands[i - 1] = cands[i];
                cands.erase(cands.begin() + i);
            } else {
                ++i;
            }
        }

        // Magnitude of the first harmonic from a direct DFT of the
        // un-preemphasized windowed frame, used as the amplitude reference.
        double h1_mag = 0.0;
        if (v.voiced[fi]) {
            std::vector<double> raw = frame_at(w.samples, spec, fi);
            const double omega = 2.0 * kPi * v.f0_hz[fi] / sr;
            std::complex<double> acc(0.0, 0.0);
            for (int i = 0; i < spec.win; ++i)
                acc += raw[i] * window[i] *
                       std::exp(std::complex<double>(0.0, -omega * i));
            h1_mag = std::abs(acc);
        }

        for (int k = 0; k < 3 && k < static_cast<int>(cands.size()); ++k) {
            t.freq_hz(fi, k) = cands[k].freq;
            t.bandwidth_hz(fi, k) = cands[k].bw;
            if (v.voiced[fi] && h1_mag > 0.0) {
                // Spectral envelope sqrt(gain)/|A| at the formant frequency.
                const double omega = 2.0 * kPi * cands[k].freq / sr;
                std::complex<double> a(1.0, 0.0);
                for (int i = 0; i < order; ++i)
                    a -= lpc.coeffs[i] *
                         std::exp(std::complex<double>(0.0, -omega * (i + 1)));
                const double env =
                    std::sqrt(std::max(lpc.gain, kSpectralFloor)) /
                    std::max(std::abs(a), kSpectralFloor);
                t.ampl_rel_f0_db(fi, k) =
                    db_amp((env + kSpectralFloor) / (h1_mag + kSpectralFloor));
            }
        }
    }
    return t;
}

AcousticParamMatrix extract_all(const Waveform& w, const FrameSpec& spec) {
    spec.validate();
    if (w.samples.empty()) throw ArgumentError("extract_all: empty waveform");

    const Spectrogram spect = stft(w, spec);
    const VoicingTrack v = extract_f0(w, spec);
    const PerturbationTracks pert = extract_perturbation(w, spec, v);
    const std::vector<double> loud = extract_loudness(spect);
    const SpectralTracks spec_tracks = extract_spectral(spect, v);
    const Eigen::MatrixXd mfcc = extract_mfcc(spect);
    const FormantTracks formants = extract_formants(w, spec, v);

    const int n = spect.n_frames();
    AcousticParamMatrix d;
    d.frame_spec = spec;
    d.values = Eigen::MatrixXd::Zero(n, kNumParams);
    for (int i = 0; i < n; ++i) {
        d.values(i, 0) = v.voiced[i] ? hz_to_semitone(v.f0_hz[i]) : 0.0;
        d.values(i, 1) = pert.jitter[i];
        d.values(i, 2) = pert.shimmer_db[i];
        d.values(i, 3) = loud[i];
        d.values(i, 4) = spec_tracks.hnr_db[i];
        d.values(i, 5) = spec_tracks.alpha_ratio[i];
        d.values(i, 6) = spec_tracks.hammarberg_index[i];
        d.values(i, 7) = spec_tracks.slope_0_500[i];
        d.values(i, 8) = spec_tracks.slope_500_1500[i];
        d.values(i, 9) = spec_tracks.spectral_flux[i];
        for (int k = 0; k < 4; ++k) d.values(i, 10 + k) = mfcc(i, k);
        for (int k = 0; k < 3; ++k) {
            d.values(i, 14 + 3 * k) = formants.freq_hz(i, k);
            d.values(i, 15 + 3 * k) = formants.bandwidth_hz(i, k);
            d.values(i, 16 + 3 * k) = formants.ampl_rel_f0_db(i, k);
        }
        d.values(i, 23) = spec_tracks.h1_h2[i];
        d.values(i, 24) = spec_tracks.h1_a3[i];
    }
    return d;
}

}  // namespace paap
