#include "paap/dsp_core.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "paap/error.hpp"

namespace paap {

namespace {

constexpr double kPi = std::numbers::pi;

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) {
    return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0);
}

// Mirror index into [0, n) without repeating the edge sample.
std::size_t reflect_index(long long i, long long n) {
    if (n == 1) return 0;
    const long long period = 2 * (n - 1);
    long long m = i % period;
    if (m < 0) m += period;
    if (m >= n) m = period - m;
    return static_cast<std::size_t>(m);
}

}  // namespace

void FrameSpec::validate() const {
    if (hop <= 0 || win <= 0 || fft_size <= 0)
        throw ArgumentError("FrameSpec: hop, win, fft_size must be positive");
    if (hop > win) throw ArgumentError("FrameSpec: hop must be <= win");
    if (win > fft_size) throw ArgumentError("FrameSpec: win must be <= fft_size");
}

std::vector<double> hann_window(int n) {
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i)
        w[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * i / n);
    return w;
}

std::vector<double> frame_at(const std::vector<double>& x,
                             const FrameSpec& spec, int frame_index) {
    const long long n = static_cast<long long>(x.size());
    const long long start =
        static_cast<long long>(frame_index) * spec.hop - spec.win / 2;
    std::vector<double> frame(spec.win);
    for (int i = 0; i < spec.win; ++i)
        frame[i] = x[reflect_index(start + i, n)];
    return frame;
}

Spectrogram stft(const Waveform& w, const FrameSpec& spec) {
    spec.validate();
    if (w.samples.empty()) throw ArgumentError("stft: empty waveform");

    const int n_frames = spec.n_frames(w.samples.size());
    const int n_bins = spec.n_bins();
    const std::vector<double> window = hann_window(spec.win);

    Spectrogram out;
    out.spec = spec;
    out.sample_rate_hz = w.sample_rate_hz;
    out.frames.resize(n_frames, n_bins);

    Eigen::FFT<double> fft;
    std::vector<double> buf(spec.fft_size, 0.0);
    std::vector<std::complex<double>> spectrum;
    for (int f = 0; f < n_frames; ++f) {
        std::vector<double> frame = frame_at(w.samples, spec, f);
        std::fill(buf.begin(), buf.end(), 0.0);
        for (int i = 0; i < spec.win; ++i) buf[i] = frame[i] * window[i];
        fft.fwd(spectrum, buf);
        for (int b = 0; b < n_bins; ++b) out.frames(f, b) = std::abs(spectrum[b]);
    }
    return out;
}

Eigen::MatrixXd mel_filterbank(int n_mels, double fmin_hz, double fmax_hz,
                               const FrameSpec& spec, int sample_rate_hz) {
    if (n_mels < 1) throw ArgumentError("mel_filterbank: n_mels must be >= 1");
    if (fmin_hz < 0.0 || fmin_hz >= fmax_hz ||
        fmax_hz > sample_rate_hz / 2.0 + 1e-9)
        throw ArgumentError("mel_filterbank: need 0 <= fmin < fmax <= sr/2");

    const int n_bins = spec.n_bins();
    const double mel_lo = hz_to_mel(fmin_hz);
    const double mel_hi = hz_to_mel(fmax_hz);

    std::vector<double> edges(n_mels + 2);
    for (int i = 0; i < n_mels + 2; ++i)
        edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * i / (n_mels + 1));

    Eigen::MatrixXd fb = Eigen::MatrixXd::Zero(n_mels, n_bins);
    for (int m = 0; m < n_mels; ++m) {
        const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
        for (int b = 0; b < n_bins; ++b) {
            const double f =
                static_cast<double>(b) * sample_rate_hz / spec.fft_size;
            if (f <= lo || f >= hi) continue;
            fb(m, b) = (f <= mid) ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
        }
    }
    return fb;
}

LpcResult levinson_durbin(const std::vector<double>& autocorr) {
    if (autocorr.size() < 2)
        throw ArgumentError("levinson_durbin: need at least autocorr[0..1]");
    if (autocorr[0] <= 0.0)
        throw DegenerateSignalError("levinson_durbin: autocorr[0] must be > 0");

    const int p = static_cast<int>(autocorr.size()) - 1;
    LpcResult res;
    res.coeffs.assign(p, 0.0);
    res.gain = autocorr[0];
    res.stable_order = 0;

    std::vector<double> a(p, 0.0), prev(p, 0.0);
    double err = autocorr[0];
    for (int m = 1; m <= p; ++m) {
        double acc = autocorr[m];
        for (int i = 1; i < m; ++i) acc -= a[i - 1] * autocorr[m - i];
        const double k = acc / err;
        if (!std::isfinite(k) || std::abs(k) >= 1.0) break;  // truncate here

        prev = a;
        a[m - 1] = k;
        for (int i = 1; i < m; ++i) a[i - 1] = prev[i - 1] - k * prev[m - 1 - i];
        err *= (1.0 - k * k);
        res.coeffs = a;
        res.gain = err;
        res.stable_order = m;
    }
    return res;
}

std::vector<double> dct2(const std::vector<double>& x, int n_out) {
    const int n = static_cast<int>(x.size());
    if (n < 1) throw ArgumentError("dct2: empty input");
    if (n_out < 1 || n_out > n)
        throw ArgumentError("dct2: n_out must be in [1, n]");

    std::vector<double> y(n_out);
    for (int k = 0; k < n_out; ++k) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
            acc += x[i] * std::cos(kPi * (i + 0.5) * k / n);
        const double scale = (k == 0) ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
        y[k] = scale * acc;
    }
    return y;
}

}  // namespace paap
