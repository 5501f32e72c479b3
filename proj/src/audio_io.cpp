#include "paap/audio_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

#include "paap/error.hpp"

namespace paap {

namespace {

constexpr double kPi = std::numbers::pi;

uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) |
           (static_cast<uint32_t>(b[3]) << 24);
}

uint16_t read_u16(std::istream& in) {
    unsigned char b[2];
    in.read(reinterpret_cast<char*>(b), 2);
    return static_cast<uint16_t>(b[0] | (b[1] << 8));
}

void write_u32(std::ostream& out, uint32_t v) {
    char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                 static_cast<char>((v >> 16) & 0xff),
                 static_cast<char>((v >> 24) & 0xff)};
    out.write(b, 4);
}

void write_u16(std::ostream& out, uint16_t v) {
    char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
    out.write(b, 2);
}

double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    return std::sin(kPi * x) / (kPi * x);
}

}  // namespace

double rms(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return std::sqrt(acc / static_cast<double>(x.size()));
}

Waveform read_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open wav file: " + path);

    char riff[4];
    in.read(riff, 4);
    if (!in || std::memcmp(riff, "RIFF", 4) != 0)
        throw FormatError("not a RIFF file: " + path);
    read_u32(in);  // chunk size
    char wave[4];
    in.read(wave, 4);
    if (!in || std::memcmp(wave, "WAVE", 4) != 0)
        throw FormatError("not a WAVE file: " + path);

    uint16_t format = 0, channels = 0, bits = 0;
    uint32_t sample_rate = 0;
    bool have_fmt = false;
    std::vector<char> data;

    while (in) {
        char id[4];
        in.read(id, 4);
        if (!in) break;
        uint32_t size = read_u32(in);
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (size < 16) throw FormatError("truncated fmt chunk: " + path);
            format = read_u16(in);
            channels = read_u16(in);
            sample_rate = read_u32(in);
            read_u32(in);  // byte rate
            read_u16(in);  // block align
            bits = read_u16(in);
            in.seekg(size - 16 + (size & 1), std::ios::cur);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data.resize(size);
            in.read(data.data(), size);
            if (static_cast<uint32_t>(in.gcount()) != size)
                throw FormatError("truncated data chunk: " + path);
            if (size & 1) in.seekg(1, std::ios::cur);
        } else {
            in.seekg(size + (size & 1), std::ios::cur);
        }
    }
    if (!have_fmt) throw FormatError("missing fmt chunk: " + path);
    if (data.empty()) throw FormatError("missing data chunk: " + path);
    if (channels == 0 || sample_rate == 0)
        throw FormatError("invalid fmt fields: " + path);

    const bool pcm16 = (format == 1 && bits == 16);
    const bool f32 = (format == 3 && bits == 32);
    if (!pcm16 && !f32)
        throw FormatError("unsupported wav encoding (format=" +
                          std::to_string(format) + ", bits=" +
                          std::to_string(bits) + "): " + path);

    const std::size_t bytes_per_sample = pcm16 ? 2 : 4;
    const std::size_t n_total = data.size() / (bytes_per_sample * channels);

    Waveform w;
    w.sample_rate_hz = static_cast<int>(sample_rate);
    w.samples.resize(n_total);
    const char* p = data.data();
    for (std::size_t i = 0; i < n_total; ++i) {
        double acc = 0.0;
        for (int c = 0; c < channels; ++c) {
            if (pcm16) {
                int16_t v;
                std::memcpy(&v, p, 2);
                p += 2;
                acc += static_cast<double>(v) / 32768.0;
            } else {
                float v;
                std::memcpy(&v, p, 4);
                p += 4;
                acc += static_cast<double>(v);
            }
        }
        w.samples[i] = acc / channels;
    }
    return w;
}

void write_wav(const std::string& path, const Waveform& w, WavEncoding enc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open wav file for writing: " + path);

    const uint16_t channels = 1;
    const uint16_t bits = (enc == WavEncoding::Pcm16) ? 16 : 32;
    const uint16_t format = (enc == WavEncoding::Pcm16) ? 1 : 3;
    const uint32_t data_size =
        static_cast<uint32_t>(w.samples.size() * bits / 8);

    out.write("RIFF", 4);
    write_u32(out, 36 + data_size);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    write_u32(out, 16);
    write_u16(out, format);
    write_u16(out, channels);
    write_u32(out, static_cast<uint32_t>(w.sample_rate_hz));
    write_u32(out, static_cast<uint32_t>(w.sample_rate_hz) * channels * bits / 8);
    write_u16(out, channels * bits / 8);
    write_u16(out, bits);
    out.write("data", 4);
    write_u32(out, data_size);

    for (double s : w.samples) {
        if (enc == WavEncoding::Pcm16) {
            double scaled = std::round(s * 32768.0);
            scaled = std::clamp(scaled, -32768.0, 32767.0);
            int16_t v = static_cast<int16_t>(scaled);
            char b[2] = {static_cast<char>(v & 0xff),
                         static_cast<char>((v >> 8) & 0xff)};
            out.write(b, 2);
        } else {
            float v = static_cast<float>(s);
            char b[4];
            std::memcpy(b, &v, 4);
            out.write(b, 4);
        }
    }
    if (!out) throw IoError("write failed: " + path);
}

Waveform resample(const Waveform& w, int target_hz) {
    if (target_hz <= 0) throw ArgumentError("resample: target_hz must be > 0");
    if (w.samples.empty()) throw ArgumentError("resample: empty waveform");
    if (target_hz == w.sample_rate_hz) return w;

    const double ratio =
        static_cast<double>(target_hz) / w.sample_rate_hz;
    const std::size_t n_out = static_cast<std::size_t>(
        std::llround(static_cast<double>(w.samples.size()) * ratio));

    // Cutoff at the lower Nyquist, in cycles per input sample.
    const double fc = 0.5 * std::min(1.0, ratio);
    const double half_width = 32.0 / std::min(1.0, ratio);
    const int k_max = static_cast<int>(std::ceil(half_width));
    const std::size_t n_in = w.samples.size();

    Waveform out;
    out.sample_rate_hz = target_hz;
    out.samples.resize(n_out);
    for (std::size_t n = 0; n < n_out; ++n) {
        const double center = static_cast<double>(n) / ratio;
        const int k0 = static_cast<int>(std::floor(center)) - k_max;
        const int k1 = static_cast<int>(std::floor(center)) + k_max + 1;
        double acc = 0.0;
        for (int k = std::max(k0, 0);
             k <= std::min(k1, static_cast<int>(n_in) - 1); ++k) {
            const double t = k - center;
            // Hann-windowed sinc kernel.
            const double win = 0.5 + 0.5 * std::cos(kPi * t / (k_max + 1));
            acc += w.samples[k] * 2.0 * fc * sinc(2.0 * fc * t) * win;
        }
        out.samples[n] = acc;
    }
    return out;
}

Waveform mix_at_snr(const Waveform& clean, const Waveform& noise,
                    double snr_db) {
    if (clean.sample_rate_hz != noise.sample_rate_hz)
        throw ArgumentError("mix_at_snr: sample rates differ");
    if (noise.samples.size() < clean.samples.size())
        throw ArgumentError("mix_at_snr: noise shorter than clean");

    const std::size_t n = clean.samples.size();
    std::vector<double> noise_cut(noise.samples.begin(),
                                  noise.samples.begin() + n);
    const double rms_c = rms(clean.samples);
    const double rms_n = rms(noise_cut);
    if (rms_c == 0.0)
        throw DegenerateSignalError("mix_at_snr: clean signal is all zeros");
    if (rms_n == 0.0)
        throw DegenerateSignalError("mix_at_snr: noise signal is all zeros");

    const double gain = (rms_c / rms_n) * std::pow(10.0, -snr_db / 20.0);
    Waveform out;
    out.sample_rate_hz = clean.sample_rate_hz;
    out.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.samples[i] = clean.samples[i] + gain * noise_cut[i];
    return out;
}

}  // namespace paap
