#include "doctest.h"

#include <cmath>
#include <cstring>
#include <fstream>

#include "paap/audio_io.hpp"
#include "paap/dsp_core.hpp"
#include "paap/error.hpp"
#include "test_util.hpp"

using namespace paap;
using namespace paap::testutil;

namespace {

// Minimal hand-rolled stereo PCM16 writer for parser tests.
void write_stereo_pcm16(const std::string& path, int sr,
                        const std::vector<int16_t>& left,
                        const std::vector<int16_t>& right) {
    std::ofstream out(path, std::ios::binary);
    const uint32_t n = static_cast<uint32_t>(left.size());
    const uint32_t data_size = n * 4;
    auto u32 = [&](uint32_t v) { out.write(reinterpret_cast<char*>(&v), 4); };
    auto u16 = [&](uint16_t v) { out.write(reinterpret_cast<char*>(&v), 2); };
    out.write("RIFF", 4);
    u32(36 + data_size);
    out.write("WAVE", 4);
    out.write("fmt ", 4);
    u32(16);
    u16(1);
    u16(2);
    u32(sr);
    u32(sr * 4);
    u16(4);
    u16(16);
    out.write("data", 4);
    u32(data_size);
    for (uint32_t i = 0; i < n; ++i) {
        u16(static_cast<uint16_t>(left[i]));
        u16(static_cast<uint16_t>(right[i]));
    }
}

}  // namespace

TEST_CASE("read_wav: 1 s of PCM16 silence") {
    TempDir tmp("wav_silence");
    Waveform silence;
    silence.sample_rate_hz = 16000;
    silence.samples.assign(16000, 0.0);
    write_wav(tmp.file("s.wav"), silence);

    const Waveform w = read_wav(tmp.file("s.wav"));
    CHECK(w.sample_rate_hz == 16000);
    REQUIRE(w.samples.size() == 16000);
    for (double s : w.samples) CHECK(s == 0.0);
}

TEST_CASE("read_wav: PCM16 -32768 maps to -1.0") {
    TempDir tmp("wav_scale");
    std::ofstream out(tmp.file("m.wav"), std::ios::binary);
    out.close();
    write_stereo_pcm16(tmp.file("m.wav"), 16000, {-32768}, {-32768});
    const Waveform w = read_wav(tmp.file("m.wav"));
    REQUIRE(w.samples.size() == 1);
    CHECK(w.samples[0] == -1.0);
}

TEST_CASE("read_wav: stereo channels averaged") {
    TempDir tmp("wav_stereo");
    write_stereo_pcm16(tmp.file("st.wav"), 16000, {16384}, {-16384});
    const Waveform w = read_wav(tmp.file("st.wav"));
    REQUIRE(w.samples.size() == 1);
    CHECK(w.samples[0] == 0.0);
}

TEST_CASE("read_wav: malformed header") {
    TempDir tmp("wav_bad");
    std::ofstream out(tmp.file("bad.wav"), std::ios::binary);
    out << "JUNKJUNKJUNKJUNK";
    out.close();
    CHECK_THROWS_AS(read_wav(tmp.file("bad.wav")), FormatError);
}

TEST_CASE("write/read PCM16 round-trip is bit-exact for in-range samples") {
    TempDir tmp("wav_roundtrip");
    Waveform w;
    w.sample_rate_hz = 16000;
    for (int i = -100; i <= 100; ++i)
        w.samples.push_back(static_cast<double>(i * 300) / 32768.0);
    write_wav(tmp.file("r.wav"), w);
    const Waveform back = read_wav(tmp.file("r.wav"));
    REQUIRE(back.samples.size() == w.samples.size());
    for (std::size_t i = 0; i < w.samples.size(); ++i)
        CHECK(back.samples[i] == w.samples[i]);
}

TEST_CASE("float32 round-trip") {
    TempDir tmp("wav_f32");
    const Waveform w = make_sine(440.0, 16000, 1000);
    write_wav(tmp.file("f.wav"), w, WavEncoding::Float32);
    const Waveform back = read_wav(tmp.file("f.wav"));
    REQUIRE(back.samples.size() == w.samples.size());
    for (std::size_t i = 0; i < w.samples.size(); ++i)
        CHECK(back.samples[i] ==
              doctest::Approx(w.samples[i]).epsilon(1e-7));
}

TEST_CASE("resample: 48 kHz to 16 kHz length ratio") {
    const Waveform w = make_sine(440.0, 48000, 48000);
    const Waveform r = resample(w, 16000);
    CHECK(r.sample_rate_hz == 16000);
    CHECK(r.samples.size() == 16000);
}

TEST_CASE("resample: identity at same rate") {
    const Waveform w = make_sine(440.0, 16000, 8000);
    const Waveform r = resample(w, 16000);
    REQUIRE(r.samples.size() == w.samples.size());
    for (std::size_t i = 0; i < w.samples.size(); ++i)
        CHECK(r.samples[i] == w.samples[i]);
}

TEST_CASE("resample: 440 Hz sine keeps its dominant STFT bin in Hz") {
    const Waveform w48 = make_sine(440.0, 48000, 48000);
    const Waveform w16 = resample(w48, 16000);

    FrameSpec spec;
    const Spectrogram s = stft(w16, spec);
    const int mid = s.n_frames() / 2;
    int peak = 0;
    for (int b = 1; b < s.n_bins(); ++b)
        if (s.frames(mid, b) > s.frames(mid, peak)) peak = b;
    const double peak_hz = s.bin_hz(peak);
    // 440 Hz lands between bins 14 (437.5) and 15 (468.75).
    CHECK(std::abs(peak_hz - 440.0) < 16000.0 / 512.0);
}

TEST_CASE("resample: invalid target rate") {
    const Waveform w = make_sine(440.0, 16000, 1000);
    CHECK_THROWS_AS(resample(w, 0), ArgumentError);
}

TEST_CASE("resample: down-up round trip stays within -40 dB") {
    // Band-limited content well below the 8 kHz intermediate Nyquist.
    Waveform w = make_sine(440.0, 32000, 32000, 0.3);
    const Waveform w2 = make_sine(1313.0, 32000, 32000, 0.2, 0.7);
    for (std::size_t i = 0; i < w.samples.size(); ++i)
        w.samples[i] += w2.samples[i];

    const Waveform down = resample(w, 16000);
    const Waveform up = resample(down, 32000);

    double err = 0.0, ref = 0.0;
    // Skip filter edges.
    for (std::size_t i = 200; i + 200 < w.samples.size() &&
                              i + 200 < up.samples.size();
         ++i) {
        err += (up.samples[i] - w.samples[i]) * (up.samples[i] - w.samples[i]);
        ref += w.samples[i] * w.samples[i];
    }
    CHECK(10.0 * std::log10(err / ref) < -40.0);
}

TEST_CASE("mix_at_snr: gain formula instantiation") {
    // Equal RMS, 20 dB -> g = 0.1; the noise contribution shrinks 10x.
    const Waveform clean = make_sine(440.0, 16000, 16000, 0.1 * std::sqrt(2.0));
    Waveform noise = make_sine(997.0, 16000, 16000, 0.1 * std::sqrt(2.0));
    const Waveform mixed = mix_at_snr(clean, noise, 20.0);

    std::vector<double> residual(mixed.samples.size());
    for (std::size_t i = 0; i < residual.size(); ++i)
        residual[i] = mixed.samples[i] - clean.samples[i];
    const double g = rms(residual) / rms(noise.samples);
    CHECK(g == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("mix_at_snr: 0 dB with equal RMS gives unit gain") {
    const Waveform clean = make_sine(440.0, 16000, 16000, 0.2);
    const Waveform noise = make_sine(1000.0, 16000, 16000, 0.2);
    const Waveform mixed = mix_at_snr(clean, noise, 0.0);
    for (std::size_t i = 0; i < mixed.samples.size(); ++i)
        CHECK(mixed.samples[i] ==
              doctest::Approx(clean.samples[i] + noise.samples[i])
                  .epsilon(1e-9));
}

TEST_CASE("mix_at_snr: measured SNR matches the request") {
    const Waveform clean = make_sine(440.0, 16000, 16000, 0.4);
    const Waveform noise = make_noise(16000, 16000, 1234);
    const Waveform mixed = mix_at_snr(clean, noise, 10.0);

    std::vector<double> scaled_noise(mixed.samples.size());
    for (std::size_t i = 0; i < scaled_noise.size(); ++i)
        scaled_noise[i] = mixed.samples[i] - clean.samples[i];
    const double snr = 20.0 * std::log10(rms(clean.samples) /
                                         rms(scaled_noise));
    CHECK(snr == doctest::Approx(10.0).epsilon(1e-6));
}

TEST_CASE("mix_at_snr: degenerate and mismatched inputs") {
    Waveform zeros;
    zeros.samples.assign(1000, 0.0);
    const Waveform clean = make_sine(440.0, 16000, 1000);
    CHECK_THROWS_AS(mix_at_snr(zeros, clean, 10.0), DegenerateSignalError);
    CHECK_THROWS_AS(mix_at_snr(clean, zeros, 10.0), DegenerateSignalError);

    Waveform short_noise = make_noise(16000, 500, 1);
    CHECK_THROWS_AS(mix_at_snr(clean, short_noise, 10.0), ArgumentError);

    Waveform wrong_rate = make_noise(8000, 2000, 1);
    CHECK_THROWS_AS(mix_at_snr(clean, wrong_rate, 10.0), ArgumentError);
}

TEST_CASE("mix_at_snr: linear in the clean signal") {
    const Waveform clean = make_sine(330.0, 16000, 8000, 0.3);
    const Waveform noise = make_noise(16000, 8000, 7);
    Waveform scaled = clean;
    for (double& s : scaled.samples) s *= 0.35;

    const Waveform mix1 = mix_at_snr(clean, noise, 12.0);
    const Waveform mix2 = mix_at_snr(scaled, noise, 12.0);
    // g scales with the clean RMS, so mix(a*clean) = a*clean + a*g*noise.
    for (std::size_t i = 0; i < clean.samples.size(); ++i) {
        const double expected =
            0.35 * (mix1.samples[i] - clean.samples[i]) + scaled.samples[i];
        CHECK(mix2.samples[i] == doctest::Approx(expected).epsilon(1e-9));
    }
}
