#ifndef PAAP_AUDIO_IO_HPP
#define PAAP_AUDIO_IO_HPP

#include <string>
#include <vector>

namespace paap {

constexpr int kCanonicalSampleRate = 16000;

struct Waveform {
    std::vector<double> samples;  // mono, in [-1, 1]
    int sample_rate_hz = kCanonicalSampleRate;

    std::size_t size() const { return samples.size(); }
    double duration_s() const {
        return static_cast<double>(samples.size()) / sample_rate_hz;
    }
};

enum class WavEncoding { Pcm16, Float32 };

// Reads RIFF/WAVE (PCM16 or IEEE float32), averages channels to mono,
// scales PCM16 by 1/32768.
Waveform read_wav(const std::string& path);

void write_wav(const std::string& path, const Waveform& w,
               WavEncoding enc = WavEncoding::Pcm16);

// Band-limited windowed-sinc resampling. Identity when rates match.
Waveform resample(const Waveform& w, int target_hz);

// clean + g * noise with g = (rms(clean)/rms(noise)) * 10^(-snr_db/20).
// Noise is truncated to the clean length; shorter noise is an error.
Waveform mix_at_snr(const Waveform& clean, const Waveform& noise,
                    double snr_db);

double rms(const std::vector<double>& x);

}  // namespace paap

#endif
