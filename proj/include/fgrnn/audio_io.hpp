#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fgrnn/errors.hpp"

namespace fgrnn {

inline constexpr int kCanonicalRate = 22050;
inline constexpr std::size_t kSegmentSamples = 13230;  // 0.6 s at 22050 Hz
inline constexpr std::size_t kSegmentsPerClip = 5;

// Mono audio, amplitudes clamped to [-1, +1].
struct AudioClip {
    std::vector<double> samples;
    int sample_rate = kCanonicalRate;

    double duration_seconds() const {
        return static_cast<double>(samples.size()) / sample_rate;
    }
};

// One 0.6 s window of a clip at the canonical rate.
struct Segment {
    std::vector<double> samples;  // exactly kSegmentSamples
    std::size_t origin_offset = 0;
};

// Parses a RIFF/WAVE file. PCM 16-bit and IEEE float 32-bit only; any
// channel count, downmixed to mono by per-sample channel average.
AudioClip load_wav(const std::string& path);
AudioClip parse_wav(const std::vector<std::uint8_t>& bytes);

// Writes mono 16-bit PCM. Used by the dataset generator and tests.
void save_wav(const std::string& path, const AudioClip& clip);
std::vector<std::uint8_t> encode_wav(const AudioClip& clip);

// Linear-interpolation resampler. Output length floor(n * target / source);
// the first sample is preserved exactly.
AudioClip resample_linear(const AudioClip& clip, int target_rate);

// Splits the first 3.0 s of a canonical-rate clip into 5 contiguous
// 13230-sample segments. Audio past 3.0 s is discarded.
std::vector<Segment> segment_clip(const AudioClip& clip);

}  // namespace fgrnn
