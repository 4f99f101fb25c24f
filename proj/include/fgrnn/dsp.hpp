#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "fgrnn/audio_io.hpp"
#include "fgrnn/matrix.hpp"

namespace fgrnn {

inline constexpr std::size_t kNFft = 2048;
inline constexpr std::size_t kHop = 512;
inline constexpr std::size_t kNumMels = 40;
inline constexpr std::size_t kNumMfcc = 13;
inline constexpr std::size_t kFramesPerSegment = 26;  // 1 + 13230/512
inline constexpr double kLogFloor = 1e-10;

// Complex half-spectrum frames from a hopped, Hann-windowed DFT.
struct Spectrogram {
    std::vector<std::vector<std::complex<double>>> frames;  // F x (n_fft/2 + 1)
    std::size_t n_fft = 0;
    std::size_t hop = 0;
    int sample_rate = kCanonicalRate;

    std::size_t num_frames() const { return frames.size(); }
    std::size_t num_bins() const { return n_fft / 2 + 1; }
};

// Triangular mel filters, one row per filter over the half-spectrum bins.
struct MelFilterbank {
    Matrix weights;  // M x (n_fft/2 + 1)
    int sample_rate = kCanonicalRate;
};

// T x 13 cepstral coefficient matrix; the network input.
struct MfccSequence {
    Matrix coeffs;
};

// mel(f) = 2595 * log10(1 + f/700) and its inverse.
double hz_to_mel(double hz);
double mel_to_hz(double mel);

// In-place radix-2 FFT over a power-of-two-length buffer.
void fft_inplace(std::vector<std::complex<double>>& buf, bool inverse = false);

// Hann-windowed STFT with centered reflect padding; F = 1 + floor(len/hop).
Spectrogram stft(const std::vector<double>& samples, std::size_t n_fft = kNFft,
                 std::size_t hop = kHop, int sample_rate = kCanonicalRate);

// Overlap-add inverse with Hann synthesis window and window-sum
// normalization; returns a signal of the original (pre-padding) length.
std::vector<double> istft(const Spectrogram& spec);

// |z|^2 per bin.
Matrix power_spectrum(const Spectrogram& spec);

MelFilterbank mel_filterbank(std::size_t n_mels, std::size_t n_fft, int sample_rate);

// Orthonormal DCT-II basis matrix (n_out x n_in rows of cosines).
Matrix dct2_basis(std::size_t n_out, std::size_t n_in);

// STFT -> power -> 40 mel filters -> log -> DCT-II -> first 13 coefficients.
// A canonical 13230-sample segment yields a 26x13 matrix.
MfccSequence mfcc_sequence(const Segment& segment);

// Full-clip variant used by tests and the Python bindings; same pipeline
// over an arbitrary-length canonical-rate signal.
MfccSequence mfcc_of_samples(const std::vector<double>& samples);

// Spectral gating: attenuate bins below a per-frequency noise floor
// (mean + 1.5 sigma of the profile, or the clip's own per-bin 10th
// percentile), with a -30 dB attenuation floor and +-2 frame/bin mask
// smoothing.
AudioClip spectral_gate(const AudioClip& clip,
                        const std::optional<AudioClip>& noise_profile = std::nullopt);

}  // namespace fgrnn
